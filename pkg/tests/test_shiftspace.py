import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phimax.errors import AlphabetError, CapExceededError
from phimax.shiftspace import (
    branch,
    concat,
    constant_word,
    enumerate_below,
    enumerate_level,
    first_letters,
    format_word,
    letter_at,
    parse_finite,
    parse_word,
    periodic,
    shift,
    word_index,
    word_metric,
)


@st.composite
def words(draw, size=3):
    prefix = draw(st.lists(st.integers(1, size), max_size=5))
    cycle = draw(st.lists(st.integers(1, size), min_size=1, max_size=4))
    return periodic(prefix, cycle, size)


def test_letter_at_examples():
    w = periodic([1], [2], 2)
    assert letter_at(w, 1) == 1
    assert letter_at(w, 5) == 2
    assert letter_at(periodic([], [1, 2], 2), 4) == 2


def test_letter_at_rejects_zero():
    with pytest.raises(ValueError):
        letter_at(constant_word(1, 2), 0)


def test_word_metric_examples():
    w = periodic([1, 2], [1], 2)
    assert word_metric(w, w) == 0
    assert word_metric(w, periodic([1, 2], [2], 2)) == 1 / 8
    assert word_metric(constant_word(1, 2), constant_word(2, 2)) == 1 / 2


def test_word_metric_alphabet_mismatch():
    with pytest.raises(AlphabetError):
        word_metric(constant_word(1, 2), constant_word(1, 3))


def test_normal_form():
    assert periodic([1, 2], [1, 2], 2) == periodic([], [1, 2], 2)
    assert periodic([], [1, 2, 1, 2], 2) == periodic([], [1, 2], 2)
    assert periodic([2, 1], [2, 1], 2) == periodic([], [2, 1], 2)
    w = periodic([1, 2, 1], [2, 1], 2)
    assert (w.prefix, w.cycle) == ((), (1, 2))


def test_letters_validated():
    with pytest.raises(AlphabetError):
        periodic([3], [1], 2)
    with pytest.raises(AlphabetError):
        periodic([], [1.5], 2)
    with pytest.raises(ValueError):
        periodic([1], [], 2)


def test_shift_examples():
    assert shift(periodic([1], [2], 2)) == periodic([], [2], 2)
    assert shift(periodic([], [1, 2], 2)) == periodic([], [2, 1], 2)


def test_branch_examples():
    assert branch(1, constant_word(2, 2)) == periodic([1], [2], 2)
    assert branch(1, constant_word(1, 2)) == constant_word(1, 2)
    with pytest.raises(AlphabetError):
        branch(3, constant_word(1, 2))


def test_concat_examples():
    w = periodic([2], [1, 3], 3)
    assert concat((), w) == w
    assert concat((1, 2), constant_word(3, 3)) == periodic([1, 2], [3], 3)
    with pytest.raises(AlphabetError):
        concat((4,), w)


def test_enumerate_level():
    assert enumerate_level(2, 0) == [()]
    assert enumerate_level(2, 2) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert len(enumerate_level(3, 2)) == 9
    for k, sigma in enumerate(enumerate_level(3, 4)):
        assert word_index(sigma, 3) == k


def test_enumerate_below():
    assert enumerate_below(2, 1) == [()]
    assert enumerate_below(2, 2) == [(), (1,), (2,)]
    assert len(enumerate_below(2, 3)) == 7


def test_enumeration_cap():
    with pytest.raises(CapExceededError):
        enumerate_level(2, 21)
    with pytest.raises(CapExceededError):
        enumerate_below(10, 7, cap=1000)
    assert len(enumerate_level(2, 10, cap=1024)) == 1024


def test_parse_and_format():
    w = parse_word("12(3)", 3)
    assert w == periodic([1, 2], [3], 3)
    assert format_word(w) == "12(3)"
    assert format_word(parse_word("(1)", 2)) == "(1)"
    big = parse_word("10.2(7)", 12)
    assert (big.prefix, big.cycle) == ((10, 2), (7,))
    assert format_word(big) == "10.2(7)"
    assert parse_finite("", 2) == ()
    assert parse_finite("121", 2) == (1, 2, 1)


@pytest.mark.parametrize("text", ["12", "1(", "(0)", "a(1)", "1(3)", "()"])
def test_parse_errors(text):
    with pytest.raises(AlphabetError):
        parse_word(text, 2)


@settings(max_examples=200, deadline=None)
@given(words())
def test_format_parse_round_trip(w):
    assert parse_word(format_word(w), w.size) == w


@settings(max_examples=200, deadline=None)
@given(words(), words(), words())
def test_metric_axioms(w, v, u):
    assert word_metric(w, v) == word_metric(v, w)
    assert (word_metric(w, v) == 0) == (w == v)
    assert word_metric(w, v) <= max(word_metric(w, u), word_metric(u, v))


@settings(max_examples=200, deadline=None)
@given(words(), words())
def test_normal_form_uniqueness(w, v):
    # oracle: letter-by-letter comparison far beyond the decidability bound
    same = first_letters(w, 60) == first_letters(v, 60)
    assert same == (w == v)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(1, 3), max_size=6), st.lists(st.integers(1, 3), min_size=1, max_size=4))
def test_unnormalized_inputs_expand_correctly(prefix, cycle):
    w = periodic(prefix, cycle, 3)
    expected = (list(prefix) + list(cycle) * 40)[:40]
    assert list(first_letters(w, 40)) == expected


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 3), words())
def test_shift_inverts_branch(i, w):
    assert shift(branch(i, w)) == w


@settings(max_examples=100, deadline=None)
@given(words())
def test_covered_by_branches(w):
    assert branch(letter_at(w, 1), shift(w)) == w


@settings(max_examples=200, deadline=None)
@given(words(), words())
def test_shift_doubles_small_distances(w, v):
    d = word_metric(w, v)
    if 0 < d <= 1 / 4:
        assert word_metric(shift(w), shift(v)) == 2 * d


@settings(max_examples=100, deadline=None)
@given(words(), words(), st.integers(0, 8))
def test_concat_prefix_bound(w, theta, n):
    sigma = first_letters(w, n)
    assert word_metric(concat(sigma, theta), w) <= 2.0**-n


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(1, 3), max_size=5), words())
def test_concat_is_iterated_branch(sigma, w):
    v = w
    for i in reversed(sigma):
        v = branch(i, v)
    assert concat(sigma, w) == v
