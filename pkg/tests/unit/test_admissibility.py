import pytest
from pydantic import ValidationError

from jacobilab.analyses.admissibility import (
    SCREEN_MESSAGES,
    MultiplicityPattern,
    ScreenCode,
    admissible,
    admissible_patterns,
    dimension_screen,
    rho,
)
from jacobilab.exceptions import InvalidPattern


def _rho_oracle(n: int) -> int:
    m = 0
    while n % 2 == 0:
        n //= 2
        m += 1
    b, c = divmod(m, 4)
    return 8 * b + 2**c


# test rho
# ---


@pytest.mark.parametrize(
    "n, expected", [(1, 1), (7, 1), (6, 2), (4, 4), (8, 8), (16, 9), (32, 10), (64, 12), (128, 16)]
)
def test_rho_values(n, expected):
    assert rho(n) == expected


def test_rho_matches_closed_form():
    assert all(rho(n) == _rho_oracle(n) for n in range(1, 1025))


def test_rho_is_at_most_n():
    assert all(1 <= rho(n) <= n for n in range(1, 4097))


def test_rho_rejects_non_positive():
    with pytest.raises(ValueError):
        rho(0)


# test MultiplicityPattern and admissible
# ---


def test_pattern_is_normalized():
    with pytest.raises(ValidationError, match="p >= q"):
        MultiplicityPattern(n=8, p=3, q=4)
    with pytest.raises(ValidationError):
        MultiplicityPattern(n=2, p=1, q=1)


def test_admissible_requires_matching_sum():
    with pytest.raises(InvalidPattern, match="n - 1 = 7"):
        admissible(MultiplicityPattern(n=8, p=4, q=2))


@pytest.mark.parametrize(
    "n, p, q, expected",
    [
        (6, 4, 1, True),
        (6, 3, 2, False),
        (8, 4, 3, True),
        (8, 6, 1, True),
        (16, 8, 7, True),
        (16, 7, 8, None),
        (12, 7, 4, False),
        (12, 8, 3, True),
        (7, 5, 1, False),
    ],
)
def test_admissible(n, p, q, expected):
    if expected is None:
        with pytest.raises(ValidationError):
            MultiplicityPattern(n=n, p=p, q=q)
        return
    verdict = admissible(MultiplicityPattern(n=n, p=p, q=q))
    assert verdict.admissible is expected
    assert verdict.rho == rho(n)


@pytest.mark.parametrize("n", range(3, 130))
def test_admissible_is_monotone_in_q(n):
    flags = [
        admissible(MultiplicityPattern(n=n, p=n - 1 - q, q=q)).admissible
        for q in range(1, (n - 1) // 2 + 1)
    ]
    assert flags == sorted(flags, reverse=True)


def test_admissible_reason_for_odd_dimension():
    assert admissible(MultiplicityPattern(n=7, p=5, q=1)).reason == "n=7 is odd"


# test dimension_screen
# ---


@pytest.mark.parametrize("n", range(3, 100, 2))
def test_screen_odd_dimensions(n):
    screen = dimension_screen(n)
    assert screen.code is ScreenCode.TWO_ROOT_IMPOSSIBLE
    assert screen.verdict == "two-root impossible"
    assert screen.q_range == ()


@pytest.mark.parametrize("n", range(6, 100, 4))
def test_screen_twice_odd_dimensions(n):
    screen = dimension_screen(n)
    assert screen.code is ScreenCode.OSSERMAN_Q1_FORCED
    assert screen.verdict == SCREEN_MESSAGES[ScreenCode.OSSERMAN_Q1_FORCED]
    assert screen.q_range == (1,)


def test_screen_multiples_of_four():
    screen = dimension_screen(16)
    assert screen.code is ScreenCode.NO_SCREEN
    assert screen.verdict == "no screen"
    assert screen.q_range == tuple(range(1, 9))


def test_screen_rejects_small_dimensions():
    with pytest.raises(ValueError):
        dimension_screen(2)


def test_admissible_patterns():
    assert [(m.p, m.q) for m in admissible_patterns(8)] == [(6, 1), (5, 2), (4, 3)]
    assert [(m.p, m.q) for m in admissible_patterns(10)] == [(8, 1)]
    assert admissible_patterns(9) == []
