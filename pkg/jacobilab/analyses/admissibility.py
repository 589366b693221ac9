"""
Hurwitz-Radon arithmetic and the dimension and multiplicity screens for two-root tensors.

A two-root tensor with multiplicities `p >= q` needs `q < rho(n)` anticommuting complex structures on the larger eigenspace, so:

- odd dimensions admit no two-root tensor,
- in dimensions `n = 2 (mod 4)` we have `rho(n) = 2`, which forces `q = 1` and a globally Osserman tensor,
- dimensions divisible by four are not screened.
"""

import logging
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, model_validator

from jacobilab.exceptions import InvalidPattern
from jacobilab.utils import _is_inrange

logger = logging.getLogger(__name__)


class ScreenCode(StrEnum):
    TWO_ROOT_IMPOSSIBLE = "two_root_impossible"
    OSSERMAN_Q1_FORCED = "osserman_q1_forced"
    NO_SCREEN = "no_screen"


SCREEN_MESSAGES: dict[ScreenCode, str] = {
    ScreenCode.TWO_ROOT_IMPOSSIBLE: "two-root impossible",
    ScreenCode.OSSERMAN_Q1_FORCED: "two-root ⇒ globally Osserman; q=1 forced",
    ScreenCode.NO_SCREEN: "no screen",
}


class MultiplicityPattern(BaseModel):
    """Eigenvalue multiplicities `p`, `q` of a two-root tensor in dimension `n`."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n: int = Field(ge=3)
    p: int = Field(ge=1)
    q: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_order(self) -> "MultiplicityPattern":
        if self.p < self.q:
            raise ValueError(f"Patterns are normalized with p >= q. Found p={self.p}, q={self.q}")
        return self


class AdmissibilityVerdict(BaseModel):
    model_config = ConfigDict(frozen=True)

    pattern: MultiplicityPattern
    rho: int
    admissible: bool
    reason: str


class DimensionScreen(BaseModel):
    model_config = ConfigDict(frozen=True)

    n: int
    rho: int
    code: ScreenCode
    verdict: str
    q_range: tuple[int, ...]


def rho(n: int) -> int:
    """Hurwitz-Radon number.

    Write `n = odd * 2^m` and `m = 4b + c` with `0 <= c <= 3`; then `rho(n) = 8b + 2^c`.

    :param n: Positive integer
    :type n: int
    :return: `rho(n)`
    :rtype: int
    """
    if n < 1:
        raise ValueError(f"rho is defined for positive integers. Found {n}")
    m = (n & -n).bit_length() - 1
    b, c = divmod(m, 4)
    return 8 * b + 2**c


def admissible(pattern: MultiplicityPattern) -> AdmissibilityVerdict:
    """Check `q < rho(n)`.

    :raises InvalidPattern: If `p + q != n - 1`
    """
    if pattern.p + pattern.q != pattern.n - 1:
        raise InvalidPattern(
            f"p + q must equal n - 1 = {pattern.n - 1}. Found p={pattern.p}, q={pattern.q}"
        )

    r = rho(pattern.n)
    if pattern.n % 2:
        return AdmissibilityVerdict(
            pattern=pattern, rho=r, admissible=False, reason=f"n={pattern.n} is odd"
        )
    if _is_inrange(pattern.q, 1, r - 1):
        return AdmissibilityVerdict(
            pattern=pattern, rho=r, admissible=True, reason=f"q={pattern.q} < rho({pattern.n})={r}"
        )
    return AdmissibilityVerdict(
        pattern=pattern,
        rho=r,
        admissible=False,
        reason=f"q={pattern.q} >= rho({pattern.n})={r}",
    )


def dimension_screen(n: int) -> DimensionScreen:
    """Screen a dimension for two-root tensors.

    The admissible range of `q` is `1 .. rho(n) - 1`, and empty for odd `n`.
    """
    if n < 3:
        raise ValueError(f"The dimension screen needs n >= 3. Found {n}")

    r = rho(n)
    if n % 2:
        code = ScreenCode.TWO_ROOT_IMPOSSIBLE
        q_range: tuple[int, ...] = ()
    else:
        code = ScreenCode.OSSERMAN_Q1_FORCED if n % 4 == 2 else ScreenCode.NO_SCREEN
        q_range = tuple(range(1, r))
    logger.debug("dimension screen n=%s: %s", n, code)
    return DimensionScreen(n=n, rho=r, code=code, verdict=SCREEN_MESSAGES[code], q_range=q_range)


def admissible_patterns(n: int) -> list[MultiplicityPattern]:
    """All admissible `(p, q)` with `p >= q >= 1` and `p + q = n - 1`."""

    screen = dimension_screen(n)
    return [
        MultiplicityPattern(n=n, p=n - 1 - q, q=q)
        for q in screen.q_range
        if n - 1 - q >= q
    ]
