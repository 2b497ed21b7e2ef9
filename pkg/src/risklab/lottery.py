"""Exact lottery algebra over a shared ascending prize grid.

A :class:`Lottery` is a probability vector over a fixed :class:`PrizeVector`
of strictly ascending money amounts.  The central construction is the
one-step *mean-preserving spread*: all probability mass sitting on an
interior prize is split between the two neighbouring prizes with weights
chosen so the expected value is unchanged.  Moving mass ``p`` off prize
``k`` (positions numbered 1..K) sends

    p * (prize[k+1] - prize[k]) / (prize[k+1] - prize[k-1])   down to k-1,
    p * (prize[k]   - prize[k-1]) / (prize[k+1] - prize[k-1]) up   to k+1.

An expected-utility decision maker weakly prefers the base lottery to every
such spread exactly when the utility values are concave on the prize grid
(non-increasing successive slopes); :func:`prefers_base_to_all_spreads` and
:func:`is_concave_on_grid` implement the two sides of that equivalence
independently of one another.

All probabilities and prizes are ``fractions.Fraction`` and every comparison
here is exact: utility floats are converted to ``Fraction`` (a lossless
operation) before any preference test, so ties resolve deterministically.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping, Sequence

from .rationals import as_fraction, format_rational


class LotteryError(ValueError):
    """Raised for malformed lotteries and undefined spread requests."""


@dataclass(frozen=True)
class PrizeVector:
    """Strictly ascending money amounts shared by a family of lotteries."""

    amounts: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        amounts = tuple(as_fraction(a) for a in self.amounts)
        if len(amounts) < 2:
            raise LotteryError("a prize vector needs at least two prizes")
        for lo, hi in zip(amounts, amounts[1:]):
            if hi <= lo:
                raise LotteryError(
                    f"prize amounts must be strictly ascending, got {lo} before {hi}"
                )
        object.__setattr__(self, "amounts", amounts)

    def __len__(self) -> int:
        return len(self.amounts)

    def __iter__(self) -> Iterator[Fraction]:
        return iter(self.amounts)

    def __getitem__(self, i: int) -> Fraction:
        return self.amounts[i]

    @property
    def interior_positions(self) -> tuple[int, ...]:
        """1-based positions strictly between the extremes (2..K-1)."""
        return tuple(range(2, len(self.amounts)))

    def floats(self) -> tuple[float, ...]:
        return tuple(float(a) for a in self.amounts)

    def to_json(self) -> list[str]:
        return [format_rational(a) for a in self.amounts]

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "PrizeVector":
        return cls(tuple(as_fraction(a) for a in data))


@dataclass(frozen=True)
class Lottery:
    """A probability distribution over the positions of a prize vector."""

    prizes: PrizeVector
    probs: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        probs = tuple(as_fraction(p) for p in self.probs)
        if len(probs) != len(self.prizes):
            raise LotteryError(
                f"{len(probs)} probabilities for {len(self.prizes)} prizes"
            )
        for p in probs:
            if p < 0:
                raise LotteryError(f"negative probability {p}")
        total = sum(probs)
        if total != 1:
            raise LotteryError(f"probabilities sum to {total}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_percents(
        cls, prizes: PrizeVector, percents: Sequence[int | str | Fraction]
    ) -> "Lottery":
        """Build a lottery from whole-percent (or rational-percent) chances."""
        return cls(prizes, tuple(as_fraction(p) / 100 for p in percents))

    def prob(self, k: int) -> Fraction:
        """Probability at 1-based prize position ``k``."""
        if not 1 <= k <= len(self.prizes):
            raise LotteryError(f"prize position {k} outside 1..{len(self.prizes)}")
        return self.probs[k - 1]

    @property
    def support(self) -> tuple[int, ...]:
        """1-based positions carrying positive probability."""
        return tuple(k for k, p in enumerate(self.probs, start=1) if p > 0)

    def to_json_dict(self) -> dict:
        return {
            "prizes": self.prizes.to_json(),
            "probs": [format_rational(p) for p in self.probs],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Lottery":
        try:
            prizes = PrizeVector.from_json(data["prizes"])
            probs = tuple(as_fraction(p) for p in data["probs"])
        except KeyError as exc:
            raise LotteryError(f"lottery JSON missing key {exc}") from exc
        return cls(prizes, probs)


@dataclass(frozen=True)
class TabulatedUtility:
    """Utility values at each prize position, non-decreasing left to right."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        for lo, hi in zip(values, values[1:]):
            if hi < lo:
                raise LotteryError(
                    f"utility values must be non-decreasing, got {lo} before {hi}"
                )
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return len(self.values)

    def exact(self) -> tuple[Fraction, ...]:
        """The same values as exact rationals (floats are dyadic, so lossless)."""
        return tuple(Fraction(v) for v in self.values)


def expected_value(lottery: Lottery) -> Fraction:
    """Exact expected money amount of ``lottery``."""
    return sum(
        (p * a for p, a in zip(lottery.probs, lottery.prizes.amounts)),
        start=Fraction(0),
    )


def expected_utility(lottery: Lottery, utility: TabulatedUtility) -> float:
    """Expected utility as a float (see ``expected_utility_exact`` for comparisons)."""
    if len(utility) != len(lottery.prizes):
        raise LotteryError(
            f"utility table has {len(utility)} entries for {len(lottery.prizes)} prizes"
        )
    return sum(float(p) * v for p, v in zip(lottery.probs, utility.values))


def expected_utility_exact(lottery: Lottery, utility: TabulatedUtility) -> Fraction:
    """Expected utility in exact rational arithmetic (ties stay ties)."""
    if len(utility) != len(lottery.prizes):
        raise LotteryError(
            f"utility table has {len(utility)} entries for {len(lottery.prizes)} prizes"
        )
    return sum(
        (p * v for p, v in zip(lottery.probs, utility.exact())),
        start=Fraction(0),
    )


def mps_spread(lottery: Lottery, k: int) -> Lottery:
    """One-step mean-preserving spread of the mass at interior position ``k``.

    All probability at 1-based position ``k`` is moved to the neighbouring
    positions with the weights that keep the expected value unchanged.
    Raises ``LotteryError`` if ``k`` is not interior or carries no mass.
    """
    amounts = lottery.prizes.amounts
    K = len(amounts)
    if not 2 <= k <= K - 1:
        raise LotteryError(f"spread position must be interior (2..{K - 1}), got {k}")
    mass = lottery.probs[k - 1]
    if mass == 0:
        raise LotteryError(f"spread undefined: no probability mass at position {k}")
    span = amounts[k] - amounts[k - 2]
    weight_down = (amounts[k] - amounts[k - 1]) / span
    weight_up = (amounts[k - 1] - amounts[k - 2]) / span
    probs = list(lottery.probs)
    probs[k - 2] += mass * weight_down
    probs[k] += mass * weight_up
    probs[k - 1] = Fraction(0)
    return Lottery(lottery.prizes, tuple(probs))


@dataclass(frozen=True)
class MpsFamily:
    """A base lottery with its one-step spread at every feasible interior position.

    ``spreads`` holds ``(k, spread)`` pairs sorted by the 1-based position
    ``k``; positions whose base probability is zero have no defined spread
    and are omitted, in which case the family is flagged ``partial``.
    """

    base: Lottery
    spreads: tuple[tuple[int, Lottery], ...]

    def __post_init__(self) -> None:
        seen: set[int] = set()
        for k, spread in self.spreads:
            if k in seen:
                raise LotteryError(f"duplicate spread position {k}")
            seen.add(k)
            if spread != mps_spread(self.base, k):
                raise LotteryError(
                    f"spread at position {k} is not the mean-preserving spread of the base"
                )
        object.__setattr__(
            self, "spreads", tuple(sorted(self.spreads, key=lambda item: item[0]))
        )

    @property
    def partial(self) -> bool:
        """True when some interior position had no mass to spread."""
        return len(self.spreads) < len(self.base.prizes) - 2

    @property
    def spread_positions(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.spreads)

    def spread(self, k: int) -> Lottery:
        for position, spread in self.spreads:
            if position == k:
                return spread
        raise LotteryError(f"no spread at position {k}")

    def as_dict(self) -> dict[int, Lottery]:
        return dict(self.spreads)


def mps_family(lottery: Lottery) -> MpsFamily:
    """All defined one-step spreads of ``lottery`` (may be empty or partial)."""
    spreads = tuple(
        (k, mps_spread(lottery, k))
        for k in lottery.prizes.interior_positions
        if lottery.probs[k - 1] > 0
    )
    return MpsFamily(lottery, spreads)


def prefers_base_to_all_spreads(utility: TabulatedUtility, family: MpsFamily) -> bool:
    """Whether the base is weakly preferred to every spread in the family.

    Comparisons are exact; ties go to the base.  Raises ``LotteryError`` on an
    empty family, where the quantifier would be vacuous.
    """
    if not family.spreads:
        raise LotteryError(
            "family has no spreads (no interior mass); preference over it is vacuous"
        )
    base_eu = expected_utility_exact(family.base, utility)
    return all(
        base_eu >= expected_utility_exact(spread, utility)
        for _, spread in family.spreads
    )


def is_concave_on_grid(utility: TabulatedUtility, prizes: PrizeVector) -> bool:
    """Whether successive slopes of the utility table are non-increasing.

    Exact test: slope comparisons are cross-multiplied in rational arithmetic
    (prize gaps are positive, so direction is preserved).
    """
    if len(utility) != len(prizes):
        raise LotteryError(
            f"utility table has {len(utility)} entries for {len(prizes)} prizes"
        )
    values = utility.exact()
    amounts = prizes.amounts
    for i in range(1, len(amounts) - 1):
        left_rise = values[i] - values[i - 1]
        right_rise = values[i + 1] - values[i]
        left_run = amounts[i] - amounts[i - 1]
        right_run = amounts[i + 1] - amounts[i]
        if left_rise * right_run < right_rise * left_run:
            return False
    return True


def mix(a: Lottery, b: Lottery, weight_on_a: int | float | str | Fraction) -> Lottery:
    """Probability mixture ``w*a + (1-w)*b`` of two lotteries on the same prizes."""
    if a.prizes != b.prizes:
        raise LotteryError("cannot mix lotteries over different prize vectors")
    w = as_fraction(weight_on_a)
    if not 0 <= w <= 1:
        raise LotteryError(f"mixture weight must be in [0, 1], got {w}")
    probs = tuple(w * p + (1 - w) * q for p, q in zip(a.probs, b.probs))
    return Lottery(a.prizes, probs)
