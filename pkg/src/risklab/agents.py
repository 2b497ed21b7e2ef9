"""Simulated expected-utility agents for exercising the task batteries.

An agent is a utility model plus a tremble rate and a seed.  Utility models
turn a prize vector into a utility table; choices then maximize expected
utility with *exact* comparisons (floats enter the comparison as exact
rationals), so a tie is a real algebraic tie and goes to the first-listed
option — callers put the base (or safe) option first, which implements the
ties-to-the-base convention.  With tremble rate t, each decision is replaced
by a uniform coin flip with probability t, drawn from the agent's own
deterministic stream.

The convenience drivers emit :class:`~risklab.records.ChoiceRecord` rows in
the same schema live sessions export, so simulated and collected data flow
through one analysis path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from datetime import datetime, timedelta, timezone
from typing import Iterator, Sequence, Union

import numpy as np

from .geometry import ChoicePattern
from .lottery import (
    Lottery,
    PrizeVector,
    TabulatedUtility,
    expected_utility_exact,
)
from .records import ChoiceRecord
from .tasks import MpsCase, PriceListRow, price_list_battery, standard_battery


class AgentError(ValueError):
    """Raised for invalid utility parameters or malformed agent specs."""


@dataclass(frozen=True)
class Crra:
    """Constant relative risk aversion: u(x) = x**(1-r)/(1-r), log at r = 1."""

    r: float

    def values_on(self, prizes: PrizeVector) -> TabulatedUtility:
        t = 1.0 - float(self.r)
        if t == 0.0:
            values = _evaluate(math.log, prizes)
        else:
            values = _evaluate(lambda x: (x**t - 1.0) / t, prizes)
        return _checked_table(values, prizes)

    def describe(self) -> str:
        return f"crra:{self.r:g}"


@dataclass(frozen=True)
class Cara:
    """Constant absolute risk aversion: u(x) = (1 - exp(-a*x))/a, linear at a = 0."""

    a: float

    def values_on(self, prizes: PrizeVector) -> TabulatedUtility:
        a = float(self.a)
        if a == 0.0:
            values = prizes.floats()
        else:
            values = _evaluate(lambda x: -math.expm1(-a * x) / a, prizes)
        return _checked_table(values, prizes)

    def describe(self) -> str:
        return f"cara:{self.a:g}"


@dataclass(frozen=True)
class PowerExpo:
    """Two-parameter power-expo family: u(x) = (1 - exp(-alpha*x**(1-r)))/alpha.

    Monotone on positive prizes for r < 1 and alpha >= 0; alpha = 0 is the
    CRRA limit.  Spans decreasing, constant, and increasing relative risk
    aversion depending on the two parameters.
    """

    r: float
    alpha: float

    def __post_init__(self) -> None:
        if not self.r < 1:
            raise AgentError(f"power-expo requires r < 1, got r={self.r}")
        if self.alpha < 0:
            raise AgentError(f"power-expo requires alpha >= 0, got alpha={self.alpha}")

    def values_on(self, prizes: PrizeVector) -> TabulatedUtility:
        t = 1.0 - float(self.r)
        alpha = float(self.alpha)
        if alpha == 0.0:
            values = _evaluate(lambda x: x**t / t, prizes)
        else:
            values = _evaluate(lambda x: -math.expm1(-alpha * x**t) / alpha, prizes)
        return _checked_table(values, prizes)

    def describe(self) -> str:
        return f"powerexpo:{self.r:g},{self.alpha:g}"


@dataclass(frozen=True)
class Tabulated:
    """Utility given directly as one value per prize position."""

    values: tuple[float, ...]

    def values_on(self, prizes: PrizeVector) -> TabulatedUtility:
        if len(self.values) != len(prizes):
            raise AgentError(
                f"{len(self.values)} utility values for {len(prizes)} prizes"
            )
        return _checked_table(self.values, prizes)

    def describe(self) -> str:
        return "table:" + ",".join(f"{v:g}" for v in self.values)


UtilityModel = Union[Crra, Cara, PowerExpo, Tabulated]


def _evaluate(fn, prizes: PrizeVector) -> tuple[float, ...]:
    """Evaluate a pointwise utility on the grid, mapping overflow to AgentError."""
    try:
        return tuple(fn(x) for x in prizes.floats())
    except OverflowError as exc:
        raise AgentError(f"utility overflows on the prize grid: {exc}") from exc


def _checked_table(values: Sequence[float], prizes: PrizeVector) -> TabulatedUtility:
    values = tuple(float(v) for v in values)
    if len(values) != len(prizes):
        raise AgentError(f"{len(values)} utility values for {len(prizes)} prizes")
    if any(not math.isfinite(v) for v in values):
        raise AgentError(f"utility values must be finite, got {values}")
    return TabulatedUtility(values)


def parse_utility(text: str) -> UtilityModel:
    """Parse a utility spec like ``crra:0.5`` or ``table:0,0.3,0.35,1``."""
    name, sep, argtext = text.partition(":")
    if not sep:
        raise AgentError(f"utility spec needs a ':', got {text!r}")
    try:
        args = tuple(float(a) for a in argtext.split(",")) if argtext else ()
    except ValueError as exc:
        raise AgentError(f"bad utility parameters in {text!r}") from exc
    if name == "crra" and len(args) == 1:
        return Crra(args[0])
    if name == "cara" and len(args) == 1:
        return Cara(args[0])
    if name == "powerexpo" and len(args) == 2:
        return PowerExpo(args[0], args[1])
    if name == "table" and len(args) >= 2:
        return Tabulated(args)
    raise AgentError(f"unrecognized utility spec {text!r}")


@dataclass(frozen=True)
class AgentSpec:
    """A utility model plus tremble rate and private stream seed."""

    utility: UtilityModel
    tremble: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 <= self.tremble <= 1.0:
            raise AgentError(f"tremble must be in [0, 1], got {self.tremble}")
        if self.seed < 0:
            raise AgentError(f"seed must be non-negative, got {self.seed}")


def population(
    utility: UtilityModel,
    n: int,
    tremble: float = 0.0,
    master_seed: int = 0,
) -> tuple[AgentSpec, ...]:
    """``n`` agents sharing one utility model, with independent derived seeds."""
    if n < 1:
        raise AgentError(f"population size must be >= 1, got {n}")
    seeds = np.random.SeedSequence(master_seed).generate_state(n, dtype=np.uint64)
    return tuple(AgentSpec(utility, tremble, int(s)) for s in seeds)


def _pick(
    table: TabulatedUtility,
    options: Sequence[Lottery],
    tremble: float,
    rng: np.random.Generator | None,
) -> int:
    if tremble > 0.0:
        if rng is None:
            raise AgentError("a tremble rate needs an rng")
        if rng.random() < tremble:
            return int(rng.integers(0, len(options)))
    best = 0
    best_eu = expected_utility_exact(options[0], table)
    for i, option in enumerate(options[1:], start=1):
        eu = expected_utility_exact(option, table)
        if eu > best_eu:  # strict: ties keep the earlier option
            best, best_eu = i, eu
    return best


def choose(
    spec: AgentSpec,
    options: Sequence[Lottery],
    rng: np.random.Generator | None = None,
) -> int:
    """Index of the option ``spec`` picks; exact EU ties keep the first option."""
    if len(options) < 2:
        raise AgentError("a decision needs at least two options")
    prizes = options[0].prizes
    for option in options[1:]:
        if option.prizes != prizes:
            raise AgentError("options of one decision must share a prize vector")
    table = spec.utility.values_on(prizes)
    return _pick(table, options, spec.tremble, rng)


def simulate_mps(
    spec: AgentSpec,
    cases: Sequence[MpsCase] | None = None,
    rng: np.random.Generator | None = None,
) -> dict[str, ChoicePattern]:
    """The agent's choice pattern on each spread-pair screen, by case id.

    Decisions are drawn in canonical order (battery order, AB before AC).
    Partial cases are rejected: a pattern needs both decisions.
    """
    if cases is None:
        cases = standard_battery()
    if rng is None and spec.tremble > 0.0:
        rng = np.random.default_rng(spec.seed)
    patterns: dict[str, ChoicePattern] = {}
    for case in cases:
        if case.decisions != ("AB", "AC"):
            raise AgentError(
                f"case {case.case_id!r} is partial; a full pattern needs both decisions"
            )
        table = spec.utility.values_on(case.base.prizes)
        ab = "AB"[_pick(table, (case.option("A"), case.option("B")), spec.tremble, rng)]
        ac = "AC"[_pick(table, (case.option("A"), case.option("C")), spec.tremble, rng)]
        patterns[case.case_id] = ChoicePattern(ab, ac)
    return patterns


@dataclass(frozen=True)
class PriceListResult:
    """An agent's ten row choices, in row order."""

    choices: tuple[str, ...]

    @property
    def safe_count(self) -> int:
        return sum(1 for c in self.choices if c == "safe")

    @property
    def single_switch(self) -> bool:
        s = self.safe_count
        return self.choices == ("safe",) * s + ("risky",) * (len(self.choices) - s)


def simulate_price_list(
    spec: AgentSpec,
    rows: Sequence[PriceListRow] | None = None,
    rng: np.random.Generator | None = None,
) -> PriceListResult:
    """Row-by-row safe/risky choices; exact EU ties go to the safe option."""
    if rows is None:
        rows = price_list_battery()
    if rng is None and spec.tremble > 0.0:
        rng = np.random.default_rng(spec.seed)
    choices = []
    for row in rows:
        table = spec.utility.values_on(row.safe.prizes)
        pick = _pick(table, (row.safe, row.risky), spec.tremble, rng)
        choices.append("safe" if pick == 0 else "risky")
    return PriceListResult(tuple(choices))


def _timestamps(start: datetime | None = None) -> Iterator[str]:
    t = start or datetime(2000, 1, 1, tzinfo=timezone.utc)
    step = timedelta(seconds=1)
    while True:
        yield t.isoformat()
        t += step


def simulate_population(
    specs: Sequence[AgentSpec],
    session_id: str = "sim",
    cases: Sequence[MpsCase] | None = None,
    rows: Sequence[PriceListRow] | None = None,
    display_seed: int = 0,
    subject_prefix: str = "agent",
) -> list[ChoiceRecord]:
    """Full choice records for a population, one subject per agent spec.

    Each agent runs the price list (rows in order) then every spread-pair
    screen (battery order, AB before AC), all from its own seeded stream.
    Timestamps are synthetic and deterministic.
    """
    if cases is None:
        cases = standard_battery()
    if rows is None:
        rows = price_list_battery()
    clock = _timestamps()
    records: list[ChoiceRecord] = []
    for i, spec in enumerate(specs, start=1):
        subject_id = f"{subject_prefix}{i:04d}"
        rng = np.random.default_rng(spec.seed)
        list_result = simulate_price_list(spec, rows, rng)
        for row, choice in zip(rows, list_result.choices):
            records.append(
                ChoiceRecord(
                    session_id=session_id,
                    subject_id=subject_id,
                    part=1,
                    screen=str(row.index),
                    pair=None,
                    chosen=choice,
                    display_seed=display_seed,
                    timestamp=next(clock),
                )
            )
        for case in cases:
            table = spec.utility.values_on(case.base.prizes)
            for pair in case.decisions:
                options = (case.option(pair[0]), case.option(pair[1]))
                pick = _pick(table, options, spec.tremble, rng)
                records.append(
                    ChoiceRecord(
                        session_id=session_id,
                        subject_id=subject_id,
                        part=2,
                        screen=case.case_id,
                        pair=pair,
                        chosen=pair[pick],
                        display_seed=display_seed,
                        timestamp=next(clock),
                    )
                )
    return records
