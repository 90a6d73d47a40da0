"""Run configuration and verdict types shared by the three engines."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

from .ordinal import Ordinal, omega_pow

HALTED = "halted"
LOOPING = "looping"
CRASHED = "crashed"
BUDGET_EXCEEDED = "budget-exceeded"


@dataclass(frozen=True)
class RunConfig:
    """Knobs controlling a single run.

    budget      successor steps attempted per limit stage
    max_hops    limit evaluations allowed per run (each hop advances the
                clock by a limit ordinal, so max_time alone cannot bound
                the number of hops)
    max_time    refuse to run past this ordinal clock value
    precision   target enclosure width for IBSSM limit registers
    strict      refuse heuristic (uncertified) limit evaluations
    """

    budget: int = 1024
    max_hops: int = 64
    max_time: Ordinal = field(default_factory=lambda: omega_pow(Ordinal.from_int(4)))
    precision: Fraction = Fraction(1, 10**12)
    strict: bool = True
    hl_head: bool = False
    blank_oscillation: bool = False
    itrm_crash_unbounded: bool = False
    seed: int = 0
    trace: bool = False
    collect_limits: bool = False
    verify_loops: bool = True

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be >= 1")
        if self.max_hops < 1:
            raise ValueError("max_hops must be >= 1")

    def with_(self, **kw) -> "RunConfig":
        return replace(self, **kw)


@dataclass
class LimitEvaluation:
    """One certified (or heuristic) limit stage, kept for oracle checks."""

    time: Ordinal
    kind: str                      # pure | translated | l2-translated | heuristic
    start_snapshot: object         # snapshot the segment stepped from
    limit_snapshot: object
    certificate: object = None


@dataclass
class RunOutcome:
    """Verdict of a run: what happened, when, and how trustworthy it is."""

    verdict: str
    time: Ordinal | None = None
    output: object = None
    entry: Ordinal | None = None           # looping only
    period: Ordinal | None = None          # looping only
    crash_register: str | None = None      # ibssm crash only
    reason: str | None = None              # budget-exceeded detail
    bound_ok: bool | None = None           # ibssm: time < w^(nodes+1)
    certified: bool = True
    loop_verified: bool = False
    last_snapshot: object = None
    steps: int = 0
    limit_evaluations: list = field(default_factory=list)
    trace: list | None = None

    @property
    def halted(self) -> bool:
        return self.verdict == HALTED
