"""Infinite time Turing machine engine.

Successor steps follow an ordinary transition table.  At limit stages the
control state becomes the least-priority state visited cofinally, each cell
keeps its value if it is eventually constant and otherwise drops to the
designated minimum, and the head goes to the cofinal minimum of its
positions (or to cell 0 when it wandered off to infinity).

Limit stages are only ever *evaluated* through certificates: a window of
successor steps must exhibit an exact configuration repetition (pure cycle)
or a rightward-translated repetition with an untouched left region
(translated cycle).  Both make the tail behaviour provably periodic, so the
limit values are computed exactly.  A second certificate layer applies the
same idea to the sequence of limit snapshots themselves, which is what
makes omega^2-scale clocks reachable.  Runs that cannot be certified end in
a budget verdict instead of a guess.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .errors import (
    BudgetExceededError,
    MachineDefinitionError,
    MissingOracleError,
    NotStabilizedError,
    UncertifiedLimitError,
)
from .ordinal import OMEGA, ZERO, Ordinal, left_sub, omega_pow, render
from .periodic import EpReal, PeriodicWord
from .runtime import (
    BUDGET_EXCEEDED,
    HALTED,
    LOOPING,
    LimitEvaluation,
    RunConfig,
    RunOutcome,
)

_MOVES = {"L": -1, "R": 1, "S": 0}
_BLANK = 2
OMEGA2 = omega_pow(Ordinal.from_int(2))


class IttmProgram:
    """A transition table over 1 or 3 tapes with a designated halt state.

    State declaration order fixes the liminf priority at limit stages:
    earlier states win.  Query states branch on the oracle bit under the
    head instead of consulting the table.
    """

    def __init__(self, states, start, halt, rules, tapes=1, alphabet="01",
                 queries=None, limit_state=None):
        self.states = tuple(states)
        self.start = start
        self.halt = halt
        self.tapes = tapes
        self.alphabet = alphabet
        self.rules = dict(rules)
        self.queries = dict(queries or {})
        self.limit_state = limit_state
        self._compiled = None
        self._validate()

    def _validate(self):
        if len(set(self.states)) != len(self.states) or not self.states:
            raise MachineDefinitionError("states must be non-empty and unique")
        if self.tapes not in (1, 3):
            raise MachineDefinitionError("tape count must be 1 or 3")
        if self.alphabet not in ("01", "01B"):
            raise MachineDefinitionError("alphabet must be 01 or 01B")
        for name in (self.start, self.halt):
            if name not in self.states:
                raise MachineDefinitionError(f"undeclared state {name!r}")
        if self.limit_state is not None:
            if self.limit_state not in self.states or self.limit_state == self.halt:
                raise MachineDefinitionError("bad limit state")
        for q, (a, b) in self.queries.items():
            if q not in self.states or q == self.halt:
                raise MachineDefinitionError(f"bad query state {q!r}")
            if a not in self.states or b not in self.states:
                raise MachineDefinitionError(f"bad query targets for {q!r}")
        combos = [""]
        for _ in range(self.tapes):
            combos = [c + s for c in combos for s in self.alphabet]
        for (state, reads), (writes, move, nxt) in self.rules.items():
            if state not in self.states or state == self.halt or state in self.queries:
                raise MachineDefinitionError(f"rule on unusable state {state!r}")
            if len(reads) != self.tapes or any(s not in self.alphabet for s in reads):
                raise MachineDefinitionError(f"bad read symbols {reads!r}")
            if len(writes) != self.tapes or any(s not in self.alphabet for s in writes):
                raise MachineDefinitionError(f"bad write symbols {writes!r}")
            if move not in _MOVES:
                raise MachineDefinitionError(f"bad move {move!r}")
            if nxt not in self.states:
                raise MachineDefinitionError(f"undeclared next state {nxt!r}")
        for state in self.states:
            if state == self.halt or state in self.queries:
                continue
            for c in combos:
                if (state, c) not in self.rules:
                    raise MachineDefinitionError(
                        f"transition table not total: missing ({state}, {c})")

    def priority(self, state: str) -> int:
        return self.states.index(state)

    def compiled(self):
        """Int-coded transition table for the stepping loop."""
        if self._compiled is None:
            idx = {s: i for i, s in enumerate(self.states)}
            sym = {ch: i for i, ch in enumerate("01B")}
            table = {}
            for (state, reads), (writes, move, nxt) in self.rules.items():
                key = (idx[state], tuple(sym[ch] for ch in reads))
                table[key] = (tuple(sym[ch] for ch in writes), _MOVES[move], idx[nxt])
            queries = {idx[q]: (idx[a], idx[b]) for q, (a, b) in self.queries.items()}
            self._compiled = (table, queries, idx[self.halt],
                              idx[self.limit_state] if self.limit_state else None)
        return self._compiled

    def _key(self):
        return (self.states, self.start, self.halt, self.tapes, self.alphabet,
                tuple(sorted(self.rules.items())),
                tuple(sorted(self.queries.items())), self.limit_state)

    def __eq__(self, other):
        return isinstance(other, IttmProgram) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())


@dataclass(frozen=True)
class IttmSnapshot:
    """Full configuration at one ordinal time."""

    time: Ordinal
    state: str
    head: int
    tapes: tuple

    def config(self):
        return (self.state, self.head, self.tapes)


@dataclass(frozen=True)
class PureCycle:
    start: Ordinal
    period: int
    start_index: int = 0


@dataclass(frozen=True)
class TranslatedCycle:
    start: Ordinal
    period: int
    shift: int
    start_index: int = 0


@dataclass(frozen=True)
class Heuristic:
    budget: int


@dataclass
class _SegmentSummary:
    """What a completed omega-segment did, for level-2 certification."""

    kind: str                 # pure | translated | heuristic
    states: frozenset         # state names visited in the segment (incl. limit)
    min_head: int             # least head position incl. the limit head
    changed: tuple            # per tape: 0/1 word marking non-constant cells
    queried: bool


# ---------------------------------------------------------------------
# mutable machine state (internal fast path)


class _Machine:
    __slots__ = ("state", "head", "pre", "per")

    def __init__(self, state, head, pre, per):
        self.state = state
        self.head = head
        self.pre = pre          # list of lists (mutable prefixes)
        self.per = per          # list of tuples (immutable periodic tails)

    @staticmethod
    def initial(program: IttmProgram, input_word: EpReal | None):
        word = input_word if input_word is not None else EpReal.zeros()
        pre = [list(word.pre)]
        per = [word.per]
        for _ in range(program.tapes - 1):
            pre.append([])
            per.append((0,))
        return _Machine(program.priority(program.start), 0, pre, per)

    @staticmethod
    def from_cfg(program: IttmProgram, cfg):
        state, head, tapes = cfg
        return _Machine(program.priority(state), head,
                        [list(w.pre) for w in tapes], [w.per for w in tapes])

    def read(self, t: int) -> int:
        p = self.pre[t]
        if self.head < len(p):
            return p[self.head]
        per = self.per[t]
        return per[(self.head - len(p)) % len(per)]

    def write(self, t: int, v: int):
        p = self.pre[t]
        if self.head >= len(p):
            per = self.per[t]
            base = len(p)
            p.extend(per[(i - base) % len(per)] for i in range(base, self.head + 1))
        p[self.head] = v

    def words(self) -> tuple:
        return tuple(PeriodicWord(p, q) for p, q in zip(self.pre, self.per))


def _step_machine(m: _Machine, compiled, oracle, ntapes: int):
    table, queries, _halt, _lim = compiled
    q = queries.get(m.state)
    if q is not None:
        if oracle is None:
            raise MissingOracleError("query state entered with no oracle")
        m.state = q[1] if oracle.get(m.head) == 1 else q[0]
        return
    reads = tuple(m.read(t) for t in range(ntapes))
    writes, dh, nxt = table[(m.state, reads)]
    for t in range(ntapes):
        if writes[t] != reads[t]:
            m.write(t, writes[t])
    m.head = max(0, m.head + dh)
    m.state = nxt


# ---------------------------------------------------------------------
# public single-step and snapshot helpers


def initial_snapshot(program: IttmProgram,
                     input_word: EpReal | None = None) -> IttmSnapshot:
    m = _Machine.initial(program, input_word)
    return IttmSnapshot(ZERO, program.start, 0, m.words())


def step(snapshot: IttmSnapshot, program: IttmProgram,
         oracle: EpReal | None = None) -> IttmSnapshot:
    """One successor step.  The snapshot must not be in the halt state."""
    if snapshot.state == program.halt:
        raise ValueError("cannot step a halted snapshot")
    m = _Machine.from_cfg(program, snapshot.config())
    _step_machine(m, program.compiled(), oracle, program.tapes)
    return IttmSnapshot(snapshot.time + Ordinal.from_int(1),
                        program.states[m.state], m.head, m.words())


def output_word(snapshot: IttmSnapshot, program: IttmProgram) -> PeriodicWord:
    return snapshot.tapes[2] if program.tapes == 3 else snapshot.tapes[0]


# ---------------------------------------------------------------------
# certificates


def _find_pure(window):
    seen = {}
    for j, cfg in enumerate(window):
        if cfg in seen:
            return seen[cfg], j
        seen[cfg] = j
    return None


def _translated_ok(window, i, j, shift, program, oracle):
    _si, hi, tapes_i = window[i]
    _sj, _hj, tapes_j = window[j]
    if any(window[t][1] < hi for t in range(i, j + 1)):
        return False
    for a, b in zip(tapes_i, tapes_j):
        if b.tail(hi + shift) != a.tail(hi):
            return False
    qnames = set(program.queries)
    for t in range(i, j):
        state, head, _ = window[t]
        if state in qnames:
            if oracle is None or not oracle.constant_on_progression(head, shift):
                return False
    return True


def detect_certificate(window, program: IttmProgram, oracle: EpReal | None = None,
                       base_time: Ordinal | None = None):
    """Look for a certified repetition in a window of consecutive snapshots.

    Accepts a list of IttmSnapshot or of raw (state, head, tapes) configs.
    Returns PureCycle, TranslatedCycle, or Heuristic as the fallback.
    """
    if not window:
        return Heuristic(0)
    if isinstance(window[0], IttmSnapshot):
        t0 = window[0].time
        window = [s.config() for s in window]
    else:
        t0 = base_time if base_time is not None else ZERO
    hit = _find_pure(window)
    if hit is not None:
        i, j = hit
        return PureCycle(start=t0 + Ordinal.from_int(i), period=j - i, start_index=i)
    j = len(window) - 1
    sj, hj, _ = window[j]
    for i in range(j - 1, -1, -1):
        si, hi, _ = window[i]
        if si != sj:
            continue
        shift = hj - hi
        if shift <= 0:
            continue
        if _translated_ok(window, i, j, shift, program, oracle):
            return TranslatedCycle(start=t0 + Ordinal.from_int(i), period=j - i,
                                   shift=shift, start_index=i)
    return Heuristic(len(window))


# ---------------------------------------------------------------------
# limit evaluation


def _min_state(program, names):
    return min(names, key=program.priority)


def _lcm_periods(words):
    n = 1
    for w in words:
        n = n * len(w.per) // gcd(n, len(w.per))
    return n


def _combine_cells(words, flicker_value):
    """Pointwise: the common value where all words agree, else flicker."""
    max_pre = max(len(w.pre) for w in words)
    period = _lcm_periods(words)
    pre, per = [], []
    for c in range(max_pre):
        vs = {w.get(c) for w in words}
        pre.append(vs.pop() if len(vs) == 1 else flicker_value)
    for k in range(period):
        vs = {w.get(max_pre + k) for w in words}
        per.append(vs.pop() if len(vs) == 1 else flicker_value)
    return PeriodicWord(pre, per)


def _changed_mask(words):
    """0/1 word marking positions where the given words disagree."""
    max_pre = max(len(w.pre) for w in words)
    period = _lcm_periods(words)
    pre = [0 if len({w.get(c) for w in words}) == 1 else 1 for c in range(max_pre)]
    per = [0 if len({w.get(max_pre + k) for w in words}) == 1 else 1
           for k in range(period)]
    return PeriodicWord(pre, per)


def _flicker(config: RunConfig) -> int:
    return _BLANK if config.blank_oscillation else 0


def _limit_from_pure(window, i, j, program, config):
    cycle = window[i:j]
    q = _min_state(program, {c[0] for c in cycle})
    head = min(c[1] for c in cycle)
    if config.hl_head:
        if program.limit_state is None:
            raise MachineDefinitionError("hl_head variant needs a limit state")
        q, head = program.limit_state, 0
    tapes = tuple(
        _combine_cells([c[2][t] for c in cycle], _flicker(config))
        for t in range(program.tapes)
    )
    limit_cfg = (q, head, tapes)
    changed = tuple(
        _changed_mask([c[2][t] for c in window] + [tapes[t]])
        for t in range(program.tapes)
    )
    min_head = min(min(c[1] for c in window), head)
    summary = _SegmentSummary(
        "pure", frozenset(c[0] for c in window) | {q}, min_head, changed,
        bool({c[0] for c in window} & set(program.queries)))
    return limit_cfg, summary


def _limit_from_translated(window, i, j, shift, program, config):
    _si, hi, tapes_i = window[i]
    _sj, _hj, tapes_j = window[j]
    q = _min_state(program, {window[t][0] for t in range(i, j)})
    head = 0
    if config.hl_head:
        if program.limit_state is None:
            raise MachineDefinitionError("hl_head variant needs a limit state")
        q = program.limit_state
    tapes = []
    for t in range(len(tapes_i)):
        deposit = tuple(tapes_j[t].get(hi + d) for d in range(shift))
        tapes.append(PeriodicWord(tapes_i[t].prefix(hi), deposit))
    limit_cfg = (q, head, tuple(tapes))
    # conservative mask: anything at or beyond the cycle base may change
    changed = tuple(
        PeriodicWord(_changed_mask([c[2][t] for c in window[: i + 1]]).prefix(hi), (1,))
        for t in range(len(tapes_i))
    )
    summary = _SegmentSummary(
        "translated", frozenset(c[0] for c in window) | {q}, 0, changed,
        bool({c[0] for c in window} & set(program.queries)))
    return limit_cfg, summary


def _limit_heuristic(window, program, config):
    tail = window[len(window) // 2:]
    quarter = window[3 * len(window) // 4:]
    q = _min_state(program, {c[0] for c in tail})
    mh = min(c[1] for c in tail)
    head = mh if quarter and mh == min(c[1] for c in quarter) else 0
    if config.hl_head and program.limit_state is not None:
        q, head = program.limit_state, 0
    tapes = tuple(
        _combine_cells([c[2][t] for c in tail], _flicker(config))
        for t in range(program.tapes)
    )
    limit_cfg = (q, head, tapes)
    summary = _SegmentSummary(
        "heuristic", frozenset(c[0] for c in window) | {q}, 0,
        tuple(PeriodicWord((), (1,)) for _ in range(program.tapes)),
        bool({c[0] for c in window} & set(program.queries)))
    return limit_cfg, summary


def limit_snapshot(window, certificate, lam: Ordinal, program: IttmProgram,
                   config: RunConfig | None = None) -> IttmSnapshot:
    """Evaluate a limit-stage snapshot from a certified window.

    Raises UncertifiedLimitError for a Heuristic certificate in strict mode.
    """
    config = config or RunConfig()
    if window and isinstance(window[0], IttmSnapshot):
        window = [s.config() for s in window]
    if isinstance(certificate, PureCycle):
        i = certificate.start_index
        cfg, _ = _limit_from_pure(window, i, i + certificate.period, program, config)
    elif isinstance(certificate, TranslatedCycle):
        i = certificate.start_index
        cfg, _ = _limit_from_translated(window, i, i + certificate.period,
                                        certificate.shift, program, config)
    elif isinstance(certificate, Heuristic):
        if config.strict:
            raise UncertifiedLimitError("only heuristic evidence for this limit")
        cfg, _ = _limit_heuristic(window, program, config)
    else:
        raise TypeError(f"not a certificate: {certificate!r}")
    return IttmSnapshot(lam, cfg[0], cfg[1], cfg[2])


# ---------------------------------------------------------------------
# level-2 certificates over limit snapshots


def _detect_l2(traj):
    """Find (i, j, shift) such that limit snapshots repeat translated.

    Requires pure, oracle-free interior segments whose activity stays at or
    right of the base head; the segment map then commutes with rightward
    translation, so the window of segments repeats shifted forever.
    """
    j = len(traj) - 1
    sj, hj, tapes_j = traj[j][0]
    for i in range(j - 1, -1, -1):
        si, hi, tapes_i = traj[i][0]
        if si != sj:
            continue
        shift = hj - hi
        if shift <= 0:
            continue
        ok = True
        for k in range(i + 1, j + 1):
            summary = traj[k][1]
            if summary.kind != "pure" or summary.queried:
                ok = False
                break
            if summary.min_head < hi:
                ok = False
                break
            if any(w.occurs_below(1, hi) for w in summary.changed):
                ok = False
                break
        if not ok:
            continue
        if all(b.tail(hi + shift) == a.tail(hi) for a, b in zip(tapes_i, tapes_j)):
            return i, j, shift
    return None


def _limit_from_l2(traj, i, j, shift, program, config):
    _si, hi, tapes_i = traj[i][0]
    _sj, _hj, tapes_j = traj[j][0]
    states = set()
    for k in range(i + 1, j + 1):
        states |= traj[k][1].states
    q = _min_state(program, states)
    head = 0
    if config.hl_head and program.limit_state is not None:
        q = program.limit_state
    tapes = []
    for t in range(len(tapes_i)):
        deposit = tuple(tapes_j[t].get(hi + d) for d in range(shift))
        tapes.append(PeriodicWord(tapes_i[t].prefix(hi), deposit))
    return (q, head, tuple(tapes))


# ---------------------------------------------------------------------
# the run loop


def _segment(m: _Machine, program, oracle, max_steps):
    """Step up to max_steps; returns (window, halted, steps_taken)."""
    compiled = program.compiled()
    halt_idx = compiled[2]
    ntapes = program.tapes
    names = program.states
    window = [(names[m.state], m.head, m.words())]
    for k in range(max_steps):
        if m.state == halt_idx:
            return window, True, k
        _step_machine(m, compiled, oracle, ntapes)
        window.append((names[m.state], m.head, m.words()))
    return window, m.state == halt_idx, max_steps


def run(program: IttmProgram, input_word: EpReal | None = None,
        oracle: EpReal | None = None, config: RunConfig | None = None) -> RunOutcome:
    """Run to a Halted / Looping / BudgetExceeded verdict with an exact clock."""
    config = config or RunConfig()
    m = _Machine.initial(program, input_word)
    base = ZERO
    traj_base = ZERO
    trajectory = []
    hops = 0
    total_steps = 0
    certified = True
    evals = []
    trace = [] if config.trace else None
    checkpoints = {(program.start, 0, m.words()): ZERO}
    pending = None  # (entry time, time of first recurrence, config key)

    def snap(cfg, t):
        return IttmSnapshot(t, cfg[0], cfg[1], cfg[2])

    def done(verdict, **kw):
        return RunOutcome(verdict, certified=certified, steps=total_steps,
                          limit_evaluations=evals, trace=trace, **kw)

    def handle_hop(limit_cfg, lam, kind, start_cfg, cert):
        """Record a limit evaluation; detect and verify looping.

        Returns a RunOutcome to finish with, or None to continue.
        """
        nonlocal pending
        if config.collect_limits:
            evals.append(LimitEvaluation(time=lam, kind=kind,
                                         start_snapshot=snap(start_cfg, ZERO),
                                         limit_snapshot=snap(limit_cfg, lam),
                                         certificate=cert))
        if trace is not None:
            trace.append({"t": render(lam), "limit": True, "cert": kind,
                          "state": limit_cfg[0], "head": limit_cfg[1]})
        key = limit_cfg
        if pending is not None:
            entry, t1, pkey = pending
            period = left_sub(entry, t1)
            expected = t1 + period
            if lam == expected and key == pkey:
                return done(LOOPING, entry=entry, period=period, loop_verified=True,
                            last_snapshot=snap(limit_cfg, lam))
            if lam >= expected:
                pending = None
        if pending is None and key in checkpoints:
            entry = checkpoints[key]
            if not config.verify_loops:
                return done(LOOPING, entry=entry, period=left_sub(entry, lam),
                            loop_verified=False, last_snapshot=snap(limit_cfg, lam))
            pending = (entry, lam, key)
        elif key not in checkpoints:
            checkpoints[key] = lam
        return None

    while True:
        if config.max_time.is_finite:
            room = config.max_time.to_int() - base.to_int()
            if room <= 0:
                return done(BUDGET_EXCEEDED, reason="max-time",
                            last_snapshot=snap((program.states[m.state], m.head,
                                                m.words()), base))
            window, halted, steps = _segment(m, program, oracle, room)
        else:
            window, halted, steps = _segment(m, program, oracle, config.budget)
        total_steps += steps
        if trace is not None:
            _trace_steps(trace, window, base)
        if halted:
            t = base + Ordinal.from_int(steps)
            return done(HALTED, time=t, output=output_word(snap(window[-1], t), program),
                        last_snapshot=snap(window[-1], t))
        if config.max_time.is_finite:
            t = base + Ordinal.from_int(steps)
            return done(BUDGET_EXCEEDED, reason="max-time",
                        last_snapshot=snap(window[-1], t))

        cert = detect_certificate(window, program, oracle, base_time=base)
        if isinstance(cert, Heuristic):
            if config.strict:
                t = base + Ordinal.from_int(steps)
                return done(BUDGET_EXCEEDED, reason="uncertified-limit",
                            last_snapshot=snap(window[-1], t))
            limit_cfg, summary = _limit_heuristic(window, program, config)
            certified = False
            kind = "heuristic"
        elif isinstance(cert, PureCycle):
            i = cert.start_index
            limit_cfg, summary = _limit_from_pure(window, i, i + cert.period,
                                                  program, config)
            kind = "pure"
        else:
            i = cert.start_index
            limit_cfg, summary = _limit_from_translated(window, i, i + cert.period,
                                                        cert.shift, program, config)
            kind = "translated"

        lam = base + OMEGA
        if lam >= config.max_time:
            return done(BUDGET_EXCEEDED, reason="max-time",
                        last_snapshot=snap(limit_cfg, lam))
        hops += 1
        outcome = handle_hop(limit_cfg, lam, kind, window[0], cert)
        if outcome is not None:
            return outcome
        if hops >= config.max_hops:
            return done(BUDGET_EXCEEDED, reason="hop-budget",
                        last_snapshot=snap(limit_cfg, lam))

        trajectory.append((limit_cfg, summary))
        base = lam
        m = _Machine.from_cfg(program, limit_cfg)

        l2 = _detect_l2(trajectory)
        if l2 is not None:
            i2, j2, shift2 = l2
            lam2 = traj_base + OMEGA2
            cfg2 = _limit_from_l2(trajectory, i2, j2, shift2, program, config)
            if lam2 >= config.max_time:
                return done(BUDGET_EXCEEDED, reason="max-time",
                            last_snapshot=snap(cfg2, lam2))
            hops += 1
            outcome = handle_hop(cfg2, lam2, "l2-translated", trajectory[i2][0], None)
            if outcome is not None:
                return outcome
            if hops >= config.max_hops:
                return done(BUDGET_EXCEEDED, reason="hop-budget",
                            last_snapshot=snap(cfg2, lam2))
            trajectory = []
            traj_base = lam2
            base = lam2
            m = _Machine.from_cfg(program, cfg2)


def _trace_steps(trace, window, base):
    for k in range(1, len(window)):
        prev, cur = window[k - 1], window[k]
        cells = {}
        for t, (a, b) in enumerate(zip(prev[2], cur[2])):
            span = max(len(a.pre), len(b.pre)) + 1
            for c in range(span):
                if a.get(c) != b.get(c):
                    cells[f"{t}:{c}"] = "01B"[b.get(c)]
        trace.append({"t": render(base + Ordinal.from_int(k)),
                      "state": cur[0], "head": cur[1], "cells": cells})


def clock(program: IttmProgram, input_word: EpReal | None = None,
          oracle: EpReal | None = None, config: RunConfig | None = None):
    """Exact halting ordinal, or the non-halting outcome."""
    outcome = run(program, input_word, oracle, config)
    if outcome.halted and outcome.certified:
        return outcome.time
    return outcome


# ---------------------------------------------------------------------
# trial-and-error predicates


def trial_and_error(f, xs=(), budget: int = 64) -> int:
    """Limit of a total 0/1 guessing function f(xs, y) as y grows.

    The limit counts as certified when the guesses are constant over the
    whole second half of the budget window; otherwise NotStabilizedError.
    """
    if budget < 2:
        raise ValueError("budget must be >= 2")
    values = [1 if f(xs, y) else 0 for y in range(budget)]
    tail = values[budget // 2:]
    if all(v == tail[0] for v in tail):
        return tail[0]
    raise NotStabilizedError(f"guesses still changing after {budget} trials")


def omega_cell_value(f, xs=(), budget: int = 64) -> int:
    """Cell value at the first limit: the stabilized limit, else 0.

    This is the value an output cell holds at stage omega when a machine
    rewrites it with f(xs, y) at successive finite times.
    """
    try:
        return trial_and_error(f, xs, budget)
    except NotStabilizedError:
        return 0


def ittm_guesser(program: IttmProgram, config: RunConfig | None = None):
    """Wrap a finite-time total machine as a guessing function.

    Arguments are coded in unary separated by single zeros on the input
    tape; the guess is output cell 0 at the halting time.
    """
    config = config or RunConfig()

    def f(xs, y):
        bits = []
        for v in tuple(xs) + (y,):
            bits.extend([1] * v)
            bits.append(0)
        outcome = run(program, EpReal(tuple(bits), (0,)), None, config)
        if not outcome.halted:
            raise BudgetExceededError("guessing machine did not halt in budget")
        return outcome.output.get(0)

    return f
