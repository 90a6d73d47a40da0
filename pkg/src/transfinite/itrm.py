"""Infinite time register machine engine.

Natural-number registers under Zero / Inc / Copy / JumpEq / Oracle / Halt.
At limit stages the instruction pointer takes the liminf of its history and
each register keeps its liminf if that is finite; a register that climbed
unboundedly is reset to zero (or, under the crash variant, aborts the run).

Certified translated cycles carry per-register increments; a window is
accepted only when every instruction along it commutes with adding those
increments, which is what makes the infinite continuation provable from a
finite check.  Looping verdicts come from a limit-stage snapshot recurring
at a later limit stage, re-verified by executing one more full period.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import (
    BudgetExceededError,
    MachineDefinitionError,
    MissingOracleError,
    UncertifiedLimitError,
)
from .ordinal import OMEGA, ZERO, Ordinal, left_sub, render
from .periodic import EpReal
from .runtime import (
    BUDGET_EXCEEDED,
    CRASHED,
    HALTED,
    LOOPING,
    LimitEvaluation,
    RunConfig,
    RunOutcome,
)

OPS = ("ZERO", "INC", "COPY", "JMPEQ", "ORACLE", "HALT")


class ItrmProgram:
    """A finite instruction list over registers R0..R(n-1).

    Instructions: ("ZERO", i), ("INC", i), ("COPY", i, j) for Rj := Ri,
    ("JMPEQ", i, j, target), ("ORACLE", i, j) for Rj := oracle bit at Ri,
    and ("HALT",).  The machine is halted whenever the pointer rests on a
    HALT instruction or runs past the end; halting itself costs no step.
    """

    def __init__(self, instructions, registers: int):
        self.instructions = tuple(tuple(ins) for ins in instructions)
        self.registers = registers
        self._validate()

    def _validate(self):
        if self.registers < 1:
            raise MachineDefinitionError("need at least one register")
        n = len(self.instructions)
        for k, ins in enumerate(self.instructions):
            op = ins[0]
            if op == "ZERO" and len(ins) == 2:
                regs = ins[1:]
            elif op == "INC" and len(ins) == 2:
                regs = ins[1:]
            elif op == "COPY" and len(ins) == 3:
                regs = ins[1:]
            elif op == "JMPEQ" and len(ins) == 4:
                regs = ins[1:3]
                if not (0 <= ins[3] < n):
                    raise MachineDefinitionError(f"jump target out of range at {k}")
            elif op == "ORACLE" and len(ins) == 3:
                regs = ins[1:]
            elif op == "HALT" and len(ins) == 1:
                regs = ()
            else:
                raise MachineDefinitionError(f"bad instruction at {k}: {ins!r}")
            if any(not (0 <= r < self.registers) for r in regs):
                raise MachineDefinitionError(f"register out of range at {k}")

    def is_halted(self, ip: int) -> bool:
        return ip >= len(self.instructions) or self.instructions[ip][0] == "HALT"

    def __eq__(self, other):
        return (isinstance(other, ItrmProgram)
                and self.instructions == other.instructions
                and self.registers == other.registers)

    def __hash__(self):
        return hash((self.instructions, self.registers))


@dataclass(frozen=True)
class ItrmSnapshot:
    time: Ordinal
    ip: int
    regs: tuple

    def config(self):
        return (self.ip, self.regs)


@dataclass(frozen=True)
class PureCycle:
    start: Ordinal
    period: int
    start_index: int = 0


@dataclass(frozen=True)
class TranslatedCycle:
    start: Ordinal
    period: int
    increments: tuple
    start_index: int = 0


@dataclass(frozen=True)
class Heuristic:
    budget: int


def initial_snapshot(program: ItrmProgram,
                     regs: tuple | None = None) -> ItrmSnapshot:
    r = tuple(regs) if regs is not None else (0,) * program.registers
    if len(r) != program.registers:
        raise ValueError("wrong register vector length")
    return ItrmSnapshot(ZERO, 0, r)


def _exec(ins, ip, regs, oracle):
    """Execute one decoded instruction; mutates regs (a list)."""
    op = ins[0]
    if op == "INC":
        regs[ins[1]] += 1
        return ip + 1
    if op == "JMPEQ":
        return ins[3] if regs[ins[1]] == regs[ins[2]] else ip + 1
    if op == "ZERO":
        regs[ins[1]] = 0
        return ip + 1
    if op == "COPY":
        regs[ins[2]] = regs[ins[1]]
        return ip + 1
    if op == "ORACLE":
        if oracle is None:
            raise MissingOracleError("oracle instruction with no oracle")
        regs[ins[2]] = oracle.get(regs[ins[1]])
        return ip + 1
    raise ValueError(f"cannot execute {op}")


def step(snapshot: ItrmSnapshot, program: ItrmProgram,
         oracle: EpReal | None = None) -> ItrmSnapshot:
    """One successor step; the snapshot must not be halted."""
    if program.is_halted(snapshot.ip):
        raise ValueError("cannot step a halted snapshot")
    regs = list(snapshot.regs)
    ip = _exec(program.instructions[snapshot.ip], snapshot.ip, regs, oracle)
    return ItrmSnapshot(snapshot.time + Ordinal.from_int(1), ip, tuple(regs))


# ---------------------------------------------------------------------
# certificates


def _commutes(window, i, j, delta, program, oracle):
    """Check every step of window[i:j] commutes with adding delta.

    That check is what turns one observed shifted repetition into a proof
    that every later pass repeats shifted as well.
    """
    for t in range(i, j):
        ip, regs = window[t]
        ins = program.instructions[ip]
        op = ins[0]
        if op == "INC":
            continue
        if op == "ZERO":
            if delta[ins[1]] != 0:
                return False
        elif op == "COPY":
            if delta[ins[2]] != delta[ins[1]]:
                return False
        elif op == "JMPEQ":
            da, db = delta[ins[1]], delta[ins[2]]
            if da == db:
                continue
            va, vb = regs[ins[1]], regs[ins[2]]
            if va == vb:
                return False
            dd = db - da
            if (va - vb) % dd == 0 and (va - vb) // dd >= 1:
                return False
        elif op == "ORACLE":
            if delta[ins[2]] != 0:
                return False
            da = delta[ins[1]]
            if da != 0:
                if oracle is None or not oracle.constant_on_progression(
                        regs[ins[1]], da):
                    return False
    return True


def detect_certificate(window, program: ItrmProgram, oracle: EpReal | None = None,
                       base_time: Ordinal | None = None):
    """Pure or commutation-checked translated cycle in a step window."""
    if not window:
        return Heuristic(0)
    if isinstance(window[0], ItrmSnapshot):
        t0 = window[0].time
        window = [s.config() for s in window]
    else:
        t0 = base_time if base_time is not None else ZERO
    seen = {}
    for j, cfg in enumerate(window):
        if cfg in seen:
            i = seen[cfg]
            return PureCycle(start=t0 + Ordinal.from_int(i), period=j - i,
                             start_index=i)
        seen[cfg] = j
    j = len(window) - 1
    ipj, regs_j = window[j]
    for i in range(j - 1, -1, -1):
        ipi, regs_i = window[i]
        if ipi != ipj:
            continue
        delta = tuple(b - a for a, b in zip(regs_i, regs_j))
        if any(d < 0 for d in delta) or all(d == 0 for d in delta):
            continue
        if _commutes(window, i, j, delta, program, oracle):
            return TranslatedCycle(start=t0 + Ordinal.from_int(i), period=j - i,
                                   increments=delta, start_index=i)
    return Heuristic(len(window))


# ---------------------------------------------------------------------
# limit evaluation


def _limit_cfg_from_cert(window, cert, program, config):
    """Returns ((ip, regs), unbounded registers) at the limit."""
    i = cert.start_index
    j = i + cert.period
    cycle = window[i:j]
    ip = min(c[0] for c in cycle)
    unbounded = []
    regs = []
    if isinstance(cert, PureCycle):
        for r in range(program.registers):
            regs.append(min(c[1][r] for c in cycle))
    else:
        for r in range(program.registers):
            if cert.increments[r] > 0:
                unbounded.append(r)
                regs.append(0)
            else:
                regs.append(min(c[1][r] for c in cycle))
    return (ip, tuple(regs)), tuple(unbounded)


def limit_registers(window, certificate, lam: Ordinal, program: ItrmProgram,
                    config: RunConfig | None = None) -> ItrmSnapshot:
    """Limit-stage snapshot: liminf pointer, liminf* registers."""
    config = config or RunConfig()
    if window and isinstance(window[0], ItrmSnapshot):
        window = [s.config() for s in window]
    if isinstance(certificate, Heuristic):
        if config.strict:
            raise UncertifiedLimitError("only heuristic evidence for this limit")
        cfg = _limit_heuristic(window, program)
        return ItrmSnapshot(lam, cfg[0], cfg[1])
    cfg, _ = _limit_cfg_from_cert(window, certificate, program, config)
    return ItrmSnapshot(lam, cfg[0], cfg[1])


def _limit_heuristic(window, program):
    tail = window[len(window) // 2:]
    quarter = window[3 * len(window) // 4:]
    ip = min(c[0] for c in tail)
    regs = []
    for r in range(program.registers):
        mt = min(c[1][r] for c in tail)
        mq = min(c[1][r] for c in quarter) if quarter else mt
        regs.append(mt if mt == mq else 0)
    return (ip, tuple(regs))


# ---------------------------------------------------------------------
# the run loop


def run(program: ItrmProgram, oracle: EpReal | None = None,
        config: RunConfig | None = None,
        initial_regs: tuple | None = None) -> RunOutcome:
    config = config or RunConfig()
    regs = list(initial_regs) if initial_regs is not None \
        else [0] * program.registers
    if len(regs) != program.registers:
        raise ValueError("wrong register vector length")
    ip = 0
    base = ZERO
    hops = 0
    total_steps = 0
    certified = True
    evals = []
    trace = [] if config.trace else None
    checkpoints = {(0, tuple(regs)): ZERO}
    pending = None

    def snap(cfg, t):
        return ItrmSnapshot(t, cfg[0], cfg[1])

    def done(verdict, **kw):
        return RunOutcome(verdict, certified=certified, steps=total_steps,
                          limit_evaluations=evals, trace=trace, **kw)

    def handle_hop(limit_cfg, lam, kind, start_cfg, cert):
        nonlocal pending
        if config.collect_limits:
            evals.append(LimitEvaluation(time=lam, kind=kind,
                                         start_snapshot=snap(start_cfg, ZERO),
                                         limit_snapshot=snap(limit_cfg, lam),
                                         certificate=cert))
        if trace is not None:
            trace.append({"t": render(lam), "limit": True, "cert": kind,
                          "ip": limit_cfg[0],
                          "regs": list(limit_cfg[1])})
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

    instructions = program.instructions
    n = len(instructions)
    while True:
        max_steps = config.budget
        if config.max_time.is_finite:
            room = config.max_time.to_int() - base.to_int()
            if room <= 0:
                return done(BUDGET_EXCEEDED, reason="max-time",
                            last_snapshot=snap((ip, tuple(regs)), base))
            max_steps = room
        window = [(ip, tuple(regs))]
        halted = program.is_halted(ip)
        steps = 0
        while not halted and steps < max_steps:
            ip = _exec(instructions[ip], ip, regs, oracle)
            steps += 1
            window.append((ip, tuple(regs)))
            halted = ip >= n or instructions[ip][0] == "HALT"
        total_steps += steps
        if trace is not None:
            for k in range(1, len(window)):
                trace.append({"t": render(base + Ordinal.from_int(k)),
                              "ip": window[k][0], "regs": list(window[k][1])})
        if halted:
            t = base + Ordinal.from_int(steps)
            return done(HALTED, time=t, output=tuple(regs),
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
            limit_cfg = _limit_heuristic(window, program)
            unbounded = ()
            certified = False
            kind = "heuristic"
        else:
            limit_cfg, unbounded = _limit_cfg_from_cert(window, cert, program, config)
            kind = "pure" if isinstance(cert, PureCycle) else "translated"

        lam = base + OMEGA
        if lam >= config.max_time:
            return done(BUDGET_EXCEEDED, reason="max-time",
                        last_snapshot=snap(limit_cfg, lam))
        if unbounded and config.itrm_crash_unbounded:
            return done(CRASHED, time=lam, crash_register=f"R{unbounded[0]}",
                        last_snapshot=snap(limit_cfg, lam))
        hops += 1
        outcome = handle_hop(limit_cfg, lam, kind, window[0], cert)
        if outcome is not None:
            return outcome
        if hops >= config.max_hops:
            return done(BUDGET_EXCEEDED, reason="hop-budget",
                        last_snapshot=snap(limit_cfg, lam))
        base = lam
        ip = limit_cfg[0]
        regs = list(limit_cfg[1])


def clock(program: ItrmProgram, oracle: EpReal | None = None,
          config: RunConfig | None = None, initial_regs: tuple | None = None):
    """Exact halting ordinal, or the non-halting outcome."""
    outcome = run(program, oracle, config, initial_regs)
    if outcome.halted and outcome.certified:
        return outcome.time
    return outcome


# ---------------------------------------------------------------------
# wellfoundedness via the shipped leftmost-path searcher


def leftmost_path_program(m: int) -> ItrmProgram:
    """Backtracking leftmost-path search over an m-node relation oracle.

    The relation is coded as oracle bits i*m + j for the edge i -> j.  The
    program DFS-extends a path trying least candidates first; reaching a
    node already on the path closes a descending cycle, so the relation is
    illfounded.  Exhausting all starts proves wellfoundedness.  The result
    register holds 1 for wellfounded, 0 for illfounded.
    """
    if m < 0:
        raise ValueError("node bound must be >= 0")
    Z, M, S, T, U, B = 0, 1, 2, 3, 4, 5
    N = [6 + d for d in range(m)]
    C = [6 + m + d for d in range(m)]
    RES = 6 + 2 * m
    code = []          # (op, args...) with str labels as jump targets
    labels = {}

    def emit(*ins):
        code.append(list(ins))

    def mark(label):
        labels[label] = len(code)

    for _ in range(m):
        emit("INC", M)
    mark("start_loop")
    emit("JMPEQ", S, M, "wf_exit")
    if m > 0:
        emit("COPY", S, N[0])
        emit("ZERO", C[0])
        emit("JMPEQ", Z, Z, "try_0")
    for d in range(m):
        mark(f"try_{d}")
        emit("JMPEQ", C[d], M, f"pop_{d}")
        emit("ZERO", T)
        emit("ZERO", U)
        mark(f"mul_{d}")
        emit("JMPEQ", U, N[d], f"mul_done_{d}")
        for _ in range(m):
            emit("INC", T)
        emit("INC", U)
        emit("JMPEQ", Z, Z, f"mul_{d}")
        mark(f"mul_done_{d}")
        emit("ZERO", U)
        mark(f"add_{d}")
        emit("JMPEQ", U, C[d], f"add_done_{d}")
        emit("INC", T)
        emit("INC", U)
        emit("JMPEQ", Z, Z, f"add_{d}")
        mark(f"add_done_{d}")
        emit("ORACLE", T, B)
        emit("JMPEQ", B, Z, f"next_{d}")
        for e in range(d + 1):
            emit("JMPEQ", C[d], N[e], "ill_exit")
        if d + 1 < m:
            # push the new node and remember where to resume at this depth
            emit("COPY", C[d], N[d + 1])
            emit("ZERO", C[d + 1])
            emit("INC", C[d])
            emit("JMPEQ", Z, Z, f"try_{d + 1}")
        else:
            # a path of m distinct nodes cannot be extended without a repeat
            emit("JMPEQ", Z, Z, f"next_{d}")
        mark(f"next_{d}")
        emit("INC", C[d])
        emit("JMPEQ", Z, Z, f"try_{d}")
        mark(f"pop_{d}")
        if d == 0:
            emit("INC", S)
            emit("JMPEQ", Z, Z, "start_loop")
        else:
            emit("JMPEQ", Z, Z, f"try_{d - 1}")
    mark("wf_exit")
    emit("INC", RES)
    emit("HALT")
    mark("ill_exit")
    emit("HALT")

    resolved = []
    for ins in code:
        if ins[0] == "JMPEQ" and isinstance(ins[3], str):
            ins[3] = labels[ins[3]]
        resolved.append(tuple(ins))
    return ItrmProgram(resolved, registers=RES + 1)


def relation_oracle(edges, nodes: int) -> EpReal:
    """Code an edge list over 0..nodes-1 as the oracle for the searcher."""
    bits = [0] * (nodes * nodes)
    for a, b in edges:
        if not (0 <= a < nodes and 0 <= b < nodes):
            raise ValueError(f"edge ({a}, {b}) outside 0..{nodes - 1}")
        bits[a * nodes + b] = 1
    return EpReal(tuple(bits), (0,))


def decide_wellfounded(edges, nodes: int, budget: int = 3_000_000) -> bool:
    """Run the shipped searcher; True iff the relation is wellfounded."""
    program = leftmost_path_program(nodes)
    oracle = relation_oracle(edges, nodes)
    config = RunConfig(budget=budget, max_hops=1)
    outcome = run(program, oracle, config)
    if not outcome.halted:
        raise BudgetExceededError(
            f"searcher did not finish within {budget} steps")
    return outcome.output[6 + 2 * nodes] == 1


# ---------------------------------------------------------------------
# bounded halting-set enumeration


@dataclass
class HaltingEntry:
    program: ItrmProgram
    verdict: str            # halts | loops | unknown
    time: Ordinal | None = None
    entry: Ordinal | None = None
    period: Ordinal | None = None


@dataclass
class HaltingReport:
    registers: int
    max_instructions: int
    entries: list

    @property
    def counts(self):
        c = {"halts": 0, "loops": 0, "unknown": 0}
        for e in self.entries:
            c[e.verdict] += 1
        return c


def _instruction_space(registers: int, length: int):
    space = []
    for i in range(registers):
        space.append(("ZERO", i))
        space.append(("INC", i))
    for i in range(registers):
        for j in range(registers):
            space.append(("COPY", i, j))
    for i in range(registers):
        for j in range(registers):
            for t in range(length):
                space.append(("JMPEQ", i, j, t))
    space.append(("HALT",))
    return space


def enumerate_halting(registers: int = 1, max_instructions: int = 3,
                      config: RunConfig | None = None) -> HaltingReport:
    """Classify every oracle-free program within the size bounds.

    Initial registers are all zero.  Verdicts are certified: anything that
    cannot be settled within budget is reported as unknown, never guessed.
    """
    from itertools import product

    config = config or RunConfig(budget=256, max_hops=8)
    entries = []
    for length in range(1, max_instructions + 1):
        space = _instruction_space(registers, length)
        for combo in product(space, repeat=length):
            program = ItrmProgram(combo, registers)
            outcome = run(program, None, config)
            if outcome.halted:
                entries.append(HaltingEntry(program, "halts", time=outcome.time))
            elif outcome.verdict == LOOPING and outcome.certified \
                    and outcome.loop_verified:
                entries.append(HaltingEntry(program, "loops",
                                            entry=outcome.entry,
                                            period=outcome.period))
            else:
                entries.append(HaltingEntry(program, "unknown"))
    return HaltingReport(registers, max_instructions, entries)
