"""Infinite time Blum-Shub-Smale machine engine.

Flow-graph programs over real registers: assignment nodes evaluate rational
functions exactly, branch nodes route three ways on the sign of a register.
At a limit stage every register must converge in the ordinary sense; a
register with no limit crashes the whole run.

Convergence is never assumed.  A limit is evaluated only when the tail of
the run settles into a fixed node cycle and every register's behaviour
across cycle passes falls into a provable class:

  * preserved value      the pass map provably fixes the current value
  * affine self-map      r' = a*r + b with |a| < 1: exact limit b/(1-a);
                         a = 1 with drift, a <= -1, or a > 1 off the fixed
                         point certify divergence/oscillation, i.e. a crash
  * monotone fixed point r' = g(r) with g provably increasing on a bracket
                         holding exactly one fixed point: exact limit
  * derived              a rational function of registers that already have
                         limits, continuous there
  * geometric Cauchy     successive pass differences shrink by a verified
                         ratio q < 1: an enclosure of the limit

Branch routes must additionally be provably sign-stable over all future
passes, otherwise the limit stays uncertified and the run stops honestly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import AmbiguousBranchError, MachineDefinitionError, UncertifiedLimitError
from .ordinal import OMEGA, ZERO, Ordinal, left_sub, omega_pow, render
from .ratfunc import (
    Interval,
    Polynomial,
    RatFunc,
    ZeroDenominator,
    count_roots_open,
    rational_roots,
    value_sign,
    _poly_eval,
    _poly_trim,
)
from .runtime import (
    BUDGET_EXCEEDED,
    CRASHED,
    HALTED,
    LOOPING,
    LimitEvaluation,
    RunConfig,
    RunOutcome,
)


@dataclass(frozen=True)
class Assign:
    reg: int
    fn: RatFunc
    next: int


@dataclass(frozen=True)
class Branch:
    reg: int
    neg: int
    zero: int
    pos: int


@dataclass(frozen=True)
class HaltNode:
    outputs: tuple


class BssProgram:
    """A flow graph; node declaration order is the liminf priority."""

    def __init__(self, nodes, register_names, inputs=()):
        self.nodes = tuple(nodes)
        self.register_names = tuple(register_names)
        self.inputs = tuple(inputs)
        self._validate()

    @property
    def node_count(self):
        return len(self.nodes)

    def _validate(self):
        if not self.nodes:
            raise MachineDefinitionError("a program needs at least one node")
        if len(set(self.register_names)) != len(self.register_names):
            raise MachineDefinitionError("duplicate register names")
        n = len(self.nodes)
        nreg = len(self.register_names)
        for k, node in enumerate(self.nodes):
            if isinstance(node, Assign):
                if not (0 <= node.reg < nreg) or not (0 <= node.next < n):
                    raise MachineDefinitionError(f"bad assign node {k}")
                if node.fn.n != nreg:
                    raise MachineDefinitionError(f"node {k}: wrong register count")
            elif isinstance(node, Branch):
                if not (0 <= node.reg < nreg):
                    raise MachineDefinitionError(f"bad branch register at {k}")
                for t in (node.neg, node.zero, node.pos):
                    if not (0 <= t < n):
                        raise MachineDefinitionError(f"bad branch target at {k}")
            elif isinstance(node, HaltNode):
                if any(not (0 <= r < nreg) for r in node.outputs):
                    raise MachineDefinitionError(f"bad output register at {k}")
            else:
                raise MachineDefinitionError(f"unknown node kind at {k}")
        for r in self.inputs:
            if not (0 <= r < nreg):
                raise MachineDefinitionError("bad input register")

    def __eq__(self, other):
        return (isinstance(other, BssProgram) and self.nodes == other.nodes
                and self.register_names == other.register_names
                and self.inputs == other.inputs)

    def __hash__(self):
        return hash((self.nodes, self.register_names, self.inputs))


@dataclass(frozen=True)
class BssSnapshot:
    time: Ordinal
    node: int
    regs: tuple

    def config(self):
        return (self.node, self.regs)


# certificates -----------------------------------------------------------


@dataclass(frozen=True)
class PreservedValue:
    register: str
    value: Fraction


@dataclass(frozen=True)
class AffineCycle:
    register: str
    a: Fraction
    b: Fraction
    limit: Fraction


@dataclass(frozen=True)
class FixedPointCycle:
    register: str
    limit: Fraction


@dataclass(frozen=True)
class DerivedLimit:
    register: str
    limit: object


@dataclass(frozen=True)
class CauchyTail:
    register: str
    ratio: Fraction
    bound: Fraction
    enclosure: Interval


@dataclass(frozen=True)
class Oscillation:
    register: str
    separation: Fraction


@dataclass(frozen=True)
class Divergence:
    register: str


# stepping ----------------------------------------------------------------


def initial_snapshot(program: BssProgram, inputs=()) -> BssSnapshot:
    regs = [Fraction(0)] * len(program.register_names)
    if len(inputs) != len(program.inputs):
        raise ValueError(f"program expects {len(program.inputs)} inputs")
    for r, v in zip(program.inputs, inputs):
        regs[r] = Fraction(v)
    return BssSnapshot(ZERO, 0, tuple(regs))


def step(snapshot: BssSnapshot, program: BssProgram) -> BssSnapshot:
    """One successor step; raises ZeroDenominator on division by zero and
    AmbiguousBranchError when a validated-mode sign is undecided."""
    node = program.nodes[snapshot.node]
    if isinstance(node, HaltNode):
        raise ValueError("cannot step a halted snapshot")
    regs = list(snapshot.regs)
    if isinstance(node, Assign):
        regs[node.reg] = node.fn.eval(regs)
        nxt = node.next
    else:
        s = value_sign(regs[node.reg])
        nxt = node.neg if s < 0 else (node.zero if s == 0 else node.pos)
    return BssSnapshot(snapshot.time + Ordinal.from_int(1), nxt, tuple(regs))


# limit machinery ----------------------------------------------------------


def _pass_structure(window):
    """Smallest period p of the tail node sequence, plus pass boundaries."""
    nodes = [w[0] for w in window]
    n = len(nodes)
    period = None
    for p in range(1, n // 3 + 1):
        if all(nodes[n - 1 - k] == nodes[n - 1 - k - p] for k in range(2 * p)):
            period = p
            break
    if period is None:
        return None
    p = period
    t = n - 1 - p
    while t - 1 >= 0 and nodes[t - 1] == nodes[t - 1 + p]:
        t -= 1
    anchor = min(nodes[n - p:])
    last = max(u for u in range(n - p, n) if nodes[u] == anchor)
    boundaries = []
    b = last
    while b >= t:
        boundaries.append(b)
        b -= p
    boundaries.reverse()
    if len(boundaries) < 4:
        return None
    return p, boundaries


def _compose_pass(program, window, b, p):
    """Symbolic pass map plus branch checkpoints of one full pass."""
    nreg = len(program.register_names)
    vec = [RatFunc.var(nreg, r) for r in range(nreg)]
    branches = []
    for t in range(b, b + p):
        node = program.nodes[window[t][0]]
        if isinstance(node, Assign):
            vec[node.reg] = node.fn.eval_sym(vec)
        elif isinstance(node, Branch):
            branches.append((node.reg, vec[node.reg],
                             value_sign(window[t][1][node.reg])))
    return vec, branches


def _as_univariate(fn: RatFunc, r: int):
    return fn.num.univariate(r), fn.den.univariate(r)


def _interval_eval_poly(cs, iv: Interval):
    acc = Interval.point(0)
    for c in reversed(cs):
        acc = acc * iv + Interval.point(c)
    return acc


def _fixed_point(fn: RatFunc, values, r: int):
    """Exact limit of a provably monotone orbit of a rational self-map."""
    if len(values) < 4 or any(not isinstance(v, Fraction) for v in values):
        return None
    decreasing = all(b < a for a, b in zip(values, values[1:]))
    increasing = all(b > a for a, b in zip(values, values[1:]))
    if not (decreasing or increasing):
        return None
    num, den = _as_univariate(fn, r)
    # fixed points: num(x) - x*den(x) = 0
    p = [c for c in num]
    shifted = [Fraction(0)] + list(den)
    width = max(len(p), len(shifted))
    p = [ (p[k] if k < len(p) else Fraction(0))
          - (shifted[k] if k < len(shifted) else Fraction(0))
          for k in range(width) ]
    p = _poly_trim(p)
    if not p:
        return None
    v_last, v_first = values[-1], values[0]
    if _poly_eval(p, v_last) == 0:
        return None
    roots = rational_roots(p)
    if decreasing:
        below = [x for x in roots if x < v_last]
        if not below:
            return None
        target = max(below)
        if count_roots_open(p, target, v_last) != 0:
            return None
        lo, hi = target, v_first
    else:
        above = [x for x in roots if x > v_last]
        if not above:
            return None
        target = min(above)
        # (v_last, target] must hold exactly the one fixed point
        if count_roots_open(p, v_last, target) != 1:
            return None
        lo, hi = v_first, target
    bracket = Interval(lo, hi)
    den_range = _interval_eval_poly(den, bracket)
    if den_range.contains_zero():
        return None
    # g strictly increasing on the bracket: num'*den - num*den' > 0
    dnum = [c * k for k, c in enumerate(num)][1:]
    dden = [c * k for k, c in enumerate(den)][1:]

    def times(a_, b_):
        out = [Fraction(0)] * (max(len(a_) + len(b_) - 1, 1))
        for i, ca in enumerate(a_):
            for j, cb in enumerate(b_):
                out[i + j] += ca * cb
        return out

    def minus(a_, b_):
        w = max(len(a_), len(b_))
        return [(a_[k] if k < len(a_) else Fraction(0))
                - (b_[k] if k < len(b_) else Fraction(0)) for k in range(w)]

    h = minus(times(dnum, den), times(num, dden))
    h = _poly_trim(h)
    if not h:
        return None
    if not _interval_eval_poly(h, bracket).lo > 0:
        return None
    return target


def _geometric_fits(vals, L, q):
    """Do the samples satisfy v[k+1] - L == q * (v[k] - L) exactly?"""
    return all(vals[k + 1] - L == q * (vals[k] - L) for k in range(len(vals) - 1))


def _classify_registers(program, F, samples, branches, config):
    """Limits, certificates and sign forms per register, or a crash.

    Returns ("crash", register, certificate), ("uncertified", why), or
    ("ok", limits, certs, forms).
    """
    nreg = len(program.register_names)
    names = program.register_names
    limits = [None] * nreg
    certs = [None] * nreg
    forms = [None] * nreg
    v_last = samples[-1]

    for r in range(nreg):
        fr = F[r]
        if isinstance(v_last[r], Fraction):
            sub = fr.substitute(r, v_last[r]).constant_value()
            if sub is not None and sub == v_last[r]:
                limits[r] = v_last[r]
                certs[r] = PreservedValue(names[r], v_last[r])
                forms[r] = ("const", v_last[r])
                continue
        aff = fr.affine_in(r)
        if aff is not None:
            a, b = aff
            if abs(a) < 1:
                lim = b / (1 - a)
                limits[r] = lim
                certs[r] = AffineCycle(names[r], a, b, lim)
                if isinstance(v_last[r], Fraction):
                    forms[r] = ("geom", lim, v_last[r] - lim, a)
                continue
            if a == 1:
                return ("crash", names[r], Divergence(names[r]))
            if a > 1:
                return ("crash", names[r], Divergence(names[r]))
            sep = None
            if isinstance(v_last[r], Fraction):
                sep = abs((v_last[r] - b / (1 - a)) * (1 - a))
            return ("crash", names[r], Oscillation(names[r], sep or Fraction(0)))
        if fr.self_map_in(r):
            vals = [s[r] for s in samples]
            lim = _fixed_point(fr, vals, r)
            if lim is not None:
                limits[r] = lim
                certs[r] = FixedPointCycle(names[r], lim)
                direction = -1 if vals[-1] < vals[0] else 1
                forms[r] = ("monotone", direction, lim, vals[-1])
                continue

    changed = True
    while changed:
        changed = False
        for r in range(nreg):
            if limits[r] is not None:
                continue
            fr = F[r]
            deps = fr.depends_on()
            if r in deps or any(limits[d] is None for d in deps):
                continue
            lim_vec = [limits[d] if limits[d] is not None else Fraction(0)
                       for d in range(nreg)]
            try:
                den = fr.den.eval(lim_vec)
                if isinstance(den, Fraction):
                    if den == 0:
                        continue
                elif den.contains_zero():
                    continue
                lim = fr.eval(lim_vec)
            except (ZeroDenominator, AmbiguousBranchError):
                continue
            limits[r] = lim
            certs[r] = DerivedLimit(names[r], lim)
            changed = True
            if len(deps) == 1 and isinstance(lim, Fraction):
                (d,) = tuple(deps)
                aff = fr.affine_in(d)
                vals = [s[r] for s in samples]
                if all(isinstance(v, Fraction) for v in vals) and aff is not None:
                    fd = forms[d]
                    if fd is not None and fd[0] == "const":
                        if all(v == vals[-1] for v in vals):
                            forms[r] = ("const", lim)
                    elif fd is not None and fd[0] == "geom":
                        q = fd[3]
                        if _geometric_fits(vals, lim, q):
                            forms[r] = ("geom", lim, vals[-1] - lim, q)
                    elif fd is not None and fd[0] == "monotone" and aff[0] != 0:
                        direction = fd[1] * (1 if aff[0] > 0 else -1)
                        forms[r] = ("monotone", direction, lim, vals[-1])

    for r in range(nreg):
        if limits[r] is not None:
            continue
        vals = [s[r] for s in samples]
        if any(not isinstance(v, Fraction) for v in vals):
            return ("uncertified", f"interval register {names[r]} did not settle")
        diffs = [vals[k + 1] - vals[k] for k in range(len(vals) - 1)]
        if any(d == 0 for d in diffs):
            return ("uncertified", f"register {names[r]} has no certificate")
        ratios = [abs(diffs[k + 1]) / abs(diffs[k]) for k in range(len(diffs) - 1)]
        if len(ratios) < 3:
            return ("uncertified", f"too few passes to bound {names[r]}")
        tail = ratios[len(ratios) // 2:]
        q = max(tail)
        if q >= 1 or any(b > a for a, b in zip(tail, tail[1:])):
            return ("uncertified", f"register {names[r]} is not provably Cauchy")
        w = abs(diffs[-1]) * q / (1 - q)
        if 2 * w > config.precision:
            return ("uncertified",
                    f"register {names[r]} enclosure wider than precision")
        enc = Interval(vals[-1] - w, vals[-1] + w)
        limits[r] = enc
        certs[r] = CauchyTail(names[r], q, abs(diffs[-1]), enc)

    stable, why = _branches_stable(program, branches, forms)
    if not stable:
        return ("uncertified", why)
    return ("ok", limits, certs, forms)


def _sign_of(v) -> int:
    return (v > 0) - (v < 0)


def _branches_stable(program, branches, forms):
    """Prove every branch keeps taking its observed route in future passes."""
    nreg = len(program.register_names)
    for reg, sym, s in branches:
        cv = sym.constant_value()
        if cv is not None:
            if _sign_of(cv) != s:
                return False, f"branch on {program.register_names[reg]} flips"
            continue
        deps = sym.depends_on()
        if len(deps) != 1:
            return False, "branch depends on several registers"
        (d,) = tuple(deps)
        aff = (Fraction(1), Fraction(0)) if sym == RatFunc.var(nreg, d) \
            else sym.affine_in(d)
        if aff is None or forms[d] is None:
            return False, f"branch value on {program.register_names[d]} unprovable"
        al, be = aff
        kind = forms[d][0]
        if kind == "const":
            if _sign_of(al * forms[d][1] + be) != s:
                return False, "branch flips"
        elif kind == "geom":
            _, L, c, q = forms[d]
            lb, cb = al * L + be, al * c
            if cb == 0 or q == 0:
                if _sign_of(lb) != s:
                    return False, "branch flips in the limit"
                continue
            if q < 0:
                return False, "alternating branch value"
            x = cb * q
            ok = True
            while abs(x) >= abs(lb) if lb != 0 else False:
                if _sign_of(lb + x) != s:
                    ok = False
                    break
                x *= q
            if lb == 0:
                ok = _sign_of(cb) == s
            elif ok:
                ok = _sign_of(lb) == s
            if not ok:
                return False, "branch flips"
        elif kind == "monotone":
            _, direction, L, last = forms[d]
            e1 = al * last + be
            e2 = al * L + be
            if s == 0:
                return False, "zero route cannot stay exact"
            if _sign_of(e1) != s or (_sign_of(e2) != s and e2 != 0):
                return False, "branch flips on the monotone path"
        else:
            return False, "no sign form for branch register"
    return True, ""


def limit_registers(window, lam: Ordinal, program: BssProgram,
                    config: RunConfig | None = None):
    """Evaluate the limit configuration of a settled window.

    Returns ("ok", (node, regs), certs), ("crash", register, cert), or
    raises UncertifiedLimitError with the reason.
    """
    config = config or RunConfig()
    if window and isinstance(window[0], BssSnapshot):
        window = [s.config() for s in window]
    ps = _pass_structure(window)
    if ps is None:
        raise UncertifiedLimitError("no repeating node cycle in the window")
    p, boundaries = ps
    samples = [window[b][1] for b in boundaries]
    if len(samples) > 64:
        boundaries = boundaries[-64:]
        samples = samples[-64:]
    F, branches = _compose_pass(program, window, boundaries[-2], p)
    got = _classify_registers(program, F, samples, branches, config)
    if got[0] == "crash":
        return got
    if got[0] == "uncertified":
        raise UncertifiedLimitError(got[1])
    _, limits, certs, _forms = got
    node = min(window[b][0] for b in range(boundaries[-2], boundaries[-2] + p))
    return ("ok", (node, tuple(limits)), certs)


# run loop ------------------------------------------------------------------


def run(program: BssProgram, inputs=(), config: RunConfig | None = None,
        validated: bool = False) -> RunOutcome:
    config = config or RunConfig()
    snap0 = initial_snapshot(program, inputs)
    regs = list(snap0.regs)
    if validated:
        regs = [Interval.point(v) for v in regs]
    node = 0
    base = ZERO
    hops = 0
    total_steps = 0
    evals = []
    trace = [] if config.trace else None
    checkpoints = {(0, tuple(regs)): ZERO}
    pending = None
    nodes = program.nodes

    def snap(cfg, t):
        return BssSnapshot(t, cfg[0], cfg[1])

    def done(verdict, **kw):
        out = RunOutcome(verdict, steps=total_steps, limit_evaluations=evals,
                         trace=trace, **kw)
        t = out.time if out.time is not None else (
            out.entry + out.period if out.entry is not None else None)
        if t is not None:
            out.bound_ok = t < omega_pow(Ordinal.from_int(program.node_count + 1))
        return out

    def handle_hop(limit_cfg, lam, kind, start_cfg, cert):
        nonlocal pending
        if config.collect_limits:
            evals.append(LimitEvaluation(time=lam, kind=kind,
                                         start_snapshot=snap(start_cfg, ZERO),
                                         limit_snapshot=snap(limit_cfg, lam),
                                         certificate=cert))
        if trace is not None:
            trace.append({"t": render(lam), "limit": True, "cert": kind,
                          "node": limit_cfg[0]})
        key = limit_cfg
        if pending is not None:
            entry, t1, pkey = pending
            period = left_sub(entry, t1)
            expected = t1 + period
            if lam == expected and key == pkey:
                return done(LOOPING, entry=entry, period=period,
                            loop_verified=True, last_snapshot=snap(limit_cfg, lam))
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
        max_steps = config.budget
        if config.max_time.is_finite:
            room = config.max_time.to_int() - base.to_int()
            if room <= 0:
                return done(BUDGET_EXCEEDED, reason="max-time",
                            last_snapshot=snap((node, tuple(regs)), base))
            max_steps = room
        window = [(node, tuple(regs))]
        halted = isinstance(nodes[node], HaltNode)
        steps = 0
        while not halted and steps < max_steps:
            nd = nodes[node]
            if isinstance(nd, Assign):
                try:
                    regs[nd.reg] = nd.fn.eval(regs)
                except ZeroDenominator:
                    t = base + Ordinal.from_int(steps + 1)
                    total_steps += steps + 1
                    return done(CRASHED, time=t,
                                crash_register=program.register_names[nd.reg],
                                reason="division-by-zero",
                                last_snapshot=snap((node, tuple(regs)), t))
                node = nd.next
            else:
                s = value_sign(regs[nd.reg])
                node = nd.neg if s < 0 else (nd.zero if s == 0 else nd.pos)
            steps += 1
            window.append((node, tuple(regs)))
            halted = isinstance(nodes[node], HaltNode)
        total_steps += steps
        if trace is not None:
            for k in range(1, len(window)):
                trace.append({"t": render(base + Ordinal.from_int(k)),
                              "node": window[k][0],
                              "regs": [_render_value(v) for v in window[k][1]]})
        if halted:
            t = base + Ordinal.from_int(steps)
            out_node = nodes[node]
            output = {program.register_names[r]: window[-1][1][r]
                      for r in out_node.outputs}
            return done(HALTED, time=t, output=output,
                        last_snapshot=snap(window[-1], t))
        if config.max_time.is_finite:
            t = base + Ordinal.from_int(steps)
            return done(BUDGET_EXCEEDED, reason="max-time",
                        last_snapshot=snap(window[-1], t))

        lam = base + OMEGA
        try:
            got = limit_registers(window, lam, program, config)
        except UncertifiedLimitError as err:
            t = base + Ordinal.from_int(steps)
            return done(BUDGET_EXCEEDED, reason=f"uncertified-limit: {err}",
                        last_snapshot=snap(window[-1], t))
        if got[0] == "crash":
            _, reg_name, cert = got
            if lam >= config.max_time:
                return done(BUDGET_EXCEEDED, reason="max-time",
                            last_snapshot=snap(window[-1], lam))
            return done(CRASHED, time=lam, crash_register=reg_name,
                        reason=type(cert).__name__.lower(),
                        last_snapshot=snap(window[-1], lam))
        _, limit_cfg, certs = got
        if lam >= config.max_time:
            return done(BUDGET_EXCEEDED, reason="max-time",
                        last_snapshot=snap(limit_cfg, lam))
        hops += 1
        outcome = handle_hop(limit_cfg, lam, "cycle", window[0], certs)
        if outcome is not None:
            return outcome
        if hops >= config.max_hops:
            return done(BUDGET_EXCEEDED, reason="hop-budget",
                        last_snapshot=snap(limit_cfg, lam))
        base = lam
        node = limit_cfg[0]
        regs = list(limit_cfg[1])


def _render_value(v):
    if isinstance(v, Interval):
        return [str(v.lo), str(v.hi)]
    return str(v)


def check_runtime_bound(outcome: RunOutcome, program: BssProgram):
    """Is the certified stopping time below w^(n+1) for n the node count?"""
    if outcome.time is not None:
        t = outcome.time
    elif outcome.entry is not None:
        t = outcome.entry + outcome.period
    else:
        raise ValueError("outcome carries no certified time")
    n = program.node_count
    bound = omega_pow(Ordinal.from_int(n + 1))
    ok = t < bound
    report = {"time": render(t), "bound": render(bound), "nodes": n, "within": ok}
    return ok, report
