"""Exact rational-function arithmetic and rational interval arithmetic.

Everything here is over Fraction: there is no floating point anywhere in a
verdict path.  Polynomials are multivariate with a fixed register count;
rational functions are canonical integer-primitive numerator/denominator
pairs, so structurally equal means equal as parsed expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import AmbiguousBranchError


class ZeroDenominator(ArithmeticError):
    """Exact division by zero during evaluation."""


# ---------------------------------------------------------------------
# intervals


@dataclass(frozen=True)
class Interval:
    """Closed interval with rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        if self.lo > self.hi:
            raise ValueError("interval endpoints out of order")

    @staticmethod
    def point(v) -> "Interval":
        v = Fraction(v)
        return Interval(v, v)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def contains(self, v) -> bool:
        return self.lo <= v <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def sign(self) -> int:
        """-1, 0, +1, or AmbiguousBranchError when the sign is undecided."""
        if self.hi < 0:
            return -1
        if self.lo > 0:
            return 1
        if self.lo == 0 and self.hi == 0:
            return 0
        raise AmbiguousBranchError(f"interval [{self.lo}, {self.hi}] straddles zero")

    def __add__(self, other):
        other = _as_interval(other)
        return Interval(self.lo + other.lo, self.hi + other.hi)

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo)

    def __sub__(self, other):
        return self + (-_as_interval(other))

    def __rsub__(self, other):
        return _as_interval(other) + (-self)

    def __mul__(self, other):
        other = _as_interval(other)
        ps = (self.lo * other.lo, self.lo * other.hi,
              self.hi * other.lo, self.hi * other.hi)
        return Interval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _as_interval(other)
        if other.contains_zero():
            if other.lo == 0 and other.hi == 0:
                raise ZeroDenominator("division by exact zero interval")
            raise AmbiguousBranchError("denominator interval straddles zero")
        inv = Interval(min(1 / other.lo, 1 / other.hi),
                       max(1 / other.lo, 1 / other.hi))
        return self * inv


def _as_interval(v) -> Interval:
    if isinstance(v, Interval):
        return v
    return Interval.point(v)


def value_sign(v) -> int:
    """Sign of a Fraction or Interval register value."""
    if isinstance(v, Interval):
        return v.sign()
    return (v > 0) - (v < 0)


# ---------------------------------------------------------------------
# multivariate polynomials


class Polynomial:
    """Polynomial over registers x0..x(n-1) with Fraction coefficients.

    Monomials are exponent tuples of length n; only nonzero coefficients
    are stored.
    """

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs=None):
        self.n = n
        self.coeffs = {m: c for m, c in (coeffs or {}).items() if c != 0}

    @staticmethod
    def const(n: int, v) -> "Polynomial":
        v = Fraction(v)
        return Polynomial(n, {(0,) * n: v} if v else {})

    @staticmethod
    def var(n: int, i: int) -> "Polynomial":
        m = [0] * n
        m[i] = 1
        return Polynomial(n, {tuple(m): Fraction(1)})

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def constant_value(self):
        """The constant it equals, or None if it depends on a register."""
        if self.is_zero:
            return Fraction(0)
        if len(self.coeffs) == 1:
            (m, c), = self.coeffs.items()
            if all(e == 0 for e in m):
                return c
        return None

    def depends_on(self) -> frozenset:
        out = set()
        for m in self.coeffs:
            out.update(i for i, e in enumerate(m) if e)
        return frozenset(out)

    def degree_in(self, i: int) -> int:
        return max((m[i] for m in self.coeffs), default=0)

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, Fraction(0)) + c
        return Polynomial(self.n, out)

    def __neg__(self):
        return Polynomial(self.n, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return Polynomial(self.n, out)

    def scale(self, v) -> "Polynomial":
        v = Fraction(v)
        return Polynomial(self.n, {m: c * v for m, c in self.coeffs.items()})

    def eval(self, values):
        """Evaluate at Fractions and/or Intervals."""
        total = None
        for m, c in self.coeffs.items():
            term = c
            for i, e in enumerate(m):
                for _ in range(e):
                    term = term * values[i]
            total = term if total is None else total + term
        return Fraction(0) if total is None else total

    def eval_sym(self, funcs):
        """Substitute rational functions for the registers."""
        total = RatFunc.const(self.n, 0)
        for m, c in self.coeffs.items():
            term = RatFunc.const(self.n, c)
            for i, e in enumerate(m):
                for _ in range(e):
                    term = term * funcs[i]
            total = total + term
        return total

    def substitute(self, i: int, v) -> "Polynomial":
        """Fix register i to the rational v."""
        v = Fraction(v)
        out = Polynomial(self.n, {})
        for m, c in self.coeffs.items():
            coeff = c * v ** m[i]
            mm = m[:i] + (0,) + m[i + 1:]
            out = out + Polynomial(self.n, {mm: coeff})
        return out

    def univariate(self, i: int) -> list:
        """Coefficient list in x_i (low to high); requires no other vars."""
        deps = self.depends_on()
        if deps - {i}:
            raise ValueError("polynomial is not univariate in the given register")
        out = [Fraction(0)] * (self.degree_in(i) + 1)
        for m, c in self.coeffs.items():
            out[m[i]] += c
        return out

    def _key(self):
        return tuple(sorted(self.coeffs.items()))

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.n == other.n \
            and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.n, self._key()))

    def __repr__(self):
        return f"Polynomial({self.coeffs!r})"


def _int_content(p: Polynomial) -> tuple:
    """(lcm of coeff denominators, gcd of scaled numerators)."""
    lcm = 1
    for c in p.coeffs.values():
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    g = 0
    for c in p.coeffs.values():
        g = gcd(g, abs(int(c * lcm)))
    return lcm, g


# ---------------------------------------------------------------------
# rational functions


class RatFunc:
    """num/den in canonical form: integer primitive parts, positive-led den."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial):
        if den.is_zero:
            raise ZeroDenominator("rational function with zero denominator")
        lcm_n, g_n = _int_content(num)
        lcm_d, g_d = _int_content(den)
        num = num.scale(Fraction(lcm_n * lcm_d, 1))
        den = den.scale(Fraction(lcm_n * lcm_d, 1))
        g = gcd(g_n * lcm_d, g_d * lcm_n)
        if g > 1:
            num = num.scale(Fraction(1, g))
            den = den.scale(Fraction(1, g))
        lead = den.coeffs[max(den.coeffs)] if den.coeffs else Fraction(1)
        if lead < 0:
            num, den = num.scale(-1), den.scale(-1)
        self.num = num
        self.den = den

    @staticmethod
    def const(n: int, v) -> "RatFunc":
        return RatFunc(Polynomial.const(n, v), Polynomial.const(n, 1))

    @staticmethod
    def var(n: int, i: int) -> "RatFunc":
        return RatFunc(Polynomial.var(n, i), Polynomial.const(n, 1))

    @property
    def n(self) -> int:
        return self.num.n

    def depends_on(self) -> frozenset:
        return self.num.depends_on() | self.den.depends_on()

    def constant_value(self):
        nv, dv = self.num.constant_value(), self.den.constant_value()
        if nv is not None and dv is not None:
            return nv / dv
        return None

    def __add__(self, other):
        return RatFunc(self.num * other.den + other.num * self.den,
                       self.den * other.den)

    def __sub__(self, other):
        return RatFunc(self.num * other.den - other.num * self.den,
                       self.den * other.den)

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __mul__(self, other):
        return RatFunc(self.num * other.num, self.den * other.den)

    def __truediv__(self, other):
        if other.num.is_zero:
            raise ZeroDenominator("division by the zero function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def eval(self, values):
        den = self.den.eval(values)
        if isinstance(den, Fraction) and den == 0:
            raise ZeroDenominator("denominator vanished")
        return self.num.eval(values) / den

    def eval_sym(self, funcs) -> "RatFunc":
        return self.num.eval_sym(funcs) / self.den.eval_sym(funcs)

    def substitute(self, i: int, v) -> "RatFunc":
        return RatFunc(self.num.substitute(i, v), self.den.substitute(i, v))

    def affine_in(self, i: int):
        """(a, b) with self == a*x_i + b (a, b rational constants), or None."""
        if not self.den.constant_value():
            return None
        d = self.den.constant_value()
        if self.num.degree_in(i) > 1 or self.num.depends_on() - {i}:
            return None
        a = Fraction(0)
        b = Fraction(0)
        for m, c in self.num.coeffs.items():
            if m[i] == 1:
                a += c
            else:
                b += c
        return a / d, b / d

    def self_map_in(self, i: int) -> bool:
        return self.depends_on() <= {i}

    def __eq__(self, other):
        return isinstance(other, RatFunc) and self.num == other.num \
            and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({self.num!r}, {self.den!r})"


# ---------------------------------------------------------------------
# univariate real-root tools (for fixed-point certificates)


def _poly_trim(cs):
    while cs and cs[-1] == 0:
        cs.pop()
    return cs


def _poly_eval(cs, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(cs):
        acc = acc * x + c
    return acc


def _poly_deriv(cs):
    return [c * k for k, c in enumerate(cs)][1:]


def _poly_rem(a, b):
    """Remainder of univariate division a mod b (b nonzero)."""
    a = _poly_trim(list(a))
    b = _poly_trim(list(b))
    db, lb = len(b) - 1, b[-1]
    while a and len(a) - 1 >= db:
        da, la = len(a) - 1, a[-1]
        q = la / lb
        for k in range(db + 1):
            a[da - db + k] -= q * b[k]
        a = _poly_trim(a)
    return a


def sturm_chain(cs):
    chain = [_poly_trim(list(cs))]
    d = _poly_trim(_poly_deriv(chain[0]))
    if d:
        chain.append(d)
        while True:
            r = [-c for c in _poly_rem(chain[-2], chain[-1])]
            r = _poly_trim(r)
            if not r:
                break
            chain.append(r)
    return chain


def _sign_variations(chain, x: Fraction) -> int:
    signs = []
    for p in chain:
        v = _poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


def count_roots_open(cs, a: Fraction, b: Fraction) -> int:
    """Distinct real roots of the squarefree-ish polynomial in (a, b]."""
    cs = _poly_trim(list(cs))
    if not cs:
        raise ValueError("zero polynomial has no isolated roots")
    chain = sturm_chain(cs)
    return _sign_variations(chain, a) - _sign_variations(chain, b)


def rational_roots(cs) -> list:
    """All rational roots of a univariate polynomial with Fraction coeffs."""
    cs = _poly_trim(list(cs))
    if not cs:
        raise ValueError("the zero polynomial")
    roots = []
    # factor out x^k
    k = 0
    while cs[k] == 0:
        k += 1
    if k:
        roots.append(Fraction(0))
        cs = cs[k:]
    if len(cs) == 1:
        return sorted(set(roots))
    lcm = 1
    for c in cs:
        lcm = lcm * c.denominator // gcd(lcm, c.denominator)
    ints = [int(c * lcm) for c in cs]
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(v):
        out = []
        d = 1
        while d * d <= v:
            if v % d == 0:
                out.extend((d, v // d))
            d += 1
        return set(out)

    for p in divisors(a0):
        for q in divisors(an):
            for cand in (Fraction(p, q), Fraction(-p, q)):
                if _poly_eval(cs, cand) == 0:
                    roots.append(cand)
    return sorted(set(roots))
