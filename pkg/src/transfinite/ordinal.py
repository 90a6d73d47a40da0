"""Exact arithmetic for ordinals below epsilon_0 in Cantor normal form.

An ordinal is a finite sum  w^e1 * c1 + ... + w^ek * ck  with the exponents
themselves ordinals of the same kind, strictly decreasing, and all
coefficients positive integers.  The empty sum is 0.  Normal form is unique,
so structural equality is ordinal equality.  These values are the time
stamps of every engine in the package.
"""

from __future__ import annotations


class OrdinalParseError(ValueError):
    """Raised by parse() on malformed or non-canonical ordinal text."""


class Ordinal:
    """An ordinal below epsilon_0, immutable and hashable.

    terms: tuple of (exponent: Ordinal, coefficient: int >= 1) with
    exponents strictly decreasing.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: tuple = ()):
        self.terms = tuple(terms)
        self._hash = None

    # -- constructors ------------------------------------------------

    @staticmethod
    def from_int(n: int) -> "Ordinal":
        if n < 0:
            raise ValueError("ordinals are non-negative")
        if n == 0:
            return ZERO
        return Ordinal(((ZERO, n),))

    # -- structure ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0].is_zero)

    @property
    def is_limit(self) -> bool:
        return bool(self.terms) and not self.terms[-1][0].is_zero

    @property
    def is_successor(self) -> bool:
        return bool(self.terms) and self.terms[-1][0].is_zero

    def to_int(self) -> int:
        if self.is_zero:
            return 0
        if not self.is_finite:
            raise ValueError(f"{self} is not finite")
        return self.terms[0][1]

    def leading_exponent(self) -> "Ordinal":
        if self.is_zero:
            raise ValueError("0 has no leading exponent")
        return self.terms[0][0]

    def predecessor(self) -> "Ordinal":
        if not self.is_successor:
            raise ValueError(f"{self} is not a successor")
        e, c = self.terms[-1]
        head = self.terms[:-1]
        if c > 1:
            return Ordinal(head + ((e, c - 1),))
        return Ordinal(head)

    # -- comparison ---------------------------------------------------

    def _cmp(self, other: "Ordinal") -> int:
        for (ea, ca), (eb, cb) in zip(self.terms, other.terms):
            c = ea._cmp(eb)
            if c != 0:
                return c
            if ca != cb:
                return -1 if ca < cb else 1
        if len(self.terms) != len(other.terms):
            return -1 if len(self.terms) < len(other.terms) else 1
        return 0

    def __eq__(self, other):
        return isinstance(other, Ordinal) and self.terms == other.terms

    def __ne__(self, other):
        return not self.__eq__(other)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    # -- arithmetic ---------------------------------------------------

    def __add__(self, other):
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        e0 = other.terms[0][0]
        keep = []
        for e, c in self.terms:
            cv = e._cmp(e0)
            if cv > 0:
                keep.append((e, c))
            elif cv == 0:
                merged = ((e0, c + other.terms[0][1]),) + other.terms[1:]
                return Ordinal(tuple(keep) + merged)
            else:
                break
        return Ordinal(tuple(keep) + other.terms)

    def __mul__(self, other):
        if isinstance(other, int):
            other = Ordinal.from_int(other)
        if self.is_zero or other.is_zero:
            return ZERO
        e1, c1 = self.terms[0]
        out = []
        for f, d in other.terms:
            if f.is_zero:
                # finite right factor: scale the leading term, keep the tail
                out.append((e1, c1 * d))
                out.extend(self.terms[1:])
            else:
                out.append((e1 + f, d))
        return Ordinal(tuple(out))

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Ordinal({render(self)!r})"


ZERO = Ordinal()
ONE = Ordinal.from_int(1)
OMEGA = Ordinal(((ONE, 1),))


# -- spec operation surface -------------------------------------------


def add(a: Ordinal, b: Ordinal) -> Ordinal:
    return a + b


def mul(a: Ordinal, b: Ordinal) -> Ordinal:
    return a * b


def omega_pow(a: Ordinal) -> Ordinal:
    """w**a as a single CNF term (w**0 = 1)."""
    return Ordinal(((a, 1),))


def cmp(a: Ordinal, b: Ordinal) -> str:
    c = a._cmp(b)
    return "less" if c < 0 else ("equal" if c == 0 else "greater")


def classify(a: Ordinal):
    """Return ('zero',), ('successor', predecessor) or ('limit',)."""
    if a.is_zero:
        return ("zero",)
    if a.is_successor:
        return ("successor", a.predecessor())
    return ("limit",)


def left_sub(a: Ordinal, b: Ordinal) -> Ordinal:
    """The unique d with a + d = b, for a <= b."""
    if a > b:
        raise ValueError(f"cannot subtract {a} from {b}")
    for k, (ta, tb) in enumerate(zip(a.terms, b.terms)):
        if ta == tb:
            continue
        ea, ca = ta
        eb, cb = tb
        if ea == eb and ca < cb:
            return Ordinal(((eb, cb - ca),) + b.terms[k + 1:])
        return Ordinal(b.terms[k:])
    return Ordinal(b.terms[len(a.terms):])


def fundamental_seq(a: Ordinal, k: int) -> Ordinal:
    """k-th element of the canonical fundamental sequence of a limit ordinal.

    Last term w^(e+1) steps through w^e * k; last term w^e with e a limit
    steps through w^(fundamental_seq(e, k)); a coefficient > 1 is split off
    the last term first.
    """
    if not a.is_limit:
        raise ValueError(f"{a} is not a limit ordinal")
    if k < 0:
        raise ValueError("k must be a natural number")
    head = a.terms[:-1]
    e, c = a.terms[-1]
    if c > 1:
        head = head + ((e, c - 1),)
    if e.is_successor:
        ep = e.predecessor()
        tail = Ordinal(((ep, k),)) if k > 0 else ZERO
    else:
        tail = omega_pow(fundamental_seq(e, k))
    return Ordinal(head) + tail


# -- text form --------------------------------------------------------


def render(a: Ordinal) -> str:
    """Canonical text, e.g. 'w^2*3 + w + 4'."""
    if a.is_zero:
        return "0"
    parts = []
    for e, c in a.terms:
        if e.is_zero:
            parts.append(str(c))
            continue
        if e == ONE:
            base = "w"
        else:
            et = render(e)
            base = f"w^{et}" if (et == "w" or et.isdigit()) else f"w^({et})"
        parts.append(base if c == 1 else f"{base}*{c}")
    return " + ".join(parts)


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch in "+^*()":
            tokens.append((ch, i))
            i += 1
        elif ch == "w":
            tokens.append(("w", i))
            i += 1
        elif ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append((text[i:j], i))
            i = j
        else:
            raise OrdinalParseError(f"unexpected character {ch!r} at column {i}")
    return tokens


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, expect=None):
        if self.pos >= len(self.tokens):
            raise OrdinalParseError("unexpected end of ordinal text")
        tok, col = self.tokens[self.pos]
        if expect is not None and tok != expect:
            raise OrdinalParseError(f"expected {expect!r} at column {col}, got {tok!r}")
        self.pos += 1
        return tok

    def ordinal(self) -> Ordinal:
        terms = [self.term()]
        while self.peek() == "+":
            self.take("+")
            terms.append(self.term())
        for (ea, _), (eb, _) in zip(terms, terms[1:]):
            if ea._cmp(eb) <= 0:
                raise OrdinalParseError(
                    "terms must have strictly decreasing exponents")
        return Ordinal(tuple(terms))

    def term(self):
        tok = self.peek()
        if tok == "w":
            self.take()
            exponent = ONE
            if self.peek() == "^":
                self.take("^")
                exponent = self.exponent()
            coeff = 1
            if self.peek() == "*":
                self.take("*")
                coeff = self.nat()
                if coeff < 1:
                    raise OrdinalParseError("coefficients must be >= 1")
            return (exponent, coeff)
        n = self.nat()
        if n < 1:
            raise OrdinalParseError("a zero term is not allowed; write '0' alone")
        return (ZERO, n)

    def exponent(self) -> Ordinal:
        tok = self.peek()
        if tok == "(":
            self.take("(")
            o = self.ordinal()
            self.take(")")
            return o
        if tok == "w":
            self.take()
            return ONE
        return Ordinal.from_int(self.nat())

    def nat(self) -> int:
        tok = self.take()
        if not tok.isdigit():
            raise OrdinalParseError(f"expected a number, got {tok!r}")
        return int(tok)


def parse(text: str) -> Ordinal:
    """Parse CNF ordinal text; inverse of render() on canonical forms."""
    text = text.strip()
    if text == "0":
        return ZERO
    tokens = _tokenize(text)
    if not tokens:
        raise OrdinalParseError("empty ordinal text")
    p = _Parser(tokens)
    o = p.ordinal()
    if p.pos != len(tokens):
        raise OrdinalParseError(f"trailing tokens at column {tokens[p.pos][1]}")
    return o
