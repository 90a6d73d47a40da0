"""Eventually periodic infinite words.

Machine tapes and desk-scale reals are words over a small symbol alphabet
that are periodic from some point on: a finite prefix plus a repeating
block.  Finite modifications stay in the class, which is what makes exact
limit-stage tape values representable.  The finite-support-with-default
picture is the special case of period length 1.

Symbols are small ints (0, 1, and 2 for the ternary blank).
"""

from __future__ import annotations

from math import gcd


def _minimal_period(per: tuple) -> tuple:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            return per[:d]
    return per


class PeriodicWord:
    """An infinite word  pre[0] pre[1] ... (per[0] ... per[-1])^omega.

    Canonical on construction: the period is minimal and the prefix does
    not end with a symbol that merely repeats the period, so equal words
    compare equal structurally.
    """

    __slots__ = ("pre", "per", "_hash")

    def __init__(self, pre=(), per=(0,)):
        pre = tuple(pre)
        per = _minimal_period(tuple(per))
        if not per:
            raise ValueError("period must be non-empty")
        while pre and pre[-1] == per[-1]:
            pre = pre[:-1]
            per = (per[-1],) + per[:-1]
        self.pre = pre
        self.per = per
        self._hash = None

    @staticmethod
    def constant(symbol: int) -> "PeriodicWord":
        return PeriodicWord((), (symbol,))

    def get(self, i: int) -> int:
        if i < 0:
            raise IndexError("negative cell index")
        if i < len(self.pre):
            return self.pre[i]
        return self.per[(i - len(self.pre)) % len(self.per)]

    def set(self, i: int, value: int) -> "PeriodicWord":
        """A new word equal to this one except at position i."""
        if self.get(i) == value:
            return self
        pre = list(self.prefix(max(i + 1, len(self.pre))))
        pre[i] = value
        return PeriodicWord(pre, self.per)

    def prefix(self, n: int) -> tuple:
        return tuple(self.get(i) for i in range(n))

    def tail(self, start: int) -> "PeriodicWord":
        """The word shifted left by start positions."""
        if start <= len(self.pre):
            return PeriodicWord(self.pre[start:], self.per)
        k = (start - len(self.pre)) % len(self.per)
        return PeriodicWord((), self.per[k:] + self.per[:k])

    def eventually_equals(self, value: int) -> bool:
        return all(s == value for s in self.per)

    def occurs_below(self, value: int, bound: int) -> bool:
        """True if `value` occurs at some position < bound."""
        span = len(self.pre) + len(self.per)
        if bound >= span:
            return value in self.pre or value in self.per
        return any(self.get(i) == value for i in range(bound))

    def constant_on_progression(self, start: int, step: int) -> bool:
        """True if the word is constant on start, start+step, start+2*step, ...

        Exact: checks the finitely many positions inside the prefix plus one
        full residue cycle of the periodic part.
        """
        v = self.get(start)
        if step == 0:
            return True
        i = start
        while i < len(self.pre):
            if self.get(i) != v:
                return False
            i += step
        cycle = len(self.per) // gcd(step, len(self.per))
        for k in range(cycle):
            if self.get(i + k * step) != v:
                return False
        return True

    def __eq__(self, other):
        return (
            isinstance(other, PeriodicWord)
            and self.pre == other.pre
            and self.per == other.per
        )

    def __ne__(self, other):
        return not self.__eq__(other)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.pre, self.per))
        return self._hash

    def render(self, alphabet: str = "01B") -> str:
        body = "".join(alphabet[s] for s in self.pre)
        loop = "".join(alphabet[s] for s in self.per)
        return f"{body}({loop})"

    def __repr__(self):
        return f"PeriodicWord({self.render()!r})"


def parse_word(text: str, alphabet: str = "01B") -> PeriodicWord:
    """Parse 'pre(period)' notation; bare 'pre' means a zero tail."""
    text = text.strip()
    if "(" in text:
        if not text.endswith(")") or text.count("(") != 1:
            raise ValueError(f"malformed word {text!r}")
        body, loop = text[:-1].split("(")
        if not loop:
            raise ValueError("empty period")
    else:
        body, loop = text, alphabet[0]
    try:
        pre = tuple(alphabet.index(ch) for ch in body)
        per = tuple(alphabet.index(ch) for ch in loop)
    except ValueError:
        raise ValueError(f"word {text!r} uses symbols outside {alphabet!r}") from None
    return PeriodicWord(pre, per)


class EpReal(PeriodicWord):
    """An eventually periodic bit sequence: desk-scale reals and oracles."""

    __slots__ = ()

    def __init__(self, pre=(), per=(0,)):
        super().__init__(pre, per)
        if any(s not in (0, 1) for s in self.pre + self.per):
            raise ValueError("EpReal symbols must be bits")

    @staticmethod
    def zeros() -> "EpReal":
        return EpReal((), (0,))

    @staticmethod
    def ones() -> "EpReal":
        return EpReal((), (1,))

    @staticmethod
    def unary(n: int) -> "EpReal":
        """n ones followed by zeros; the unary coding of a natural."""
        return EpReal((1,) * n, (0,))

    @staticmethod
    def parse(text: str) -> "EpReal":
        w = parse_word(text, "01")
        return EpReal(w.pre, w.per)

    def contains(self, n: int) -> bool:
        """Set-of-naturals view: n is in the set iff bit n is 1."""
        return self.get(n) == 1

    def unary_value(self) -> int:
        """Inverse of unary(); requires the word to be 1^n 0^omega."""
        n = 0
        while self.get(n) == 1:
            n += 1
            if n > len(self.pre) + len(self.per):
                raise ValueError("word is all ones; not a unary numeral")
        rest = self.tail(n)
        if any(s != 0 for s in rest.pre + rest.per):
            raise ValueError("word is not a unary numeral")
        return n
