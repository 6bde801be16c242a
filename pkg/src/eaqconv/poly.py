"""Exact arithmetic for binary Laurent polynomials and rational functions in D.

A Laurent polynomial over GF(2) is stored as a bit-packed integer together
with the exponent of its lowest-order term: ``bits`` b_0..b_m with offset
``low`` encode b_0 D^low + b_1 D^(low+1) + ... + b_m D^(low+m).  Canonical
form keeps bit 0 set (and Python ints have no leading zeros), so both ends
are trimmed and equality/hashing are O(1).  The zero polynomial is the
unique pair (0, 0).

A rational function is a pair num/den of Laurent polynomials with den != 0,
gcd(num, den) = 1 and den normalized to lowest exponent 0 with nonzero
constant term; every unit D^k is pushed into the numerator.  This keeps
denominators inside GF(2)[D] so the Euclidean algorithm stays ordinary.

Text grammar: terms joined by '+', each term '1', 'D' or 'D^k' with integer
k (negative allowed), e.g. '1+D^2' or 'D^-1+1+D'.  Parsing and printing
round-trip exactly.
"""

from __future__ import annotations

from .errors import PolyParseError


def _bits_mul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[D] coefficient masks."""
    if a < b:
        a, b = b, a
    c = 0
    while b:
        if b & 1:
            c ^= a
        a <<= 1
        b >>= 1
    return c


def _bits_divmod(a: int, b: int) -> tuple[int, int]:
    """Ordinary GF(2)[D] division of coefficient masks, b != 0."""
    if b == 0:
        raise ZeroDivisionError("division by zero polynomial")
    m = a.bit_length() - 1
    n = b.bit_length() - 1
    if m < n:
        return 0, a
    q = 0
    b <<= m - n
    for i in range(m - n + 1):
        q <<= 1
        if (a >> (m - i)) & 1:
            a ^= b
            q ^= 1
        b >>= 1
    return q, a


def _bits_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, _bits_divmod(a, b)[1]
    return a


class LaurentPoly:
    """A binary Laurent polynomial in the delay variable D."""

    __slots__ = ("bits", "low")

    def __init__(self, bits: int = 0, low: int = 0):
        if bits < 0:
            raise ValueError("coefficient mask must be nonnegative")
        if bits == 0:
            low = 0
        else:
            shift = (bits & -bits).bit_length() - 1
            bits >>= shift
            low += shift
        object.__setattr__(self, "bits", bits)
        object.__setattr__(self, "low", low)

    def __setattr__(self, name, value):
        raise AttributeError("LaurentPoly is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls) -> LaurentPoly:
        return cls(0, 0)

    @classmethod
    def one(cls) -> LaurentPoly:
        return cls(1, 0)

    @classmethod
    def term(cls, k: int) -> LaurentPoly:
        """The monomial D^k."""
        return cls(1, k)

    @classmethod
    def from_exponents(cls, exps) -> LaurentPoly:
        p = cls.zero()
        for k in exps:
            p = p + cls.term(k)
        return p

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return self.bits == 0

    def __bool__(self) -> bool:
        return self.bits != 0

    @property
    def deg(self) -> int:
        """Highest exponent.  Undefined on the zero polynomial."""
        if self.bits == 0:
            raise ValueError("deg is undefined on the zero polynomial")
        return self.low + self.bits.bit_length() - 1

    @property
    def dell(self) -> int:
        """Lowest exponent.  Undefined on the zero polynomial."""
        if self.bits == 0:
            raise ValueError("del is undefined on the zero polynomial")
        return self.low

    @property
    def width(self) -> int:
        """deg - del; the span of the support."""
        if self.bits == 0:
            raise ValueError("width is undefined on the zero polynomial")
        return self.bits.bit_length() - 1

    def coeff(self, k: int) -> int:
        if self.bits == 0 or k < self.low:
            return 0
        return (self.bits >> (k - self.low)) & 1

    def exponents(self) -> list[int]:
        return [self.low + i for i in range(self.bits.bit_length()) if (self.bits >> i) & 1]

    def weight(self) -> int:
        return bin(self.bits).count("1")

    def delay_free(self) -> tuple[LaurentPoly, int]:
        """Split off the unit: self = D^k * p with del(p) = 0; returns (p, k)."""
        if self.bits == 0:
            return LaurentPoly.zero(), 0
        return LaurentPoly(self.bits, 0), self.low

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        if self.bits == 0:
            return other
        if other.bits == 0:
            return self
        low = min(self.low, other.low)
        return LaurentPoly((self.bits << (self.low - low)) ^ (other.bits << (other.low - low)), low)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        if self.bits == 0 or other.bits == 0:
            return LaurentPoly.zero()
        return LaurentPoly(_bits_mul(self.bits, other.bits), self.low + other.low)

    def shift(self, k: int) -> LaurentPoly:
        """Multiply by D^k."""
        if self.bits == 0:
            return self
        return LaurentPoly(self.bits, self.low + k)

    def reverse(self) -> LaurentPoly:
        """Substitute D^-1 for D (time reversal)."""
        if self.bits == 0:
            return self
        n = self.bits.bit_length()
        rev = 0
        b = self.bits
        for _ in range(n):
            rev = (rev << 1) | (b & 1)
            b >>= 1
        return LaurentPoly(rev, -(self.low + n - 1))

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentPoly) and self.bits == other.bits and self.low == other.low

    def __hash__(self) -> int:
        return hash((self.bits, self.low))

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"LaurentPoly({format_poly(self)!r})"


def divmod_shifted(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Divide a by b after factoring out the common shift: a = q*b + r.

    Both operands are shifted by D^-v with v = min(del a, del b) so the
    division happens in GF(2)[D]; deg r < deg b there.  The quotient is
    unchanged by the common shift and the remainder is shifted back.
    """
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if a.is_zero():
        return LaurentPoly.zero(), LaurentPoly.zero()
    v = min(a.low, b.low)
    qb, rb = _bits_divmod(a.bits << (a.low - v), b.bits << (b.low - v))
    return LaurentPoly(qb, 0), LaurentPoly(rb, v)


def divmod_width(a: LaurentPoly, b: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    """Laurent division by repeated leading-term elimination: a = q*b + r.

    The remainder satisfies width(r) < width(b) (or r = 0), which makes
    (deg - del) a Euclidean function on the Laurent ring.  Terminates in at
    most width(a) + 1 steps because each step caps the remaining span by
    max(width(r) - 1, width(b) - 1).
    """
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    q, r = LaurentPoly.zero(), a
    bw = b.width
    while not r.is_zero() and r.width >= bw:
        t = LaurentPoly.term(r.deg - b.deg)
        q = q + t
        r = r + t * b
    return q, r


def gcd(a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
    """Canonical GF(2)[D] gcd after shifting both inputs to lowest exponent 0."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd(0, 0) is undefined")
    return LaurentPoly(_bits_gcd(a.bits, b.bits), 0)


def divides(a: LaurentPoly, b: LaurentPoly) -> bool:
    """a | b over the Laurent ring (powers of D are units)."""
    if a.is_zero():
        return b.is_zero()
    if b.is_zero():
        return True
    return _bits_divmod(b.bits, a.bits)[1] == 0


def deg(a: LaurentPoly) -> int:
    return a.deg


def dell(a: LaurentPoly) -> int:
    return a.dell


class RationalPoly:
    """A rational function num/den of binary Laurent polynomials."""

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly, den: LaurentPoly = LaurentPoly.one()):
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if num.is_zero():
            num, den = LaurentPoly.zero(), LaurentPoly.one()
        else:
            # push the denominator's unit into the numerator, then cancel
            den_df, dk = den.delay_free()
            num = num.shift(-dk)
            g = _bits_gcd(num.bits, den_df.bits)
            if g != 1:
                num = LaurentPoly(_bits_divmod(num.bits, g)[0], num.low)
                den_df = LaurentPoly(_bits_divmod(den_df.bits, g)[0], 0)
            den = den_df
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("RationalPoly is immutable")

    @classmethod
    def zero(cls) -> RationalPoly:
        return cls(LaurentPoly.zero())

    @classmethod
    def one(cls) -> RationalPoly:
        return cls(LaurentPoly.one())

    @classmethod
    def of(cls, p) -> RationalPoly:
        if isinstance(p, RationalPoly):
            return p
        return cls(p)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __bool__(self) -> bool:
        return not self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den == LaurentPoly.one()

    def as_poly(self) -> LaurentPoly:
        if not self.is_polynomial():
            raise ValueError(f"{self} is not a polynomial")
        return self.num

    def __add__(self, other: RationalPoly) -> RationalPoly:
        return RationalPoly(self.num * other.den + other.num * self.den, self.den * other.den)

    def __mul__(self, other: RationalPoly) -> RationalPoly:
        return RationalPoly(self.num * other.num, self.den * other.den)

    def inverse(self) -> RationalPoly:
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return RationalPoly(self.den, self.num)

    def __truediv__(self, other: RationalPoly) -> RationalPoly:
        return self * other.inverse()

    def reverse(self) -> RationalPoly:
        return RationalPoly(self.num.reverse(), self.den.reverse())

    def __eq__(self, other) -> bool:
        return isinstance(other, RationalPoly) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __str__(self) -> str:
        return format_rational(self)

    def __repr__(self) -> str:
        return f"RationalPoly({format_rational(self)!r})"


ZERO = LaurentPoly.zero()
ONE = LaurentPoly.one()
D = LaurentPoly.term(1)
RZERO = RationalPoly.zero()
RONE = RationalPoly.one()


def series_expand(r: RationalPoly, lo: int, hi: int) -> LaurentPoly:
    """Truncate the ascending formal power series of r to exponents [lo, hi].

    The expansion direction is ascending powers of D (plain long division);
    the denominator's nonzero constant term makes the series well defined.
    """
    if lo > hi:
        raise ValueError(f"empty window [{lo}, {hi}]")
    if r.is_zero():
        return LaurentPoly.zero()
    num, den = r.num, r.den
    start = num.low  # series del equals del(num) since den(0) = 1
    if start > hi:
        return LaurentPoly.zero()
    length = hi - start + 1
    # inverse series of den up to `length` coefficients
    dbits = den.bits
    ddeg = dbits.bit_length() - 1
    inv = [0] * length
    for t in range(length):
        acc = 1 if t == 0 else 0
        for j in range(1, min(t, ddeg) + 1):
            if (dbits >> j) & 1:
                acc ^= inv[t - j]
        inv[t] = acc
    inv_bits = 0
    for t, bit in enumerate(inv):
        if bit:
            inv_bits |= 1 << t
    prod = _bits_mul(num.bits, inv_bits)
    series = LaurentPoly(prod, start)
    # clip to [lo, hi]
    out = 0
    for k in series.exponents():
        if lo <= k <= hi:
            out |= 1 << (k - lo)
    return LaurentPoly(out, lo)


def series_period(f: LaurentPoly, probe: int = 4096) -> int:
    """Period of the eventually periodic expansion of 1/f, by direct search."""
    if f.is_zero():
        raise ZeroDivisionError("1/0 has no expansion")
    df, _ = f.delay_free()
    if df == ONE:
        return 1
    coeffs = series_expand(RationalPoly(ONE, df), 0, probe)
    bits = [coeffs.coeff(k) for k in range(probe + 1)]
    for period in range(1, probe // 2):
        if all(bits[t] == bits[t + period] for t in range(probe - period)):
            return period
    raise ValueError(f"no period below {probe // 2} for 1/({f})")


# -- text grammar ----------------------------------------------------------


def parse_poly(text: str) -> LaurentPoly:
    """Parse the 'terms joined by +' grammar, e.g. '1+D^2' or 'D^-1+1+D'."""
    s = "".join(text.split())
    if not s:
        raise PolyParseError("empty polynomial")
    if s == "0":
        return LaurentPoly.zero()
    p = LaurentPoly.zero()
    for term in s.split("+"):
        if term == "1":
            p = p + ONE
        elif term == "D":
            p = p + D
        elif term.startswith("D^"):
            try:
                k = int(term[2:])
            except ValueError:
                raise PolyParseError(f"bad exponent in term {term!r}") from None
            p = p + LaurentPoly.term(k)
        else:
            raise PolyParseError(f"bad term {term!r}")
    return p


def format_poly(p: LaurentPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for k in p.exponents():
        if k == 0:
            parts.append("1")
        elif k == 1:
            parts.append("D")
        else:
            parts.append(f"D^{k}")
    return "+".join(parts)


def parse_rational(text: str) -> RationalPoly:
    """Parse 'f', 'f/g', or the same with parenthesized sides."""
    s = "".join(text.split())
    depth = 0
    slash = -1
    for i, ch in enumerate(s):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "/" and depth == 0:
            slash = i
            break
    if slash < 0:
        return RationalPoly(parse_poly(_strip_parens(s)))
    num = parse_poly(_strip_parens(s[:slash]))
    den = parse_poly(_strip_parens(s[slash + 1:]))
    if den.is_zero():
        raise PolyParseError("zero denominator")
    return RationalPoly(num, den)


def _strip_parens(s: str) -> str:
    while s.startswith("(") and s.endswith(")"):
        depth = 0
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0 and i != len(s) - 1:
                    return s
        s = s[1:-1]
    return s


def format_rational(r: RationalPoly) -> str:
    if r.is_polynomial():
        return format_poly(r.num)
    num = format_poly(r.num)
    if "+" in num:
        num = f"({num})"
    return f"{num}/({format_poly(r.den)})"
