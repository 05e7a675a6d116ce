"""Exact integer-coefficient polynomials and cyclotomic building blocks.

Everything here is bit-exact: coefficients are Python ints, divisions are
checked, and valuations at zeta_{p^n} - 1 are computed through resultants
(norms) rather than through any extension-field arithmetic.

The ring being modeled is Z_p[[X]] restricted to its polynomial skeleton;
the group-algebra factor Z_p[Delta] that the full Iwasawa algebra carries
plays no computational role in any formula implemented by this package and
is deliberately not modeled.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Union

from .scalars import INFINITY, ExtRational, check_odd_prime, ord_p

__all__ = [
    "IntPolynomial",
    "ZERO",
    "ONE",
    "X",
    "phi",
    "omega",
    "omega_pm",
    "reduce_mod",
    "resultant",
    "ord_at_zeta",
    "euler_phi_pn",
]

# Schoolbook multiplication below this size, Karatsuba above.
_KARATSUBA_CUTOFF = 48


class IntPolynomial:
    """Polynomial with exact integer coefficients, low degree first.

    Instances are immutable; the zero polynomial is canonical (empty
    coefficient tuple) and reports degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[int] = ()):
        cs = list(coeffs)
        while cs and cs[-1] == 0:
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    def __setattr__(self, name, value):
        raise AttributeError("IntPolynomial is immutable")

    def __reduce__(self):
        return (IntPolynomial, (self.coeffs,))

    # -- basic structure -------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def leading_coefficient(self) -> int:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def coefficient(self, i: int) -> int:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __eq__(self, other) -> bool:
        if isinstance(other, IntPolynomial):
            return self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == ((other,) if other else ())
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return not self.is_zero()

    # -- ring operations --------------------------------------------------

    def __add__(self, other) -> "IntPolynomial":
        other = _coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPolynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "IntPolynomial":
        return IntPolynomial([-c for c in self.coeffs])

    def __sub__(self, other) -> "IntPolynomial":
        return self + (-_coerce(other))

    def __rsub__(self, other) -> "IntPolynomial":
        return _coerce(other) + (-self)

    def __mul__(self, other) -> "IntPolynomial":
        if isinstance(other, int):
            return IntPolynomial([other * c for c in self.coeffs])
        if not isinstance(other, IntPolynomial):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        return IntPolynomial(_mul(list(self.coeffs), list(other.coeffs)))

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IntPolynomial":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        result = ONE
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base if e > 1 else base
            e >>= 1
        return result

    def shift(self, k: int) -> "IntPolynomial":
        """Multiply by X^k."""
        if self.is_zero():
            return ZERO
        return IntPolynomial((0,) * k + self.coeffs)

    def scale_exact_div(self, d: int) -> "IntPolynomial":
        """Divide every coefficient by d, requiring exactness."""
        out = []
        for c in self.coeffs:
            q, r = divmod(c, d)
            if r:
                raise ValueError("coefficient not divisible")
            out.append(q)
        return IntPolynomial(out)

    def divmod(self, g: "IntPolynomial") -> tuple["IntPolynomial", "IntPolynomial"]:
        """Exact division with remainder; g must have leading coefficient +-1."""
        if g.is_zero():
            raise ValueError("division by the zero polynomial")
        lc = g.leading_coefficient()
        if lc not in (1, -1):
            raise ValueError("divisor must have unit leading coefficient")
        rem = list(self.coeffs)
        dg = g.degree()
        quot = [0] * max(len(rem) - dg, 0)
        for i in range(len(rem) - 1, dg - 1, -1):
            c = rem[i]
            if c == 0:
                continue
            q = c * lc  # lc in {1, -1}
            quot[i - dg] = q
            for j, gc in enumerate(g.coeffs):
                rem[i - dg + j] -= q * gc
        return IntPolynomial(quot), IntPolynomial(rem[:dg])

    def __mod__(self, g: "IntPolynomial") -> "IntPolynomial":
        return self.divmod(g)[1]

    def __floordiv__(self, g: "IntPolynomial") -> "IntPolynomial":
        return self.divmod(g)[0]

    # -- numeric helpers --------------------------------------------------

    def evaluate(self, x: Union[int, Fraction]) -> Union[int, Fraction]:
        acc: Union[int, Fraction] = 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    __call__ = evaluate

    def content(self) -> int:
        """gcd of the coefficients (positive); 0 for the zero polynomial."""
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def p_power_content(self, p: int) -> int:
        """Largest k with p^k dividing every coefficient (0 for zero poly)."""
        if self.is_zero():
            return 0
        k = None
        for c in self.coeffs:
            if c == 0:
                continue
            v = 0
            c = abs(c)
            while c % p == 0:
                v += 1
                c //= p
            k = v if k is None else min(k, v)
            if k == 0:
                return 0
        return k or 0

    def __repr__(self):
        if self.is_zero():
            return "IntPolynomial(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*X" if c != 1 else "X")
            else:
                terms.append(f"{c}*X^{i}" if c != 1 else f"X^{i}")
        return "IntPolynomial(" + " + ".join(terms) + ")"


def _coerce(x) -> IntPolynomial:
    if isinstance(x, IntPolynomial):
        return x
    if isinstance(x, int):
        return IntPolynomial([x])
    raise TypeError(f"cannot coerce {type(x).__name__} to IntPolynomial")


def _mul(a: list[int], b: list[int]) -> list[int]:
    if min(len(a), len(b)) <= _KARATSUBA_CUTOFF:
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
        return out
    # Karatsuba split at half the shorter operand's span
    m = min(len(a), len(b)) // 2
    a0, a1 = a[:m], a[m:]
    b0, b1 = b[:m], b[m:]
    z0 = _mul(a0, b0) if a0 and b0 else []
    z2 = _mul(a1, b1)
    s0 = [x + y for x, y in zip(a0, a1)] + a1[len(a0):] + a0[len(a1):]
    s1 = [x + y for x, y in zip(b0, b1)] + b1[len(b0):] + b0[len(b1):]
    z1 = _mul(s0, s1)
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] += c
        out[i + m] -= c
    for i, c in enumerate(z1):
        out[i + m] += c
    for i, c in enumerate(z2):
        out[i + m] -= c
        out[i + 2 * m] += c
    return out


ZERO = IntPolynomial()
ONE = IntPolynomial([1])
X = IntPolynomial([0, 1])


def euler_phi_pn(p: int, n: int) -> int:
    """phi(p^n) = p^n - p^(n-1) for n >= 1."""
    return p**n - p ** (n - 1)


def _one_plus_x_pow(k: int) -> IntPolynomial:
    """(1+X)^k via binomial coefficients."""
    return IntPolynomial([math.comb(k, i) for i in range(k + 1)])


def phi(p: int, n: int) -> IntPolynomial:
    """The p^n-th cyclotomic polynomial composed with 1+X.

    Returns sum_{t=0}^{p-1} (1+X)^(p^(n-1) t): monic of degree
    p^(n-1)(p-1) with constant term p.
    """
    check_odd_prime(p)
    if n < 1:
        raise ValueError("phi requires n >= 1")
    block = _one_plus_x_pow(p ** (n - 1))
    acc = ONE
    total = ONE
    for _ in range(p - 1):
        acc = acc * block
        total = total + acc
    return total


def omega(p: int, n: int) -> IntPolynomial:
    """(1+X)^(p^n) - 1, the level-n annihilator."""
    check_odd_prime(p)
    if n < 0:
        raise ValueError("omega requires n >= 0")
    return _one_plus_x_pow(p**n) - ONE


def omega_pm(p: int, n: int, sign: str) -> IntPolynomial:
    """Product of phi(p, m) over even (sign '+') or odd (sign '-') m <= n.

    The empty product is 1.  Together with the factor X these partition
    omega_n: X * omega_pm(+) * omega_pm(-) = omega_n.
    """
    check_odd_prime(p)
    if n < 0:
        raise ValueError("omega_pm requires n >= 0")
    if sign not in ("+", "-"):
        raise ValueError("sign must be '+' or '-'")
    parity = 0 if sign == "+" else 1
    out = ONE
    for m in range(1, n + 1):
        if m % 2 == parity:
            out = out * phi(p, m)
    return out


def reduce_mod(f: IntPolynomial, g: IntPolynomial) -> IntPolynomial:
    """Remainder of f modulo g (g with unit leading coefficient); exact."""
    return f % g


def _pseudo_rem(a: IntPolynomial, b: IntPolynomial) -> IntPolynomial:
    """prem(a, b): remainder of lc(b)^(deg a - deg b + 1) * a by b, in Z[X]."""
    d = b.leading_coefficient()
    e = a.degree() - b.degree() + 1
    r = a
    while not r.is_zero() and r.degree() >= b.degree():
        r = r * d - b.shift(r.degree() - b.degree()) * r.leading_coefficient()
        e -= 1
    if e > 0:
        r = r * (d**e)
    return r


def resultant(f: IntPolynomial, g: IntPolynomial) -> int:
    """Resultant with the convention Res(f,g) = lc(f)^deg(g) * prod g(alpha_i).

    Subresultant PRS (fraction-free), so every intermediate stays in Z.
    Rejects zero inputs; returns 0 exactly when f and g share a root.
    """
    if f.is_zero() or g.is_zero():
        raise ValueError("resultant of the zero polynomial is undefined")
    sign = 1
    if f.degree() < g.degree():
        if (f.degree() * g.degree()) % 2 == 1:
            sign = -1
        f, g = g, f
    if g.degree() == 0:
        return sign * g.coeffs[0] ** f.degree()
    ca, cb = f.content(), g.content()
    a = f.scale_exact_div(ca)
    b = g.scale_exact_div(cb)
    t = ca ** g.degree() * cb ** f.degree()
    gg = 1
    h = 1
    s = 1
    while True:
        delta = a.degree() - b.degree()
        if a.degree() % 2 == 1 and b.degree() % 2 == 1:
            s = -s
        r = _pseudo_rem(a, b)
        a = b
        b = r.scale_exact_div(gg * h**delta)
        gg = a.leading_coefficient()
        if delta > 0:
            num = gg**delta
            assert num % h ** (delta - 1) == 0
            h = num // h ** (delta - 1)
        if b.is_zero():
            return 0
        if b.degree() == 0:
            break
    num = b.coeffs[0] ** a.degree()
    assert num % h ** (a.degree() - 1) == 0
    return sign * s * t * (num // h ** (a.degree() - 1))


def ord_at_zeta(f: IntPolynomial, p: int, n: int) -> ExtRational:
    """ord_p of f evaluated at zeta_{p^n} - 1, as an exact rational.

    Computed as ord_p(Res(phi(p,n), f mod omega_n)) / phi(p^n): the
    resultant against the minimal polynomial is the norm of f(zeta-1), and
    all Galois conjugates share one valuation.  INFINITY iff f vanishes at
    zeta_{p^n} - 1, i.e. phi(p,n) divides f.
    """
    check_odd_prime(p)
    if n < 1:
        raise ValueError("ord_at_zeta requires n >= 1")
    if f.is_zero():
        return INFINITY
    ph = phi(p, n)
    r = f % ph  # same value at zeta - 1; also reduces f mod omega_n first
    if r.is_zero():
        return INFINITY
    k = r.p_power_content(p)
    if k:
        r = r.scale_exact_div(p**k)
    res = resultant(ph, r)
    # phi(p,n) is irreducible over Q and deg r < deg phi, so res != 0
    v = ord_p(res, p)
    return Fraction(k) + v / Fraction(euler_phi_pn(p, n))
