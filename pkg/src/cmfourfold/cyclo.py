"""Exact arithmetic in products of cyclotomic fields.

Elements of Q(zeta_n) are stored as rational coefficient vectors in the power
basis 1, zeta, ..., zeta^(phi(n)-1), always reduced modulo the n-th cyclotomic
polynomial, so equality is plain tuple equality.  A CM algebra is a finite
product of such fields; its complex embeddings are pairs (factor, exponent)
with zeta_{n_j} -> exp(2 pi i a / n_j).

Numerical evaluation goes through private mpmath contexts (one per precision,
never mutated after creation), so nothing here touches mpmath's global state.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from math import gcd
from typing import Iterable

import mpmath
from mpmath.ctx_iv import MPIntervalContext

from .errors import (AlgebraMismatch, CannotCertifySign, CMError, NotFound,
                     NotInvertible, NotTotallyReal)

SIGN_PRECISION_CAP = 2 ** 14


def lcm(*ns):
    return reduce(lambda a, b: a * b // gcd(a, b), ns, 1)


def euler_phi(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if gcd(k, n) == 1)


def units(n: int) -> tuple[int, ...]:
    """Residues 1 <= a < n coprime to n, ascending."""
    return tuple(a for a in range(1, n) if gcd(a, n) == 1)


def _poly_divmod_int(num, den):
    # Exact division of integer polynomials (low degree first) by a monic divisor.
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, d in enumerate(den):
                num[i + j] -= c * d
    return q, num[:len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Coefficients of Phi_n, lowest degree first.

    Uses x^n - 1 = prod_{d | n} Phi_d, dividing out the proper divisors.
    """
    if n < 1:
        raise ValueError("conductor must be positive")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, rem = _poly_divmod_int(num, cyclotomic_polynomial(d))
            assert not any(rem)
    return tuple(num)


def _reduce(n: int, coeffs) -> tuple[Fraction, ...]:
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    c = [Fraction(x) for x in coeffs]
    for i in range(len(c) - 1, deg - 1, -1):
        lead = c[i]
        if lead:
            base = i - deg
            for j, p in enumerate(phi):
                c[base + j] -= lead * p
    c = c[:deg] + [Fraction(0)] * (deg - len(c))
    return tuple(c)


@lru_cache(maxsize=None)
def _mp(prec: int):
    ctx = mpmath.MPContext()
    ctx.prec = prec
    return ctx


@lru_cache(maxsize=None)
def _iv(prec: int):
    ctx = MPIntervalContext()
    ctx.prec = prec
    return ctx


@dataclass(frozen=True)
class CyclotomicElement:
    """An element of Q(zeta_n) in reduced power-basis form."""

    conductor: int
    coeffs: tuple

    def __post_init__(self):
        if len(self.coeffs) != euler_phi(self.conductor) or not all(
                type(c) is Fraction for c in self.coeffs):
            object.__setattr__(self, "coeffs", _reduce(self.conductor, self.coeffs))

    @classmethod
    def from_powers(cls, n: int, powers: dict[int, int | Fraction]):
        """Build sum c_k zeta_n^k from {k: c_k}; k may be any integer."""
        c = [Fraction(0)] * n
        for k, v in powers.items():
            c[k % n] += Fraction(v)
        return cls(n, _reduce(n, c))

    @classmethod
    def zeta(cls, n: int, k: int = 1):
        return cls.from_powers(n, {k: 1})

    @classmethod
    def scalar(cls, n: int, value):
        return cls.from_powers(n, {0: value})

    @property
    def degree(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def _check(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement.scalar(self.conductor, other)
        if not isinstance(other, CyclotomicElement) or other.conductor != self.conductor:
            raise AlgebraMismatch(f"cannot combine Q(zeta_{self.conductor}) with {other!r}")
        return other

    def __add__(self, other):
        other = self._check(other)
        return CyclotomicElement(self.conductor,
                                 tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._check(other)
        return CyclotomicElement(self.conductor,
                                 tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __rsub__(self, other):
        return -self + other

    def __neg__(self):
        return CyclotomicElement(self.conductor, tuple(-a for a in self.coeffs))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicElement(self.conductor, tuple(a * other for a in self.coeffs))
        self._check(other)
        prod = [Fraction(0)] * (2 * self.degree - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    if b:
                        prod[i + j] += a * b
        return CyclotomicElement(self.conductor, _reduce(self.conductor, prod))

    __rmul__ = __mul__

    def galois(self, c: int):
        """Apply zeta -> zeta^c (c a unit mod the conductor)."""
        n = self.conductor
        if gcd(c, n) != 1:
            raise ValueError(f"{c} is not a unit modulo {n}")
        out = [Fraction(0)] * n
        for k, a in enumerate(self.coeffs):
            out[(k * c) % n] += a
        return CyclotomicElement(n, _reduce(n, out))

    def conj(self):
        return self.galois(-1)

    def _as_rational(self) -> Fraction:
        assert not any(self.coeffs[1:]), "expected a rational element"
        return self.coeffs[0]

    def trace(self) -> Fraction:
        acc = CyclotomicElement.scalar(self.conductor, 0)
        for c in units(self.conductor):
            acc = acc + self.galois(c)
        return acc._as_rational()

    def norm(self) -> Fraction:
        """Absolute norm N_{Q(zeta_n)/Q}."""
        acc = CyclotomicElement.scalar(self.conductor, 1)
        for c in units(self.conductor):
            acc = acc * self.galois(c)
        return acc._as_rational()

    def real_norm(self) -> Fraction:
        """Norm from the maximal real subfield down to Q; self must be real."""
        if self.conj() != self:
            raise NotTotallyReal("real_norm needs a conj-fixed element")
        n = self.conductor
        acc = CyclotomicElement.scalar(n, 1)
        for c in units(n):
            if 2 * c < n:
                acc = acc * self.galois(c)
        return acc._as_rational()

    def inverse(self):
        if self.is_zero():
            raise NotInvertible(0)
        others = CyclotomicElement.scalar(self.conductor, 1)
        for c in units(self.conductor)[1:]:
            others = others * self.galois(c)
        return others * (1 / (self * others)._as_rational())

    def evaluate(self, exponent: int, precision: int):
        """sigma_a(self) as an mpmath complex at `precision` bits."""
        ctx = _mp(precision + 16)
        n = self.conductor
        re = ctx.mpf(0)
        im = ctx.mpf(0)
        for k, a in enumerate(self.coeffs):
            if a:
                angle = 2 * ctx.pi * ((exponent * k) % n) / n
                w = ctx.mpf(a.numerator) / a.denominator
                re += w * ctx.cos(angle)
                im += w * ctx.sin(angle)
        out = _mp(precision)
        return out.mpc(+out.mpf(re), +out.mpf(im))

    def evaluate_interval(self, exponent: int, precision: int):
        """Enclosures (re, im) of sigma_a(self) from interval arithmetic."""
        ctx = _iv(precision)
        n = self.conductor
        re = ctx.mpf(0)
        im = ctx.mpf(0)
        for k, a in enumerate(self.coeffs):
            if a:
                angle = 2 * ctx.pi * ((exponent * k) % n) / n
                w = ctx.mpf(a.numerator) / a.denominator
                re += w * ctx.cos(angle)
                im += w * ctx.sin(angle)
        return re, im

    def __str__(self):
        terms = []
        for k, a in enumerate(self.coeffs):
            if a:
                mono = "1" if k == 0 else (f"z{self.conductor}" if k == 1
                                           else f"z{self.conductor}^{k}")
                terms.append(f"{a}*{mono}" if mono != "1" else f"{a}")
        return " + ".join(terms) if terms else "0"


@dataclass(frozen=True)
class Embedding:
    """zeta_{n_factor} -> exp(2 pi i exponent / n_factor)."""

    factor: int
    exponent: int

    def __str__(self):
        return f"{self.factor}:{self.exponent}"


@dataclass(frozen=True)
class CMAlgebra:
    """Product of cyclotomic fields Q(zeta_{n_1}) x ... x Q(zeta_{n_r})."""

    conductors: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "conductors", tuple(int(n) for n in self.conductors))
        if not self.conductors:
            raise CMError("a CM algebra needs at least one factor")
        for n in self.conductors:
            if n < 3 or n % 4 == 2:
                raise CMError(f"conductor {n} must be >= 3 and not 2 mod 4")

    @property
    def degree(self) -> int:
        return sum(euler_phi(n) for n in self.conductors)

    @property
    def g(self) -> int:
        return self.degree // 2

    @property
    def galois_modulus(self) -> int:
        return lcm(*self.conductors)

    def galois_group(self) -> tuple[int, ...]:
        """Units c mod lcm(n_j); c acts on every factor by zeta -> zeta^c."""
        return units(self.galois_modulus)

    def embeddings(self) -> tuple[Embedding, ...]:
        return tuple(Embedding(j, a) for j, n in enumerate(self.conductors)
                     for a in units(n))

    def conj_embedding(self, s: Embedding) -> Embedding:
        return Embedding(s.factor, (-s.exponent) % self.conductors[s.factor])

    def act(self, c: int, s: Embedding) -> Embedding:
        return Embedding(s.factor, (c * s.exponent) % self.conductors[s.factor])

    def normalize(self, s: Embedding) -> Embedding:
        if not 0 <= s.factor < len(self.conductors):
            raise CMError(f"no factor {s.factor} in algebra {list(self.conductors)}")
        n = self.conductors[s.factor]
        a = s.exponent % n
        if gcd(a, n) != 1:
            raise CMError(f"exponent {s.exponent} is not a unit modulo {n}")
        return Embedding(s.factor, a)

    def element(self, *parts) -> "AlgebraElement":
        """Build an element from per-factor data (CyclotomicElement, int or Fraction)."""
        if len(parts) != len(self.conductors):
            raise AlgebraMismatch(f"expected {len(self.conductors)} parts, got {len(parts)}")
        out = []
        for n, p in zip(self.conductors, parts):
            if not isinstance(p, CyclotomicElement):
                p = CyclotomicElement.scalar(n, p)
            out.append(p)
        return AlgebraElement(self, tuple(out))

    def scalar(self, value) -> "AlgebraElement":
        return self.element(*[value] * len(self.conductors))

    def zeta(self, factor: int, k: int = 1) -> "AlgebraElement":
        """zeta^k in one factor, zero in the others."""
        return self.element(*[CyclotomicElement.zeta(n, k) if j == factor else 0
                              for j, n in enumerate(self.conductors)])

    def diagonal_zeta(self, k: int = 1) -> "AlgebraElement":
        """Image of x^k under Q[x] -> E, x -> (zeta_{n_1}, ..., zeta_{n_r})."""
        return self.element(*[CyclotomicElement.zeta(n, k) for n in self.conductors])

    def __str__(self):
        return "[" + ",".join(map(str, self.conductors)) + "]"


@dataclass(frozen=True)
class AlgebraElement:
    algebra: CMAlgebra
    parts: tuple[CyclotomicElement, ...]

    def __post_init__(self):
        if tuple(p.conductor for p in self.parts) != self.algebra.conductors:
            raise AlgebraMismatch("parts do not match the algebra's conductors")

    def _zip(self, other):
        if not isinstance(other, AlgebraElement) or other.algebra != self.algebra:
            raise AlgebraMismatch(f"elements of different algebras: {self.algebra} vs "
                                  f"{getattr(other, 'algebra', other)}")
        return zip(self.parts, other.parts)

    def __add__(self, other):
        return AlgebraElement(self.algebra, tuple(a + b for a, b in self._zip(other)))

    def __sub__(self, other):
        return AlgebraElement(self.algebra, tuple(a - b for a, b in self._zip(other)))

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return AlgebraElement(self.algebra, tuple(a * other for a in self.parts))
        return AlgebraElement(self.algebra, tuple(a * b for a, b in self._zip(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return AlgebraElement(self.algebra, tuple(-a for a in self.parts))

    def inverse(self):
        for j, p in enumerate(self.parts):
            if p.is_zero():
                raise NotInvertible(j)
        return AlgebraElement(self.algebra, tuple(p.inverse() for p in self.parts))

    def conj(self):
        return AlgebraElement(self.algebra, tuple(p.conj() for p in self.parts))

    def galois(self, c: int):
        return AlgebraElement(self.algebra, tuple(p.galois(c) for p in self.parts))

    def is_totally_real(self) -> bool:
        return self.conj() == self

    def is_totally_imaginary(self) -> bool:
        return self.conj() == -self

    def __str__(self):
        return "(" + ", ".join(str(p) for p in self.parts) + ")"


def arith(x: AlgebraElement, y: AlgebraElement | None, op: str) -> AlgebraElement:
    """Dispatch one of add, sub, mul, inv, conj (the unary ops ignore y)."""
    if op == "add":
        return x + y
    if op == "sub":
        return x - y
    if op == "mul":
        return x * y
    if op == "inv":
        return x.inverse()
    if op == "conj":
        return x.conj()
    raise ValueError(f"unknown operation {op!r}")


def trace_to_Q(x: AlgebraElement) -> Fraction:
    """Sum of sigma(x) over all embeddings of the algebra, exactly."""
    return sum((p.trace() for p in x.parts), Fraction(0))


def embed(x: AlgebraElement, s: Embedding, precision: int = 64):
    """sigma(x) for sigma = s, as an mpmath mpc carrying `precision` bits."""
    if precision < 32:
        raise ValueError("precision must be at least 32 bits")
    s = x.algebra.normalize(s)
    return x.parts[s.factor].evaluate(s.exponent, precision)


def certified_sign(x: AlgebraElement, s: Embedding, part: str = "re",
                   precision: int = 64, cap: int = SIGN_PRECISION_CAP) -> int:
    """Sign (+1/-1) of Re or Im of sigma(x), proven by interval evaluation.

    Precision doubles until the enclosure excludes zero; past `cap` bits the
    value is declared uncertifiable.
    """
    s = x.algebra.normalize(s)
    elem = x.parts[s.factor]
    prec = max(precision, 32)
    while True:
        re, im = elem.evaluate_interval(s.exponent, prec)
        v = re if part == "re" else im
        if v.a > 0:
            return 1
        if v.b < 0:
            return -1
        if prec >= cap:
            raise CannotCertifySign(s, cap)
        prec = min(2 * prec, cap)


def sign_vector(u: AlgebraElement, embeddings: Iterable[Embedding],
                precision: int = 64, cap: int = SIGN_PRECISION_CAP) -> tuple[int, ...]:
    """Signs of a totally real element at each given embedding, in order.

    `embeddings` is typically a CMType, whose iteration order is its
    serialization order.
    """
    if not u.is_totally_real():
        raise NotTotallyReal(f"{u} is not fixed by complex conjugation")
    return tuple(certified_sign(u, s, "re", precision, cap) for s in embeddings)


def parse_signs(signs) -> tuple[int, ...]:
    """Accept '++-', ['+', '-'] or [1, -1]."""
    out = []
    for ch in signs:
        if ch in ("+", 1, +1):
            out.append(1)
        elif ch in ("-", -1):
            out.append(-1)
        else:
            raise ValueError(f"bad sign {ch!r}")
    return tuple(out)


def real_basis(n: int) -> list[CyclotomicElement]:
    """1, zeta+zeta^-1, ..., zeta^m+zeta^-m with m = phi(n)/2 - 1.

    A Z-basis of the ring of integers of the maximal real subfield.
    """
    half = euler_phi(n) // 2
    out = [CyclotomicElement.scalar(n, 1)]
    for k in range(1, half):
        out.append(CyclotomicElement.from_powers(n, {k: 1, -k: 1}))
    return out


def pair_representatives(n: int) -> tuple[int, ...]:
    """One exponent per conjugate pair: the units a with a < n/2."""
    return tuple(a for a in units(n) if 2 * a < n)


def search_vectors(dim: int, height: int):
    """Integer vectors with entries in [-height, height], minus zero, in search order.

    Order: by max |c|, then by sum |c|, then lexicographically where each
    coefficient compares as 1 < -1 < 2 < -2 < ... < 0 (nonzero entries in
    early positions come first).
    """
    def coeff_key(c):
        return (c == 0, abs(c), c < 0)

    vecs = [v for v in itertools.product(range(-height, height + 1), repeat=dim) if any(v)]
    vecs.sort(key=lambda v: (max(map(abs, v)), sum(map(abs, v)), tuple(map(coeff_key, v))))
    return vecs


def find_sign_unit(algebra: CMAlgebra, factor: int, target_signs,
                   height: int = 5) -> AlgebraElement:
    """A totally real unit of one factor with a prescribed sign pattern.

    Searches integer combinations of `real_basis` with coefficients bounded
    by `height`.  Signs are read at the pair representatives
    `pair_representatives(n)` in ascending order.  The result carries the
    unit in `factor` and 1 in every other factor, so it is a unit of the
    whole algebra and can be used for twisting directly.
    """
    n = algebra.conductors[factor]
    target = parse_signs(target_signs)
    reps = pair_representatives(n)
    if len(target) != len(reps):
        raise ValueError(f"factor {factor} has {len(reps)} conjugate pairs, "
                         f"got {len(target)} signs")
    basis = real_basis(n)
    embs = [Embedding(factor, a) for a in reps]
    searched = 0
    for coeffs in search_vectors(len(basis), height):
        searched += 1
        u = CyclotomicElement.scalar(n, 0)
        for c, b in zip(coeffs, basis):
            if c:
                u = u + b * c
        if abs(u.real_norm()) != 1:
            continue
        parts = [u if j == factor else 1 for j in range(len(algebra.conductors))]
        cand = algebra.element(*parts)
        if sign_vector(cand, embs) == target:
            return cand
    raise NotFound(f"unit with signs {target} in factor {factor}", searched)
