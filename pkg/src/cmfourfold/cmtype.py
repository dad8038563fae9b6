"""CM types, Weil-type invariants and polarization elements."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator

from . import lattice
from .cyclo import (AlgebraElement, CMAlgebra, CyclotomicElement, Embedding,
                    certified_sign, euler_phi, search_vectors, sign_vector, units)
from .errors import (CMError, InvalidCMType, NotFound, NotTotallyReal, ParseError,
                     QuadraticNotContained, WrongDimension)


@dataclass(frozen=True)
class CMType:
    """A set of embeddings meant to contain one member of each conjugate pair.

    Construction does not enforce the partition property so that broken
    inputs can be reported by `validate_cm_type`; use `CMType.checked` when
    a valid type is required.  Iteration follows the serialization order
    (factor, then exponent).
    """

    algebra: CMAlgebra
    chosen: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "chosen", frozenset(self.chosen))

    @classmethod
    def checked(cls, algebra, chosen):
        cm = cls(algebra, frozenset(algebra.normalize(s) for s in chosen))
        report = validate_cm_type(cm)
        if not report:
            raise InvalidCMType(report)
        return cm

    def __iter__(self) -> Iterator[Embedding]:
        return iter(sorted(self.chosen, key=lambda s: (s.factor, s.exponent)))

    def __len__(self):
        return len(self.chosen)

    def __contains__(self, s):
        return s in self.chosen

    def conj(self) -> "CMType":
        return CMType(self.algebra, frozenset(self.algebra.conj_embedding(s)
                                              for s in self.chosen))

    def galois(self, c: int) -> "CMType":
        return CMType(self.algebra, frozenset(self.algebra.act(c, s) for s in self.chosen))

    def factor(self, j: int) -> "CMType":
        """Restriction to the j-th factor, as a CM type on Q(zeta_{n_j})."""
        alg = CMAlgebra((self.algebra.conductors[j],))
        return CMType(alg, frozenset(Embedding(0, s.exponent)
                                     for s in self.chosen if s.factor == j))

    def to_string(self) -> str:
        return f"{self.algebra}:{{{','.join(str(s) for s in self)}}}"

    __str__ = to_string

    @classmethod
    def parse(cls, text: str) -> "CMType":
        """Inverse of `to_string`, e.g. ``[9,3]:{0:1,0:2,0:4,1:1}``."""
        m = re.fullmatch(r"\s*\[([0-9,\s]*)\]\s*:\s*\{(.*)\}\s*", text)
        if not m:
            raise ParseError("expected '[n1,n2,...]:{f:a,...}'", text, 0)
        algebra = parse_algebra(m.group(1), text, m.start(1))
        chosen = parse_embeddings(m.group(2), algebra, text, m.start(2))
        return cls(algebra, chosen)


def parse_algebra(spec: str, text: str | None = None, offset: int = 0) -> CMAlgebra:
    text = spec if text is None else text
    ns = []
    pos = offset
    for tok in spec.split(","):
        stripped = tok.strip()
        if not stripped.isdigit():
            raise ParseError(f"bad conductor {stripped!r}", text, pos)
        ns.append(int(stripped))
        pos += len(tok) + 1
    try:
        return CMAlgebra(tuple(ns))
    except CMError as exc:
        raise ParseError(str(exc), text, offset) from None


def parse_embeddings(spec: str, algebra: CMAlgebra, text: str | None = None,
                     offset: int = 0) -> frozenset:
    """Parse ``f:a,f:a,...`` against an algebra; exponents are reduced mod n_f."""
    text = spec if text is None else text
    out = set()
    if not spec.strip():
        return frozenset()
    pos = offset
    for tok in spec.split(","):
        m = re.fullmatch(r"\s*(-?\d+)\s*:\s*(-?\d+)\s*", tok)
        if not m:
            raise ParseError(f"expected 'factor:exponent', got {tok.strip()!r}", text, pos)
        j, a = int(m.group(1)), int(m.group(2))
        if not 0 <= j < len(algebra.conductors):
            raise ParseError(f"factor {j} out of range", text, pos + m.start(1))
        n = algebra.conductors[j]
        if gcd(a, n) != 1:
            raise ParseError(f"exponent {a} is not a unit mod {n}", text, pos + m.start(2))
        out.add(Embedding(j, a % n))
        pos += len(tok) + 1
    return frozenset(out)


@dataclass(frozen=True)
class Report:
    """Outcome of a validation; truthy iff there are no violations."""

    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_cm_type(cm: CMType) -> Report:
    alg = cm.algebra
    problems = []
    chosen = set()
    for s in cm.chosen:
        try:
            chosen.add(alg.normalize(s))
        except CMError as exc:
            problems.append(f"invalid embedding {s}: {exc}")
    if len(cm.chosen) != alg.g:
        problems.append(f"cardinality {len(cm.chosen)} != {alg.g}")
    for j, n in enumerate(alg.conductors):
        for a in units(n):
            if 2 * a > n:
                continue
            pair = (Embedding(j, a), Embedding(j, n - a))
            hits = sum(p in chosen for p in pair)
            if hits == 2:
                problems.append(f"conjugate pair ({a},{n - a}) of factor {j} chosen twice")
            elif hits == 0:
                problems.append(f"conjugate pair ({a},{n - a}) of factor {j} not covered")
    return Report(tuple(problems))


def shioda_cm_type() -> CMType:
    """Eigen-embeddings of zeta_9 on x^(v-1)dx/y, v = 1..4, for y^2 = x^9 - 1."""
    alg = CMAlgebra((9, 3))
    return CMType.checked(alg, [Embedding(0, 1), Embedding(0, 2), Embedding(0, 4),
                                Embedding(1, 1)])


@dataclass(frozen=True)
class QuadraticSubfield:
    """Imaginary quadratic subfield of Q(zeta_m) fixed by an index-2 subgroup.

    The distinguished embedding sigma is the one induced by
    zeta_m -> exp(2 pi i / m); an exponent a restricts to sigma iff
    a mod m lies in `subgroup`.
    """

    conductor: int
    subgroup: frozenset

    @classmethod
    def of(cls, m: int) -> "QuadraticSubfield":
        phi = euler_phi(m)
        if phi == 2:
            return cls(m, frozenset({1}))
        if m > 3 and m % 4 == 3 and all(m % p for p in range(2, int(m ** 0.5) + 1)):
            return cls(m, frozenset(a * a % m for a in units(m)))
        raise CMError(f"no canonical imaginary quadratic subfield for conductor {m}")

    def restrict(self, algebra: CMAlgebra, s: Embedding) -> int:
        """0 if s restricts to sigma, 1 if to its conjugate."""
        n = algebra.conductors[s.factor]
        if n % self.conductor:
            raise QuadraticNotContained(
                f"Q(zeta_{self.conductor}) quadratic subfield does not embed in "
                f"Q(zeta_{n}) (factor {s.factor})")
        return 0 if s.exponent % self.conductor in self.subgroup else 1


@dataclass(frozen=True, eq=False)
class WeilInvariant:
    """Multiplicities of sigma and its conjugate on H^{1,0}; compared unordered."""

    n_sigma: int
    n_sigma_conj: int

    @property
    def pair(self) -> tuple[int, int]:
        return tuple(sorted((self.n_sigma, self.n_sigma_conj)))

    def __eq__(self, other):
        if isinstance(other, WeilInvariant):
            return self.pair == other.pair
        try:
            return self.pair == tuple(sorted(other))
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.pair)

    def __repr__(self):
        return f"{{{self.pair[0]}, {self.pair[1]}}}"


def _quad(quad) -> QuadraticSubfield:
    return quad if isinstance(quad, QuadraticSubfield) else QuadraticSubfield.of(int(quad))


def weil_invariant(cm: CMType, quad=3) -> WeilInvariant:
    q = _quad(quad)
    for j, n in enumerate(cm.algebra.conductors):
        if n % q.conductor:
            raise QuadraticNotContained(
                f"quadratic subfield of conductor {q.conductor} does not embed in "
                f"factor {j} = Q(zeta_{n})")
    counts = [0, 0]
    for s in cm:
        counts[q.restrict(cm.algebra, s)] += 1
    return WeilInvariant(*counts)


def is_weil_type(cm: CMType, quad=3) -> bool:
    if cm.algebra.g != 4:
        raise WrongDimension(f"Weil type is defined here for g = 4, got g = {cm.algebra.g}")
    return weil_invariant(cm, quad).pair == (2, 2)


def twist_cm_type(cm: CMType, u: AlgebraElement) -> CMType:
    """Replace every sigma with sigma(u) < 0 by its conjugate."""
    signs = sign_vector(u, cm)
    return CMType(cm.algebra, frozenset(
        s if sgn > 0 else cm.algebra.conj_embedding(s) for s, sgn in zip(cm, signs)))


@dataclass(frozen=True)
class PolarizationElement:
    """A certified polarization element t for `cm_type`."""

    t: AlgebraElement
    cm_type: CMType


def check_polarization_element(t: AlgebraElement, cm: CMType) -> Report:
    problems = []
    zero = [j for j, p in enumerate(t.parts) if p.is_zero()]
    for j in zero:
        problems.append(f"t is zero in factor {j}, so it is not a unit of the algebra")
    if not t.is_totally_imaginary():
        problems.append("t is not totally imaginary: conj(t) != -t")
        return Report(tuple(problems))
    for s in cm:
        if s.factor in zero:
            continue
        if certified_sign(t, s, "im") < 0:
            problems.append(f"Im sigma(t) < 0 at embedding {s}")
    return Report(tuple(problems))


def imaginary_basis(n: int) -> list[CyclotomicElement]:
    """zeta^k - zeta^-k for the first k keeping the family independent.

    Yields phi(n)/2 elements spanning the totally imaginary part of Q(zeta_n).
    """
    out, rows = [], []
    for k in range(1, n):
        e = CyclotomicElement.from_powers(n, {k: 1, -k: -1})
        row = [int(c) for c in e.coeffs]
        if lattice.rank(rows + [row]) > len(rows):
            out.append(e)
            rows.append(row)
        if len(out) == euler_phi(n) // 2:
            break
    return out


def find_polarization_element(cm: CMType, height: int = 1) -> PolarizationElement:
    """Search sum c_k (zeta^k - zeta^-k) per factor, |c_k| <= height.

    The positivity conditions decouple across factors, so each factor is
    searched on its own, in the order of `search_vectors` over
    `imaginary_basis`; the first certified candidate of each factor is kept.
    """
    if height < 1:
        raise ValueError("height must be >= 1")
    if not validate_cm_type(cm):
        raise InvalidCMType(validate_cm_type(cm))
    alg = cm.algebra
    parts = []
    searched = 0
    for j, n in enumerate(alg.conductors):
        basis = imaginary_basis(n)
        embs = [s for s in cm if s.factor == j]
        found = None
        for coeffs in search_vectors(len(basis), height):
            searched += 1
            cand = CyclotomicElement.scalar(n, 0)
            for c, b in zip(coeffs, basis):
                if c:
                    cand = cand + b * c
            if cand.is_zero():
                continue
            single = CMAlgebra((n,)).element(cand)
            if all(certified_sign(single, Embedding(0, s.exponent), "im") > 0 for s in embs):
                found = cand
                break
        if found is None:
            raise NotFound(f"polarization element for factor {j}", searched)
        parts.append(found)
    t = alg.element(*parts)
    assert check_polarization_element(t, cm)
    return PolarizationElement(t, cm)


def twist_polarization(pol: PolarizationElement, u: AlgebraElement) -> PolarizationElement:
    """(t, cm) -> (u t, twist_cm_type(cm, u)); sign flips in u and in the type cancel."""
    if not u.is_totally_real():
        raise NotTotallyReal(f"{u} is not totally real")
    new_cm = twist_cm_type(pol.cm_type, u)
    t = u * pol.t
    report = check_polarization_element(t, new_cm)
    if not report:
        raise CMError(f"twisted polarization failed to certify: {report.violations}")
    return PolarizationElement(t, new_cm)
