"""Lattice-model period matrices, trace-form polarizations, Riemann relations.

The abelian variety attached to (E, Sigma) is C^Sigma / Sigma(O_E).  Columns
of the period matrix are the images of the power-basis Z-basis of O_E, rows
are the embeddings of Sigma.  The polarization matrix is exact (rational
trace arithmetic); only periods and eigenvalues are approximate.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm

from . import lattice
from .cmtype import (CMType, PolarizationElement, find_polarization_element,
                     is_weil_type, shioda_cm_type, twist_polarization, weil_invariant)
from .cyclo import (AlgebraElement, CMAlgebra, Embedding, _mp, certified_sign, embed,
                    euler_phi, find_sign_unit, trace_to_Q)
from .errors import CMError, DegeneratePairing, SingularPolarization, StageError
from .mtrep import is_mumford_type, weight_matrix


@dataclass(frozen=True)
class IntegralBasis:
    algebra: CMAlgebra
    elements: tuple

    def __len__(self):
        return len(self.elements)

    def labels(self) -> list[str]:
        return [f"{j}:z^{k}" for j, n in enumerate(self.algebra.conductors)
                for k in range(euler_phi(n))]


def integral_basis(algebra: CMAlgebra) -> IntegralBasis:
    """Concatenated power bases 1, zeta, ..., zeta^(phi(n_j)-1) of each factor."""
    return IntegralBasis(algebra, tuple(
        algebra.zeta(j, k) for j, n in enumerate(algebra.conductors)
        for k in range(euler_phi(n))))


@dataclass(frozen=True)
class PeriodMatrix:
    entries: tuple          # g rows of 2g mpc values
    sigma_order: tuple
    basis: IntegralBasis
    precision: int

    @property
    def shape(self):
        return len(self.entries), len(self.entries[0])

    def real_singular_values(self):
        """Singular values of the 2g x 2g real matrix [Re; Im]."""
        ctx = _mp(self.precision)
        rows = [[ctx.re(z) for z in row] for row in self.entries]
        rows += [[ctx.im(z) for z in row] for row in self.entries]
        return sorted(ctx.svd_r(ctx.matrix(rows), compute_uv=False))

    def conj(self) -> "PeriodMatrix":
        ctx = _mp(self.precision)
        return PeriodMatrix(tuple(tuple(ctx.conj(z) for z in row) for row in self.entries),
                            self.sigma_order, self.basis, self.precision)


def period_matrix(cm: CMType, precision: int = 128) -> PeriodMatrix:
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")
    basis = integral_basis(cm.algebra)
    rows = tuple(tuple(embed(b, s, precision) for b in basis.elements) for s in cm)
    return PeriodMatrix(rows, tuple(cm), basis, precision)


@dataclass(frozen=True)
class PolarizationMatrix:
    entries: tuple          # 2g x 2g ints, alternating
    scale: Fraction         # entries = scale * raw trace pairing

    def rational(self):
        return [[Fraction(x) for x in row] for row in self.entries]


def trace_pairing(t: AlgebraElement, x: AlgebraElement, y: AlgebraElement) -> Fraction:
    """Tr_{E/Q}(t x conj(y))."""
    return trace_to_Q(t * x * y.conj())


def polarization_matrix(t, basis: IntegralBasis) -> PolarizationMatrix:
    """E_ab = Tr(t b_a conj(b_b)), rescaled to a primitive integer matrix."""
    if isinstance(t, PolarizationElement):
        t = t.t
    if not t.is_totally_imaginary():
        raise CMError("polarization_matrix needs a totally imaginary t")
    raw = [[trace_pairing(t, a, b) for b in basis.elements] for a in basis.elements]
    den = lcm(*(x.denominator for row in raw for x in row))
    num = 0
    for row in raw:
        for x in row:
            num = gcd(num, (x * den).numerator)
    if num == 0:
        raise DegeneratePairing("pairing is identically zero")
    scale = Fraction(den, num)
    entries = tuple(tuple(int(x * scale) for x in row) for row in raw)
    assert all(entries[i][j] == -entries[j][i] for i in range(len(raw))
               for j in range(len(raw)))
    if lattice.determinant(entries) == 0:
        raise DegeneratePairing("trace pairing is degenerate")
    return PolarizationMatrix(entries, scale)


@dataclass(frozen=True)
class RiemannReport:
    first_relation_residual: object   # mpf
    min_eigenvalue_H: object          # mpf
    gershgorin_lower_bound: object    # mpf, certifies definiteness when > 0
    precision: int

    @property
    def residual_bound(self):
        return _mp(self.precision).ldexp(1, -self.precision // 2)

    @property
    def eigenvalue_bound(self):
        return _mp(self.precision).ldexp(1, -self.precision // 4)

    @property
    def passed(self) -> bool:
        return (self.first_relation_residual <= self.residual_bound
                and self.min_eigenvalue_H >= self.eigenvalue_bound
                and self.gershgorin_lower_bound > 0)

    def to_json(self, digits=None) -> dict:
        ctx = _mp(self.precision)
        d = digits or ctx.dps
        return {"first_relation_residual": ctx.nstr(self.first_relation_residual, 6),
                "min_eigenvalue_H": ctx.nstr(self.min_eigenvalue_H, d),
                "gershgorin_lower_bound": ctx.nstr(self.gershgorin_lower_bound, d),
                "precision": self.precision,
                "result": "PASS" if self.passed else "FAIL"}


def riemann_relations_check(Pi: PeriodMatrix, E: PolarizationMatrix,
                            precision: int | None = None) -> RiemannReport:
    """Check Pi F Pi^T = 0 and i Pi F conj(Pi)^T > 0 with F = (E^T)^-1.

    The matrix relations hold for forms with E(iv, v) > 0; the trace form
    with Im sigma(t) > 0 on Sigma satisfies E(v, iv) > 0 instead, so the
    relations are applied to its transpose.  Positive definiteness is
    certified by Gershgorin discs of Q^H H Q, Q the computed eigenvectors
    (a congruence, so inertia is preserved).
    """
    p = precision or Pi.precision
    ctx = _mp(p)
    n = len(E.entries)
    if Pi.shape[1] != n:
        raise CMError(f"period matrix has {Pi.shape[1]} columns, polarization is {n}x{n}")
    try:
        Finv = lattice.inverse([list(row) for row in zip(*E.entries)])
    except ZeroDivisionError:
        raise SingularPolarization("polarization matrix is singular") from None
    F = ctx.matrix([[ctx.mpf(x.numerator) / x.denominator for x in row] for row in Finv])
    P = ctx.matrix([list(row) for row in Pi.entries])
    R1 = P * F * P.T
    H = ctx.mpc(0, 1) * P * F * P.H
    H = (H + H.H) / 2
    residual = max(abs(R1[i, j]) for i in range(R1.rows) for j in range(R1.cols))
    evals, Q = ctx.eighe(H)
    D = Q.H * H * Q
    gersh = min(ctx.re(D[i, i]) - sum(abs(D[i, j]) for j in range(D.cols) if j != i)
                for i in range(D.rows))
    return RiemannReport(residual, min(evals), gersh, p)


@dataclass(frozen=True)
class GramTwistReport:
    factors: tuple           # real mpf values, eigenlines v = 1..g
    flipped: frozenset       # 1-based eigenline indices with negative factor
    twisted_gram: tuple
    twisted_cm_type: CMType  # Shioda's type with the flipped eigenlines conjugated
    precision: int

    def to_json(self) -> dict:
        ctx = _mp(self.precision)
        return {"factors": [ctx.nstr(f, ctx.dps) for f in self.factors],
                "flipped": sorted(self.flipped),
                "twisted_cm_type": self.twisted_cm_type.to_string(),
                "weil_invariant": list(weil_invariant(self.twisted_cm_type).pair)}


def eigenline_embedding(v: int) -> Embedding:
    """Embedding of Q(zeta_9) x Q(zeta_3) with x -> zeta_9^v, x the diagonal zeta.

    x^(v-1)dx/y on y^2 = x^9 - 1 is a zeta_9^v eigenvector; v = 3, 6 land in
    the elliptic factor through zeta_3 = zeta_9^3.
    """
    v %= 9
    if v % 3:
        return Embedding(0, v)
    if v == 0:
        raise ValueError("eigenvalue 1 does not occur on H^1")
    return Embedding(1, v // 3)


def shioda_diagonal_real_unit() -> AlgebraElement:
    """x + x^-1 in Q[x]/(x^8 + ... + 1), i.e. (zeta_9 + zeta_9^-1, zeta_3 + zeta_3^-1)."""
    alg = CMAlgebra((9, 3))
    return alg.diagonal_zeta(1) + alg.diagonal_zeta(-1)


def eigenbasis_gram(t: AlgebraElement, precision: int = 128, g: int = 4):
    """Stand-in pairing on the eta basis: diag(2 Im sigma_v(t)), v = 1..g."""
    ctx = _mp(precision)
    out = []
    for v in range(1, g + 1):
        val = 2 * ctx.im(embed(t, eigenline_embedding(v), precision))
        out.append(tuple(val if i == v - 1 else ctx.mpf(0) for i in range(g)))
    return tuple(out)


def gram_twist(gram, u: AlgebraElement | None = None, precision: int = 128) -> GramTwistReport:
    """<omega_i, omega_j> = sigma_i(u) <eta_i, eta_j>, taken literally (row scaling).

    `u` defaults to x + x^-1, whose value on eigenline i is zeta_9^i + zeta_9^-i.
    """
    g = len(gram)
    if g != 4:
        raise CMError(f"gram_twist works on the 4 eta eigenlines, got {g}")
    if u is None:
        u = shioda_diagonal_real_unit()
    ctx = _mp(precision)
    factors = []
    flipped = set()
    for v in range(1, g + 1):
        s = eigenline_embedding(v)
        factors.append(ctx.re(embed(u, s, precision)))
        if certified_sign(u, s, "re", precision) < 0:
            flipped.add(v)
    twisted = tuple(tuple(factors[i] * x for x in row) for i, row in enumerate(gram))
    sigma = shioda_cm_type()
    cm = CMType(sigma.algebra, frozenset(
        sigma.algebra.conj_embedding(eigenline_embedding(v)) if v in flipped
        else eigenline_embedding(v) for v in range(1, g + 1)))
    return GramTwistReport(tuple(factors), frozenset(flipped), twisted, cm, precision)


@dataclass(frozen=True)
class MumfordPeriodData:
    unit: AlgebraElement
    source: PolarizationElement          # Shioda type with its polarization
    polarization: PolarizationElement    # twisted type with u t
    period_matrix: PeriodMatrix
    polarization_matrix: PolarizationMatrix
    riemann: RiemannReport

    @property
    def cm_type(self) -> CMType:
        return self.polarization.cm_type


def mumford_period_data(precision: int = 128) -> MumfordPeriodData:
    """Multiply the Shioda polarization element by (zeta_9 + zeta_9^-1, 1) and certify."""
    if precision < 64:
        raise ValueError("precision must be at least 64 bits")

    def stage(name, fn, *args):
        try:
            return fn(*args)
        except CMError as exc:
            raise StageError(name, exc) from exc

    sigma = stage("cm_type", shioda_cm_type)
    pol = stage("polarization", find_polarization_element, sigma, 1)
    u = stage("unit", find_sign_unit, sigma.algebra, 0, "++-")
    twisted = stage("twist", twist_polarization, pol, u)
    Pi = stage("period_matrix", period_matrix, twisted.cm_type, precision)
    E = stage("polarization_matrix", polarization_matrix, twisted.t,
              integral_basis(sigma.algebra))
    report = stage("riemann", riemann_relations_check, Pi, E, precision)
    if not report.passed:
        raise StageError("riemann", CMError("Riemann relations failed"))
    if not is_mumford_type(weight_matrix(twisted.cm_type)):
        raise StageError("invariants", CMError("twisted type is not of Mumford form"))
    if not is_weil_type(twisted.cm_type, 3):
        raise StageError("invariants", CMError("twisted type is not of Weil type"))
    return MumfordPeriodData(u, pol, twisted, Pi, E, report)
