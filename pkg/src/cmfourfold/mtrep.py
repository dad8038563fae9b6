"""Hodge tori of CM types seen through their character lattices.

The Hodge cocharacter of a CM type Sigma, restricted to the unit circle, is
the odd vector delta = 1_Sigma - 1_{conj Sigma} in Z^S.  The Hodge (special
Mumford-Tate) group is the subtorus whose cocharacter lattice is the
saturation of the span of the Galois orbit of delta.  With a Z-basis
b_1..b_r of that lattice, the standard character at sigma restricts to the
row (b_1[sigma], ..., b_r[sigma]); these rows for sigma in Sigma form the
weight matrix.  The weights of H^1 are the rows together with their
negatives; a row is the weight of a (1,0)-line.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from math import comb

from . import lattice
from .cmtype import CMType, validate_cm_type
from .errors import DimensionMismatch, InvalidCMType, WrongDimension


@dataclass(frozen=True)
class WeightMatrix:
    rows: tuple

    def __post_init__(self):
        rows = tuple(tuple(int(x) for x in row) for row in self.rows)
        if not rows:
            raise ValueError("a weight matrix needs at least one row")
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged weight matrix")
        if any(not any(r) for r in rows):
            raise ValueError("weight matrices have no zero rows")
        object.__setattr__(self, "rows", rows)

    @property
    def g(self) -> int:
        return len(self.rows)

    @property
    def r(self) -> int:
        return len(self.rows[0])

    def full_weights(self) -> list[tuple]:
        """Rows then negated rows: the weights of all 2g lines."""
        return list(self.rows) + [tuple(-x for x in r) for r in self.rows]

    def rank(self) -> int:
        return lattice.rank([list(r) for r in self.rows])

    def to_json(self) -> dict:
        return {"g": self.g, "r": self.r, "rows": [list(r) for r in self.rows]}


def _require_valid(cm: CMType):
    report = validate_cm_type(cm)
    if not report:
        raise InvalidCMType(report)


def delta_character(cm: CMType) -> tuple[int, ...]:
    """+1 on Sigma, -1 on conj(Sigma), indexed by `cm.algebra.embeddings()`."""
    _require_valid(cm)
    return tuple(1 if s in cm else -1 for s in cm.algebra.embeddings())


def galois_orbit_matrix(cm: CMType) -> list[list[int]]:
    """Rows c.delta for c in the Galois group, (c.delta)(s) = delta(c^-1 s)."""
    alg = cm.algebra
    embs = alg.embeddings()
    index = {s: i for i, s in enumerate(embs)}
    delta = delta_character(cm)
    N = alg.galois_modulus
    rows = []
    for c in alg.galois_group():
        cinv = pow(c, -1, N)
        rows.append([delta[index[alg.act(cinv, s)]] for s in embs])
    return rows


def hodge_lattice_basis(cm: CMType) -> list[list[int]]:
    """HNF basis of the saturated cocharacter lattice of the Hodge torus."""
    return lattice.saturation(galois_orbit_matrix(cm))


def hodge_group_rank(cm: CMType) -> int:
    return lattice.rank(galois_orbit_matrix(cm))


def weight_matrix(cm: CMType) -> WeightMatrix:
    """Rows follow the serialization order of `cm`; columns the HNF basis."""
    basis = hodge_lattice_basis(cm)
    index = {s: i for i, s in enumerate(cm.algebra.embeddings())}
    return WeightMatrix(tuple(tuple(b[index[s]] for b in basis) for s in cm))


def canonical_form(W: WeightMatrix) -> tuple:
    """Invariant of W under row permutations and unimodular column changes.

    For each row order the column lattice is put in HNF (row-style HNF of
    the transpose); the lexicographically least result, transposed back to
    g x r shape, is the canonical form.  Cost grows like g!, fine for g <= 8.
    """
    best = None
    for perm in itertools.permutations(range(W.g)):
        cols = lattice.hnf([[W.rows[i][k] for i in perm] for k in range(W.r)])
        key = tuple(tuple(row) for row in cols)
        if best is None or key < best:
            best = key
    return tuple(zip(*best)) if best else ()


def weight_matrix_equivalent(W1: WeightMatrix, W2: WeightMatrix) -> bool:
    """Is P W1 U = W2 for a row permutation P and unimodular U?  No row sign flips."""
    if (W1.g, W1.r) != (W2.g, W2.r):
        raise DimensionMismatch(f"{W1.g}x{W1.r} vs {W2.g}x{W2.r}")
    return canonical_form(W1) == canonical_form(W2)


def dual_rep(W: WeightMatrix) -> WeightMatrix:
    return WeightMatrix(tuple(tuple(-x for x in r) for r in W.rows))


def sum_rep(W1: WeightMatrix, W2: WeightMatrix) -> WeightMatrix:
    """Direct sum over a shared torus basis: row concatenation."""
    if W1.r != W2.r:
        raise DimensionMismatch(f"torus ranks differ: {W1.r} vs {W2.r}")
    return WeightMatrix(W1.rows + W2.rows)


def hodge_class_count(W: WeightMatrix, k: int) -> int:
    """Number of 2k-element sub-multisets of the 2g weights summing to zero.

    Each line is used at most once; repeated weights count separately.
    """
    if not 1 <= k <= W.g:
        raise ValueError(f"k must lie in 1..{W.g}")
    target = 2 * k
    zero = (0,) * W.r
    # layers[size][sum] = number of subsets of the weights seen so far
    layers = [Counter() for _ in range(target + 1)]
    layers[0][zero] = 1
    for w in W.full_weights():
        for size in range(target - 1, -1, -1):
            for total, cnt in list(layers[size].items()):
                layers[size + 1][tuple(a + b for a, b in zip(total, w))] += cnt
    return layers[target][zero]


def hodge_class_count_by_types(cm: CMType, k: int) -> int:
    """Count 2k-subsets I of the lines with |c.I meet Sigma| = k for every Galois c.

    Such a wedge of lines has type (k, k) under every Galois conjugate of
    the Hodge cocharacter, i.e. it is invariant under the Hodge torus.  This
    never builds a lattice basis, so it is an independent check on
    `hodge_class_count(weight_matrix(cm), k)`.
    """
    alg = cm.algebra
    embs = alg.embeddings()
    conjugates = [cm.galois(c) for c in alg.galois_group()]
    count = 0
    for subset in itertools.combinations(embs, 2 * k):
        if all(sum(s in sig for s in subset) == k for sig in conjugates):
            count += 1
    return count


def rank_bounds_from_class_counts(cm: CMType) -> tuple[int, int]:
    """Bracket the Hodge-group rank without the orbit lattice of the whole type.

    Lower bound: the group surjects onto each factor's Hodge group, so its
    rank is at least the largest factor rank.  Upper bound: a rank-g torus
    is all of U(1)^g, whose invariant counts are those of the g x g
    identity; any excess Hodge class forces the rank below g.
    """
    lower = max(hodge_group_rank(cm.factor(j)) for j in range(len(cm.algebra.conductors)))
    g = cm.algebra.g
    generic = WeightMatrix(tuple(tuple(int(i == j) for j in range(g)) for i in range(g)))
    excess = any(hodge_class_count_by_types(cm, k) > hodge_class_count(generic, k)
                 for k in range(1, g + 1))
    return lower, g - 1 if excess else g


@dataclass(frozen=True)
class SubstructureReport:
    """A Galois orbit of Sym^2 basis vectors and its Hodge numbers.

    `orbit` lists unordered pairs of embeddings (s, s'); `weights` the
    matching torus weights w_s + w_s'; `hodge_numbers` is
    (h^{2,0}, h^{1,1}, h^{0,2}).
    """

    orbit: tuple
    weights: tuple
    hodge_numbers: tuple

    @property
    def dimension(self) -> int:
        return len(self.orbit)

    def to_json(self) -> dict:
        return {"dimension": self.dimension,
                "hodge_numbers": list(self.hodge_numbers),
                "orbit": [[str(a), str(b)] for a, b in self.orbit]}


def sym2_substructures(W: WeightMatrix, cm: CMType) -> list[SubstructureReport]:
    """Orbits of the Galois group on the Sym^2 basis {v_s v_s'} of H^1.

    The line v_s has type (1,0) when s is in Sigma and (0,1) otherwise, and
    torus weight +row(s) or -row(conj s).  Complex conjugation is the Galois
    element -1, so every orbit is closed under negation of weights.  Orbits
    are sorted by size, then Hodge numbers, then first element.
    """
    if W.g != len(cm):
        raise DimensionMismatch(f"weight matrix has {W.g} rows, CM type has {len(cm)}")
    alg = cm.algebra
    embs = alg.embeddings()
    order = {s: i for i, s in enumerate(embs)}
    row_of = dict(zip(cm, W.rows))

    def weight(s):
        if s in cm:
            return row_of[s]
        return tuple(-x for x in row_of[alg.conj_embedding(s)])

    def key(a, b):
        return (a, b) if order[a] <= order[b] else (b, a)

    seen = set()
    reports = []
    for i, a in enumerate(embs):
        for b in embs[i:]:
            start = key(a, b)
            if start in seen:
                continue
            orbit = sorted({key(alg.act(c, a), alg.act(c, b)) for c in alg.galois_group()},
                           key=lambda p: (order[p[0]], order[p[1]]))
            seen.update(orbit)
            h = [0, 0, 0]
            for x, y in orbit:
                h[2 - (x in cm) - (y in cm)] += 1
            weights = tuple(tuple(p + q for p, q in zip(weight(x), weight(y)))
                            for x, y in orbit)
            reports.append(SubstructureReport(tuple(orbit), weights, tuple(h)))
    reports.sort(key=lambda r: (r.dimension, r.hodge_numbers,
                                (order[r.orbit[0][0]], order[r.orbit[0][1]])))
    return reports


def sym2_totals(reports) -> tuple[int, int, int]:
    return tuple(sum(r.hodge_numbers[i] for r in reports) for i in range(3))


_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def mumford_pairing(W: WeightMatrix):
    """First split of the four rows into two pairs with equal sums, or None."""
    if W.g != 4:
        raise WrongDimension(f"needs g = 4, got g = {W.g}")
    for (a, b), (c, d) in _PAIRINGS:
        ra, rb, rc, rd = (W.rows[i] for i in (a, b, c, d))
        if all(x + y == z + w for x, y, z, w in zip(ra, rb, rc, rd)):
            return (a, b), (c, d)
    return None


def is_mumford_type(W: WeightMatrix) -> bool:
    """Do the (1,0)-weights match W_{1,1,1} with the Hodge circle in one slot?

    With rows paired as w_a + w_b = w_c + w_d, set M3 = (w_a + w_b)/2,
    M1 = (w_a - w_b)/2, M2 = (w_c - w_d)/2 and recover slot weights
    t1 = (M1 + M2)/2, t2 = (M1 - M2)/2, t3 = M3 over Q.  The eight weights
    +-t1 +-t2 +-t3 must equal rows and negated rows, with the rows being
    exactly those carrying +t3.
    """
    pairing = mumford_pairing(W)
    if W.rank() != 3 or pairing is None:
        return False
    (a, b), (c, d) = pairing
    rows = [tuple(map(Fraction, r)) for r in W.rows]
    m3 = tuple((x + y) / 2 for x, y in zip(rows[a], rows[b]))
    m1 = tuple((x - y) / 2 for x, y in zip(rows[a], rows[b]))
    m2 = tuple((x - y) / 2 for x, y in zip(rows[c], rows[d]))
    t1 = tuple((x + y) / 2 for x, y in zip(m1, m2))
    t2 = tuple((x - y) / 2 for x, y in zip(m1, m2))
    t3 = m3
    if lattice.rank([[int(4 * v) for v in t] for t in (t1, t2, t3)]) != 3:
        return False
    plus = Counter()
    allw = Counter()
    for e1, e2, e3 in itertools.product((1, -1), repeat=3):
        w = tuple(e1 * x + e2 * y + e3 * z for x, y, z in zip(t1, t2, t3))
        allw[w] += 1
        if e3 == 1:
            plus[w] += 1
    full = Counter(tuple(map(Fraction, w)) for w in W.full_weights())
    return allw == full and plus == Counter(rows)


def generic_class_count(g: int, k: int) -> int:
    """Hodge classes in H^{2k} for the full torus U(1)^g: C(g, k)."""
    return comb(g, k)
