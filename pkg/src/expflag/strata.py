"""Shapes and dimensions of exponential orbits, and Iwahori decompositions.

Every orbit in sight is a product of copies of A1, Gm, and Gm minus a point;
CellShape records the multiplicities and hands back the class in Z[q] via the
dictionary A1 -> q, Gm -> q - 1, Gm minus a point -> q - 2.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .affine_weyl import AffineWeyl, AffineWeylElement, ExpLabel
from .coefficients import QPoly


class StrataError(ValueError):
    pass


@dataclass(frozen=True)
class CellShape:
    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.c < 0:
            raise StrataError("negative shape exponent")

    @property
    def dimension(self):
        return self.a + self.b + self.c

    def class_in_q(self) -> QPoly:
        q = QPoly({1: 1})
        qm1 = QPoly({1: 1, 0: -1})
        qm2 = QPoly({1: 1, 0: -2})
        out = QPoly({0: 1})
        for _ in range(self.a):
            out = out * q
        for _ in range(self.b):
            out = out * qm1
        for _ in range(self.c):
            out = out * qm2
        return out

    def to_json(self):
        return {"a": self.a, "b": self.b, "c": self.c}

    @staticmethod
    def from_json(doc):
        return CellShape(doc["a"], doc["b"], doc["c"])


def orbit_shape(W: AffineWeyl, label: ExpLabel, f) -> CellShape:
    """Shape of the orbit of a label on the partial flag variety of f."""
    w = label.elt
    if not W.is_right_minimal(w, f):
        raise StrataError("label element is not minimal in its right coset")
    l = W.length(w)
    maximal = W.is_left_w0_maximal(w)
    if label.tag == "zero":
        if not maximal:
            raise StrataError("zero tag on a non-maximal element")
        return CellShape(l - 1, 1, 0)
    if maximal:
        return CellShape(l - 1, 0, 0)
    return CellShape(l, 0, 0)


def twisted_orbit_dims(W: AffineWeyl, mu):
    """(Iwahori cell dim, closed twisted exponential orbit dim) over t^mu."""
    rd = W.rd
    if not rd.is_dominant(mu):
        raise StrataError("mu must be dominant")
    shifted = tuple(m + r for m, r in zip(mu, rd.rho_hat))
    d = rd.pair_fractional(rd.two_rho, shifted)
    if d.denominator != 1:
        raise StrataError("non-integral twisted dimension")
    return int(d), int(d) - 1


def finite_closure_strata(W: AffineWeyl):
    """Strata of the closure of the closed top exponential orbit in G/B.

    Returns (w0_label, low_cells): the coset-tagged label of the longest
    finite element (the hyperplane orbit inside the big cell), plus all
    finite Bruhat cells of codimension at least 2. Cells of codimension
    exactly 1 never appear.
    """
    rd = W.rd
    w0 = rd.longest_element()
    cutoff = len(w0.word) - 2
    low = [v for v in rd.weyl_elements() if len(v.word) <= cutoff]
    return ExpLabel("coset", W.from_finite(w0)), low


def iwahori_orbits_in_spherical(W: AffineWeyl, mu):
    """Right-W0-minimal representatives of the Iwahori orbits inside Gr^mu."""
    rd = W.rd
    if not rd.is_dominant(mu):
        raise StrataError("mu must be dominant")
    f0 = W.facet_f0()
    reps = set()
    out = []
    for v in rd.weyl_elements():
        kappa = v.apply_coweight(mu)
        for u in rd.weyl_elements():
            w = W.mul(W.translation(kappa), W.from_finite(u))
            m = W.right_minimal(w, f0)
            key = (m.lam, m.v.mat)
            if key not in reps:
                reps.add(key)
                out.append(m)
    out.sort(key=W.sort_key)
    return out


def double_coset_elements(W: AffineWeyl, mu):
    """All elements of W0 t_mu W0, each exactly once."""
    rd = W.rd
    seen = set()
    out = []
    for v in rd.weyl_elements():
        kappa = v.apply_coweight(mu)
        for u in rd.weyl_elements():
            w = W.mul(W.translation(kappa), W.from_finite(u))
            key = (w.lam, w.v.mat)
            if key not in seen:
                seen.add(key)
                out.append(w)
    out.sort(key=W.sort_key)
    return out


def gr_cell_class(W: AffineWeyl, mu) -> QPoly:
    """Point-count class of Gr^mu: sum of q^{l(x)} over its Iwahori orbits."""
    out = QPoly({})
    for x in iwahori_orbits_in_spherical(W, mu):
        out = out + QPoly({W.length(x): 1})
    return out


def dominant_coweights_below(rd, bound):
    """Dominant mu with mu <= bound in the dominance order.

    mu <= bound means bound - mu is a nonnegative integer combination of
    simple coroots.
    """
    if not rd.is_dominant(bound):
        raise StrataError("bound must be dominant")
    n = rd.char_lattice_rank
    height_cap = rd.pair(rd.two_rho, bound) + 1
    out = []
    for coeffs in itertools.product(range(0, height_cap + 1), repeat=rd.rank):
        mu = list(bound)
        for j, c in enumerate(coeffs):
            for i in range(n):
                mu[i] -= c * rd.simple_coroots[j][i]
        mu = tuple(mu)
        if rd.is_dominant(mu):
            out.append(mu)
    return sorted(set(out))


def dominance_leq(rd, nu, mu) -> bool:
    """nu <= mu: mu - nu in the nonnegative span of simple coroots."""
    diff = tuple(m - n for m, n in zip(mu, nu))
    coeffs = _coroot_coords(rd, diff)
    if coeffs is None:
        return False
    return all(c >= 0 for c in coeffs)


def _coroot_coords(rd, vec):
    from .root_datum import _solve_integer

    rows = [
        [rd.simple_coroots[j][i] for j in range(rd.rank)]
        for i in range(rd.char_lattice_rank)
    ]
    return _solve_integer(rows, list(vec))
