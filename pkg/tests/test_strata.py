"""Orbit shapes, cell classes, and Iwahori decompositions of spherical cells."""

import pytest

from expflag.root_datum import build_root_datum
from expflag.affine_weyl import AffineWeyl, ExpLabel
from expflag.coefficients import QPoly
from expflag.strata import (
    CellShape,
    StrataError,
    dominance_leq,
    dominant_coweights_below,
    double_coset_elements,
    finite_closure_strata,
    gr_cell_class,
    iwahori_orbits_in_spherical,
    orbit_shape,
    twisted_orbit_dims,
)


@pytest.fixture(scope="module", params=["SL2", "PGL2", "SL3", "Sp4"])
def W(request):
    return AffineWeyl(build_root_datum(request.param))


def test_cell_shape_classes():
    assert CellShape(2, 0, 0).class_in_q() == QPoly({2: 1})
    assert CellShape(1, 1, 0).class_in_q() == QPoly({2: 1, 1: -1})
    assert CellShape(0, 0, 1).class_in_q() == QPoly({1: 1, 0: -2})
    assert CellShape(1, 1, 1).dimension == 3
    with pytest.raises(StrataError):
        CellShape(-1, 0, 0)
    s = CellShape(3, 1, 2)
    assert CellShape.from_json(s.to_json()) == s


def test_orbit_shapes_partition_each_coset(W):
    # over any right-minimal w the labels tile q^{l(w)} points: either one
    # open cell, or a zero stratum plus the coset strata of the same w
    f0 = W.facet_f0()
    for w in W.enumerate_elements(4):
        if not W.is_right_minimal(w, f0):
            continue
        total = QPoly({})
        labels = [ExpLabel("coset", w)]
        if W.is_left_w0_maximal(w):
            labels.append(ExpLabel("zero", w))
        for lab in labels:
            total = total + orbit_shape(W, lab, f0).class_in_q()
        if W.is_left_w0_maximal(w):
            coset = orbit_shape(W, ExpLabel("coset", w), f0)
            zero = orbit_shape(W, ExpLabel("zero", w), f0)
            assert coset == CellShape(W.length(w) - 1, 0, 0)
            assert zero == CellShape(W.length(w) - 1, 1, 0)
        else:
            assert orbit_shape(W, ExpLabel("coset", w), f0) == CellShape(
                W.length(w), 0, 0
            )


def test_orbit_shape_rejects_bad_labels(W):
    f0 = W.facet_f0()
    s0 = W.simples[0]
    if not W.is_left_w0_maximal(s0) or W.rd.rank > 1:
        non_max = next(
            w
            for w in W.enumerate_elements(3)
            if W.is_right_minimal(w, f0) and not W.is_left_w0_maximal(w)
        )
        with pytest.raises(StrataError):
            orbit_shape(W, ExpLabel("zero", non_max), f0)
    non_min = W.from_finite(W.rd.longest_element())
    if not W.is_right_minimal(non_min, f0):
        with pytest.raises(StrataError):
            orbit_shape(W, ExpLabel("coset", non_min), f0)


def test_twisted_orbit_dims(W):
    rd = W.rd
    zero = tuple(0 for _ in range(rd.char_lattice_rank))
    d, d_closed = twisted_orbit_dims(W, zero)
    assert d == rd.pair(rd.two_rho, rd.rho_hat)
    assert d_closed == d - 1
    for mu in dominant_coweights_below(rd, tuple(2 for _ in range(rd.rank))):
        d_mu, _ = twisted_orbit_dims(W, mu)
        assert d_mu == rd.pair(rd.two_rho, mu) + d


def test_twisted_orbit_dims_rejects_non_dominant():
    W2 = AffineWeyl(build_root_datum("SL2"))
    with pytest.raises(StrataError):
        twisted_orbit_dims(W2, (-1,))


def test_finite_closure_strata(W):
    rd = W.rd
    label, low = finite_closure_strata(W)
    assert label.tag == "coset"
    assert W.length(label.elt) == len(rd.longest_element().word)
    n = len(rd.longest_element().word)
    assert all(len(v.word) <= n - 2 for v in low)
    # nothing in codimension one
    assert not any(len(v.word) == n - 1 for v in low)


def test_double_coset_sizes(W):
    rd = W.rd
    order = len(list(rd.weyl_elements()))
    zero = tuple(0 for _ in range(rd.char_lattice_rank))
    assert len(double_coset_elements(W, zero)) == order
    # regular dominant mu gives the full product of two copies of W0
    mu = dominant_coweights_below(rd, tuple(3 for _ in range(rd.char_lattice_rank)))[-1]
    if all(rd.pair(a, mu) > 0 for a in rd.simple_roots):
        assert len(double_coset_elements(W, mu)) == order * order


def test_gr_cell_class_matches_orbit_count(W):
    rd = W.rd
    for mu in dominant_coweights_below(rd, tuple(1 for _ in range(rd.rank))):
        cls = gr_cell_class(W, mu)
        orbits = iwahori_orbits_in_spherical(W, mu)
        assert sum(cls.coeffs.values()) == len(orbits)
        assert cls.specialize(1) == len(orbits)
        # top cell has the dimension of Gr^mu
        assert cls.degree() == rd.pair(rd.two_rho, mu)


def test_gr_cell_class_sl2_values():
    W2 = AffineWeyl(build_root_datum("SL2"))
    assert gr_cell_class(W2, (0,)) == QPoly({0: 1})
    assert gr_cell_class(W2, (1,)) == QPoly({2: 1, 1: 1})
    # the open orbit only, not its closure
    assert gr_cell_class(W2, (2,)) == QPoly({4: 1, 3: 1})


def test_dominance_order(W):
    rd = W.rd
    top = tuple(2 for _ in range(rd.char_lattice_rank))
    below = dominant_coweights_below(rd, top)
    for mu in below:
        assert dominance_leq(rd, mu, top)
        assert dominance_leq(rd, mu, mu)
    assert not dominance_leq(rd, top, below[0]) or top == below[0]


def test_dominant_coweights_below_rank_one():
    # SL2 coweights sit in the coroot lattice with the coroot at 1, so every
    # step down is allowed; PGL2 has the coroot at 2 and keeps parity
    rd = build_root_datum("SL2")
    assert dominant_coweights_below(rd, (3,)) == [(0,), (1,), (2,), (3,)]
    rdp = build_root_datum("PGL2")
    assert dominant_coweights_below(rdp, (4,)) == [(0,), (2,), (4,)]
    assert dominant_coweights_below(rdp, (3,)) == [(1,), (3,)]
