"""Generic spherical Hecke algebra on the basis of double-coset indicators.

1_mu is the sum of T_w over W0 t_mu W0 inside the Iwahori-Hecke algebra.
Products of lifts are divisible by the finite Poincare polynomial P_{W0}(q);
spherical_mul divides it out and re-expands in the 1-basis.
"""

from __future__ import annotations

from .affine_weyl import AffineWeyl
from .coefficients import DivisionNotExact, QPoly, Q_ONE, qpoly_exact_div
from .hecke import HeckeElement, hecke_mul
from .strata import double_coset_elements


class NormalizationFailure(ArithmeticError):
    pass


class SphericalElement:
    """Finitely supported map from dominant coweights to Z[q]."""

    __slots__ = ("W", "support")

    def __init__(self, W: AffineWeyl, support=None):
        self.W = W
        self.support = {}
        if support:
            for mu, c in support.items():
                if not self.W.rd.is_dominant(mu):
                    raise ValueError(f"non-dominant index {mu}")
                if not c.is_zero():
                    self.support[tuple(mu)] = c

    def __eq__(self, other):
        return isinstance(other, SphericalElement) and self.support == other.support

    def __add__(self, other):
        out = dict(self.support)
        for mu, c in other.support.items():
            s = out.get(mu, QPoly({})) + c
            if s.is_zero():
                out.pop(mu, None)
            else:
                out[mu] = s
        return SphericalElement(self.W, out)

    def scale(self, c: QPoly):
        return SphericalElement(self.W, {mu: a * c for mu, a in self.support.items()})

    def coefficient(self, mu) -> QPoly:
        return self.support.get(tuple(mu), QPoly({}))

    def __repr__(self):
        items = sorted(self.support.items())
        return " + ".join(f"({c})1[{list(mu)}]" for mu, c in items) or "0"

    def to_json(self):
        return [
            {"mu": list(mu), "qpoly": c.to_json()}
            for mu, c in sorted(self.support.items())
        ]

    @staticmethod
    def from_json(W: AffineWeyl, docs):
        return SphericalElement(
            W,
            {tuple(d["mu"]): QPoly.from_json(d["qpoly"]) for d in docs},
        )


def unit_indicator(W: AffineWeyl, mu) -> SphericalElement:
    return SphericalElement(W, {tuple(mu): Q_ONE})


def double_coset_lift(W: AffineWeyl, mu) -> HeckeElement:
    if not W.rd.is_dominant(mu):
        raise ValueError("mu must be dominant")
    return HeckeElement(W, {w: Q_ONE for w in double_coset_elements(W, mu)})


def poincare_poly(W: AffineWeyl) -> QPoly:
    coeffs = {}
    for v in W.rd.weyl_elements():
        l = len(v.word)
        coeffs[l] = coeffs.get(l, 0) + 1
    return QPoly(coeffs)


def lift(a: SphericalElement) -> HeckeElement:
    W = a.W
    out = HeckeElement(W, {})
    for mu, c in a.support.items():
        out = out + double_coset_lift(W, mu).scale(c)
    return out


def hecke_to_spherical(W: AffineWeyl, h: HeckeElement) -> SphericalElement:
    """Express a W0-bi-invariant Hecke element in the 1-basis.

    The coefficient on 1_mu is read off the translation element t_{mu} of
    maximal length in its double coset being... the minimal coset element
    determines mu; constancy over each double coset is verified.
    """
    remaining = dict(h.support)
    support = {}
    f0 = W.facet_f0()
    while remaining:
        w = next(iter(remaining))
        mu = _dominant_of(W, w)
        coset = double_coset_elements(W, mu)
        c = h.coefficient(coset[0])
        for x in coset:
            if h.coefficient(x) != c:
                raise NormalizationFailure(
                    f"coefficient not constant on the double coset of {mu}"
                )
            remaining.pop(x, None)
        if not c.is_zero():
            support[mu] = c
    return SphericalElement(W, support)


def _dominant_of(W: AffineWeyl, w):
    """The dominant coweight mu with w in W0 t_mu W0."""
    rd = W.rd
    lam = w.lam
    for v in rd.weyl_elements():
        cand = v.apply_coweight(lam)
        if rd.is_dominant(cand):
            return tuple(cand)
    raise NormalizationFailure("no dominant conjugate found")


def spherical_mul(a: SphericalElement, b: SphericalElement) -> SphericalElement:
    W = a.W
    prod = hecke_mul(lift(a), lift(b))
    P = poincare_poly(W)
    divided = {}
    for w, c in prod.support.items():
        try:
            divided[w] = qpoly_exact_div(c, P)
        except DivisionNotExact as e:
            raise NormalizationFailure(
                f"product coefficient not divisible by P_W0: {c} at {W.to_json(w)}"
            ) from e
    return hecke_to_spherical(W, HeckeElement(W, divided))
