"""Generic extended affine Iwahori-Hecke algebra over Z[q], T-basis.

Relations: T_s T_w = T_{sw} when the length goes up, otherwise
(q-1) T_w + q T_{sw}; length-zero elements act by plain translation
T_tau T_w = T_{tau w}. Normalized so that specialization at a prime power q
is literal convolution of Iwahori double cosets with vol(I) = 1.
"""

from __future__ import annotations

from .affine_weyl import AffineWeyl, AffineWeylElement
from .coefficients import QPoly, Q_ONE


class HeckeElement:
    """Finitely supported map from W to Z[q], in the T-basis."""

    __slots__ = ("W", "support")

    def __init__(self, W: AffineWeyl, support=None):
        self.W = W
        self.support = {}
        if support:
            for w, c in support.items():
                if not c.is_zero():
                    self.support[w] = c

    def __eq__(self, other):
        return isinstance(other, HeckeElement) and self.support == other.support

    def __repr__(self):
        items = sorted(self.support.items(), key=lambda kv: self.W.sort_key(kv[0]))
        return " + ".join(f"({c})T[{self.W.to_json(w)}]" for w, c in items) or "0"

    def __add__(self, other):
        out = dict(self.support)
        for w, c in other.support.items():
            s = out.get(w, QPoly({})) + c
            if s.is_zero():
                out.pop(w, None)
            else:
                out[w] = s
        return HeckeElement(self.W, out)

    def __sub__(self, other):
        return self + other.scale(QPoly({0: -1}))

    def scale(self, c: QPoly):
        return HeckeElement(self.W, {w: a * c for w, a in self.support.items()})

    def coefficient(self, w: AffineWeylElement) -> QPoly:
        return self.support.get(w, QPoly({}))

    def to_json(self):
        items = sorted(self.support.items(), key=lambda kv: self.W.sort_key(kv[0]))
        return [
            {"element": self.W.to_json(w), "qpoly": c.to_json()} for w, c in items
        ]

    @staticmethod
    def from_json(W: AffineWeyl, docs):
        return HeckeElement(
            W,
            {
                W.from_json(d["element"]): QPoly.from_json(d["qpoly"])
                for d in docs
            },
        )


def t_basis(W: AffineWeyl, w: AffineWeylElement) -> HeckeElement:
    return HeckeElement(W, {w: Q_ONE})


def t_simple_mul(W: AffineWeyl, i: int, x: HeckeElement, side: str) -> HeckeElement:
    """Multiply by T_{s_i} on the given side ('left' or 'right')."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s = W.simples[i]
    q = QPoly({1: 1})
    qm1 = QPoly({1: 1, 0: -1})
    out = {}

    def acc(w, c):
        if w in out:
            out[w] = out[w] + c
        else:
            out[w] = c

    for w, c in x.support.items():
        ws = W.mul(s, w) if side == "left" else W.mul(w, s)
        if W.length(ws) > W.length(w):
            acc(ws, c)
        else:
            acc(w, c * qm1)
            acc(ws, c * q)
    return HeckeElement(W, out)


def omega_mul(W: AffineWeyl, tau: AffineWeylElement, x: HeckeElement, side: str) -> HeckeElement:
    if W.length(tau) != 0:
        raise ValueError("omega factor must have length zero")
    out = {}
    for w, c in x.support.items():
        tw = W.mul(tau, w) if side == "left" else W.mul(w, tau)
        out[tw] = c
    return HeckeElement(W, out)


def hecke_mul(a: HeckeElement, b: HeckeElement) -> HeckeElement:
    """Product in the Hecke algebra; b is decomposed into reduced words."""
    W = a.W
    out = HeckeElement(W, {})
    for w, c in b.support.items():
        tau, word = W.reduced_word(w)
        term = a.scale(c)
        if W.length(tau) != 0 or tau != W.identity:
            term = omega_mul(W, tau, term, "right")
        for i in word:
            term = t_simple_mul(W, i, term, "right")
        out = out + term
    return out


def specialize_hecke(a: HeckeElement, q: int):
    """Coefficientwise specialization; map W-element json key -> integer."""
    out = {}
    for w, c in a.support.items():
        v = c.specialize(q)
        if v:
            out[w] = v
    return out
