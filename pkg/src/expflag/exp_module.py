"""The decategorified exponential module and its spherical Hecke action.

The big module lives on exponential-orbit labels of the full affine flag
variety; simple-reflection operators move classes along the one-step lines
whose cell decomposition is stored in data/case_table.json. Iterating those
operators along reduced words gives fiber classes of convolution morphisms,
and reading the result on the orbits of the affine Grassmannian gives the
spherical action on the quotient module with basis {m_mu}.

The operator realized by a basis step is phi(T_s): f -> (x -> sum over the
s-neighbors of x of f); composing phi's reverses products, so a word is
applied from its last letter to its first.
"""

from __future__ import annotations

import json
from fractions import Fraction
from importlib import resources

from .affine_weyl import AffineWeyl, AffineWeylElement, ExpLabel
from .coefficients import DivisionNotExact, QPoly, Q_ONE, Q_ZERO, qpoly_exact_div
from .root_datum import RootDatum
from .spherical import NormalizationFailure, SphericalElement, poincare_poly
from .strata import CellShape, dominance_leq, double_coset_elements


class ExpModuleError(ValueError):
    pass


class WindowTooSmall(ExpModuleError):
    pass


class RankOneViolated(ExpModuleError):
    pass


def _load_case_table():
    with resources.files("expflag.data").joinpath("case_table.json").open() as fh:
        raw = json.load(fh)
    table = {}
    for key, entry in raw.items():
        if key.startswith("_"):
            continue
        parsed = {}
        for part in ("closed", "open", "single"):
            if entry.get(part) is not None:
                parsed[part] = CellShape.from_json(entry[part])
        parsed["unreachable"] = bool(entry.get("unreachable", False))
        table[key] = parsed
    return table


CASE_TABLE = _load_case_table()


def _table_class(case_id, part) -> QPoly:
    entry = CASE_TABLE[case_id]
    shape = entry.get(part)
    return shape.class_in_q() if shape is not None else Q_ZERO


def case_analysis(W: AffineWeyl, target: ExpLabel, w: ExpLabel, s: int):
    """(case_id, class) of the line through w's basepoint in target's orbit.

    The line is the set of chambers s-adjacent to the basepoint of w; the
    class records how many of its q points lie in the orbit of target.
    case_id is None when the answer is forced (empty by support, a single
    lower point, or a non-splitting descent target).
    """
    wbar = w.elt
    ws = W.right_mul_simple(wbar, s)
    tbar = target.elt
    if tbar != wbar and tbar != ws:
        return None, Q_ZERO
    ascent = W.length(ws) > W.length(wbar)
    if w.tag == "zero" and not W.is_left_w0_maximal(wbar):
        raise ExpModuleError("zero tag on non-maximal element")

    if ascent:
        # all q points of the line lie in the upper cell
        if tbar != ws:
            return None, Q_ZERO
        if not W.is_left_w0_maximal(ws):
            if target.tag != "coset":
                return None, Q_ZERO
            return "I-nosplit", _table_class("I-nosplit", "single")
        part = "closed" if target.tag == "coset" else "open"
        image = W.act_on_affine_root(wbar, W.simple_affine_roots[s])
        simple0 = image.level == 0 and image.finite_part in set(W.rd.simple_roots)
        if w.tag == "coset":
            case = "I-iso" if simple0 else "I-triv"
        else:
            case = "IIIa-iso" if simple0 else "IIIa-triv"
        return case, _table_class(case, part)

    # descent: one point in the lower cell, q-1 points back in w's cell
    if tbar == ws:
        if not W.is_left_w0_maximal(ws):
            return (None, Q_ONE) if target.tag == "coset" else (None, Q_ZERO)
        # the single point carries the basepoint's kernel level
        if w.tag == "coset":
            return (None, Q_ONE) if target.tag == "coset" else (None, Q_ZERO)
        return (None, Q_ONE) if target.tag == "zero" else (None, Q_ZERO)

    image = W.act_on_affine_root(wbar, W.simple_affine_roots[s])
    neg_simple0 = image.level == 0 and (
        tuple(-a for a in image.finite_part) in set(W.rd.simple_roots)
    )
    if w.tag == "coset":
        if not W.is_left_w0_maximal(wbar):
            if target.tag != "coset":
                return None, Q_ZERO
            return None, QPoly({1: 1, 0: -1})
        case = "II-off-kernel" if neg_simple0 else "II-in-kernel"
    else:
        case = "IIIb-open-immersion" if neg_simple0 else "IIIb-triv"
    part = "closed" if target.tag == "coset" else "open"
    return case, _table_class(case, part)


def key_lemma_class(W: AffineWeyl, target: ExpLabel, w: ExpLabel, s: int) -> QPoly:
    return case_analysis(W, target, w, s)[1]


class BigExpVector:
    """Z[q]-linear combination of exponential-orbit labels on Fl."""

    __slots__ = ("W", "support")

    def __init__(self, W: AffineWeyl, support=None):
        self.W = W
        self.support = {}
        if support:
            for lab, c in support.items():
                if not c.is_zero():
                    self.support[lab] = c

    def __add__(self, other):
        out = dict(self.support)
        for lab, c in other.support.items():
            s = out.get(lab, Q_ZERO) + c
            if s.is_zero():
                out.pop(lab, None)
            else:
                out[lab] = s
        return BigExpVector(self.W, out)

    def scale(self, c: QPoly):
        return BigExpVector(self.W, {lab: a * c for lab, a in self.support.items()})

    def coefficient(self, lab: ExpLabel) -> QPoly:
        return self.support.get(lab, Q_ZERO)

    def __eq__(self, other):
        return isinstance(other, BigExpVector) and self.support == other.support

    def __repr__(self):
        items = sorted(
            self.support.items(), key=lambda kv: self.W.sort_key(kv[0].elt) + (kv[0].tag,)
        )
        return " + ".join(
            f"({c})b[{lab.tag}:{self.W.to_json(lab.elt)}]" for lab, c in items
        ) or "0"

    def to_json(self):
        items = sorted(
            self.support.items(), key=lambda kv: self.W.sort_key(kv[0].elt) + (kv[0].tag,)
        )
        return [
            {"label": self.W.label_to_json(lab), "qpoly": c.to_json()}
            for lab, c in items
        ]


def basis_vector(W: AffineWeyl, lab: ExpLabel) -> BigExpVector:
    return BigExpVector(W, {lab: Q_ONE})


def _adjacent_labels(W: AffineWeyl, elt: AffineWeylElement):
    out = [ExpLabel("coset", elt)]
    if W.is_left_w0_maximal(elt):
        out.append(ExpLabel("zero", elt))
    return out


def ts_action(v: BigExpVector, s: int) -> BigExpVector:
    """phi(T_s): sum a function over the s-line through each chamber."""
    W = v.W
    out = {}
    for lab, c in v.support.items():
        targets = []
        seen = set()
        for elt in (lab.elt, W.right_mul_simple(lab.elt, s)):
            key = (elt.lam, elt.v.mat)
            if key in seen:
                continue
            seen.add(key)
            targets.extend(_adjacent_labels(W, elt))
        for t in targets:
            coeff = key_lemma_class(W, lab, t, s)
            if coeff.is_zero():
                continue
            prev = out.get(t, Q_ZERO) + coeff * c
            out[t] = prev
    return BigExpVector(W, out)


def omega_action(v: BigExpVector, tau: AffineWeylElement) -> BigExpVector:
    """Right translation b_w -> b_{w tau}; tags preserved."""
    W = v.W
    if W.length(tau) != 0:
        raise ExpModuleError("omega element must have length zero")
    out = {}
    for lab, c in v.support.items():
        out[ExpLabel(lab.tag, W.mul(lab.elt, tau))] = c
    return BigExpVector(W, out)


def phi_element(v: BigExpVector, y: AffineWeylElement) -> BigExpVector:
    """phi(T_y): f -> (x -> sum_{g in IyI/I} f(xg)), via the reversed word."""
    W = v.W
    tau, word = W.reduced_word(y)
    out = v
    for i in reversed(word):
        out = ts_action(out, i)
    if tau != W.identity:
        # phi(T_tau) f(x) = f(x tau), i.e. b_w -> b_{w tau^{-1}}
        out = omega_action(out, W.inverse(tau))
    return out


def fiber_class(v0: ExpLabel, word_spec, target: ExpLabel, W: AffineWeyl) -> QPoly:
    """Class of the fiber over target's basepoint of the convolution of the
    orbit of v0 with the Iwahori orbit of tau * s_1 ... s_r.

    word_spec is (tau, [indices]) with tau of length zero, or just a list of
    indices.
    """
    if isinstance(word_spec, (list, tuple)) and (
        not word_spec or isinstance(word_spec[0], int)
    ):
        tau, word = W.identity, list(word_spec)
    else:
        tau, word = word_spec
    vec = basis_vector(W, v0)
    for i in reversed(word):
        vec = ts_action(vec, i)
    if tau != W.identity:
        vec = omega_action(vec, W.inverse(tau))
    return vec.coefficient(target)


class ExpModVector:
    """Finitely supported map from dominant coweights to Z[q]: the m-basis."""

    __slots__ = ("rd", "support")

    def __init__(self, rd: RootDatum, support=None):
        self.rd = rd
        self.support = {}
        if support:
            for mu, c in support.items():
                if not rd.is_dominant(mu):
                    raise ExpModuleError(f"non-dominant index {mu}")
                if not c.is_zero():
                    self.support[tuple(mu)] = c

    def __add__(self, other):
        out = dict(self.support)
        for mu, c in other.support.items():
            s = out.get(mu, Q_ZERO) + c
            if s.is_zero():
                out.pop(mu, None)
            else:
                out[mu] = s
        return ExpModVector(self.rd, out)

    def scale(self, c: QPoly):
        return ExpModVector(self.rd, {mu: a * c for mu, a in self.support.items()})

    def coefficient(self, mu) -> QPoly:
        return self.support.get(tuple(mu), Q_ZERO)

    def __eq__(self, other):
        return isinstance(other, ExpModVector) and self.support == other.support

    def __repr__(self):
        items = sorted(self.support.items())
        return " + ".join(f"({c})m[{list(mu)}]" for mu, c in items) or "0"

    def to_json(self):
        return [
            {"mu": list(mu), "qpoly": c.to_json()}
            for mu, c in sorted(self.support.items())
        ]


class ExpModule:
    """Engine for the exponential module of a semisimple root datum.

    All orbit combinatorics run in the adjoint datum, where the half-sum of
    positive coroots is an honest cocharacter and the twisted orbit over
    t^mu is the untwisted orbit over t^(mu + rho-hat). Dominant coweights of
    the input datum embed into the adjoint coweight lattice by pairing with
    the simple roots.
    """

    def __init__(self, rd: RootDatum):
        if rd.rank != rd.char_lattice_rank:
            raise ExpModuleError("exponential module requires a semisimple datum")
        self.rd = rd
        self.adj = rd.adjoint()
        self.W = AffineWeyl(self.adj)
        self.rho_hat_adj = tuple(1 for _ in range(rd.rank))
        self.P = poincare_poly(self.W)
        self._action_cache = {}

    # ---- index conversion

    def to_adj(self, mu):
        return self.rd.to_adjoint_coords(mu)

    def from_adj(self, v):
        return self.rd.from_adjoint_coords(v)

    def dual_involution(self, mu):
        """mu* = -w0(mu), the dominant representative of -mu."""
        w0 = self.rd.longest_element()
        return tuple(-a for a in w0.apply_coweight(mu))

    # ---- labels over the affine Grassmannian

    def closed_label(self, mu) -> ExpLabel:
        elt = self.W.translation(
            tuple(a + 1 for a in self.to_adj(mu))
        )
        return ExpLabel("coset", elt)

    def open_label(self, mu) -> ExpLabel:
        return ExpLabel("zero", self.closed_label(mu).elt)

    def _label_coweight(self, elt: AffineWeylElement):
        """Inverse of closed_label on strictly dominant translations."""
        if elt.v != self.adj.identity:
            return None
        shifted = tuple(a - 1 for a in elt.lam)
        mu = self.from_adj(shifted)
        if mu is None or not self.rd.is_dominant(mu):
            return None
        return mu

    def lift_closed(self, mu) -> BigExpVector:
        """Pullback of the closed-orbit indicator to the full flag variety."""
        base = self.closed_label(mu).elt
        out = {}
        for v in self.adj.weyl_elements():
            w = self.W.mul(base, self.W.from_finite(v))
            out[ExpLabel("coset", w)] = Q_ONE
        return BigExpVector(self.W, out)

    # ---- quotient to the exponential module

    def quotient_to_exp(self, vec: BigExpVector) -> ExpModVector:
        """Proper push to Gr followed by the split-localization relations.

        Push factors per label (w = w_min v): powers of q and one (q-1),
        matching the relative cell structure of the projection; then
        non-splitting orbits die, and open classes become minus closed ones.
        """
        W = self.W
        f0 = W.facet_f0()
        q = QPoly({1: 1})
        qm1 = QPoly({1: 1, 0: -1})
        acc = {}

        def add(mu, c):
            if mu in acc:
                acc[mu] = acc[mu] + c
            else:
                acc[mu] = c

        for lab, c in vec.support.items():
            w = lab.elt
            w_min = W.right_minimal(w, f0)
            lv = W.length(w) - W.length(w_min)
            min_max = W.is_left_w0_maximal(w_min)
            if lab.tag == "coset":
                if W.is_left_w0_maximal(w) and not min_max:
                    factor, target_tag = QPoly({lv - 1: 1}), "coset"
                else:
                    factor, target_tag = QPoly({lv: 1}), "coset"
            else:
                if min_max:
                    factor, target_tag = QPoly({lv: 1}), "zero"
                else:
                    factor, target_tag = QPoly({lv - 1: 1}) * qm1, "coset"
            if not min_max:
                continue  # non-splitting orbit: class dies in the quotient
            mu = self._label_coweight(w_min)
            if mu is None:
                raise ExpModuleError("maximal minimal rep is not a dominant shift")
            sign = Q_ONE if target_tag == "coset" else QPoly({0: -1})
            add(mu, c * factor * sign)
        return ExpModVector(self.rd, acc)

    # ---- the spherical action

    def _apply_double_coset(self, vec: BigExpVector, mu_adj) -> BigExpVector:
        out = BigExpVector(self.W, {})
        for y in double_coset_elements(self.W, mu_adj):
            out = out + phi_element(vec, y)
        return out

    def _raw_action(self, lam, mu) -> BigExpVector:
        """P(q) times the pullback of m_lam . 1_mu, on the big module."""
        key = (tuple(lam), tuple(mu))
        if key not in self._action_cache:
            big = self.lift_closed(lam)
            mu_star_adj = self.to_adj(self.dual_involution(mu))
            self._action_cache[key] = self._apply_double_coset(big, mu_star_adj)
        return self._action_cache[key]

    def spherical_action_basis(self, lam, mu) -> ExpModVector:
        """m_lam . 1_mu in the m-basis."""
        r = self._raw_action(lam, mu)
        out = {}
        for lab, c in r.support.items():
            nu = self._label_coweight(lab.elt)
            if nu is None:
                continue
            sign = 1 if lab.tag == "coset" else -1
            prev = out.get(nu, Q_ZERO)
            out[nu] = prev + (c if sign > 0 else -c)
        final = {}
        for nu, c in out.items():
            if c.is_zero():
                continue
            try:
                final[nu] = qpoly_exact_div(c, self.P)
            except DivisionNotExact as e:
                raise NormalizationFailure(
                    f"exp-module coefficient not divisible by P_W0 at {nu}"
                ) from e
        return ExpModVector(self.rd, final)

    def spherical_action(self, v: ExpModVector, mu) -> ExpModVector:
        out = ExpModVector(self.rd, {})
        for lam, c in v.support.items():
            out = out + self.spherical_action_basis(lam, mu).scale(c)
        return out

    def unit_vector(self, mu) -> ExpModVector:
        return ExpModVector(self.rd, {tuple(mu): Q_ONE})

    # ---- convolution fiber classes over twisted basepoints

    def convolution_fiber(self, lam, mu, source=None) -> QPoly:
        """Class of the fiber over t^(lam + rho-hat) of the convolution of the
        closed exponential orbit of `source` (default 0) with Gr^mu."""
        if source is None:
            source = tuple(0 for _ in range(self.rd.char_lattice_rank))
        r = self._raw_action(source, mu)
        c = r.coefficient(self.closed_label(lam))
        if c.is_zero():
            return Q_ZERO
        return qpoly_exact_div(c, self.P)

    def dimension_bound_check(self, lam, mu) -> bool:
        """Fiber dimension over t^(lam + rho-hat) is < <rho, mu - lam>."""
        if tuple(lam) == tuple(mu):
            raise ExpModuleError("lam and mu must differ")
        F = self.convolution_fiber(lam, mu)
        if F.is_zero():
            return True
        diff = tuple(m - l for l, m in zip(lam, mu))
        bound = self.rd.pair_fractional(self.rd.rho, diff)
        return Fraction(F.degree()) < bound

    # ---- rank-one freeness

    def verify_rank_one(self, window):
        """Certify that {m_0 . 1_mu} is triangular with unit diagonal.

        window: list of dominant coweights, closed under dominance.
        Returns a report dict; raises RankOneViolated or WindowTooSmall.
        """
        window = [tuple(mu) for mu in window]
        zero = tuple(0 for _ in range(self.rd.char_lattice_rank))
        if zero not in window:
            raise ExpModuleError("window must contain 0")
        columns = {}
        for mu in window:
            col = self.spherical_action_basis(zero, mu)
            for nu in col.support:
                if nu not in window:
                    raise WindowTooSmall(
                        f"column {mu} has support at {nu} outside the window"
                    )
            columns[mu] = col
        # triangularity and unit-diagonal checks
        det = Q_ONE
        for mu in window:
            col = columns[mu]
            for nu in col.support:
                if nu != mu and not dominance_leq(self.rd, nu, mu):
                    raise RankOneViolated(
                        f"entry at {nu} in column {mu} breaks dominance triangularity"
                    )
            diag = col.coefficient(mu)
            if not _is_unit_times_q_power(diag):
                raise RankOneViolated(
                    f"diagonal entry at {mu} is {diag}, not +-q^k"
                )
            det = det * diag
        # solve m_0 . A_mu = m_mu by back substitution, in Laurent polynomials
        basis_certificate = {}
        order = sorted(window, key=lambda mu: self.rd.pair(self.rd.two_rho, mu))
        for mu in window:
            target = {tuple(mu): Q_ONE.as_laurent()}
            coeffs = {}
            for kappa in reversed(order):
                c = target.get(kappa, Q_ZERO)
                if isinstance(c, QPoly) and c.is_zero():
                    continue
                diag = columns[kappa].coefficient(kappa).as_laurent()
                a = _laurent_unit_div(c, diag)
                coeffs[kappa] = a
                for nu, entry in columns[kappa].support.items():
                    prev = target.get(nu, Q_ZERO)
                    target[nu] = prev.as_laurent() - a * entry.as_laurent()
            for nu, rem in target.items():
                if not rem.is_zero():
                    raise WindowTooSmall(f"solve for {mu} leaves remainder at {nu}")
            basis_certificate[mu] = coeffs
        return {
            "window": [list(mu) for mu in window],
            "matrix": {
                str(list(mu)): columns[mu].to_json() for mu in window
            },
            "determinant": det.to_json(),
            "basis_certificate": {
                str(list(mu)): {
                    str(list(k)): a.to_json() for k, a in cs.items()
                }
                for mu, cs in basis_certificate.items()
            },
        }


def _is_unit_times_q_power(p: QPoly) -> bool:
    terms = [t for t in p.coeffs.items()] if hasattr(p, "coeffs") else []
    return len(terms) == 1 and terms[0][1] in (1, -1)


def _laurent_unit_div(c: QPoly, diag: QPoly) -> QPoly:
    """Divide by +-q^k exactly, in Z[q, q^{-1}]."""
    (k, u), = diag.coeffs.items()
    shifted = QPoly({e - k: u * v for e, v in c.as_laurent().coeffs.items()}, laurent=True)
    return shifted
