"""The extended affine Weyl group W = X_*(T) x| W0.

Conventions pinned here and used everywhere else:
  - t_lam acts on X_*(T) tensor R by x -> x - lam;
  - (t_lam v)(alpha + n) = v(alpha) + <v(alpha), lam> + n on affine roots;
  - an affine root alpha + n is positive iff n >= 1, or n = 0 and alpha > 0,
    equivalently iff it is positive on the base alcove a0;
  - s_{alpha+n} = t_{n alpha-check} s_alpha, so the extra simple reflection of
    an irreducible component is s_{-theta+1} = t_{-theta-check} s_theta.

Sign tests on a0 are evaluated exactly at a rational barycenter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .root_datum import (
    FiniteWeylElement,
    RootDatum,
    RootDatumError,
    _solve_integer,
)


class AffineWeylError(ValueError):
    pass


@dataclass(frozen=True)
class AffineRoot:
    finite_part: tuple
    level: int

    def negated(self):
        return AffineRoot(tuple(-a for a in self.finite_part), -self.level)


@dataclass(frozen=True)
class AffineWeylElement:
    """w = t_lam v with lam in X_*(T) and v in W0."""

    lam: tuple
    v: FiniteWeylElement

    def __eq__(self, other):
        return (
            isinstance(other, AffineWeylElement)
            and self.lam == other.lam
            and self.v.mat == other.v.mat
        )

    def __hash__(self):
        return hash((self.lam, self.v.mat))


@dataclass(frozen=True)
class ExpLabel:
    """Orbit label: a coset-type orbit or the open piece of a splitting one."""

    tag: str
    elt: AffineWeylElement

    def __post_init__(self):
        if self.tag not in ("coset", "zero"):
            raise AffineWeylError(f"bad tag {self.tag!r}")


class AffineWeyl:
    """Context object tying a RootDatum to its extended affine Weyl group."""

    def __init__(self, rd: RootDatum):
        self.rd = rd
        self.identity = AffineWeylElement(
            tuple(0 for _ in range(rd.char_lattice_rank)), rd.identity
        )
        self._build_simples()
        self._build_barycenter()
        self._omega = None
        self._len_cache = {}
        self._bruhat_cache = {}

    # ---- generators

    def _build_simples(self):
        rd = self.rd
        zero = tuple(0 for _ in range(rd.char_lattice_rank))
        self.simples = []
        self.simple_affine_roots = []
        for i in range(rd.rank):
            self.simples.append(AffineWeylElement(zero, rd.simple_reflections[i]))
            self.simple_affine_roots.append(AffineRoot(rd.simple_roots[i], 0))
        rd.weyl_elements()
        for theta in rd.highest_roots():
            theta_ck = rd.coroot_of[theta]
            s_theta = self._finite_reflection(theta, theta_ck)
            lam = tuple(-c for c in theta_ck)
            self.simples.append(AffineWeylElement(lam, s_theta))
            self.simple_affine_roots.append(
                AffineRoot(tuple(-a for a in theta), 1)
            )
        self.num_simples = len(self.simples)

    def _finite_reflection(self, root, coroot):
        rd = self.rd
        n = rd.char_lattice_rank
        mat = tuple(
            tuple(
                (1 if r == c else 0)
                - coroot[r] * rd.pair(root, tuple(1 if k == c else 0 for k in range(n)))
                for c in range(n)
            )
            for r in range(n)
        )
        elt = rd._elements_by_mat.get(mat)
        if elt is None:
            raise AffineWeylError("reflection not found in the finite Weyl group")
        return elt

    def _build_barycenter(self):
        rd = self.rd
        h = 1 + max(
            (rd.height(t) for t in rd.highest_roots()), default=0
        )
        self.barycenter = tuple(Fraction(a, h) for a in rd.rho_hat)

    # ---- group arithmetic

    def translation(self, lam) -> AffineWeylElement:
        return AffineWeylElement(tuple(lam), self.rd.identity)

    def from_finite(self, v: FiniteWeylElement) -> AffineWeylElement:
        return AffineWeylElement(self.identity.lam, v)

    def mul(self, x: AffineWeylElement, y: AffineWeylElement) -> AffineWeylElement:
        # (t_lam v)(t_mu u) = t_{lam + v mu} (v u)
        lam = tuple(a + b for a, b in zip(x.lam, x.v.apply_coweight(y.lam)))
        return AffineWeylElement(lam, self.rd.w_mul(x.v, y.v))

    def inverse(self, x: AffineWeylElement) -> AffineWeylElement:
        vinv = self.rd.w_inverse(x.v)
        lam = tuple(-a for a in vinv.apply_coweight(x.lam))
        return AffineWeylElement(lam, vinv)

    def right_mul_simple(self, x: AffineWeylElement, i: int) -> AffineWeylElement:
        return self.mul(x, self.simples[i])

    def word_to_element(self, word, omega=None) -> AffineWeylElement:
        w = omega if omega is not None else self.identity
        for i in word:
            w = self.mul(w, self.simples[i])
        return w

    # ---- affine roots

    def act_on_affine_root(self, w: AffineWeylElement, ar: AffineRoot) -> AffineRoot:
        va = w.v.apply_weight(ar.finite_part)
        return AffineRoot(va, ar.level + self.rd.pair(va, w.lam))

    def is_positive_affine_root(self, ar: AffineRoot) -> bool:
        if ar.level >= 1:
            return True
        if ar.level <= -1:
            return False
        return ar.finite_part in set(self.rd.positive_roots)

    def sign_on_alcove(self, ar: AffineRoot) -> int:
        """Sign of the affine functional on the open base alcove."""
        val = self.rd.pair_fractional(ar.finite_part, self.barycenter) + ar.level
        if val > 0:
            return 1
        if val < 0:
            return -1
        raise AffineWeylError("affine root vanishes at the barycenter")

    # ---- length, words, Bruhat order

    def length(self, w: AffineWeylElement) -> int:
        key = (w.lam, w.v.mat)
        if key in self._len_cache:
            return self._len_cache[key]
        rd = self.rd
        vinv = rd.w_inverse(w.v)
        neg = set(rd.negative_roots)
        total = 0
        for a in rd.roots:
            k = rd.pair(a, w.lam)
            n0 = 0 if a in set(rd.positive_roots) else 1
            total += max(0, k - n0)
            if k >= n0 and vinv.apply_weight(a) in neg:
                total += 1
        self._len_cache[key] = total
        return total

    def length_brute(self, w: AffineWeylElement) -> int:
        """Inversion count over an explicit finite list of positive affine roots."""
        rd = self.rd
        bound = 1 + max(
            (abs(rd.pair(a, w.lam)) for a in rd.roots), default=0
        )
        winv = self.inverse(w)
        count = 0
        for a in rd.roots:
            for n in range(-bound, bound + 1):
                ar = AffineRoot(a, n)
                if not self.is_positive_affine_root(ar):
                    continue
                if self.sign_on_alcove(self.act_on_affine_root(winv, ar)) < 0:
                    count += 1
        return count

    def right_descents(self, w: AffineWeylElement):
        lw = self.length(w)
        return [
            i
            for i in range(self.num_simples)
            if self.length(self.right_mul_simple(w, i)) < lw
        ]

    def is_right_descent(self, w: AffineWeylElement, i: int) -> bool:
        return self.length(self.right_mul_simple(w, i)) < self.length(w)

    def reduced_word(self, w: AffineWeylElement):
        """Return (omega_part, word) with w = omega_part * product(word).

        Deterministic: the least-index right descent is peeled at each step.
        """
        word = []
        cur = w
        while self.length(cur) > 0:
            lw = self.length(cur)
            for i in range(self.num_simples):
                nxt = self.right_mul_simple(cur, i)
                if self.length(nxt) < lw:
                    word.append(i)
                    cur = nxt
                    break
            else:
                raise AffineWeylError("positive length but no descent")
        word.reverse()
        return cur, tuple(word)

    def bruhat_leq(self, x: AffineWeylElement, y: AffineWeylElement) -> bool:
        key = (x.lam, x.v.mat, y.lam, y.v.mat)
        if key in self._bruhat_cache:
            return self._bruhat_cache[key]
        lx, ly = self.length(x), self.length(y)
        if lx > ly:
            res = False
        elif ly == 0:
            res = x == y
        else:
            i = next(
                i for i in range(self.num_simples) if self.is_right_descent(y, i)
            )
            y1 = self.right_mul_simple(y, i)
            x1 = self.right_mul_simple(x, i)
            if self.length(x1) < lx:
                res = self.bruhat_leq(x1, y1)
            else:
                res = self.bruhat_leq(x, y1)
        self._bruhat_cache[key] = res
        return res

    # ---- Omega, the length-zero subgroup

    def omega_elements(self):
        """All length-zero elements; requires finite X_*(T)/(coroot lattice)."""
        if self._omega is not None:
            return self._omega
        rd = self.rd
        n = rd.char_lattice_rank
        if rd.rank < n:
            raise AffineWeylError(
                "Omega enumeration needs a semisimple datum (finite pi1)"
            )
        coroot_rows = [
            [rd.simple_coroots[j][i] for j in range(rd.rank)] for i in range(n)
        ]
        reps = []
        box = 3 + max(max(abs(c) for c in ck) for ck in rd.simple_coroots)
        pts = list(itertools.product(range(-box, box + 1), repeat=n))
        out = []
        for lam in pts:
            # length-zero elements have minuscule translation part
            if any(abs(rd.pair(a, lam)) > 1 for a in rd.positive_roots):
                continue
            if any(
                _solve_integer(coroot_rows, [a - b for a, b in zip(lam, r)])
                is not None
                for r in reps
            ):
                continue
            found = None
            for v in rd.weyl_elements():
                cand = AffineWeylElement(tuple(lam), v)
                if self.length(cand) == 0:
                    found = cand
                    break
            if found is not None:
                reps.append(tuple(lam))
                out.append(found)
        self._omega = out
        return out

    def is_omega(self, w: AffineWeylElement) -> bool:
        return self.length(w) == 0

    # ---- cosets, maximality, exponential labels

    def facet_f0(self):
        return frozenset(range(self.rd.rank))

    def facet_a0(self):
        return frozenset()

    def coset_reps(self, w: AffineWeylElement, f):
        """Minimal representative of w W_f and left-W0-maximality of w."""
        cur = w
        changed = True
        while changed:
            changed = False
            for i in sorted(f):
                nxt = self.right_mul_simple(cur, i)
                if self.length(nxt) < self.length(cur):
                    cur = nxt
                    changed = True
                    break
        return cur, self.is_left_w0_maximal(w)

    def right_minimal(self, w: AffineWeylElement, f) -> AffineWeylElement:
        return self.coset_reps(w, f)[0]

    def is_right_minimal(self, w: AffineWeylElement, f) -> bool:
        lw = self.length(w)
        return all(
            self.length(self.right_mul_simple(w, i)) > lw for i in f
        )

    def is_left_w0_maximal(self, w: AffineWeylElement) -> bool:
        """w of maximal length in W0 w, tested by sign of w^{-1}(alpha) on a0."""
        winv = self.inverse(w)
        for i in range(self.rd.rank):
            image = self.act_on_affine_root(winv, self.simple_affine_roots[i])
            if self.sign_on_alcove(image) > 0:
                return False
        return True

    def is_left_w0_maximal_by_descents(self, w: AffineWeylElement) -> bool:
        """Same predicate via left descents; independent implementation."""
        lw = self.length(w)
        return all(
            self.length(self.mul(self.simples[i], w)) < lw
            for i in range(self.rd.rank)
        )

    def zero_W_membership(self, w: AffineWeylElement, f) -> bool:
        if not self.is_right_minimal(w, f):
            raise AffineWeylError("element is not minimal in its right coset")
        return self.is_left_w0_maximal(w)

    def orbit_projection(self, label: ExpLabel, f) -> ExpLabel:
        w_min = self.right_minimal(label.elt, f)
        if label.tag == "coset":
            return ExpLabel("coset", w_min)
        if self.is_left_w0_maximal(w_min):
            return ExpLabel("zero", w_min)
        return ExpLabel("coset", w_min)

    def canonical_lift(self, label: ExpLabel) -> ExpLabel:
        return ExpLabel(label.tag, label.elt)

    def enumerate_elements(self, length_bound: int):
        """All w with l(w) <= bound, BFS by length from Omega."""
        seen = set()
        out = []
        frontier = list(self.omega_elements())
        for w in frontier:
            seen.add((w.lam, w.v.mat))
            out.append(w)
        depth = 0
        while frontier and depth < length_bound:
            new = []
            for w in frontier:
                for i in range(self.num_simples):
                    y = self.right_mul_simple(w, i)
                    key = (y.lam, y.v.mat)
                    if key not in seen and self.length(y) == depth + 1:
                        seen.add(key)
                        new.append(y)
                        out.append(y)
            frontier = new
            depth += 1
        return out

    def enumerate_exp_labels(self, f, length_bound: int):
        if length_bound < 0:
            raise AffineWeylError("length bound must be nonnegative")
        labels = []
        for w in self.enumerate_elements(length_bound):
            if not self.is_right_minimal(w, f):
                continue
            labels.append(ExpLabel("coset", w))
            if self.is_left_w0_maximal(w):
                labels.append(ExpLabel("zero", w))
        labels.sort(key=lambda lab: self.sort_key(lab.elt) + (lab.tag,))
        return labels

    def sort_key(self, w: AffineWeylElement):
        return (self.length(w), w.lam, w.v.word)

    # ---- translations and dominance helpers

    def strictly_dominant_translation(self, w: AffineWeylElement) -> bool:
        return w.v == self.rd.identity and self.rd.is_strictly_dominant(w.lam)

    # ---- serialization

    def to_json(self, w: AffineWeylElement):
        return {"lambda": list(w.lam), "v_word": list(w.v.word)}

    def from_json(self, doc) -> AffineWeylElement:
        v = self.rd.identity
        for i in doc["v_word"]:
            v = self.rd.w_mul(v, self.rd.simple_reflections[i])
        return AffineWeylElement(tuple(doc["lambda"]), v)

    def label_to_json(self, label: ExpLabel):
        doc = self.to_json(label.elt)
        doc["tag"] = label.tag
        return doc

    def label_from_json(self, doc) -> ExpLabel:
        return ExpLabel(doc["tag"], self.from_json(doc))


def act_on_affine_root(W: AffineWeyl, w, ar):
    return W.act_on_affine_root(w, ar)


def length(W: AffineWeyl, w):
    return W.length(w)
