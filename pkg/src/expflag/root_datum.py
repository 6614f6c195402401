"""Pinned split reductive root data and their finite Weyl groups.

A root datum is given by two lattices X*(T) and X_*(T) of the same rank,
simple roots in the first, simple coroots in the second, and an integer
pairing between them. The isogeny type is encoded entirely by the lattices:
SL2 and PGL2 share a Cartan matrix but differ in where the (co)roots sit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


class RootDatumError(ValueError):
    pass


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _vec_add(u, v):
    return tuple(a + b for a, b in zip(u, v))


def _vec_sub(u, v):
    return tuple(a - b for a, b in zip(u, v))


def _vec_scale(c, u):
    return tuple(c * a for a in u)


@dataclass(frozen=True)
class FiniteWeylElement:
    """Element of W0, acting on both lattices.

    ``mat`` is the matrix on X_*(T) (columns are images of basis vectors),
    ``cmat`` the matrix on X*(T). Equality and hashing use ``mat`` only;
    the stored word is one reduced word, not a canonical form.
    """

    mat: tuple
    cmat: tuple
    word: tuple

    def __eq__(self, other):
        return isinstance(other, FiniteWeylElement) and self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)

    def apply_coweight(self, v):
        n = len(self.mat)
        return tuple(sum(self.mat[i][j] * v[j] for j in range(n)) for i in range(n))

    def apply_weight(self, v):
        n = len(self.cmat)
        return tuple(sum(self.cmat[i][j] * v[j] for j in range(n)) for i in range(n))

    @property
    def length(self):
        return len(self.word)


class RootDatum:
    """Based root datum with derived data computed eagerly.

    Construction validates finiteness of the root system (reflection
    closure) and the Cartan-matrix axioms.
    """

    def __init__(self, name, simple_roots, simple_coroots, pairing=None):
        if not simple_roots:
            raise RootDatumError("torus data rejected: need at least one simple root")
        if len(simple_roots) != len(simple_coroots):
            raise RootDatumError("root/coroot count mismatch")
        self.name = name
        self.rank = len(simple_roots)
        self.simple_roots = [tuple(r) for r in simple_roots]
        self.simple_coroots = [tuple(c) for c in simple_coroots]
        self.char_lattice_rank = len(self.simple_roots[0])
        if len(self.simple_coroots[0]) != self.char_lattice_rank:
            raise RootDatumError("lattice rank mismatch between roots and coroots")
        if pairing is None:
            pairing = [
                [1 if i == j else 0 for j in range(self.char_lattice_rank)]
                for i in range(self.char_lattice_rank)
            ]
        self.pairing_matrix = [tuple(row) for row in pairing]

        self.cartan = [
            [self.pair(a, b) for b in self.simple_coroots] for a in self.simple_roots
        ]
        _check_cartan(self.cartan)

        self._build_roots()
        self._build_weyl()
        self._build_rho()

    # ---- pairing and dominance

    def pair(self, chi, lam):
        """<chi, lambda> for chi in X*(T) (or Q-span), lambda in X_*(T)."""
        total = 0
        for i, ci in enumerate(chi):
            if not ci:
                continue
            row = self.pairing_matrix[i]
            total += ci * sum(row[j] * lam[j] for j in range(len(lam)))
        return total

    def is_dominant(self, lam):
        return all(self.pair(a, lam) >= 0 for a in self.simple_roots)

    def is_strictly_dominant(self, lam):
        return all(self.pair(a, lam) > 0 for a in self.simple_roots)

    # ---- derived data

    def _build_roots(self):
        """Reflection closure of the simple roots, with coroots in parallel."""
        roots = {}
        frontier = list(zip(self.simple_roots, self.simple_coroots))
        for r, c in frontier:
            roots[r] = c
        while frontier:
            new = []
            for r, c in frontier:
                for i in range(self.rank):
                    a, av = self.simple_roots[i], self.simple_coroots[i]
                    k = self.pair(r, av)
                    r2 = _vec_sub(r, _vec_scale(k, a))
                    k2 = self.pair(a, c)
                    c2 = _vec_sub(c, _vec_scale(k2, av))
                    if r2 not in roots:
                        roots[r2] = c2
                        new.append((r2, c2))
                    elif roots[r2] != c2:
                        raise RootDatumError("coroot mismatch under reflection closure")
            frontier = new
            if len(roots) > 4 * self.rank**2 + 200:
                raise RootDatumError("root system not finite (Cartan matrix not of finite type)")
        self.roots = sorted(roots)
        self.coroot_of = dict(roots)
        self.positive_roots = [r for r in self.roots if self._is_positive(r)]
        self.negative_roots = [r for r in self.roots if not self._is_positive(r)]
        if len(self.positive_roots) != len(self.roots) // 2:
            raise RootDatumError("root system not balanced")

    def _is_positive(self, r):
        """Positive means a nonnegative combination of simple roots."""
        coeffs = self.root_in_simple_basis(r)
        return all(c >= 0 for c in coeffs)

    def root_in_simple_basis(self, r):
        """Coordinates of a root in the simple-root basis, via the coweight pairing."""
        # <r, omega_i^vee> recovers the coefficient of alpha_i; use the
        # fundamental coweights computed against the Cartan matrix instead of
        # lattice inverses so this also works for non-semisimple lattices.
        sols = _solve_in_basis(
            [[self.pair(self.simple_roots[i], self.simple_coroots[j])
              for i in range(self.rank)] for j in range(self.rank)],
            [self.pair(r, self.simple_coroots[j]) for j in range(self.rank)],
        )
        return sols

    def height(self, r):
        """Sum of simple-root coefficients; for coroots use coheight."""
        return sum(self.root_in_simple_basis(r))

    def coheight(self, cv):
        """Height of a coroot, i.e. <rho-ish..>: sum of simple-coroot coefficients."""
        mat = [[self.pair(self.simple_roots[i], self.simple_coroots[j])
                for j in range(self.rank)] for i in range(self.rank)]
        rhs = [self.pair(self.simple_roots[i], cv) for i in range(self.rank)]
        return sum(_solve_in_basis(mat, rhs))

    def _build_weyl(self):
        n = self.char_lattice_rank
        ident = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
        self._w0_cache = None
        self.simple_reflections = []
        for i in range(self.rank):
            a, av = self.simple_roots[i], self.simple_coroots[i]
            mat = tuple(
                tuple(
                    (1 if r == c else 0)
                    - av[r] * self.pair(a, tuple(1 if k == c else 0 for k in range(n)))
                    for c in range(n)
                )
                for r in range(n)
            )
            cmat = tuple(
                tuple(
                    (1 if r == c else 0)
                    - a[r] * self.pair(tuple(1 if k == c else 0 for k in range(n)), av)
                    for c in range(n)
                )
                for r in range(n)
            )
            self.simple_reflections.append(FiniteWeylElement(mat, cmat, (i,)))
        self.identity = FiniteWeylElement(ident, ident, ())

    def w_mul(self, x: FiniteWeylElement, y: FiniteWeylElement) -> FiniteWeylElement:
        n = self.char_lattice_rank
        mat = tuple(
            tuple(sum(x.mat[i][k] * y.mat[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        cmat = tuple(
            tuple(sum(x.cmat[i][k] * y.cmat[k][j] for k in range(n)) for j in range(n))
            for i in range(n)
        )
        word = x.word + y.word
        elt = FiniteWeylElement(mat, cmat, word)
        known = getattr(self, "_elements_by_mat", None)
        if known is not None and mat in known:
            return known[mat]
        return elt

    def w_inverse(self, x: FiniteWeylElement) -> FiniteWeylElement:
        out = self.identity
        for i in reversed(x.word):
            out = self.w_mul(out, self.simple_reflections[i])
        if self.w_mul(out, x) != self.identity:
            # the stored word might not be reduced for ad-hoc products;
            # fall back to the element table
            for e in self.weyl_elements():
                if self.w_mul(e, x) == self.identity:
                    return e
            raise RootDatumError("inverse not found")
        return out

    def finite_length(self, x: FiniteWeylElement) -> int:
        """Number of positive roots sent to negative roots."""
        return sum(
            1
            for r in self.positive_roots
            if x.apply_weight(r) in set(self.negative_roots)
        )

    def weyl_elements(self):
        """All of W0, each with one reduced word, BFS by length."""
        if self._w0_cache is not None:
            return self._w0_cache
        seen = {self.identity.mat: self.identity}
        frontier = [self.identity]
        out = [self.identity]
        while frontier:
            new = []
            for x in frontier:
                for i, s in enumerate(self.simple_reflections):
                    y = self.w_mul(x, s)
                    if y.mat not in seen:
                        y = FiniteWeylElement(y.mat, y.cmat, x.word + (i,))
                        seen[y.mat] = y
                        new.append(y)
                        out.append(y)
            frontier = new
            if len(out) > 100000:
                raise RootDatumError("Weyl group too large")
        self._w0_cache = out
        self._elements_by_mat = {e.mat: e for e in out}
        return out

    def longest_element(self):
        elts = self.weyl_elements()
        return max(elts, key=lambda e: len(e.word))

    def _build_rho(self):
        # rho = half sum of positive roots, in Q tensor X*(T)
        n = self.char_lattice_rank
        total = [0] * n
        for r in self.positive_roots:
            total = [a + b for a, b in zip(total, r)]
        self.two_rho = tuple(total)
        self.rho = tuple(Fraction(a, 2) for a in total)
        totalc = [0] * n
        for r in self.positive_roots:
            c = self.coroot_of[r]
            totalc = [a + b for a, b in zip(totalc, c)]
        self.two_rho_hat = tuple(totalc)
        self.rho_hat = tuple(Fraction(a, 2) for a in totalc)

    def pair_fractional(self, chi, lam):
        """Pairing extended Q-bilinearly (for rho and rho-hat)."""
        total = Fraction(0)
        for i, ci in enumerate(chi):
            if not ci:
                continue
            row = self.pairing_matrix[i]
            total += Fraction(ci) * sum(Fraction(row[j]) * Fraction(lam[j]) for j in range(len(lam)))
        return total

    # ---- components of the Dynkin diagram

    def components(self):
        """Partition of simple indices into connected Dynkin components."""
        adj = {i: set() for i in range(self.rank)}
        for i in range(self.rank):
            for j in range(self.rank):
                if i != j and self.cartan[i][j] != 0:
                    adj[i].add(j)
        seen = set()
        comps = []
        for i in range(self.rank):
            if i in seen:
                continue
            stack = [i]
            comp = set()
            while stack:
                k = stack.pop()
                if k in comp:
                    continue
                comp.add(k)
                stack.extend(adj[k] - comp)
            seen |= comp
            comps.append(sorted(comp))
        return comps

    def highest_roots(self):
        """One highest root per component, found by maximal height."""
        out = []
        for comp in self.components():
            comp_set = set(comp)
            best = None
            for r in self.positive_roots:
                coeffs = self.root_in_simple_basis(r)
                support = {i for i, c in enumerate(coeffs) if c}
                if support <= comp_set:
                    if best is None or sum(coeffs) > sum(self.root_in_simple_basis(best)):
                        best = r
            out.append(best)
        return out

    def adjoint(self):
        """The adjoint datum of the same Cartan matrix.

        X_*(T_adj) = coweight lattice in the basis of fundamental coweights;
        simple coroots are the columns of the Cartan matrix, simple roots the
        standard basis vectors.
        """
        r = self.rank
        roots = [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)]
        coroots = [tuple(self.cartan[i][j] for i in range(r)) for j in range(r)]
        return build_root_datum(
            {
                "name": self.name + "_adj",
                "simple_roots": roots,
                "simple_coroots": coroots,
            }
        )

    def to_adjoint_coords(self, lam):
        """X_*(T) -> X_*(T_adj): lambda -> (<alpha_i, lambda>)_i."""
        return tuple(self.pair(a, lam) for a in self.simple_roots)

    def from_adjoint_coords(self, v):
        """Partial inverse of to_adjoint_coords; None if v is not in the image."""
        sol = _solve_integer(
            [[self.pair(self.simple_roots[i],
                        tuple(1 if k == j else 0 for k in range(self.char_lattice_rank)))
              for j in range(self.char_lattice_rank)]
             for i in range(self.rank)],
            list(v),
        )
        return sol

    def to_json(self):
        return {
            "name": self.name,
            "cartan": [list(row) for row in self.cartan],
            "simple_roots": [list(r) for r in self.simple_roots],
            "simple_coroots": [list(c) for c in self.simple_coroots],
        }


def _check_cartan(cartan):
    n = len(cartan)
    for i in range(n):
        if cartan[i][i] != 2:
            raise RootDatumError("Cartan diagonal must be 2")
        for j in range(n):
            if i != j:
                if cartan[i][j] > 0:
                    raise RootDatumError("Cartan off-diagonal must be <= 0")
                if (cartan[i][j] == 0) != (cartan[j][i] == 0):
                    raise RootDatumError("Cartan zero pattern must be symmetric")
    # positive definiteness of the symmetrization via leading principal minors
    sym = [[Fraction(0)] * n for _ in range(n)]
    # symmetrize with positive diagonal d: d_i a_ij = d_j a_ji
    d = [Fraction(1)] * n
    for _ in range(n):
        for i in range(n):
            for j in range(n):
                if cartan[i][j] and d[i] * cartan[i][j] != d[j] * cartan[j][i]:
                    d[j] = d[i] * Fraction(cartan[i][j], cartan[j][i])
    for i in range(n):
        for j in range(n):
            sym[i][j] = d[i] * cartan[i][j]
    for k in range(1, n + 1):
        minor = [row[:k] for row in sym[:k]]
        if _det(minor) <= 0:
            raise RootDatumError("Cartan matrix not of finite type")


def _det(m):
    m = [row[:] for row in m]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = Fraction(m[r][col], m[col][col])
            for c in range(col, n):
                m[r][c] -= f * m[col][c]
    return det


def _solve_in_basis(mat, rhs):
    """Solve mat * x = rhs exactly; mat square invertible over Q."""
    n = len(mat)
    aug = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if aug[r][col])
        aug[col], aug[piv] = aug[piv], aug[col]
        pv = aug[col][col]
        aug[col] = [a / pv for a in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [aug[i][n] for i in range(n)]


def _solve_integer(mat, rhs):
    """An integer solution x of mat x = rhs, or None. mat is m x n over Z."""
    m, n = len(mat), len(mat[0])
    aug = [[Fraction(mat[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(m)]
    pivots = []
    row = 0
    for col in range(n):
        piv = next((r for r in range(row, m) if aug[r][col]), None)
        if piv is None:
            continue
        aug[row], aug[piv] = aug[piv], aug[row]
        pv = aug[row][col]
        aug[row] = [a / pv for a in aug[row]]
        for r in range(m):
            if r != row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[row])]
        pivots.append(col)
        row += 1
        if row == m:
            break
    for r in range(row, m):
        if aug[r][n]:
            return None
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = aug[r][n]
    if any(v.denominator != 1 for v in x):
        return None
    return tuple(int(v) for v in x)


_PRESETS = {}


def _preset(name):
    def reg(fn):
        _PRESETS[name] = fn
        return fn
    return reg


@_preset("SL2")
def _sl2():
    # X*(T) = Z with alpha = 2, X_*(T) = Z with alpha-check = 1
    return {"name": "SL2", "simple_roots": [(2,)], "simple_coroots": [(1,)]}


@_preset("PGL2")
def _pgl2():
    return {"name": "PGL2", "simple_roots": [(1,)], "simple_coroots": [(2,)]}


@_preset("GL2")
def _gl2():
    return {
        "name": "GL2",
        "simple_roots": [(1, -1)],
        "simple_coroots": [(1, -1)],
    }


def _simply_connected(name, cartan):
    r = len(cartan)
    return {
        "name": name,
        "simple_roots": [tuple(cartan[i]) for i in range(r)],
        "simple_coroots": [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)],
    }


def _adjoint_preset(name, cartan):
    r = len(cartan)
    return {
        "name": name,
        "simple_roots": [tuple(1 if j == i else 0 for j in range(r)) for i in range(r)],
        "simple_coroots": [tuple(cartan[i][j] for i in range(r)) for j in range(r)],
    }


_PRESETS["SL3"] = lambda: _simply_connected("SL3", [[2, -1], [-1, 2]])
_PRESETS["PGL3"] = lambda: _adjoint_preset("PGL3", [[2, -1], [-1, 2]])
_PRESETS["Sp4"] = lambda: _simply_connected("Sp4", [[2, -1], [-2, 2]])
_PRESETS["G2"] = lambda: _simply_connected("G2", [[2, -1], [-3, 2]])


def build_root_datum(spec) -> RootDatum:
    """Build from a preset name or a description dict.

    A description has keys name, simple_roots, simple_coroots, and optionally
    pairing (defaults to the standard dot product) and cartan (validated
    against the computed one if present).
    """
    if isinstance(spec, str):
        if spec not in _PRESETS:
            raise RootDatumError(f"unknown preset {spec!r}; have {sorted(_PRESETS)}")
        spec = _PRESETS[spec]()
    rd = RootDatum(
        spec["name"],
        spec["simple_roots"],
        spec["simple_coroots"],
        spec.get("pairing"),
    )
    if "cartan" in spec and [list(r) for r in rd.cartan] != [list(r) for r in spec["cartan"]]:
        raise RootDatumError("declared Cartan matrix disagrees with the pairing")
    return rd


def positive_roots(rd: RootDatum):
    return list(rd.positive_roots)


def finite_weyl_elements(rd: RootDatum):
    return rd.weyl_elements()
