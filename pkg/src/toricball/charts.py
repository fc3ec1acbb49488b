"""Per-flag chart machinery for the nonnegative part of a toric variety.

For each maximal flag the chart holds the distinguished semigroup
generators (upper-triangular selection first, then the Hilbert basis of
the top cone's dual), the dual basis of the flag's barycenters, and the
integer exponent matrices

    c[i][k] = <alpha_i, B_k>,   b[i][0] = c[i][0],
    b[i][j] = c[i][j] - c[i][j-1]   (j >= 1),

which define the monomial map psi carrying the simplex
Delta_n = {0 <= w_1 <= ... <= w_n <= 1} onto the closure of the flag
cone inside the ambient affine chart.

Points of the space itself are represented intrinsically as nonnegative
values on the Hilbert basis of a carrier cone's semigroup (ToricPoint);
localization moves a point to a face's chart when the face-cutting
coordinate is nonzero, and cross-chart equality compares localizations
on the intersection cone.

Convention used throughout the monomial evaluations: 0**0 == 1.
Floating point appears only here and downstream (exp/log/roots); the
exponent data stays exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from . import cones as _ck
from .bary import Flag, barycenter, enumerate_flags, simplicial_coords
from .exact import dual_basis, pair, vadd, vscale
from .fan import Cone, Fan

TWO_PI = 2.0 * math.pi


class NotInImage(ValueError):
    """Triangular inversion left a residual beyond tolerance."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NotInOpenSet(ValueError):
    """The point does not lie in the requested face's open chart."""


@dataclass(frozen=True)
class Chart:
    """Chart data attached to one maximal flag (see module docstring)."""

    flag: Flag
    generators: tuple  # alpha_1..alpha_m, triangular selection first
    beta: tuple  # rational basis dual to the flag's barycenters
    c: tuple  # m x n pairing matrix, nonnegative, rows nondecreasing
    b: tuple  # m x n exponent matrix of psi
    barycenters: tuple
    hilbert_rows: tuple  # row index of each Hilbert basis element

    @property
    def top_cone(self) -> Cone:
        return self.flag.cones[-1]

    @property
    def n(self) -> int:
        return len(self.barycenters)

    @property
    def m(self) -> int:
        return len(self.generators)

    def monomial_strings(self):
        out = []
        for row in self.b:
            factors = [f"w{j + 1}^{e}" if e != 1 else f"w{j + 1}" for j, e in enumerate(row) if e != 0]
            out.append(" * ".join(factors) if factors else "1")
        return out


@dataclass(frozen=True)
class ToricPoint:
    """A point of the nonnegative part, as values on a Hilbert basis.

    values[i] is the (nonnegative real) value of the semigroup
    homomorphism at generator i of the carrier cone's semigroup; the
    generator order is the one produced by cones.hilbert_basis.
    """

    cone: Cone
    values: tuple
    provenance: str = ""


def theta(z):
    """Suffix-product map: w_j = prod_{i >= j} z_i, on [0, inf)^n."""
    out = []
    acc = 1.0
    for zi in reversed(list(z)):
        acc *= zi
        out.append(acc)
    return tuple(reversed(out))


def theta_preimage(w):
    """A z in [0,1]^n with theta(z) = w, for w in Delta_n.

    z_j = w_j / w_{j+1}; when w_{j+1} = 0 any value works and 1 is used.
    """
    w = list(w)
    n = len(w)
    z = [0.0] * n
    for j in range(n):
        if j == n - 1:
            z[j] = w[j]
        else:
            z[j] = w[j] / w[j + 1] if w[j + 1] != 0 else 1.0
    return tuple(z)


def delta_chain_violation(w) -> float:
    """How far w is from the simplex 0 <= w_1 <= ... <= w_n <= 1 (0 = inside)."""
    worst = 0.0
    prev = 0.0
    for x in list(w) + [1.0]:
        worst = max(worst, float(prev) - float(x))
        prev = x
    return worst


def monomial_eval(exponents, w) -> float:
    """prod_j w_j**e_j with the 0**0 == 1 convention."""
    out = 1.0
    for e, x in zip(exponents, w):
        if e != 0:
            out *= float(x) ** e
    return out


def psi_eval(chart: Chart, w):
    """All m monomial coordinates of the chart at w (w_j >= 0)."""
    return tuple(monomial_eval(row, w) for row in chart.b)


def invert_triangular(b, y):
    """Invert an upper-triangular monomial map on Delta_n.

    b is an n x n nonnegative integer matrix with b[i][i] > 0 and
    b[i][j] == 0 for j < i; y the image point.  Implements the
    largest-zero-index rule: if y_i = 0 with i maximal, then w_j = 0 for
    all j <= i and the remaining w_j are recovered by back-substitution
    and root extraction.
    """
    n = len(b)
    w = [0.0] * n
    i0 = -1
    for i in range(n):
        if y[i] <= 0.0:
            i0 = i
    for j in range(n - 1, i0, -1):
        acc = 1.0
        for k in range(j + 1, n):
            if b[j][k]:
                acc *= w[k] ** b[j][k]
        val = y[j] / acc
        w[j] = val ** (1.0 / b[j][j])
    return tuple(w)


def psi_invert(chart: Chart, y, tol: float = 1e-9):
    """Preimage in Delta_n of a chart point, using the triangular rows.

    Only the first n coordinates determine the answer; the remaining
    m - n coordinates are checked as a residual and NotInImage is raised
    when the worst mismatch exceeds tol.
    """
    n = chart.n
    w = invert_triangular([chart.b[i] for i in range(n)], [float(y[i]) for i in range(n)])
    residual = max(abs(monomial_eval(row, w) - float(yi)) for row, yi in zip(chart.b, y))
    if residual > tol:
        raise NotInImage(f"residual {residual} exceeds {tol}", residual=residual)
    return w


def exp_flag(u):
    """Coordinatewise e^(-2 pi u_j), the flag cone's exponential chart."""
    return tuple(math.exp(-TWO_PI * float(c)) for c in u)


class Atlas:
    """All charts of a complete fan, with shared semigroup caches.

    Charts, Hilbert bases and localization rules are computed lazily and
    memoized; everything handed out is immutable, so an Atlas may be
    read from several threads once warm.
    """

    def __init__(self, fan: Fan):
        self.fan = fan
        self._charts = {}
        self._hilbert = {}
        self._local_rules = {}

    # -- semigroups -----------------------------------------------------

    def hilbert(self, cone: Cone) -> _ck.SemigroupGens:
        key = cone.rays
        if key not in self._hilbert:
            self._hilbert[key] = _ck.hilbert_basis(cone)
        return self._hilbert[key]

    # -- charts ---------------------------------------------------------

    def charts(self):
        return [self.chart(f) for f in enumerate_flags(self.fan, only_maximal=True)]

    def chart(self, flag: Flag) -> Chart:
        if flag not in self._charts:
            self._charts[flag] = self._build_chart(flag)
        return self._charts[flag]

    def _build_chart(self, flag: Flag) -> Chart:
        n = self.fan.dim
        if len(flag) != n or flag.cones[-1].rays not in set(self.fan.max_cones):
            raise ValueError("charts are attached to maximal flags only")
        tri = _ck.triangular_generators(flag.cones)
        hb = self.hilbert(flag.cones[-1])
        gens = list(tri)
        for h in hb.generators:
            if h not in gens:
                gens.append(h)
        barys = tuple(barycenter(c) for c in flag.cones)
        c_mat = tuple(tuple(int(pair(g, B)) for B in barys) for g in gens)
        b_mat = tuple(
            tuple(row[0] if j == 0 else row[j] - row[j - 1] for j in range(n))
            for row in c_mat
        )
        beta = dual_basis(barys)
        hilbert_rows = tuple(gens.index(h) for h in hb.generators)
        # Invariants forced by the construction; a failure is a bug here.
        for i, row in enumerate(c_mat):
            assert all(v >= 0 for v in row), "pairing matrix must be nonnegative"
            assert all(row[j] >= row[j - 1] for j in range(1, n)), "rows must be nondecreasing"
            assert all(v >= 0 for v in b_mat[i]), "exponents must be nonnegative"
        for i in range(n):
            assert all(b_mat[i][j] == 0 for j in range(i)), "triangular block broken"
            assert b_mat[i][i] > 0, "triangular diagonal must be positive"
        return Chart(
            flag=flag,
            generators=tuple(gens),
            beta=beta,
            c=c_mat,
            b=b_mat,
            barycenters=barys,
            hilbert_rows=hilbert_rows,
        )

    # -- points ---------------------------------------------------------

    def expi_point(self, x, cone: Cone, provenance: str = "expi") -> ToricPoint:
        """Image of x in N_R under the exponential embedding, read off on
        the Hilbert basis of the carrier cone: value e^(-2 pi <h, x>)."""
        sem = self.hilbert(cone)
        values = tuple(math.exp(-TWO_PI * float(pair(h, x))) for h in sem.generators)
        return ToricPoint(cone=cone, values=values, provenance=provenance)

    def chart_point(self, chart: Chart, w, provenance: str = "chart") -> ToricPoint:
        """ToricPoint of the chart's top cone at simplex coordinates w."""
        y = psi_eval(chart, w)
        values = tuple(y[i] for i in chart.hilbert_rows)
        return ToricPoint(cone=chart.top_cone, values=values, provenance=provenance)

    def commutativity_residual(self, chart: Chart, x) -> float:
        """Sup-norm gap between the monomial route psi(theta(exp_F(x)))
        and the direct exponential embedding, over all m coordinates."""
        u = simplicial_coords(chart.flag, x)
        lhs = psi_eval(chart, theta(exp_flag(u)))
        rhs = tuple(math.exp(-TWO_PI * float(pair(g, x))) for g in chart.generators)
        return max(abs(a - b) for a, b in zip(lhs, rhs))

    # -- localization and equality ---------------------------------------

    def _localization_rule(self, sigma: Cone, tau: Cone):
        """Exponent data moving values on H(S_sigma) to values on H(S_tau).

        tau must be a face of sigma, cut out by the sum alpha of the dual
        cone's extreme rays vanishing on tau; every Hilbert generator of
        S_tau satisfies h + k*alpha in S_sigma for some minimal k >= 0,
        so its value is value(h + k*alpha) / value(alpha)^k.
        """
        key = (sigma.rays, tau.rays)
        if key in self._local_rules:
            return self._local_rules[key]
        if not self.fan.is_face(tau, sigma):
            raise ValueError("localization target must be a face of the carrier")
        sem_s = self.hilbert(sigma)
        sem_t = self.hilbert(tau)
        if sigma.rays == tau.rays:
            rule = ("identity",)
        else:
            vanishing = [
                d for d in sigma.dual_rays if all(pair(d, g) == 0 for g in tau.generators)
            ]
            alpha = tuple(sum(d[i] for d in vanishing) for i in range(sigma.ambient_dim))
            alpha_coeffs = _ck.decompose(sem_s, alpha)
            assert alpha_coeffs is not None, "cutting functional must lie in the semigroup"
            rows = []
            for h in sem_t.generators:
                k = 0
                shifted = h
                while not sem_s.contains(shifted):
                    k += 1
                    shifted = vadd(h, vscale(k, alpha))
                    assert k < 10000, "face shift failed to terminate"
                coeffs = _ck.decompose(sem_s, shifted)
                assert coeffs is not None, "shifted generator must decompose"
                rows.append((k, coeffs))
            rule = ("shift", alpha_coeffs, tuple(rows))
        self._local_rules[key] = rule
        return rule

    def localize(self, p: ToricPoint, tau: Cone) -> ToricPoint:
        """Extension of p to the face chart of tau, or NotInOpenSet."""
        rule = self._localization_rule(p.cone, tau)
        if rule[0] == "identity":
            return p
        _, alpha_coeffs, rows = rule
        v_alpha = _value_at(p.values, alpha_coeffs)
        if v_alpha <= 0.0:
            raise NotInOpenSet(f"value at the cutting functional is zero ({p.provenance})")
        values = tuple(_value_at(p.values, coeffs) / v_alpha**k for k, coeffs in rows)
        return ToricPoint(cone=tau, values=values, provenance=p.provenance + "|localized")

    def points_equal(self, p: ToricPoint, q: ToricPoint, tol: float = 1e-9) -> bool:
        """Whether two intrinsic points coincide in the variety.

        Both are localized to the chart of the carriers' intersection
        cone; they are equal iff both localize and the localized values
        agree within tol (scaled by magnitude, since localized values
        may leave [0, 1]).  If at most one localizes the points live in
        different charts and are distinct.
        """
        shared = self.fan.cone(p.cone.rays & q.cone.rays)
        try:
            lp = self.localize(p, shared)
        except NotInOpenSet:
            lp = None
        try:
            lq = self.localize(q, shared)
        except NotInOpenSet:
            lq = None
        if lp is None or lq is None:
            return False
        return all(
            abs(a - b) <= tol * max(1.0, abs(a), abs(b)) for a, b in zip(lp.values, lq.values)
        )

    def semigroup_residual(self, p: ToricPoint) -> float:
        """Worst violation of the semigroup law among pairwise additive
        relations h_i + h_j = h_k + h_l detected in the Hilbert basis.

        Gaps are scaled by the magnitude of the products, which may leave
        [0, 1] when the carrier's semigroup contains negative directions.
        """
        sem = self.hilbert(p.cone)
        gens = sem.generators
        sums = {}
        worst = 0.0
        for i in range(len(gens)):
            for j in range(i, len(gens)):
                s = vadd(gens[i], gens[j])
                prod = p.values[i] * p.values[j]
                if s in sums:
                    gap = abs(sums[s] - prod) / max(1.0, abs(sums[s]), abs(prod))
                    worst = max(worst, gap)
                else:
                    sums[s] = prod
        return worst


def _value_at(values, coeffs) -> float:
    out = 1.0
    for v, c in zip(values, coeffs):
        if c:
            out *= v**c
    return out
