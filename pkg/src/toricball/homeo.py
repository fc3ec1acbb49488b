"""The flag-wise logarithmic rescaling Phi and the ball parameterization.

Phi rescales each flag cone onto itself so that the composite with the
exponential embedding extends continuously to the sphere at infinity.
In simplicial coordinates u_1..u_k on a flag cone the map is

    v_j = (1 / 2 pi) * log((1 + u_1 + ... + u_j) / (1 + u_1 + ... + u_{j-1}))

with exact inverse u_j = (e^(2 pi v_j) - 1) * e^(2 pi (v_1+...+v_{j-1})).
The boundary-extended parameterization of a closed flag simplex goes
through barycentric coordinates xi_0..xi_n (xi_0 = 0 is the face at
infinity): the chart simplex point is the partial-sum vector
w_j = xi_0 + ... + xi_{j-1}, fed to the chart's monomial map.

A probe for the failure of the plain exponential embedding to extend to
the ball is included: along the path u = (s, c) in a rank-2 chart the
second triangular coordinate stays e^(-2 pi c) for every s, so the limit
at the mid-edge boundary point depends on the path.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .bary import Flag, flag_cone, locate_flag, simplicial_coords
from .charts import Atlas, Chart, ToricPoint, psi_eval, theta
from .fan import Fan

TWO_PI = 2.0 * math.pi


def phi_jk(u, j: int) -> float:
    """The j-th rescaling coordinate (1-indexed) of a length-k input."""
    if not 1 <= j <= len(u):
        raise ValueError("coordinate index out of range")
    upper = 1.0 + sum(float(x) for x in u[:j])
    lower = 1.0 + sum(float(x) for x in u[: j - 1])
    return math.log(upper / lower) / TWO_PI


def phi_coords(u):
    """All rescaling coordinates of u (simplicial coordinates, >= 0)."""
    return tuple(phi_jk(u, j) for j in range(1, len(u) + 1))


def phi_inverse_coords(v):
    """Exact inverse of phi_coords: u_j = (e^(2 pi v_j) - 1) e^(2 pi sum_{i<j} v_i)."""
    out = []
    prefix = 0.0
    for vj in v:
        out.append((math.exp(TWO_PI * float(vj)) - 1.0) * math.exp(TWO_PI * prefix))
        prefix += float(vj)
    return tuple(out)


def rescale_in_flag(flag: Flag, x):
    """Phi on the flag's cone: rescale the simplicial coordinates of x
    and re-assemble in the barycenter basis.  Raises NotInCone off-cone."""
    u = simplicial_coords(flag, x)
    v = phi_coords(u)
    gens = flag_cone(flag).generators
    n = len(x)
    out = [0.0] * n
    for vj, g in zip(v, gens):
        for i in range(n):
            out[i] += vj * g[i]
    return tuple(out)


def rescale_global(fan: Fan, x):
    """The glued global rescaling homeomorphism of N_R.

    Evaluates flag-locally in the lexicographically least maximal flag
    containing x; agreement across overlapping flags is a checked
    property, not an assumption (see the verification suites).
    """
    return rescale_in_flag(locate_flag(fan, x), x)


def bary_to_delta(xi):
    """Partial-sum parameterization of the simplex: w_j = xi_0+...+xi_{j-1}.

    Exact when xi is rational; the output always satisfies the simplex
    chain inequalities when xi is a valid barycentric vector.
    """
    n = len(xi) - 1
    out = []
    acc = xi[0] * 0  # keeps Fractions exact, floats float
    for j in range(n):
        acc = acc + xi[j]
        out.append(acc)
    return tuple(out)


def check_barycentric(xi, tol: float = 1e-12):
    if any(float(x) < -tol for x in xi):
        raise ValueError("barycentric coordinates must be nonnegative")
    total = sum(Fraction(x) for x in xi) if all(isinstance(x, (int, Fraction)) for x in xi) else sum(map(float, xi))
    if isinstance(total, Fraction):
        if total != 1:
            raise ValueError("barycentric coordinates must sum to 1")
    elif abs(total - 1.0) > tol:
        raise ValueError("barycentric coordinates must sum to 1")


def param_boundary_point(atlas: Atlas, flag: Flag, xi, provenance: str = "") -> ToricPoint:
    """Chart point of the closed flag simplex at barycentric coordinates xi.

    Defined for every valid xi including the xi_0 = 0 face at infinity;
    xi = (1, 0, ..., 0) is the image of the origin of N_R and
    xi = (0, ..., 0, 1) the torus-fixed point of the top cone's chart.
    """
    check_barycentric(xi)
    if len(xi) != len(flag) + 1:
        raise ValueError(f"expected {len(flag) + 1} barycentric coordinates")
    chart = atlas.chart(flag)
    w = tuple(float(v) for v in bary_to_delta(xi))
    tag = provenance or f"param{list(map(float, xi))}"
    return atlas.chart_point(chart, w, provenance=tag)


def simplicial_to_barycentric(u):
    """xi_0 = 1/(1+sum u), xi_j = u_j/(1+sum u): the compactifying chart."""
    total = 1 + sum(u)
    return tuple([1 / total] + [uj / total for uj in u])


def barycentric_to_simplicial(xi):
    """u_j = xi_j / xi_0 for interior points (xi_0 > 0)."""
    if float(xi[0]) <= 0:
        raise ValueError("interior points need xi_0 > 0")
    return tuple(x / xi[0] for x in xi[1:])


def nonextension_probe(atlas: Atlas, flag: Flag, c: float, s: float):
    """Chart coordinates along the path u = (s, c) in a rank-2 chart.

    The first triangular coordinate is e^(-2 pi (s + c)) and tends to 0
    as s grows, independent of c's role; the second stays e^(-2 pi c)
    for every s, exhibiting the path dependence of the naive exponential
    limit at the boundary point with barycentric coordinates (0, 1, 0).
    """
    if atlas.fan.dim != 2:
        raise ValueError("the probe is defined for rank-2 fans")
    if c <= 0:
        raise ValueError("the probe path needs c > 0")
    chart = atlas.chart(flag)
    z = (math.exp(-TWO_PI * s), math.exp(-TWO_PI * c))
    return psi_eval(chart, theta(z))
