"""Polyhedral engine: dual cones, Hilbert bases, interior points.

The low-level kernel works on raw tuples of integers (generators of
cones in either lattice), so it is usable both below the fan layer and
on top of it.  All computations are exact; the only algorithms here are

  * a double description pass (halfspace-at-a-time) for dual cones and
    facet enumeration,
  * a placing triangulation plus fundamental-parallelepiped enumeration
    for semigroup generators, with reduction to irreducibles,
  * the upper-triangular generator selection for a maximal flag of
    cones.

Everything returned is immutable; functions are pure and safe to call
concurrently.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .exact import (
    invert,
    is_zero_vec,
    pair,
    primitive,
    quotient_projection,
    rank,
    solve_in_basis,
    unit_vector,
    vadd,
    vneg,
    vscale,
    vsub,
)


def _dedupe(vectors):
    seen = set()
    out = []
    for v in vectors:
        if v not in seen:
            seen.add(v)
            out.append(v)
    return out


def _active_rank(ray, constraints) -> int:
    active = [h for h in constraints if pair(h, ray) == 0]
    return rank(active) if active else 0


def _prune_rays(rays, lineality, constraints, n):
    """Keep one primitive representative per extreme ray class.

    A ray is extreme iff its active constraints cut a face of dimension
    dim(lineality) + 1.  Representatives are canonicalized modulo the
    lineality space so that duplicates collapse.
    """
    need = n - len(lineality) - 1
    out = []
    for r in rays:
        if _active_rank(r, constraints) != need:
            continue
        if lineality:
            if solve_in_basis(lineality, r) is not None:
                continue  # r lies inside the lineality space
            # Project off the lineality component for a canonical class rep.
            out.append(primitive(_reduce_mod_span(r, lineality)))
        else:
            out.append(primitive(r))
    return _dedupe(out)


def _reduce_mod_span(v, span_basis):
    """A rational vector congruent to v modulo span(span_basis), chosen
    canonically as the orthogonal projection onto the complement."""
    basis = [tuple(Fraction(a) for a in b) for b in span_basis]
    w = [Fraction(a) for a in v]
    # Gram-Schmidt style elimination against the (orthogonalized) basis.
    ortho = []
    for b in basis:
        bb = list(b)
        for o in ortho:
            den = pair(o, o)
            bb = list(vsub(bb, vscale(pair(tuple(bb), o) / den, o)))
        ortho.append(tuple(bb))
    for o in ortho:
        den = pair(o, o)
        w = list(vsub(tuple(w), vscale(pair(tuple(w), o) / den, o)))
    return tuple(w)


def dual_generators(constraints: Sequence, n: int):
    """Generators of the cone {x : pair(h, x) >= 0 for all h}.

    Returns (lineality_basis, extreme_rays): the cone is the sum of the
    linear span of the basis and the conic hull of the rays.  Rays are
    primitive and canonical modulo the lineality space.
    """
    lineality = [unit_vector(i, n) for i in range(n)]
    rays: list = []
    processed: list = []
    for h in constraints:
        h = tuple(h)
        if is_zero_vec(h):
            continue
        lv = [pair(h, l) for l in lineality]
        if any(v != 0 for v in lv):
            i0 = next(i for i, v in enumerate(lv) if v != 0)
            l0, v0 = lineality[i0], lv[i0]
            if v0 < 0:
                l0, v0 = vneg(l0), -v0
            new_lin = []
            for j, l in enumerate(lineality):
                if j == i0:
                    continue
                new_lin.append(primitive(vsub(vscale(v0, l), vscale(lv[j], l0))))
            rays = [primitive(vsub(vscale(v0, r), vscale(pair(h, r), l0))) for r in rays]
            rays.append(primitive(l0))
            lineality = new_lin
        else:
            pos = [r for r in rays if pair(h, r) > 0]
            neg = [r for r in rays if pair(h, r) < 0]
            zero = [r for r in rays if pair(h, r) == 0]
            new_rays = zero + pos
            for rp in pos:
                hp = pair(h, rp)
                for rn in neg:
                    hn = pair(h, rn)
                    new_rays.append(primitive(vsub(vscale(hp, rn), vscale(hn, rp))))
            rays = _dedupe(new_rays)
        processed.append(h)
        rays = _prune_rays(rays, lineality, processed, n)
    return tuple(lineality), tuple(rays)


def generator_list(lineality, rays):
    """Flat generating set: extreme rays plus +-pairs for the lineality."""
    out = list(rays)
    for l in lineality:
        out.append(tuple(l))
        out.append(vneg(l))
    return tuple(out)


def minimal_generators(gens: Sequence, n: int):
    """(lineality, extreme rays) description of the cone spanned by gens."""
    dlin, drays = dual_generators(gens, n)
    return dual_generators(generator_list(dlin, drays), n)


def facet_normal_faces(gens: Sequence, n: int):
    """Facets of cone(gens) as (normal, generator-index frozenset) pairs.

    Each normal is an extreme ray class of the dual cone; normals cutting
    the same generator subset are reported once.
    """
    dlin, drays = dual_generators(gens, n)
    facets = {}
    for d in drays:
        face = frozenset(i for i, g in enumerate(gens) if pair(d, g) == 0)
        facets.setdefault(face, d)
    return tuple((normal, face) for face, normal in sorted(facets.items(), key=lambda kv: sorted(kv[0])))


def face_index_sets(gens: Sequence, n: int):
    """All faces of cone(gens) as frozensets of generator indices.

    Includes the cone itself and, for pointed cones, the zero face (the
    empty set).  Faces are exactly the intersections of facets.
    """
    top = frozenset(range(len(gens)))
    facets = [face for _, face in facet_normal_faces(gens, n)]
    faces = {top}
    frontier = {top}
    while frontier:
        new = set()
        for f in frontier:
            for ft in facets:
                g = f & ft
                if g not in faces:
                    new.add(g)
        faces |= new
        frontier = new
    return faces


def cone_contains(dual_gens: Sequence, x) -> bool:
    """Membership via a dual description (pair >= 0 against every dual gen)."""
    return all(pair(d, x) >= 0 for d in dual_gens)


@dataclass(frozen=True)
class DualCone:
    """Dual cone in the character lattice of a cone in N.

    rays      : primitive extreme ray classes of the dual.
    lineality : lattice vectors spanning the orthogonal complement of the
                base cone's span (empty iff the base cone is full-dim).
    normals   : the base cone's primitive generators, acting as inward
                facet normals of the dual.
    """

    rays: tuple
    lineality: tuple
    normals: tuple
    ambient_dim: int

    @property
    def generators(self):
        return generator_list(self.lineality, self.rays)

    def contains(self, alpha) -> bool:
        return all(pair(alpha, v) >= 0 for v in self.normals)


def dual_cone(cone) -> DualCone:
    """Dual of a fan cone (anything with .generators and an ambient dim)."""
    gens = cone.generators
    n = cone.ambient_dim if hasattr(cone, "ambient_dim") else len(gens[0])
    dlin, drays = dual_generators(gens, n)
    return DualCone(rays=drays, lineality=dlin, normals=tuple(gens), ambient_dim=n)


# ---------------------------------------------------------------------------
# Semigroup generators (Hilbert bases)
# ---------------------------------------------------------------------------


def _placing_triangulation(rays: Sequence, n: int):
    """Simplicial subcones (tuples of rays) triangulating a pointed cone.

    Standard placing recursion: the first ray is joined to the
    triangulations of the facets that do not contain it.
    """
    rays = list(rays)
    k = rank(rays)
    if len(rays) == k:
        return [tuple(rays)]
    r0 = rays[0]
    simplices = []
    for _, face in facet_normal_faces(rays, n):
        face_rays = [rays[i] for i in sorted(face)]
        if r0 in face_rays or not face_rays:
            continue
        for sub in _placing_triangulation(face_rays, n):
            simplices.append((r0,) + sub)
    return simplices


def _parallelepiped_points(simplex_rays: Sequence, n: int):
    """Nonzero lattice points of {sum t_i r_i : 0 <= t_i < 1}."""
    inv = invert(list(zip(*simplex_rays)))  # columns are the rays
    lo = [0] * n
    hi = [0] * n
    for eps in itertools.product((0, 1), repeat=len(simplex_rays)):
        corner = [0] * n
        for e, r in zip(eps, simplex_rays):
            if e:
                corner = [c + a for c, a in zip(corner, r)]
        lo = [min(l, c) for l, c in zip(lo, corner)]
        hi = [max(h, c) for h, c in zip(hi, corner)]
    points = []
    for coords in itertools.product(*[range(l, h + 1) for l, h in zip(lo, hi)]):
        if all(c == 0 for c in coords):
            continue
        t = [pair(row, coords) for row in inv]
        if all(0 <= ti < 1 for ti in t):
            points.append(tuple(coords))
    return points


def _pointed_semigroup_generators(rays: Sequence, n: int):
    """Hilbert basis of (full-dimensional pointed cone) intersect Z^n."""
    if not rays:
        return ()
    dlin, drays = dual_generators(rays, n)
    assert not dlin, "pointed full-dimensional cone expected"
    candidates = _dedupe([primitive(r) for r in rays])
    for simplex in _placing_triangulation(list(rays), n):
        candidates.extend(_parallelepiped_points(simplex, n))
    candidates = _dedupe(candidates)
    inside = lambda v: all(pair(d, v) >= 0 for d in drays)
    basis = []
    for g in candidates:
        reducible = False
        for h in candidates:
            if h == g:
                continue
            diff = vsub(g, h)
            if not is_zero_vec(diff) and inside(diff):
                reducible = True
                break
        if not reducible:
            basis.append(g)
    return tuple(sorted(basis))


@dataclass(frozen=True)
class SemigroupGens:
    """Minimal generating set of the semigroup (dual cone) intersect M.

    For a full-dimensional base cone the dual is pointed and `pointed`
    is the honest Hilbert basis.  Otherwise the dual has a lineality
    space; the generating set is a lifted Hilbert basis of the pointed
    quotient together with a +- lattice basis of the lineality.

    interior_point is a lattice point of the relative interior of the
    base cone; it pairs strictly positively with every pointed generator
    and to zero with the lineality part, which is what the bounded
    decomposition search keys on.
    """

    cone_rays: tuple
    pointed: tuple
    lineality: tuple
    interior_point: tuple

    @property
    def generators(self):
        out = list(self.pointed)
        for l in self.lineality:
            out.append(tuple(l))
            out.append(vneg(l))
        return tuple(out)

    def contains(self, m) -> bool:
        return all(pair(m, v) >= 0 for v in self.cone_rays)


def hilbert_basis(cone) -> SemigroupGens:
    """Generators of the semigroup of lattice points of the dual cone."""
    gens = tuple(cone.generators)
    n = cone.ambient_dim if hasattr(cone, "ambient_dim") else (len(gens[0]) if gens else 0)
    dlin, drays = dual_generators(gens, n)
    interior = tuple(sum(g[i] for g in gens) for i in range(n)) if gens else tuple([0] * n)
    if not dlin:
        return SemigroupGens(
            cone_rays=gens,
            pointed=_pointed_semigroup_generators(drays, n),
            lineality=(),
            interior_point=interior,
        )
    proj = quotient_projection([tuple(int(a) for a in l) for l in dlin], n)
    m = proj.target_dim
    image_rays = []
    for r in drays:
        img = proj.apply(r)
        if not is_zero_vec(img):
            image_rays.append(primitive(img))
    _, image_min = minimal_generators(_dedupe(image_rays), m) if image_rays else ((), ())
    image_basis = _pointed_semigroup_generators(image_min, m) if image_min else ()
    lifts = []
    for h in image_basis:
        lift = tuple(pair(row, h) for row in zip(*proj.section))
        lifts.append(tuple(int(a) for a in lift))
    return SemigroupGens(
        cone_rays=gens,
        pointed=tuple(sorted(lifts)),
        lineality=tuple(tuple(int(a) for a in k) for k in proj.kernel),
        interior_point=interior,
    )


def decompose(sem: SemigroupGens, m) -> "tuple | None":
    """Nonnegative integer coefficients over sem.generators summing to m.

    Bounded depth-first search: the pointed generators pair strictly
    positively with the interior point, which bounds their coefficients;
    the residual is then solved exactly in the lineality basis.  Returns
    None when m is not in the semigroup.
    """
    y0 = sem.interior_point
    pointed = list(sem.pointed)
    weights = [pair(h, y0) for h in pointed]
    target = pair(m, y0)
    if target < 0:
        return None
    order = sorted(range(len(pointed)), key=lambda i: -weights[i])
    coeffs = [0] * len(pointed)

    def close(residual):
        if sem.lineality:
            c = solve_in_basis(sem.lineality, residual)
            if c is None or any(Fraction(x).denominator != 1 for x in c):
                return None
            return [int(x) for x in c]
        return [] if is_zero_vec(residual) else None

    def search(pos, remaining):
        if pos == len(order):
            if remaining != 0:
                return None
            residual = m
            for i, h in enumerate(pointed):
                if coeffs[i]:
                    residual = vsub(residual, vscale(coeffs[i], h))
            return close(residual)
        i = order[pos]
        top = remaining // weights[i]
        for a in range(int(top), -1, -1):
            coeffs[i] = a
            got = search(pos + 1, remaining - a * weights[i])
            if got is not None:
                return got
            coeffs[i] = 0
        return None

    lin_coeffs = search(0, target)
    if lin_coeffs is None:
        return None
    out = list(coeffs)
    for c in lin_coeffs:
        out.append(max(c, 0))
        out.append(max(-c, 0))
    return tuple(out)


def minimality_violations(sem: SemigroupGens):
    """Pointed generators expressible over the remaining generators.

    Empty for a genuine Hilbert basis.  The +- lineality pairs are
    minimal by construction (their images vanish in the pointed
    quotient, so no nonnegative combination of the others reaches them)
    and are not re-tested.
    """
    bad = []
    for i, g in enumerate(sem.pointed):
        reduced = SemigroupGens(
            cone_rays=sem.cone_rays,
            pointed=sem.pointed[:i] + sem.pointed[i + 1 :],
            lineality=sem.lineality,
            interior_point=sem.interior_point,
        )
        if decompose(reduced, g) is not None:
            bad.append(g)
    return tuple(bad)


# ---------------------------------------------------------------------------
# Relative interior points and the triangular generator selection
# ---------------------------------------------------------------------------


def relative_interior_point(face_rays: Sequence):
    """Lattice point interior to the cone spanned by the given primitive rays.

    The sum of the rays works: it pairs strictly positively with every
    functional that is positive somewhere on the face.  Rejects the
    zero-dimensional face.
    """
    face_rays = list(face_rays)
    if not face_rays:
        raise ValueError("the zero face has no relative interior lattice point")
    total = face_rays[0]
    for r in face_rays[1:]:
        total = vadd(total, r)
    return tuple(total)


def triangular_generators(chain: Sequence):
    """Distinguished generators alpha_1..alpha_n for a maximal chain of cones.

    chain is sigma_1 < sigma_2 < ... < sigma_n with dim(sigma_i) = i and
    sigma_n full-dimensional.  alpha_i is the sum of the extreme rays of
    the dual of sigma_n vanishing on sigma_(i-1), i.e. a lattice point in
    the relative interior of the face of the dual cut out by sigma_(i-1).
    The resulting pairing matrix against the chain's barycenters is lower
    triangular: zero below the diagonal, positive on it.
    """
    top = chain[-1]
    n = top.ambient_dim if hasattr(top, "ambient_dim") else len(top.generators[0])
    dlin, drays = dual_generators(top.generators, n)
    if dlin or len(drays) == 0:
        raise ValueError("top cone of the chain must be full-dimensional")
    alphas = []
    for i in range(1, n + 1):
        if i == 1:
            face_rays = list(drays)
        else:
            lower = chain[i - 2]
            face_rays = [d for d in drays if all(pair(d, g) == 0 for g in lower.generators)]
        alphas.append(relative_interior_point(face_rays))
    # Internal invariant: strict/zero pairing pattern against barycenters.
    for i, alpha in enumerate(alphas, start=1):
        for j, sigma in enumerate(chain, start=1):
            bary = tuple(sum(g[t] for g in sigma.generators) for t in range(n))
            val = pair(alpha, bary)
            if j < i:
                assert val == 0, "triangular generator fails zero pattern"
            elif j == i:
                assert val > 0, "triangular generator fails positivity"
            else:
                assert val >= 0
    return tuple(alphas)
