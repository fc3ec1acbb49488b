"""Complete rational fans: data model, validation, face and star calculus.

A fan is stored by its primitive ray vectors and the ray-index sets of
its maximal cones; validation enumerates the full face lattice (all
faces of all listed cones, down to the zero cone) and checks the fan
axioms exactly.  Non-simplicial maximal cones are supported; facet data
comes from the double description kernel in `cones`.

Fans are immutable after validation and safe for concurrent reads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from . import cones as _ck
from .exact import gcd_vec, is_zero_vec, pair, primitive, quotient_projection, rank


class FanError(Exception):
    """Base class for fan construction problems."""


class ParseError(FanError):
    """The fan description is not well-formed."""


class FanValidationError(FanError):
    """The description is well-formed but does not define a fan."""


class NotPrimitiveRay(FanValidationError):
    pass


class NotStronglyConvex(FanValidationError):
    pass


class FaceIntersectionViolation(FanValidationError):
    pass


class IncompleteFan(FanValidationError):
    pass


@dataclass(frozen=True)
class Cone:
    """A cone of a fan, identified by its set of ray indices.

    generators are the primitive ray vectors (sorted by ray index), and
    the dual description (extreme rays + lineality of the dual cone) is
    precomputed so membership tests are simple sign checks.  The zero
    cone has an empty ray set.
    """

    rays: frozenset
    dim: int
    ambient_dim: int
    generators: tuple
    dual_rays: tuple
    dual_lineality: tuple

    @property
    def facet_normals(self):
        """Inward facet normals, one per facet, vanishing exactly on it."""
        seen = {}
        for d in self.dual_rays:
            facet = frozenset(i for i, g in enumerate(self.generators) if pair(d, g) == 0)
            seen.setdefault(facet, d)
        return tuple(seen[f] for f in sorted(seen, key=sorted))

    @property
    def dual_generators(self):
        return _ck.generator_list(self.dual_lineality, self.dual_rays)

    def contains(self, x) -> bool:
        return all(pair(d, x) >= 0 for d in self.dual_generators)

    def sort_key(self):
        return (self.dim, tuple(sorted(self.rays)))

    def __repr__(self):
        return f"Cone({sorted(self.rays)})"


def _build_cone(ray_indices: frozenset, fan_rays: Sequence, n: int) -> Cone:
    gens = tuple(fan_rays[i] for i in sorted(ray_indices))
    dlin, drays = _ck.dual_generators(gens, n)
    return Cone(
        rays=ray_indices,
        dim=rank(gens),
        ambient_dim=n,
        generators=gens,
        dual_rays=drays,
        dual_lineality=dlin,
    )


class Fan:
    """Validated fan: rays, maximal cones, and the full face lattice."""

    def __init__(self, dim, rays, max_cones, cones_by_rays, faces_of, name="fan"):
        self.dim = dim
        self.rays = rays
        self.max_cones = max_cones
        self._cones = cones_by_rays
        self._faces_of = faces_of
        self.name = name
        self._cache = {}

    def cone(self, ray_indices) -> Cone:
        key = frozenset(ray_indices)
        if key not in self._cones:
            raise KeyError(f"no cone with rays {sorted(key)} in this fan")
        return self._cones[key]

    def cones(self, dim=None):
        out = [c for c in self._cones.values() if dim is None or c.dim == dim]
        return sorted(out, key=Cone.sort_key)

    def maximal_cones(self):
        return [self._cones[r] for r in self.max_cones]

    def faces(self, cone: Cone):
        """All faces of a cone, including the zero cone and itself."""
        if cone.rays not in self._cones:
            raise KeyError("cone does not belong to this fan")
        return sorted((self._cones[f] for f in self._faces_of[cone.rays]), key=Cone.sort_key)

    def is_face(self, tau: Cone, sigma: Cone) -> bool:
        return tau.rays in self._faces_of.get(sigma.rays, ())

    def zero_cone(self) -> Cone:
        return self._cones[frozenset()]

    def is_complete(self):
        """Facet-pairing completeness test with a certificate.

        True iff every maximal cone is full-dimensional, every
        (n-1)-dimensional cone is a facet of exactly two maximal cones,
        and the facet-adjacency graph of maximal cones is connected.
        The certificate names the first violation found.
        """
        n = self.dim
        if n == 0:
            return True, None
        maxc = self.maximal_cones()
        if not maxc:
            return False, {"reason": "no maximal cones"}
        for c in maxc:
            if c.dim != n:
                return False, {"reason": "maximal cone not full-dimensional", "cone": sorted(c.rays)}
        ridge_incidence = {}
        for c in maxc:
            for f in self._faces_of[c.rays]:
                if self._cones[f].dim == n - 1:
                    ridge_incidence.setdefault(f, []).append(c.rays)
        for ridge, incident in sorted(ridge_incidence.items(), key=lambda kv: sorted(kv[0])):
            if len(incident) != 2:
                return False, {
                    "reason": "facet not shared by exactly two maximal cones",
                    "facet": sorted(ridge),
                    "count": len(incident),
                }
        # Connectivity of the dual adjacency graph.
        adjacency = {c.rays: set() for c in maxc}
        for incident in ridge_incidence.values():
            if len(incident) == 2:
                a, b = incident
                adjacency[a].add(b)
                adjacency[b].add(a)
        seen = set()
        stack = [maxc[0].rays]
        while stack:
            cur = stack.pop()
            if cur in seen:
                continue
            seen.add(cur)
            stack.extend(adjacency[cur] - seen)
        if len(seen) != len(maxc):
            return False, {"reason": "maximal cones not facet-connected", "reached": len(seen)}
        return True, None


def validate_fan(dim, rays, max_cones, require_complete=True, name="fan") -> Fan:
    """Build a Fan after checking the fan axioms exactly.

    Raises NotPrimitiveRay / NotStronglyConvex / FaceIntersectionViolation
    for axiom violations, FanValidationError for other malformations, and
    IncompleteFan when require_complete is set and the support is proper.
    """
    n = int(dim)
    if n < 0:
        raise FanValidationError("dimension must be nonnegative")
    rays = tuple(tuple(int(a) for a in r) for r in rays)
    if n == 0:
        if rays:
            raise FanValidationError("rank-zero fan cannot have rays")
        zero = _build_cone(frozenset(), rays, 0)
        return Fan(0, (), (frozenset(),), {frozenset(): zero}, {frozenset(): {frozenset()}}, name)
    for idx, r in enumerate(rays):
        if len(r) != n:
            raise FanValidationError(f"ray {idx} has length {len(r)}, expected {n}")
        if is_zero_vec(r):
            raise NotPrimitiveRay(f"ray {idx} is zero")
        if gcd_vec(r) != 1:
            raise NotPrimitiveRay(f"ray {idx} = {r} is not primitive")
    if len(set(rays)) != len(rays):
        raise FanValidationError("duplicate ray vectors")

    max_sets = []
    for mc in max_cones:
        s = frozenset(int(i) for i in mc)
        for i in s:
            if not 0 <= i < len(rays):
                raise FanValidationError(f"ray index {i} out of range")
        if s in max_sets:
            raise FanValidationError(f"maximal cone {sorted(s)} listed twice")
        max_sets.append(s)
    if not max_sets:
        raise FanValidationError("fan needs at least one cone")
    for a in max_sets:
        for b in max_sets:
            if a != b and a <= b:
                raise FanValidationError(f"listed cone {sorted(a)} is a face of {sorted(b)}")
    used = set().union(*max_sets) if max_sets else set()
    if used != set(range(len(rays))):
        missing = sorted(set(range(len(rays))) - used)
        raise FanValidationError(f"rays {missing} appear in no maximal cone")

    cones_by_rays = {}
    faces_of = {}
    for s in max_sets:
        gens = [rays[i] for i in sorted(s)]
        index_of = {g: i for g, i in zip(gens, sorted(s))}
        # Strong convexity: the dual description must be full-dimensional.
        dlin, drays = _ck.dual_generators(gens, n)
        if rank(_ck.generator_list(dlin, drays)) != n:
            raise NotStronglyConvex(f"cone {sorted(s)} contains a line")
        face_sets = _ck.face_index_sets(gens, n)
        # Every listed ray must span a one-dimensional face (extremality).
        one_faces = {f for f in face_sets if len(f) == 1}
        if len(one_faces) != len(gens) or any(
            frozenset({i}) not in one_faces for i in range(len(gens))
        ):
            raise FanValidationError(
                f"cone {sorted(s)} lists a non-extremal generator"
            )
        ray_faces = set()
        for f in face_sets:
            ray_faces.add(frozenset(index_of[gens[i]] for i in f))
        faces_of[s] = ray_faces
        for fr in ray_faces:
            if fr not in cones_by_rays:
                cones_by_rays[fr] = _build_cone(fr, rays, n)
    # Faces of faces: restrict each stored face set downward.
    for fr in list(cones_by_rays):
        if fr in faces_of:
            continue
        c = cones_by_rays[fr]
        sub = _ck.face_index_sets(c.generators, n)
        order = sorted(fr)
        faces_of[fr] = {frozenset(order[i] for i in f) for f in sub}
    for fr, subs in faces_of.items():
        for f in subs:
            if f not in cones_by_rays:
                cones_by_rays[f] = _build_cone(f, rays, n)

    # Pairwise intersections of maximal cones must be common faces.
    for i, a in enumerate(max_sets):
        for b in max_sets[i + 1 :]:
            ca, cb = cones_by_rays[a], cones_by_rays[b]
            constraints = list(ca.dual_generators) + list(cb.dual_generators)
            ilin, irays = _ck.dual_generators(constraints, n)
            if ilin:
                raise FaceIntersectionViolation(
                    f"intersection of {sorted(a)} and {sorted(b)} is not strongly convex"
                )
            shared = a & b
            expected = cones_by_rays.get(shared)
            got = frozenset(primitive(r) for r in irays)
            want = frozenset(expected.generators) if expected is not None else frozenset()
            if got != want or expected is None or shared not in faces_of[a] or shared not in faces_of[b]:
                raise FaceIntersectionViolation(
                    f"cones {sorted(a)} and {sorted(b)} do not meet in a common face"
                )

    fan = Fan(n, rays, tuple(max_sets), cones_by_rays, faces_of, name)
    if require_complete:
        ok, cert = fan.is_complete()
        if not ok:
            raise IncompleteFan(f"fan is not complete: {cert}")
    return fan


def parse_fan(source) -> dict:
    """Parse a fan description (JSON text or an already-decoded dict).

    Required fields: dim (int), rays (list of integer vectors),
    max_cones (list of ray-index lists).  Optional: name.
    """
    if isinstance(source, (str, bytes)):
        try:
            data = json.loads(source)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e}") from e
    elif isinstance(source, dict):
        data = source
    else:
        raise ParseError(f"cannot parse fan from {type(source).__name__}")
    if not isinstance(data, dict):
        raise ParseError("fan description must be an object")
    for key in ("dim", "rays", "max_cones"):
        if key not in data:
            raise ParseError(f"missing field {key!r}")
    if not isinstance(data["dim"], int):
        raise ParseError("dim must be an integer")
    for coll, kind in ((data["rays"], "rays"), (data["max_cones"], "max_cones")):
        if not isinstance(coll, list) or any(not isinstance(x, list) for x in coll):
            raise ParseError(f"{kind} must be a list of lists")
        for x in coll:
            if any(not isinstance(v, int) for v in x):
                raise ParseError(f"{kind} entries must be integers")
    return data


def parse_and_validate(source, require_complete=True) -> Fan:
    data = parse_fan(source)
    return validate_fan(
        data["dim"],
        data["rays"],
        data["max_cones"],
        require_complete=require_complete,
        name=data.get("name", "fan"),
    )


def star_fan(fan: Fan, sigma: Cone) -> Fan:
    """Fan of the cones containing sigma, in the quotient lattice.

    The quotient is by the saturation of the span of sigma; images of
    the maximal cones containing sigma are reduced to their extreme rays
    and revalidated as a fan of rank n - dim(sigma).
    """
    if sigma.rays not in fan._cones:
        raise KeyError("cone does not belong to this fan")
    proj = quotient_projection(sigma.generators, fan.dim)
    m = proj.target_dim
    if m == 0:
        return validate_fan(0, (), (frozenset(),), require_complete=False, name=f"{fan.name}/star")
    ray_pool = []
    ray_index = {}
    image_cones = []
    for c in fan.maximal_cones():
        if not sigma.rays <= c.rays:
            continue
        images = []
        for g in c.generators:
            img = proj.apply(g)
            if not is_zero_vec(img):
                images.append(primitive(img))
        _, extreme = _ck.minimal_generators(images, m)
        indices = set()
        for r in extreme:
            r = primitive(r)
            if r not in ray_index:
                ray_index[r] = len(ray_pool)
                ray_pool.append(r)
            indices.add(ray_index[r])
        image_cones.append(frozenset(indices))
    unique_cones = []
    for s in image_cones:
        if s not in unique_cones:
            unique_cones.append(s)
    return validate_fan(
        m,
        ray_pool,
        unique_cones,
        require_complete=False,
        name=f"{fan.name}/star{sorted(sigma.rays)}",
    )
