"""Barycentric subdivision of a fan: barycenters, flags, flag cones.

A flag is a strictly increasing chain of nonzero fan cones; the empty
flag is allowed and its cone is the origin.  The cone of a flag is
spanned by the barycenters of its members, where the barycenter of a
cone is the sum of its primitive ray generators.

Flag enumeration descends the face lattice from the maximal cones and
is deterministic: cones are ordered by (dimension, sorted ray indices)
and flags lexicographically by that key, so chart indices are stable
across runs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import rank, solve_in_basis, vec
from .fan import Cone, Fan


class NotInCone(ValueError):
    """Point is outside a flag cone; carries the signed coordinates
    (None when the point is off the linear span)."""

    def __init__(self, message, coords=None):
        super().__init__(message)
        self.coords = coords


def barycenter(cone: Cone):
    """Sum of the primitive ray generators of a nonzero cone."""
    if cone.dim == 0:
        raise ValueError("the zero cone has no barycenter")
    n = cone.ambient_dim
    return tuple(sum(g[i] for g in cone.generators) for i in range(n))


@dataclass(frozen=True)
class Flag:
    """Strictly increasing chain of nonzero cones (possibly empty)."""

    cones: tuple

    def __post_init__(self):
        for a, b in zip(self.cones, self.cones[1:]):
            if not (a.rays < b.rays):
                raise ValueError("flag chain must be strictly increasing")
        if any(c.dim == 0 for c in self.cones):
            raise ValueError("flags do not contain the zero cone")

    def __len__(self):
        return len(self.cones)

    def __iter__(self):
        return iter(self.cones)

    def sort_key(self):
        return tuple(c.sort_key() for c in self.cones)

    def __repr__(self):
        return "Flag(" + " < ".join(str(sorted(c.rays)) for c in self.cones) + ")"


@dataclass(frozen=True)
class FlagCone:
    """Simplicial cone spanned by the barycenters of a flag's members."""

    flag: Flag
    generators: tuple

    def __post_init__(self):
        # The barycenters of a flag are always linearly independent.
        assert rank(self.generators) == len(self.generators)


def flag_cone(flag: Flag) -> FlagCone:
    return FlagCone(flag=flag, generators=tuple(barycenter(c) for c in flag))


def enumerate_flags(fan: Fan, only_maximal: bool = False):
    """All flags of the fan, or only the maximal ones (length n, ending
    in a maximal cone), in deterministic order."""
    key = fan._cache.get("flags_key")
    if key is None:
        nonzero = [c for c in fan.cones() if c.dim > 0]
        all_flags = [Flag(())]

        def descend(chain):
            all_flags.append(Flag(tuple(reversed(chain))))
            for c in fan.faces(chain[-1]):
                if c.dim > 0 and c.rays < chain[-1].rays:
                    descend(chain + [c])

        # Chains are built top-down (largest cone first) then reversed.
        for c in nonzero:
            descend([c])
        all_flags.sort(key=Flag.sort_key)
        maximal = [
            f
            for f in all_flags
            if len(f) == fan.dim and f.cones and f.cones[-1].rays in set(fan.max_cones)
        ]
        fan._cache["flags_all"] = tuple(all_flags)
        fan._cache["flags_max"] = tuple(maximal)
        fan._cache["flags_key"] = True
    return list(fan._cache["flags_max" if only_maximal else "flags_all"])


def flag_intersection(f1: Flag, f2: Flag) -> Flag:
    """The flag of cones common to both; may be empty."""
    common_rays = {c.rays for c in f2.cones}
    return Flag(tuple(c for c in f1.cones if c.rays in common_rays))


def coords_in_flag(flag: Flag, x):
    """Coordinates of x in the barycenter basis of the flag's cone.

    Returns exact rationals, or None when x is off the linear span.
    The empty flag spans only the origin.
    """
    fc = flag_cone(flag)
    return solve_in_basis(fc.generators, vec(x))


def simplicial_coords(flag: Flag, x):
    """Unique u with x = sum u_j * B_j, requiring membership in the cone.

    Raises NotInCone (carrying the signed coordinates) when some u_j is
    negative or x is off the span.
    """
    u = coords_in_flag(flag, x)
    if u is None:
        raise NotInCone(f"{x} is not in the span of {flag}", coords=None)
    if any(c < 0 for c in u):
        raise NotInCone(f"{x} has negative simplicial coordinates in {flag}", coords=u)
    return u


def flag_contains(flag: Flag, x) -> bool:
    u = coords_in_flag(flag, x)
    return u is not None and all(c >= 0 for c in u)


def containing_flags(fan: Fan, x):
    """Maximal flags whose cone contains x, in enumeration order."""
    return [f for f in enumerate_flags(fan, only_maximal=True) if flag_contains(f, x)]


def locate_flag(fan: Fan, x) -> Flag:
    """Lexicographically least maximal flag whose cone contains x."""
    for f in enumerate_flags(fan, only_maximal=True):
        if flag_contains(f, x):
            return f
    raise NotInCone(f"{x} is not covered by any maximal flag cone (incomplete fan?)")


def cover_samples(fan: Fan, count: int, seed: int, box: int = 7):
    """Deterministic sample set for covering/gluing checks: uniform
    integer vectors in a box, every barycenter, and all pairwise
    barycenter midpoints (exact halves hit low-dimensional strata)."""
    import random

    rng = random.Random(seed)
    n = fan.dim
    samples = []
    barys = [vec(barycenter(c)) for c in fan.cones() if c.dim > 0]
    samples.extend(barys)
    for i, b1 in enumerate(barys):
        for b2 in barys[i + 1 :]:
            samples.append(tuple((a + b) * Fraction(1, 2) for a, b in zip(b1, b2)))
    for _ in range(count):
        samples.append(tuple(rng.randint(-box, box) for _ in range(n)))
    return samples


def cover_check(fan: Fan, samples: int = 200, seed: int = 0) -> bool:
    """Certify by exact sampling that the maximal flag cones cover N_R."""
    for x in cover_samples(fan, samples, seed):
        if not any(flag_contains(f, x) for f in enumerate_flags(fan, only_maximal=True)):
            return False
    return True
