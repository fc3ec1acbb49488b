"""Command-line surface: validate fans, dump charts, verify, export meshes.

Commands (see README for examples):

    validate <file>                      exit 0 valid+complete, 2 invalid,
                                         3 valid but incomplete, 1 parse error
    charts <file>                        per-flag generator/exponent dump
    param <file> --flag I --xi A,B,..    boundary-extended chart point
    verify <file> [--tol --samples --seed --out --tamper]
                                         full check suite, exit 4 on failure
    mesh <file> --radii R,.. --res K     OFF meshes of rescaled spheres

Reports are JSON on stdout (or under --out); with a fixed seed and
configuration they are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import cones as _ck
from .bary import (
    Flag,
    barycenter,
    cover_check,
    enumerate_flags,
    flag_cone,
    simplicial_coords,
)
from .cellcomplex import (
    build_ball_model,
    build_orbit_complex,
    euler_characteristic,
    pseudomanifold_check,
    verify_gluing,
    verify_regularity,
)
from .charts import Atlas, NotInImage, exp_flag, psi_eval, psi_invert, theta, theta_preimage
from .exact import vadd, vscale
from .fan import Fan, FanValidationError, ParseError, parse_and_validate
from .homeo import (
    bary_to_delta,
    nonextension_probe,
    param_boundary_point,
    phi_coords,
    phi_inverse_coords,
    rescale_in_flag,
)

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_INCOMPLETE = 3
EXIT_CHECK_FAILED = 4


def _load(path, require_complete):
    text = Path(path).read_text()
    return parse_and_validate(text, require_complete=require_complete)


def _emit(doc, out):
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "report.json").write_text(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# validate / charts / param
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        fan = _load(args.file, require_complete=False)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except FanValidationError as e:
        print(f"invalid fan: {e}", file=sys.stderr)
        return EXIT_INVALID
    complete, cert = fan.is_complete()
    doc = {
        "fan": fan.name,
        "dim": fan.dim,
        "rays": len(fan.rays),
        "cones": len(fan.cones()),
        "maximal_cones": len(fan.max_cones),
        "complete": complete,
    }
    if cert:
        doc["certificate"] = cert
    _emit(doc, args.out)
    return EXIT_OK if complete else EXIT_INCOMPLETE


def _load_or_exit(args):
    """Shared loading contract for chart-level commands."""
    try:
        fan = _load(args.file, require_complete=False)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return None, EXIT_PARSE
    except FanValidationError as e:
        print(f"invalid fan: {e}", file=sys.stderr)
        return None, EXIT_INVALID
    complete, _ = fan.is_complete()
    if not complete:
        print("fan is not complete", file=sys.stderr)
        return None, EXIT_INCOMPLETE
    return fan, EXIT_OK


def cmd_charts(args) -> int:
    fan, code = _load_or_exit(args)
    if fan is None:
        return code
    atlas = Atlas(fan)
    charts = []
    for idx, chart in enumerate(atlas.charts()):
        charts.append(
            {
                "index": idx,
                "flag": [sorted(c.rays) for c in chart.flag.cones],
                "generators": [list(g) for g in chart.generators],
                "dual_basis": [[str(x) for x in row] for row in chart.beta],
                "c": [list(r) for r in chart.c],
                "b": [list(r) for r in chart.b],
                "psi": chart.monomial_strings(),
            }
        )
    _emit({"fan": fan.name, "dim": fan.dim, "charts": charts}, args.out)
    return EXIT_OK


def cmd_param(args) -> int:
    fan, code = _load_or_exit(args)
    if fan is None:
        return code
    atlas = Atlas(fan)
    flags = enumerate_flags(fan, only_maximal=True)
    if not 0 <= args.flag < len(flags):
        print(f"flag index out of range (0..{len(flags) - 1})", file=sys.stderr)
        return EXIT_INVALID
    try:
        xi = [float(x) for x in args.xi.split(",")]
    except ValueError:
        print("could not parse --xi", file=sys.stderr)
        return EXIT_INVALID
    flag = flags[args.flag]
    try:
        point = param_boundary_point(atlas, flag, xi)
    except ValueError as e:
        print(f"bad barycentric coordinates: {e}", file=sys.stderr)
        return EXIT_INVALID
    sem = atlas.hilbert(point.cone)
    doc = {
        "fan": fan.name,
        "flag": args.flag,
        "xi": xi,
        "w": [float(v) for v in bary_to_delta(xi)],
        "carrier": sorted(point.cone.rays),
        "generators": [list(g) for g in sem.generators],
        "values": list(point.values),
    }
    _emit(doc, args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _random_cone_point(rng, flag, scale=4):
    """Exact rational point of the flag's cone (nonnegative coordinates)."""
    u = [Fraction(rng.randint(0, 1000 * scale), 1000) for _ in flag.cones]
    gens = flag_cone(flag).generators
    x = tuple([Fraction(0)] * len(gens[0])) if gens else ()
    for ui, g in zip(u, gens):
        x = vadd(x, vscale(ui, g))
    return u, x


def _delta_samples(rng, n, count, strata_each=50):
    """Simplex-chain samples, including zero-prefix boundary strata."""
    out = []
    for j in range(1, n + 1):
        for _ in range(strata_each):
            tail = sorted(rng.random() for _ in range(n - j))
            out.append(tuple([0.0] * j + tail))
    while len(out) < count:
        out.append(tuple(sorted(rng.random() for _ in range(n))))
    return out[:count]


def run_verification(fan: Fan, tol: float = 1e-9, samples: int = 100, seed: int = 0, tamper: bool = False):
    """Run every certification suite on a complete fan.

    Returns a JSON-ready report; report["passed"] is the overall verdict.
    With tamper=True one chart's exponent matrix is perturbed first, as a
    negative control: the monomial-diagram check must then fail.
    """
    rng = random.Random(seed)
    atlas = Atlas(fan)
    charts = atlas.charts()
    if tamper and charts:
        chart = charts[0]
        b = [list(r) for r in chart.b]
        b[-1][-1] += 1
        hacked = dataclasses.replace(chart, b=tuple(tuple(r) for r in b))
        atlas._charts[chart.flag] = hacked
        charts = atlas.charts()
    checks = []

    def record(name, passed, **details):
        checks.append({"name": name, "passed": bool(passed), **details})

    n = fan.dim

    # Chart invariants: exponent matrices must carry the triangular shape.
    bad = 0
    for chart in charts:
        for i, row in enumerate(chart.c):
            if any(v < 0 for v in row) or any(row[j] < row[j - 1] for j in range(1, n)):
                bad += 1
        for i in range(n):
            if any(chart.b[i][j] != 0 for j in range(i)) or chart.b[i][i] <= 0:
                bad += 1
        for i, row in enumerate(chart.c):
            if any(sum(chart.b[i][: k + 1]) != row[k] for k in range(n)):
                bad += 1
    record("chart_invariants", bad == 0, charts=len(charts), violations=bad)

    # Monomial diagram: both routes into the ambient chart agree.
    worst = 0.0
    for chart in charts:
        for _ in range(samples):
            _, x = _random_cone_point(rng, chart.flag)
            worst = max(worst, atlas.commutativity_residual(chart, x))
    record("monomial_diagram", worst <= tol, worst_residual=worst, samples_per_chart=samples)

    # Injectivity: the triangular inversion recovers simplex points.
    worst = 0.0
    ok = True
    for chart in charts:
        for w in _delta_samples(rng, n, 500):
            y = psi_eval(chart, w)
            try:
                back = psi_invert(chart, y, tol=1e-8)
            except NotInImage:
                ok = False
                continue
            worst = max(worst, max(abs(a - b) for a, b in zip(w, back)) if n else 0.0)
    record("simplex_inversion", ok and worst <= 1e-10, worst_gap=worst)

    # theta: image inside the simplex chain, preimage via suffix ratios.
    worst = 0.0
    for _ in range(500):
        z = tuple(rng.random() for _ in range(n))
        w = theta(z)
        prev = 0.0
        for x in list(w) + [1.0]:
            worst = max(worst, prev - x)
            prev = x
        w2 = theta(theta_preimage(w))
        worst = max(worst, max((abs(a - b) for a, b in zip(w, w2)), default=0.0))
    record("theta_map", worst <= 1e-12, worst_gap=worst)

    # Rescaling calculus: exact inverse and subflag gluing.
    worst = 0.0
    for k in range(1, n + 1):
        for _ in range(1000):
            u = tuple(rng.random() * 5 for _ in range(k))
            back = phi_inverse_coords(phi_coords(u))
            worst = max(worst, max(abs(a - b) for a, b in zip(u, back)))
    record("rescale_roundtrip", worst <= 1e-10, worst_gap=worst)

    worst = 0.0
    subflag_ok = True
    for flag in enumerate_flags(fan, only_maximal=True):
        members = list(flag.cones)
        for mask in range(1, 2**n - 1):
            sub = Flag(tuple(members[i] for i in range(n) if mask >> i & 1))
            _, x = _random_cone_point(rng, sub)
            via_sub = rescale_in_flag(sub, x)
            via_full = rescale_in_flag(flag, x)
            worst = max(worst, max((abs(a - b) for a, b in zip(via_sub, via_full)), default=0.0))
            # Subflag points must have zero coordinates off the subflag.
            u_full = simplicial_coords(flag, x)
            for i in range(n):
                if not mask >> i & 1 and u_full[i] != 0:
                    subflag_ok = False
    record("rescale_gluing", subflag_ok and worst <= 1e-12, worst_gap=worst)

    # Barycentric composite: the boundary parameterization agrees with
    # psi . theta . exp . Phi on the interior, and with the ratio formula.
    worst = 0.0
    chain_ok = True
    for chart in charts:
        for _ in range(50):
            raw = [rng.random() + 0.01 for _ in range(n + 1)]
            total = sum(raw)
            xi = tuple(Fraction(x).limit_denominator(10**6) / Fraction(total).limit_denominator(10**6) for x in raw)
            xi = tuple(x / sum(xi) for x in xi)
            direct = param_boundary_point(atlas, chart.flag, xi)
            u = tuple(float(x / xi[0]) for x in xi[1:])
            composite = psi_eval(chart, theta(exp_flag(phi_coords(u))))
            comp_point = tuple(composite[i] for i in chart.hilbert_rows)
            worst = max(worst, max(abs(a - b) for a, b in zip(direct.values, comp_point)))
            w = bary_to_delta(xi)
            ratio = [
                (1 + sum(u[:j])) / (1 + sum(u)) for j in range(n)
            ]
            worst = max(worst, max(abs(float(a) - b) for a, b in zip(w, ratio)))
            prev = Fraction(0)
            for x in list(bary_to_delta(xi)) + [Fraction(1)]:
                if Fraction(x) < prev:
                    chain_ok = False
                prev = Fraction(x)
    record("barycentric_composite", chain_ok and worst <= tol, worst_gap=worst)

    # Covering of N_R by the maximal flag cones.
    record("cover", cover_check(fan, samples=200, seed=seed))

    # Ball model combinatorics.
    model = build_ball_model(fan)
    chi = euler_characteristic(model.simplices)
    boundary_chi = euler_characteristic(model.boundary_simplices())
    pm = pseudomanifold_check(model)
    record(
        "ball_model",
        chi == 1 and boundary_chi == 1 + (-1) ** (n - 1) and pm.passed,
        euler=chi,
        boundary_euler=boundary_chi,
        top_simplices=len(model.maximal_simplices()),
        pseudomanifold=pm.passed,
        issues=list(pm.issues),
    )

    orbit = build_orbit_complex(fan)
    record(
        "orbit_complex",
        orbit.euler_characteristic() == 1 and len(orbit.top_cells()) == 1,
        euler=orbit.euler_characteristic(),
        top_cells=len(orbit.top_cells()),
    )

    glue = verify_gluing(atlas, samples_per_pair=50, tol=tol, seed=seed)
    record(
        "intersection_gluing",
        glue.passed,
        pairs=glue.pairs_checked,
        worst_shared_gap=glue.worst_shared_gap,
        counterexamples=glue.counterexamples[:5],
    )

    reg = verify_regularity(fan)
    record("regularity", reg.passed, cells=len(reg.cells))

    # Semigroup generation: minimality of every stored basis.
    min_ok = True
    for cone in fan.cones():
        sem = atlas.hilbert(cone)
        if _ck.minimality_violations(sem):
            min_ok = False
    record("hilbert_minimality", min_ok, cones=len(fan.cones()))

    # Semigroup law on embedded points.
    worst = 0.0
    for cone in fan.maximal_cones():
        for _ in range(10):
            x = tuple(Fraction(rng.randint(-2000, 2000), 1000) for _ in range(n))
            p = atlas.expi_point(x, cone)
            worst = max(worst, atlas.semigroup_residual(p))
    record("semigroup_law", worst <= tol, worst_gap=worst)

    if n == 2:
        flags = enumerate_flags(fan, only_maximal=True)
        vals = [nonextension_probe(atlas, flags[0], c, s) for c in (1.0, 2.0) for s in (0.5, 3.0, 9.0)]
        second = [v[1] for v in vals]
        stable = max(abs(second[i] - second[i + 1]) for i in (0, 1, 3, 4))
        separated = abs(second[0] - second[3]) > 0.1 * max(second[0], second[3])
        firsts_to_zero = vals[2][0] < 1e-10 and vals[5][0] < 1e-10
        record(
            "nonextension_probe",
            stable <= 1e-12 and separated and firsts_to_zero,
            second_coordinates=[second[0], second[3]],
        )

    passed = all(c["passed"] for c in checks)
    return {
        "fan": fan.name,
        "dim": fan.dim,
        "seed": seed,
        "tolerance": tol,
        "passed": passed,
        "checks": checks,
    }


def cmd_verify(args) -> int:
    if args.tol <= 0 or args.samples < 1:
        print("tolerance and sample count must be positive", file=sys.stderr)
        return EXIT_INVALID
    fan, code = _load_or_exit(args)
    if fan is None:
        return code
    report = run_verification(fan, tol=args.tol, samples=args.samples, seed=args.seed, tamper=args.tamper)
    _emit(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# mesh export
# ---------------------------------------------------------------------------


def _off_text(vertices, faces):
    lines = ["OFF", f"{len(vertices)} {len(faces)} 0"]
    for v in vertices:
        coords = list(v) + [0.0] * (3 - len(v))
        lines.append(" ".join(f"{c:.9f}" for c in coords))
    for f in faces:
        lines.append(" ".join([str(len(f))] + [str(i) for i in f]))
    return "\n".join(lines) + "\n"


def _mesh_sphere(fan: Fan, radius: float, res: int):
    """Triangulated image of the radius-r sphere under the rescaling map,
    sampled flag cone by flag cone."""
    vertices = []
    vertex_ids = {}
    faces = []

    def vid(point):
        key = tuple(round(c, 9) for c in point)
        if key not in vertex_ids:
            vertex_ids[key] = len(vertices)
            vertices.append(point)
        return vertex_ids[key]

    for flag in enumerate_flags(fan, only_maximal=True):
        gens = flag_cone(flag).generators
        if fan.dim == 2:
            # Simplicial coordinates scale with the point, so they come
            # straight from the interpolation weights; the closed polygon
            # is assembled from all boundary vertices afterwards.
            b1, b2 = gens
            for t in range(res + 1):
                a, c = (res - t) / res, t / res
                direction = tuple(a * x + c * y for x, y in zip(b1, b2))
                norm = math.sqrt(sum(v * v for v in direction))
                scale = radius / norm
                vid(_phi_point(gens, [a * scale, c * scale]))
        else:
            grid = {}
            b1, b2, b3 = gens
            for i in range(res + 1):
                for j in range(res + 1 - i):
                    k = res - i - j
                    direction = tuple(
                        i * x + j * y + k * z for x, y, z in zip(b1, b2, b3)
                    )
                    norm = math.sqrt(sum(v * v for v in direction))
                    scale = radius / norm
                    point = _phi_point(gens, [i * scale, j * scale, k * scale])
                    grid[(i, j)] = vid(point)
            for i in range(res):
                for j in range(res - i):
                    faces.append([grid[(i, j)], grid[(i + 1, j)], grid[(i, j + 1)]])
                    if j < res - i - 1:
                        faces.append([grid[(i + 1, j)], grid[(i + 1, j + 1)], grid[(i, j + 1)]])
    if fan.dim == 2:
        # Reassemble boundary segments into one closed polygon.
        order = sorted(range(len(vertices)), key=lambda i: math.atan2(vertices[i][1], vertices[i][0]))
        faces = [order]
    return vertices, faces


def _phi_point(gens, u):
    from .homeo import phi_coords

    v = phi_coords(u)
    out = [0.0] * len(gens[0])
    for vj, g in zip(v, gens):
        for i in range(len(out)):
            out[i] += vj * g[i]
    return tuple(out)


def _mesh_boundary(fan: Fan):
    """The limiting boundary model: one vertex per nonzero cone at its
    normalized barycenter, one (n-1)-simplex per maximal flag."""
    cones = [c for c in fan.cones() if c.dim > 0]
    ids = {}
    vertices = []
    for c in cones:
        b = barycenter(c)
        norm = math.sqrt(sum(v * v for v in b))
        ids[c.rays] = len(vertices)
        vertices.append(tuple(v / norm for v in b))
    faces = []
    for flag in enumerate_flags(fan, only_maximal=True):
        faces.append([ids[c.rays] for c in flag.cones])
    if fan.dim == 2:
        order = sorted(ids.values(), key=lambda i: math.atan2(vertices[i][1], vertices[i][0]))
        faces = [order]
    return vertices, faces


def cmd_mesh(args) -> int:
    fan, code = _load_or_exit(args)
    if fan is None:
        return code
    if fan.dim not in (2, 3):
        print("mesh export supports dimensions 2 and 3 only", file=sys.stderr)
        return EXIT_INVALID
    try:
        radii = [float(r) for r in args.radii.split(",")]
    except ValueError:
        print("could not parse --radii", file=sys.stderr)
        return EXIT_INVALID
    if args.res < 1 or any(r <= 0 for r in radii):
        print("resolution and radii must be positive", file=sys.stderr)
        return EXIT_INVALID
    outdir = Path(args.out or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for r in radii:
        vertices, faces = _mesh_sphere(fan, r, args.res)
        name = f"{fan.name}_r{r:g}.off"
        (outdir / name).write_text(_off_text(vertices, faces))
        written.append(name)
    vertices, faces = _mesh_boundary(fan)
    name = f"{fan.name}_boundary.off"
    (outdir / name).write_text(_off_text(vertices, faces))
    written.append(name)
    print(json.dumps({"written": written}, indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="toricball", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check fan axioms and completeness")
    p.add_argument("file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("charts", help="dump per-flag chart data")
    p.add_argument("file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_charts)

    p = sub.add_parser("param", help="evaluate the boundary parameterization")
    p.add_argument("file")
    p.add_argument("--flag", type=int, required=True)
    p.add_argument("--xi", type=str, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_param)

    p = sub.add_parser("verify", help="run the full certification suite")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.add_argument("--tamper", action="store_true", help="negative control: perturb one chart")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mesh", help="export OFF meshes of rescaled spheres")
    p.add_argument("file")
    p.add_argument("--radii", type=str, required=True)
    p.add_argument("--res", type=int, default=8)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_mesh)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
