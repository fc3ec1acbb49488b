"""Chart matrices, monomial maps, intrinsic points, localization."""

import math
import random
from fractions import Fraction

import pytest

import toricball as tb
from toricball.bary import Flag
from toricball.charts import (
    Atlas,
    NotInImage,
    NotInOpenSet,
    ToricPoint,
    exp_flag,
    invert_triangular,
    monomial_eval,
    psi_eval,
    psi_invert,
    theta,
    theta_preimage,
)

TWO_PI = 2 * math.pi


def _chart(atlas, *raysets):
    fan = atlas.fan
    return atlas.chart(Flag(tuple(fan.cone(r) for r in raysets)))


def test_p2_chart_matrices(atlas_p2):
    # Hand-paired against B = (e1, (1,1)): triangular picks (1,1), (0,1),
    # then the leftover Hilbert element (1,0).
    chart = _chart(atlas_p2, {0}, {0, 1})
    assert chart.generators == ((1, 1), (0, 1), (1, 0))
    assert chart.c == ((1, 2), (0, 1), (1, 1))
    assert chart.b == ((1, 1), (0, 1), (1, 0))
    assert chart.beta == ((1, -1), (0, 1))


def test_p1_chart():
    atlas = Atlas(tb.load_bundled("p1"))
    charts = atlas.charts()
    assert len(charts) == 2
    for chart in charts:
        assert chart.c == ((1,),)
        assert chart.b == ((1,),)
        # psi is the identity in rank one.
        assert psi_eval(chart, (0.37,)) == (0.37,)


def test_p1xp1_charts_unit_diagonal(atlas_p1xp1):
    for chart in atlas_p1xp1.charts():
        n = chart.n
        for i in range(n):
            assert chart.b[i][i] > 0
            assert all(chart.b[i][j] == 0 for j in range(i))


def test_last_triangular_row_concentrated(atlas_p2):
    # The row of the generator interior to the last dual face has all
    # its exponent weight in the final column.
    for chart in atlas_p2.charts():
        n = chart.n
        assert all(chart.b[n - 1][j] == 0 for j in range(n - 1))
        assert chart.b[n - 1][n - 1] > 0


def test_theta_four_coordinates():
    z = (2.0, 3.0, 5.0, 7.0)
    assert theta(z) == (2 * 3 * 5 * 7, 3 * 5 * 7, 5 * 7, 7)


def test_theta_examples():
    assert theta((1.0, 1.0, 1.0)) == (1.0, 1.0, 1.0)
    assert theta((0.5, 0.5)) == (0.25, 0.5)


def test_theta_image_in_simplex():
    rng = random.Random(5)
    for _ in range(200):
        w = theta([rng.random() for _ in range(4)])
        assert all(a <= b for a, b in zip(w, w[1:]))
        assert w[-1] <= 1.0


def test_theta_preimage():
    w = (0.25, 0.5)
    assert theta(theta_preimage(w)) == w
    # Zero suffix: w2 = 0 forces the convention z1 = 1.
    assert theta_preimage((0.0, 0.0, 0.5)) == (1.0, 0.0, 0.5)
    assert theta(theta_preimage((0.0, 0.0, 0.5))) == (0.0, 0.0, 0.5)


def test_psi_eval_examples(atlas_p2):
    chart = _chart(atlas_p2, {0}, {0, 1})
    # Rows are (w1*w2, w2, w1); the Hilbert rows give the chart point.
    assert psi_eval(chart, (1.0, 1.0)) == (1.0, 1.0, 1.0)
    y = psi_eval(chart, (0.0, 0.5))
    assert y == (0.0, 0.5, 0.0)


def test_monomial_zero_conventions():
    assert monomial_eval((0, 0), (0.0, 0.0)) == 1.0
    assert monomial_eval((2, 0), (0.0, 0.7)) == 0.0


def test_invert_triangular_by_hand():
    b = ((1, 1), (0, 1))
    assert invert_triangular(b, (0.12, 0.4)) == (0.12 / 0.4, 0.4)
    assert invert_triangular(b, (0.0, 0.5)) == (0.0, 0.5)
    assert invert_triangular(b, (1.0, 1.0)) == (1.0, 1.0)


def test_psi_invert_roundtrip(atlas_p2):
    chart = _chart(atlas_p2, {0}, {0, 1})
    rng = random.Random(11)
    for _ in range(300):
        w = tuple(sorted(rng.random() for _ in range(2)))
        back = psi_invert(chart, psi_eval(chart, w))
        assert max(abs(a - b) for a, b in zip(w, back)) < 1e-10
    # Boundary strata with zero prefixes.
    for w in [(0.0, 0.6), (0.0, 0.0)]:
        back = psi_invert(chart, psi_eval(chart, w))
        assert back == w


def test_invert_triangular_synthetic_family():
    # The inversion works for any nonnegative upper-triangular exponent
    # matrix with positive diagonal, not just chart-derived ones.
    rng = random.Random(23)
    for _ in range(150):
        n = rng.randint(1, 4)
        b = [[0] * n for _ in range(n)]
        for i in range(n):
            b[i][i] = rng.randint(1, 3)
            for j in range(i + 1, n):
                b[i][j] = rng.randint(0, 3)
        prefix = rng.randint(0, n)
        tail = sorted(rng.random() for _ in range(n - prefix))
        w = tuple([0.0] * prefix + tail)
        y = [monomial_eval(row, w) for row in b]
        back = invert_triangular(b, y)
        assert max(abs(a - c) for a, c in zip(w, back)) < 1e-10


def test_psi_invert_rejects_off_image(atlas_p2):
    chart = _chart(atlas_p2, {0}, {0, 1})
    # Consistent triangular part but broken extra coordinate.
    with pytest.raises(NotInImage):
        psi_invert(chart, (0.12, 0.4, 0.9))


def test_expi_embed_rank1():
    atlas = Atlas(tb.load_bundled("p1"))
    cone = atlas.fan.cone({0})
    p = atlas.expi_point((Fraction(3, 2),), cone)
    assert p.values == (math.exp(-TWO_PI * 1.5),)
    q = atlas.expi_point((0,), cone)
    assert q.values == (1.0,)


def test_expi_embed_p2(atlas_p2):
    # x = u1*e1 + u2*(1,1): values e^(-2pi u2) on (0,1), e^(-2pi(u1+u2))
    # on (1,0) (Hilbert order is lexicographic).
    u1, u2 = Fraction(1, 3), Fraction(1, 5)
    x = (u1 + u2, u2)
    cone = atlas_p2.fan.cone({0, 1})
    sem = atlas_p2.hilbert(cone)
    assert sem.generators == ((0, 1), (1, 0))
    p = atlas_p2.expi_point(x, cone)
    assert abs(p.values[0] - math.exp(-TWO_PI * float(u2))) < 1e-15
    assert abs(p.values[1] - math.exp(-TWO_PI * float(u1 + u2))) < 1e-15


def test_commutativity_residual(atlas_p2):
    chart = _chart(atlas_p2, {0}, {0, 1})
    assert atlas_p2.commutativity_residual(chart, (0, 0)) == 0.0
    assert atlas_p2.commutativity_residual(chart, (3, 2)) <= 1e-12
    rng = random.Random(2)
    for chart in atlas_p2.charts():
        for _ in range(50):
            u = [Fraction(rng.randint(0, 4000), 1000) for _ in range(2)]
            x = tuple(
                u[0] * g0 + u[1] * g1
                for g0, g1 in zip(*[tb.flag_cone(chart.flag).generators[i] for i in (0, 1)])
            )
            assert atlas_p2.commutativity_residual(chart, x) <= 1e-9


def test_localize_interior_point(atlas_p2):
    cone = atlas_p2.fan.cone({0, 1})
    p = atlas_p2.expi_point((Fraction(1, 2), Fraction(1, 3)), cone)
    for face in atlas_p2.fan.faces(cone):
        q = atlas_p2.localize(p, face)
        assert all(v > 0 for v in q.values)


def test_localize_boundary_blocked():
    atlas = Atlas(tb.load_bundled("p1"))
    cone = atlas.fan.cone({0})
    fixed = ToricPoint(cone=cone, values=(0.0,), provenance="fixed")
    with pytest.raises(NotInOpenSet):
        atlas.localize(fixed, atlas.fan.zero_cone())


def test_localize_torus_coordinate_preserved(atlas_p1xp1):
    # Carrier quadrant: Hilbert order ((0,1),(1,0)); the point has value
    # 0 at e2* and 0.5 at e1*, so it lies on the y = 0 divisor with
    # invertible x and localizes to the cone(e2) chart.
    fan = atlas_p1xp1.fan
    quadrant = fan.cone({0, 1})
    assert atlas_p1xp1.hilbert(quadrant).generators == ((0, 1), (1, 0))
    p = ToricPoint(cone=quadrant, values=(0.0, 0.5), provenance="test")
    tau = fan.cone({1})
    q = atlas_p1xp1.localize(p, tau)
    assert atlas_p1xp1.hilbert(tau).generators == ((0, 1), (1, 0), (-1, 0))
    assert q.values == (0.0, 0.5, 2.0)
    # It does not localize off the divisor.
    with pytest.raises(NotInOpenSet):
        atlas_p1xp1.localize(p, fan.zero_cone())


def test_points_equal_same_point(atlas_p2):
    cone = atlas_p2.fan.cone({0, 1})
    p = atlas_p2.expi_point((Fraction(1, 4), Fraction(2, 3)), cone)
    assert atlas_p2.points_equal(p, p)


def test_points_equal_cross_chart(atlas_p2):
    # The same x through two charts sharing the ray cone(e1).
    fan = atlas_p2.fan
    x = (Fraction(5, 2), Fraction(0))  # on the shared ray
    p = atlas_p2.expi_point(x, fan.cone({0, 1}), provenance="a")
    q = atlas_p2.expi_point(x, fan.cone({0, 2}), provenance="b")
    assert atlas_p2.points_equal(p, q, tol=1e-9)
    # A nearby but different point is distinct.
    r = atlas_p2.expi_point((Fraction(5, 2), Fraction(1, 10)), fan.cone({0, 1}))
    assert not atlas_p2.points_equal(q, r, tol=1e-9)


def test_points_equal_fixed_points_differ(atlas_p2):
    fan = atlas_p2.fan
    a = fan.cone({0, 1})
    b = fan.cone({1, 2})
    pa = ToricPoint(cone=a, values=(0.0, 0.0), provenance="fix-a")
    pb = ToricPoint(cone=b, values=tuple([0.0] * len(atlas_p2.hilbert(b).generators)), provenance="fix-b")
    assert not atlas_p2.points_equal(pa, pb)


def test_semigroup_residual_singular():
    atlas = Atlas(tb.load_bundled("p112"))
    cone = atlas.fan.cone({0, 2})
    sem = atlas.hilbert(cone)
    # The singular cone carries the relation h1 + h3 = 2 h2.
    assert sem.generators == ((0, -1), (1, -1), (2, -1))
    p = atlas.expi_point((Fraction(1, 3), Fraction(-1, 2)), cone)
    assert atlas.semigroup_residual(p) < 1e-12
    broken = ToricPoint(cone=cone, values=(0.5, 0.5, 0.7), provenance="broken")
    assert atlas.semigroup_residual(broken) > 0.01


def test_concurrent_reads_consistent(atlas_p2):
    # Charts/hilbert caches are warm here, so parallel readers must see
    # identical results to the serial baseline.
    from concurrent.futures import ThreadPoolExecutor

    fan = atlas_p2.fan
    atlas_p2.charts()  # warm
    # Points with x >= y >= 0 lie in the first chart's flag cone.
    xs = [(Fraction(k + 5, 3), Fraction(k, 4)) for k in range(20)]
    chart = atlas_p2.charts()[0]

    def job(x):
        p = atlas_p2.expi_point(x, fan.cone({0, 1}))
        q = atlas_p2.expi_point(x, fan.cone({0, 2}))
        return (
            atlas_p2.commutativity_residual(chart, x),
            atlas_p2.points_equal(p, q),
        )

    serial = [job(x) for x in xs]
    with ThreadPoolExecutor(max_workers=8) as pool:
        parallel = list(pool.map(job, xs))
    assert serial == parallel


def test_chart_point_extracts_hilbert_rows(atlas_p2):
    chart = _chart(atlas_p2, {0}, {0, 1})
    p = atlas_p2.chart_point(chart, (0.3, 0.4))
    # Hilbert generators of the orthant dual are ((0,1),(1,0)):
    # values (w2, w1).
    assert p.values == (0.4, 0.3)
