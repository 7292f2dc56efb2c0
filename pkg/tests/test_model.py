import numpy as np
import pytest

from contactproj.algebra import basis, sl_projective, sp_contact
from contactproj.group import (
    exp_element,
    identity_element,
    random_graded_exponential,
    random_subgroup_element,
    random_symplectic,
    Subgroup,
)
from contactproj.model import (
    CurveKind,
    TangentInContactPlane,
    TangentNotInContactPlane,
    chain_through,
    circle_hausdorff,
    circle_plane,
    contact_form_value,
    contact_geodesic_through,
    curve_meta,
    distance_to_circle,
    first_column_ray_equal,
    flow_curve,
    is_great_circle,
    map_curve,
    project,
    ray,
    symplectic_frame,
    theta_along,
)

SP1 = sp_contact(1)
SP2 = sp_contact(2)


def e(i, size):
    v = np.zeros(size)
    v[i] = 1.0
    return v


def random_tangent(x, rng):
    v = rng.normal(size=len(x.rep))
    return v - x.rep * float(np.dot(v, x.rep))


def random_contact_tangent(x, rng, om):
    # tangent and in ker(Omega(x, .)): project off rep and off the theta-dual
    v = random_tangent(x, rng)
    w = om.T @ x.rep  # theta = <w, .>
    w = w - x.rep * float(np.dot(w, x.rep))
    return v - w * (float(np.dot(v, w)) / float(np.dot(w, w)))


def omf(n):
    from contactproj import rational as rt
    from contactproj.algebra import omega_matrix

    return rt.to_float(omega_matrix(sp_contact(n)))


def test_project_identity():
    p = project(identity_element(SP1))
    assert np.allclose(p.rep, e(0, 4))


def test_project_g_minus2_flow_oracle():
    # oracle: exp(t x) = I + t x for the nilpotent generator, then normalize
    t = 0.75
    g = exp_element(basis(SP1, -2)[0], t)
    p = project(g)
    expect = (e(0, 4) + t * e(3, 4)) / np.sqrt(1 + t * t)
    assert np.allclose(p.rep, expect, atol=1e-15)


def test_project_invariant_under_p():
    rng = np.random.default_rng(31)
    for _ in range(100):
        g = random_graded_exponential(SP1, rng, [-2, -1, 1, 2], height=1)
        p = random_subgroup_element(SP1, Subgroup.P, rng, height=1)
        assert first_column_ray_equal(g @ p, g)


def test_contact_form_values():
    x = ray(SP1, e(0, 4))
    assert contact_form_value(x, np.zeros(4)) == 0.0
    assert contact_form_value(x, e(3, 4)) == 1.0
    assert contact_form_value(x, e(1, 4)) == 0.0
    with pytest.raises(ValueError, match="not tangent"):
        contact_form_value(x, e(0, 4))


def test_flow_curve_grade_minus1_plane():
    x = basis(SP1, -1)[0]
    c = flow_curve(identity_element(SP1), x)
    assert c.kind is CurveKind.CONTACT_GEODESIC
    # spans only e1, e2
    assert np.abs(c.points[:, 2:]).max() < 1e-15
    ok, res = is_great_circle(c)
    assert ok and res < 1e-12
    assert np.abs(theta_along(c)).max() < 1e-15


def test_flow_curve_grade_minus2_transverse():
    x = basis(SP2, -2)[0]
    c = flow_curve(identity_element(SP2), x)
    assert c.kind is CurveKind.CHAIN
    keep = np.abs(c.points[:, 1:5]).max()
    assert keep < 1e-15  # lives in span{e1, e6}
    th = np.abs(theta_along(c))
    assert th.min() > 1e-6
    ok, _ = is_great_circle(c)
    assert ok


def test_flow_curve_kind_mismatch():
    with pytest.raises(ValueError):
        flow_curve(identity_element(SP1), basis(SP1, -2)[0], kind=CurveKind.CONTACT_GEODESIC)


def test_chain_through_standard_frame():
    x = ray(SP1, e(0, 4))
    c = chain_through(x, e(3, 4))
    base = flow_curve(identity_element(SP1), basis(SP1, -2)[0])
    assert np.allclose(c.points, base.points, atol=1e-12)


def test_chain_through_rejects_contact_direction():
    x = ray(SP1, e(0, 4))
    with pytest.raises(TangentInContactPlane):
        chain_through(x, e(1, 4))


def test_geodesic_through_rejects_transverse_direction():
    x = ray(SP1, e(0, 4))
    with pytest.raises(TangentNotInContactPlane):
        contact_geodesic_through(x, e(3, 4))


@pytest.mark.parametrize("n", [1, 2])
def test_chain_through_random_pairs(n):
    rng = np.random.default_rng(100 + n)
    om = omf(n)
    d = sp_contact(n)
    for _ in range(25):
        x = ray(d, rng.normal(size=2 * n + 2))
        v = random_tangent(x, rng)
        if abs(float(x.rep @ om @ v)) < 1e-6:
            continue
        c = chain_through(x, v)
        ok, res = is_great_circle(c)
        assert ok and res < 1e-9
        assert np.abs(theta_along(c)).min() > 1e-6
        # passes through x with tangent along v
        assert np.linalg.norm(c.points[len(c) // 2] - x.rep) < 1e-12
        t0 = c.tangents[len(c) // 2]
        cosang = abs(float(np.dot(t0, v))) / (np.linalg.norm(t0) * np.linalg.norm(v))
        assert cosang > 1 - 1e-10


@pytest.mark.parametrize("n", [1, 2])
def test_contact_geodesic_through_random_pairs(n):
    rng = np.random.default_rng(200 + n)
    om = omf(n)
    d = sp_contact(n)
    for _ in range(25):
        x = ray(d, rng.normal(size=2 * n + 2))
        v = random_contact_tangent(x, rng, om)
        if np.linalg.norm(v) < 1e-3:
            continue
        c = contact_geodesic_through(x, v)
        ok, res = is_great_circle(c)
        assert ok and res < 1e-9
        assert np.abs(theta_along(c)).max() < 1e-9
        assert np.linalg.norm(c.points[len(c) // 2] - x.rep) < 1e-10


def test_chain_uniqueness_under_frame_change():
    rng = np.random.default_rng(41)
    om = omf(1)
    for _ in range(10):
        x = ray(SP1, rng.normal(size=4))
        v = random_tangent(x, rng)
        if abs(float(x.rep @ om @ v)) < 1e-6:
            continue
        c1 = chain_through(x, v, variant=0)
        c2 = chain_through(x, v, variant=7)
        f1 = np.array(c1.meta["frame"])
        f2 = np.array(c2.meta["frame"])
        assert not np.allclose(f1, f2)  # genuinely different frames
        assert np.allclose(c1.points, c2.points, atol=1e-12)
        assert circle_hausdorff(c1, c2) < 1e-8


def test_is_great_circle_counterexample():
    ts = np.linspace(-3, 3, 121)
    pts = np.column_stack(
        [np.cos(ts), np.sin(ts), np.full_like(ts, 0.0), np.zeros_like(ts)]
    )
    noise = 1e-3 * np.sin(7 * ts)
    noisy = pts.copy()
    noisy[:, 2] = noise
    noisy /= np.linalg.norm(noisy, axis=1)[:, None]
    from contactproj.model import ModelCurve

    clean = ModelCurve(ts, pts, np.zeros_like(pts), CurveKind.GENERIC, SP1)
    bent = ModelCurve(ts, noisy, np.zeros_like(noisy), CurveKind.GENERIC, SP1)
    ok, res = is_great_circle(clean, tol=1e-12)
    assert ok and res < 1e-12
    ok2, res2 = is_great_circle(bent, tol=1e-6)
    assert not ok2 and res2 > 1e-6


def test_union_property_every_direction():
    # through any x, every tangent direction gives exactly one curve type,
    # and the curve is the great circle spanned by x and the direction
    rng = np.random.default_rng(53)
    om = omf(1)
    for _ in range(40):
        x = ray(SP1, rng.normal(size=4))
        v = random_tangent(x, rng)
        theta = float(x.rep @ om @ v)
        if abs(theta) >= 1e-6:
            c = chain_through(x, v)
            with pytest.raises(TangentNotInContactPlane):
                contact_geodesic_through(x, v)
        else:
            c = contact_geodesic_through(x, v)
            with pytest.raises(TangentInContactPlane):
                chain_through(x, v)
        ok, _ = is_great_circle(c)
        assert ok
        plane = circle_plane(c.points)
        assert distance_to_circle(v / np.linalg.norm(v), plane) < 1e-9


def test_symplectic_maps_send_chains_to_chains():
    rng = np.random.default_rng(61)
    om = omf(1)
    for _ in range(20):
        x = ray(SP1, rng.normal(size=4))
        v = random_tangent(x, rng)
        if abs(float(x.rep @ om @ v)) < 1e-6:
            continue
        c = chain_through(x, v)
        g = random_symplectic(1, rng)
        img = map_curve(g, c)
        mid = len(img) // 2
        rebuilt = chain_through(ray(SP1, img.points[mid]), img.tangents[mid])
        assert circle_hausdorff(img, rebuilt) < 1e-8


def test_symplectic_frame_validates():
    rng = np.random.default_rng(71)
    u = rng.normal(size=6)
    u /= np.linalg.norm(u)
    om = omf(2)
    c = rng.normal(size=6)
    c /= float(u @ om @ c)
    g = symplectic_frame(u, c)
    gf = g.to_float()
    assert np.allclose(gf[:, 0], u)
    assert np.allclose(gf[:, 5], c)


def test_curve_meta_fields():
    c = chain_through(ray(SP1, e(0, 4)), e(3, 4))
    meta = curve_meta(c)
    assert meta["kind"] == "chain"
    assert meta["is_great_circle"]
    assert meta["theta_abs_min"] > 1e-6


def test_csv_export(tmp_path):
    from contactproj.model import curve_to_csv

    c = chain_through(ray(SP1, e(0, 4)), e(3, 4), n_samples=11)
    out = tmp_path / "curve.csv"
    curve_to_csv(c, out)
    lines = out.read_text().splitlines()
    assert len(lines) == 12
    assert lines[0].split(",")[0] == "t"
    assert lines[0].split(",")[-1] == "contact_form"
