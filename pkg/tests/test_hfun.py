import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cantor_hfun.exceptions import ConsistencyError, GeometryError
from cantor_hfun.hfun import (HCurve, MobiusFrame, arc_radius, build_curve, constant_approximation_error,
                              h_intercept_center, h_intercept_left, make_frame, mobius_phi,
                              mobius_psi, phi_field, psi_field, sample_angles, step_heights)
from cantor_hfun.oracle import h_exact_single_slit
from cantor_hfun.reference import STEPS_CENTER, STEPS_LEFT

C, R = 0.2 + 0.0j, 0.15
FRAME = MobiusFrame(circle=0, center=C, radius=R, xi=C + R * np.exp(2.2j), xi1=float(C.real - R))


@pytest.mark.parametrize("level", [1, 2, 3])
def test_step_heights_left(pipeline, level):
    om = step_heights(pipeline(level, "left").sigma0, "left")
    assert np.abs(om - STEPS_LEFT[level]).max() <= 1e-6


@pytest.mark.parametrize("level", [2, 3])
def test_step_heights_center(pipeline, level):
    om = step_heights(pipeline(level, "center").sigma0, "center")
    assert np.abs(om - STEPS_CENTER[level]).max() <= 1e-6


def test_step_heights_increase(pipeline):
    for bp in ("left", "center"):
        assert np.all(np.diff(step_heights(pipeline(3, bp).sigma0, bp)) > 0)


def test_mobius_anchor_images():
    xi, xi1 = FRAME.xi, FRAME.xi1
    got = mobius_psi(np.array([np.conj(xi), xi1, xi]), xi, xi1)
    assert np.abs(got - np.array([-1j, 1, 1j])).max() <= 1e-13
    assert abs(mobius_phi(1) + 1) <= 1e-13 and abs(mobius_phi(1j)) <= 1e-13
    assert mobius_phi(0) == pytest.approx(1j, abs=1e-15)
    assert not np.isfinite(mobius_phi(-1j))


def test_mobius_psi_maps_circle_and_exterior():
    pts = C + R * np.exp(1j * np.linspace(0, 2 * np.pi, 16, endpoint=False) + 0.1j)
    assert np.allclose(np.abs(mobius_psi(pts, FRAME.xi, FRAME.xi1)), 1, atol=1e-13)
    assert abs(mobius_psi(-1.3, FRAME.xi, FRAME.xi1)) < 1


def test_mobius_psi_pole_is_infinite():
    xi, xi1 = FRAME.xi, FRAME.xi1
    xb = np.conj(xi)
    # solve den = 0 for zeta
    pole = (xb * (xi1 - xi) + 1j * xi * (xi1 - xb)) / ((xi1 - xi) + 1j * (xi1 - xb))
    assert not np.isfinite(mobius_psi(pole, xi, xi1))


@settings(max_examples=30)
@given(st.floats(0, 0.99), st.floats(0, 2 * np.pi))
def test_mobius_phi_upper_half_plane(rad, ang):
    assert mobius_phi(rad * np.exp(1j * ang)).imag > 0


def test_psi_field_arc_values():
    theta = 2.2
    on_near = C + R * np.exp(1j * np.pi)              # midpoint of the arc through xi1
    on_far = C + R * np.exp(1j * 0.0)                 # midpoint of the complementary arc
    assert psi_field(on_near, FRAME) == pytest.approx(1.0, abs=1e-10)
    assert psi_field(on_far, FRAME) == pytest.approx(0.0, abs=1e-10)
    v = psi_field(-1.0, FRAME)
    assert 0 < v < 1
    with pytest.raises(GeometryError):
        psi_field(FRAME.xi, FRAME)


def test_phi_field_mirror_identity():
    rng = np.random.default_rng(7)
    pts = rng.uniform(-1, 1, 50) + 1j * rng.uniform(-1, 1, 50)
    pts = pts[np.abs(pts - C) > R * 1.01]
    pts = pts[np.abs(pts + C) > R * 1.01]
    assert np.allclose(phi_field(pts, FRAME), psi_field(-pts, FRAME), atol=1e-14)
    v = phi_field(pts, FRAME)
    assert np.all((v >= 0) & (v <= 1))
    assert phi_field(-C + R, FRAME) == pytest.approx(1.0, abs=1e-10)
    assert phi_field(-C - R, FRAME) == pytest.approx(0.0, abs=1e-10)


def test_frame_validation():
    with pytest.raises(GeometryError):
        MobiusFrame(0, C, R, xi=C + R * np.exp(-2.2j), xi1=float(C.real - R))
    with pytest.raises(GeometryError):
        MobiusFrame(0, C, R, xi=C + 2 * R, xi1=float(C.real - R))


def test_level_zero_matches_closed_form(pipeline):
    pipe = pipeline(0, "left")
    pts = np.array([h_intercept_left(pipe, 1, th) for th in sample_angles()])
    assert np.abs(pts[:, 1] - h_exact_single_slit(pts[:, 0])).max() <= 1e-6
    assert np.all(np.diff(pts[::-1, 0]) > 0)


@pytest.mark.parametrize("bp", ["left", "center"])
def test_arc_ends_meet_steps(pipeline, bp):
    pipe = pipeline(2, bp)
    om = np.concatenate([[0], step_heights(pipe.sigma0, bp), [1]])
    n_arcs = 4 if bp == "left" else 2
    for k in range(1, n_arcs + 1):
        fn = h_intercept_left if bp == "left" else h_intercept_center
        assert abs(fn(pipe, k, np.pi - 1e-9)[1] - om[k - 1]) <= 1e-4
        assert abs(fn(pipe, k, 1e-9)[1] - om[k]) <= 1e-4


def test_center_symmetry_audit(pipeline):
    pipe = pipeline(3, "center")
    for k in (1, 2, 4):
        for th in (0.4, 1.7, 2.9):
            a = h_intercept_center(pipe, k, th)
            b = h_intercept_center(pipe, k, th, mirrored=True)
            assert abs(a[1] - b[1]) <= 1e-10 and a[0] == b[0]


def test_center_level_one_curve(pipeline):
    curve = build_curve(pipeline(1, "center"))
    arc = curve.arcs[1]
    assert arc[0, 1] > 0 and arc[-1, 1] < 1
    assert np.all(np.diff(arc[:, 2]) > 0) and np.all(np.diff(arc[:, 1]) > 0)
    assert arc[:, 1].min() > 1 / 6 and arc[:, 1].max() < 0.5
    assert curve.zero_threshold == pytest.approx(1 / 6) and curve.one_threshold == 0.5


def test_wrong_basepoint_rejected(pipeline):
    with pytest.raises(ValueError):
        h_intercept_center(pipeline(1, "left"), 1, 1.0)
    with pytest.raises(ValueError):
        h_intercept_left(pipeline(1, "left"), 3, 1.0)


def test_level_four_curve_shape(pipeline):
    curve = build_curve(pipeline(4, "left"))
    assert len(curve.steps) == 15 and len(curve.arcs) == 16
    merged = curve.merged()
    assert np.all(np.diff(merged[:, 1]) >= -1e-6)
    assert merged[:, 1].min() >= 0 and merged[:, 1].max() <= 1
    assert curve.continuity_error <= 1e-4
    center = build_curve(pipeline(4, "center"))
    assert len(center.steps) == 7 and len(center.arcs) == 8


def test_approximation_diagnostic_reported(pipeline):
    pipe = pipeline(2, "left")
    err = constant_approximation_error(pipe, 2, 1.5)
    assert err[1] == 0 and np.all(err[[0, 2, 3]] > 0) and err.max() < 0.05


def test_csv_export_is_deterministic(pipeline):
    curve = build_curve(pipeline(1, "left"))
    text = curve.to_csv()
    assert text == build_curve(pipeline(1, "left")).to_csv()
    lines = text.splitlines()
    assert lines[0] == "r,h,segment_type,slit_index"
    assert lines[1] == "0,0,step,0" and lines[2] == "1,0,step,0"
    assert lines[-1] == "2,1,step,2"
    r = [float(x.split(",")[0]) for x in lines[1:]]
    assert np.all(np.diff(r) >= 0)
    assert "1.33333333333,0.605278194917,step,1" in lines


def test_monotonicity_violation_raises(pipeline, monkeypatch):
    import cantor_hfun.hfun as hf
    pipe = pipeline(1, "left")
    real = hf.h_intercept
    monkeypatch.setattr(hf, "h_intercept", lambda p, k, th: (real(p, k, th)[0], 0.5 * real(p, k, th)[1]))
    with pytest.raises(ConsistencyError):
        build_curve(pipe)
