"""Smoke tests for the Python bindings: import, evaluate, integrate, census."""

import math

import pytest

import geodex


TORUS_JSON = '{"manifold": {"kind": "periodic-lattice", "dimension": 2}, "kind": "riemannian"}'
PLANE_RANDERS_JSON = (
    '{"manifold": {"kind": "euclidean-plane", "dimension": 2},'
    ' "kind": "randers", "beta": [0.5, 0.0]}'
)


def test_import_and_metric_roundtrip():
    m = geodex.load_metric(TORUS_JSON)
    assert m.dimension == 2
    assert m.kind == "riemannian"
    assert len(m.id) == 16
    again = geodex.load_metric(m.to_json())
    assert again.id == m.id


def test_flat_norm_is_euclidean():
    m = geodex.load_metric(TORUS_JSON)
    assert geodex.F(m, [0.2, 0.7], [3.0, 4.0]) == pytest.approx(5.0, abs=1e-12)
    g = geodex.fundamental_tensor(m, [0.0, 0.0], [1.0, 2.0])
    assert g[0][0] == pytest.approx(1.0, abs=1e-12)
    assert g[0][1] == pytest.approx(0.0, abs=1e-12)


def test_randers_norm_matches_closed_form():
    m = geodex.load_metric(PLANE_RANDERS_JSON)
    assert not m.reversible
    # F = |v| + 0.5 * v_x at v = (1, 0).
    assert geodex.F(m, [0.0, 0.0], [1.0, 0.0]) == pytest.approx(1.5, abs=1e-12)


def test_sphere_equator_closes():
    m = geodex.sphere_metric(1.0)
    path = geodex.integrate(m, [math.pi / 2, 0.0], [0.0, 2.0 * math.pi], steps=2000)
    assert path.is_closed
    assert path.length == pytest.approx(2.0 * math.pi, abs=1e-9)


def test_torus_census_count():
    m = geodex.load_metric(TORUS_JSON)
    table = geodex.census(m, [0.0, 0.0], [0.3, 0.4], 2.0, with_hessian=False)
    assert table["oracle_exact"]
    assert len(table["entries"]) == 13
    assert table["entries"][0]["length"] == pytest.approx(0.5, abs=1e-9)
    assert all(e["index"] == 0 for e in table["entries"])


def test_equator_identity_passes():
    m = geodex.sphere_metric(1.0)
    equator = geodex.integrate(m, [math.pi / 2, 0.0], [0.0, 2.0 * math.pi], steps=2000)
    report = geodex.verify_identity(m, equator)
    assert report["result"] == "pass"
    assert report["lambda_periodic"] == 1
    assert report["lambda_dirichlet"] == 1
    assert report["dim_J0"] == 1
    assert report["dim_J0_cap_Jp"] == 1
    assert report["b_n_minus"] == 0
    assert report["concavity"] == 0


def test_domain_error_is_python_exception():
    m = geodex.sphere_metric(1.0)
    with pytest.raises(geodex.DomainError):
        geodex.connect(m, [math.pi / 2, 0.0], [math.pi / 2, 0.0], 1.0)
