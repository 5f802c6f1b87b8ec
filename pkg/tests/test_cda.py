import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gaborvfd.cda import CdaProjection, fit_cda, project, ridge_value, scatter_matrices
from gaborvfd.classifier import fit_nb, predict_many

from oracles import dense_cda


def blobs(rng, centers, n=30, noise=1.0):
    centers = np.asarray(centers, dtype=float)
    X = np.concatenate([c + noise * rng.standard_normal((n, centers.shape[1])) for c in centers])
    y = np.repeat(np.arange(len(centers)), n)
    return X, y


def test_scatter_hand_example():
    sc = scatter_matrices(np.array([[0.0], [0.0], [2.0], [2.0]]), [0, 0, 1, 1])
    assert sc.S_intra[0, 0] == 0 and sc.S_inter[0, 0] == 4 and sc.S_total[0, 0] == 4
    assert sc.global_mean.tolist() == [1.0]
    assert sc.class_counts.tolist() == [2, 2]


def test_identical_samples_zero_scatter():
    sc = scatter_matrices(np.ones((6, 3)), [0, 1, 2, 0, 1, 2])
    assert not sc.S_intra.any() and not sc.S_inter.any() and not sc.S_total.any()


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(1, 6), st.integers(0, 2 ** 32 - 1))
def test_scatter_additivity_and_symmetry(k, p, seed):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((4 * k, p)) * rng.uniform(0.1, 100)
    y = np.tile(np.arange(k), 4)
    sc = scatter_matrices(X, y)
    norm = np.linalg.norm(sc.S_total)
    assert np.linalg.norm(sc.S_intra + sc.S_inter - sc.S_total) <= 1e-8 * norm + 1e-300
    for S in (sc.S_intra, sc.S_inter, sc.S_total):
        assert np.max(np.abs(S - S.T)) <= 1e-10


def test_scatter_errors():
    with pytest.raises(ValueError, match="two classes"):
        scatter_matrices(np.ones((3, 2)), [1, 1, 1])
    with pytest.raises(ValueError):
        scatter_matrices(np.array([[np.nan], [1.0]]), [0, 1])
    with pytest.raises(ValueError):
        fit_cda(np.array([[np.inf], [1.0]]), [0, 1])


def test_leading_direction_diagonal(rng):
    X, y = blobs(rng, [[0, 0], [4, 4]], n=400, noise=0.5)
    proj = fit_cda(X, y, 1)
    # brute force on the explicitly computed 2x2 scatters
    _, V = dense_cda(X, y, 1e-6, 1)
    ref = V[0] * np.sign(V[0][0])
    assert np.allclose(proj.components[0], ref, atol=1e-6)
    assert np.allclose(proj.components[0], np.array([1, 1]) / np.sqrt(2), atol=0.1)


def test_axis_aligned_separation(rng):
    X = rng.standard_normal((60, 3))
    y = np.repeat([0, 1], 30)
    X[:, 0] = np.where(y == 0, -1.0, 1.0)  # only feature 1 differs, and without noise
    X[:, 1:] = np.tile(rng.standard_normal((30, 2)), (2, 1))  # identical spread per class
    proj = fit_cda(X, y, 1)
    assert np.allclose(np.abs(proj.components[0]), [1, 0, 0], atol=1e-6)


def test_rank_bound_three_classes(rng):
    X, y = blobs(rng, rng.standard_normal((3, 5)) * 3, n=20)
    proj = fit_cda(X, y, 5, cap=False)
    ev = proj.eigenvalues
    assert proj.n_components == 5
    assert np.all(np.diff(ev) <= 0) and ev.min() >= -1e-8
    assert np.all(np.abs(ev[2:]) < 1e-8 * ev[0])
    assert fit_cda(X, y, 10).n_components == 2


def test_component_cap_two_classes(rng):
    X, y = blobs(rng, [[0, 0, 0], [1, 2, 3]])
    assert fit_cda(X, y, 10).n_components == 1
    assert fit_cda(X, y, 10, cap=False).n_components == 3


def test_dense_oracle_twenty_instances():
    rng = np.random.default_rng(77)
    for _ in range(20):
        k = int(rng.integers(2, 5))
        p = int(rng.integers(2, 7))
        X, y = blobs(rng, rng.standard_normal((k, p)) * 2, n=int(rng.integers(8, 20)))
        X = X @ rng.standard_normal((p, p))  # correlated features
        proj = fit_cda(X, y, k - 1)
        ev, V = dense_cda(X, y, 1e-6, k - 1)
        assert np.allclose(proj.eigenvalues, ev, rtol=1e-6, atol=1e-9)
        for got, ref in zip(proj.components, V):
            assert min(np.max(np.abs(got - ref)), np.max(np.abs(got + ref))) <= 1e-6


def test_unit_norm_and_sign(rng):
    X, y = blobs(rng, rng.standard_normal((4, 6)) * 2)
    proj = fit_cda(X, y, 3)
    assert np.allclose(np.linalg.norm(proj.components, axis=1), 1)
    for row in proj.components:
        assert row[np.flatnonzero(np.abs(row) > 1e-12)[0]] > 0


def test_training_canonical_variables_uncorrelated(rng):
    X, y = blobs(rng, rng.standard_normal((5, 6)) * 2, n=40)
    Z = project(fit_cda(X, y, 4), X)
    corr = np.corrcoef(Z, rowvar=False)
    off = corr[~np.eye(4, dtype=bool)]
    assert np.max(np.abs(off)) < 1e-6


def test_unridged_canonical_variables_exactly_uncorrelated(rng):
    # correlated features give an ill-conditioned within-class scatter
    X, y = blobs(rng, rng.standard_normal((5, 6)) * 2, n=20)
    X = X @ rng.standard_normal((6, 6))
    Z = project(fit_cda(X, y, 4, ridge_scale=0.0), X)
    corr = np.corrcoef(Z, rowvar=False)
    assert np.max(np.abs(corr[~np.eye(4, dtype=bool)])) < 1e-10


def test_project_examples(rng):
    e1 = CdaProjection(np.array([[1.0, 0.0, 0.0]]), np.array([1.0]), 0.0)
    X = rng.standard_normal((5, 3))
    assert np.array_equal(project(e1, X)[:, 0], X[:, 0])
    assert not project(e1, np.zeros((4, 3))).any()
    with pytest.raises(ValueError, match="expected 3 features"):
        project(e1, np.zeros((2, 4)))


def test_degenerate_channel_uses_ridge_floor():
    X = np.zeros((6, 4))
    y = [0, 0, 0, 1, 1, 1]
    proj = fit_cda(X, y, 2)
    assert proj.ridge == 1e-12
    assert np.all(np.isfinite(proj.components))
    assert ridge_value(np.eye(4) * 2, 1e-6) == pytest.approx(2e-6)


def test_rescaling_keeps_predictions(rng):
    X, y = blobs(rng, rng.standard_normal((3, 4)) * 2, n=25)
    Xt, _ = blobs(rng, rng.standard_normal((3, 4)) * 2, n=5)

    def run(scale):
        proj = fit_cda(X * scale, y, 2)
        nb = fit_nb(project(proj, X * scale), y)
        return proj, predict_many(nb, project(proj, Xt * scale))

    p1, a = run(1.0)
    p2, b = run(37.5)
    assert np.array_equal(a, b)
    assert np.array_equal(np.argsort(-p1.eigenvalues), np.argsort(-p2.eigenvalues))


def test_serialization_roundtrip(tmp_path, rng):
    X, y = blobs(rng, rng.standard_normal((4, 5)))
    proj = fit_cda(X, y, 3)
    proj.save(tmp_path / "p.csv")
    back = CdaProjection.load(tmp_path / "p.csv")
    assert np.array_equal(back.components, proj.components)
    assert np.array_equal(back.eigenvalues, proj.eigenvalues)
    assert back.ridge == proj.ridge
    text = (tmp_path / "p.csv").read_text()
    assert text.startswith("# cda-projection v1\n") and "# shape=3x5" in text


def test_load_rejects_other_versions(tmp_path):
    (tmp_path / "p.csv").write_text("# cda-projection v9\n# shape=1x1\n1.0\n")
    with pytest.raises(ValueError, match="unsupported"):
        CdaProjection.load(tmp_path / "p.csv")


def test_explained_fraction(rng):
    X, y = blobs(rng, rng.standard_normal((4, 5)) * 3)
    ex = fit_cda(X, y, 3).explained()
    assert np.all(np.diff(ex) >= 0) and ex[-1] == pytest.approx(1.0)
