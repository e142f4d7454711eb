import math

import numpy as np
import pytest

from sphcap.sampling import (
    Configuration,
    SeedSpec,
    fibonacci_s2,
    format_points,
    load_external,
    sample_density,
    sample_uniform,
)


def test_seed_spec_is_deterministic():
    a = SeedSpec(123, 7).generator().standard_normal(16)
    b = SeedSpec(123, 7).generator().standard_normal(16)
    assert np.array_equal(a, b)


def test_trials_give_distinct_streams():
    a = SeedSpec(123, 0).generator().standard_normal(16)
    b = SeedSpec(123, 1).generator().standard_normal(16)
    c = SeedSpec(124, 0).generator().standard_normal(16)
    assert not np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sample_uniform_shape_and_norms():
    for d in (1, 2, 3, 5):
        cfg = sample_uniform(d, 40, SeedSpec(5))
        assert cfg.points.shape == (40, d + 1)
        assert cfg.n == 40
        assert np.abs(np.linalg.norm(cfg.points, axis=1) - 1.0).max() < 1e-12


def test_sample_uniform_reproducible():
    a = sample_uniform(2, 100, SeedSpec(99, 3))
    b = sample_uniform(2, 100, SeedSpec(99, 3))
    assert np.array_equal(a.points, b.points)


def test_sample_uniform_is_roughly_uniform():
    # coordinate means ~ N(0, 1/(d+1)/n): a cheap sanity net, 5 sigma wide
    cfg = sample_uniform(2, 20000, SeedSpec(1234))
    sigma = 1.0 / math.sqrt(3.0 * 20000)
    assert np.abs(cfg.points.mean(axis=0)).max() < 5.0 * sigma


def test_sample_uniform_validation():
    with pytest.raises(ValueError):
        sample_uniform(0, 10, SeedSpec(1))
    with pytest.raises(ValueError):
        sample_uniform(2, 1, SeedSpec(1))


def test_configuration_rejects_bad_points():
    pts = sample_uniform(2, 10, SeedSpec(2)).points.copy()
    pts[3] *= 1.5
    pts[7] *= 0.5
    with pytest.raises(ValueError) as exc:
        Configuration(d=2, points=pts)
    assert "3" in str(exc.value) and "7" in str(exc.value)
    with pytest.raises(ValueError):
        Configuration(d=2, points=np.ones((10, 3)))  # wrong norms
    with pytest.raises(ValueError):
        Configuration(d=3, points=sample_uniform(2, 10, SeedSpec(2)).points)  # wrong width


def test_density_with_unit_eta_matches_uniform():
    # eta == 1 accepts every proposal, so the draw sequence is untouched
    uni = sample_uniform(3, 500, SeedSpec(42, 11))
    den = sample_density(3, 500, SeedSpec(42, 11), lambda x: np.ones(len(x)), 1.0)
    assert np.array_equal(uni.points, den.points)


def test_density_concentrates_where_eta_is_large():
    # eta ~ z^2 on S^2 pushes mass toward the poles
    def eta(x):
        return 3.0 * x[:, 2] ** 2 + 1e-12

    cfg = sample_density(2, 40000, SeedSpec(7), eta, 3.0)
    # E[z^2] under eta(z) dz/2 on [-1,1] is 3/5 vs 1/3 for uniform
    assert np.mean(cfg.points[:, 2] ** 2) == pytest.approx(0.6, abs=0.02)
    assert np.abs(np.linalg.norm(cfg.points, axis=1) - 1.0).max() < 1e-12


def test_density_rejects_bad_eta():
    with pytest.raises(ValueError):
        sample_density(2, 10, SeedSpec(1), lambda x: -np.ones(len(x)), 1.0)
    with pytest.raises(ValueError):
        sample_density(2, 10, SeedSpec(1), lambda x: 2.0 * np.ones(len(x)), 1.0)
    with pytest.raises(ValueError):
        sample_density(2, 10, SeedSpec(1), lambda x: np.ones(3), 1.0)
    with pytest.raises(ValueError):
        sample_density(2, 10, SeedSpec(1), lambda x: np.ones(len(x)), 0.0)


def test_density_proposal_budget():
    # acceptance probability 1e-12: the proposal budget must trip, not hang
    def eta(x):
        return np.full(len(x), 1e-12)

    with pytest.raises(ValueError, match="budget|proposals"):
        sample_density(2, 5, SeedSpec(3), eta, 1.0)


def test_fibonacci_points():
    cfg = fibonacci_s2(100)
    assert cfg.d == 2 and cfg.n == 100
    assert np.abs(np.linalg.norm(cfg.points, axis=1) - 1.0).max() < 1e-12
    # z-coordinates are the fixed lattice heights 1 - (2j-1)/n
    expect_z = 1.0 - (2.0 * np.arange(1, 101) - 1.0) / 100.0
    assert np.allclose(cfg.points[:, 2], expect_z, atol=1e-12)
    assert np.array_equal(cfg.points, fibonacci_s2(100).points)
    with pytest.raises(ValueError):
        fibonacci_s2(1)


def test_format_load_round_trip(tmp_path):
    cfg = sample_uniform(3, 25, SeedSpec(8))
    text = format_points(cfg, header=("a comment", "another"))
    path = tmp_path / "pts.txt"
    path.write_text(text)
    back = load_external(path)
    assert back.d == 3
    assert np.array_equal(back.points, cfg.points)


def test_load_external_errors(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1 0 0\n0 nope 0\n")
    with pytest.raises(ValueError, match="bad.txt:2"):
        load_external(p)
    p.write_text("1 0 0\n0 1\n")
    with pytest.raises(ValueError, match="expected 3 coordinates"):
        load_external(p)
    p.write_text("# only comments\n")
    with pytest.raises(ValueError, match="at least 2 points"):
        load_external(p)
    p.write_text("1 0 0\n0 2 0\n")
    with pytest.raises(ValueError, match="off the unit sphere"):
        load_external(p)


def test_load_external_renormalizes_small_drift(tmp_path):
    # 1e-10-level drift (beyond the strict Configuration tolerance) is repaired
    pts = sample_uniform(2, 6, SeedSpec(9)).points * (1.0 + 5e-10)
    p = tmp_path / "drift.txt"
    p.write_text("\n".join(" ".join(f"{v:.12g}" for v in row) for row in pts) + "\n")
    cfg = load_external(p)
    assert np.abs(np.linalg.norm(cfg.points, axis=1) - 1.0).max() < 1e-12
