import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from youngop import errors
from youngop import operator_young as oy
from youngop import scalar_young as sy
from youngop import verify as vf
from youngop.operator_young import SandwichCondition
from youngop.symcalc import SpdMatrix, identity, loewner_cmp


# -- configuration ------------------------------------------------------------


@pytest.mark.parametrize("kwargs", [
    {"spectrum_range": (0.0, 1.0)},
    {"spectrum_range": (2.0, 1.0)},
    {"spectrum_range": (1.0, math.inf)},
    {"dim": 0},
    {"dim": 65},
    {"trials": 0},
    {"seed": -1},
    {"seed": 2**64},
])
def test_config_rejects(kwargs):
    with pytest.raises(ValueError):
        vf.GeneratorConfig(**kwargs)


def test_trial_streams_are_independent_and_repeatable():
    x1 = vf.trial_rng(3, "k", 1).uniform(size=4)
    x2 = vf.trial_rng(3, "k", 1).uniform(size=4)
    y = vf.trial_rng(3, "k", 2).uniform(size=4)
    np.testing.assert_array_equal(x1, x2)
    assert not np.array_equal(x1, y)


# -- generators ------------------------------------------------------------------


def test_random_spd_dim_one_in_range():
    cfg = vf.GeneratorConfig(seed=5, dim=1, spectrum_range=(0.5, 2.0))
    x = vf.random_spd(cfg).a[0, 0]
    assert 0.5 <= x <= 2.0


def test_random_spd_constant_spectrum_is_scalar():
    cfg = vf.GeneratorConfig(seed=5, dim=3, spectrum_range=(2.5, 2.5))
    np.testing.assert_array_equal(vf.random_spd(cfg).a, 2.5 * np.eye(3))


def test_random_spd_deterministic():
    cfg = vf.GeneratorConfig(seed=42, dim=4)
    assert vf.random_spd(cfg, 7) == vf.random_spd(cfg, 7)
    assert vf.random_spd(cfg, 7) != vf.random_spd(cfg, 8)


@given(seed=st.integers(0, 2**32), n=st.integers(1, 12))
@settings(max_examples=30, deadline=None)
def test_random_spd_spectrum(seed, n):
    cfg = vf.GeneratorConfig(seed=seed, dim=n, spectrum_range=(1e-3, 1e3))
    lam = vf.random_spd(cfg).eig.eigenvalues
    assert lam[0] >= 1e-3 * (1 - 1e-10)
    assert lam[-1] <= 1e3 * (1 + 1e-10)


@given(seed=st.integers(0, 2**32), n=st.integers(1, 12))
@settings(max_examples=30, deadline=None)
def test_haar_is_orthogonal(seed, n):
    q = vf.haar_orthogonal(vf.trial_rng(seed), n)
    assert np.abs(q.T @ q - np.eye(n)).max() <= 1e-14 * n


def test_haar_first_column_unbiased():
    # the (0, 0) entry of a Haar matrix has mean 0 and variance 1/n
    rng = vf.trial_rng(11)
    xs = np.array([vf.haar_orthogonal(rng, 3)[0, 0] for _ in range(4000)])
    assert abs(xs.mean()) < 0.03
    assert abs((xs ** 2).mean() - 1 / 3) < 0.03


def test_sandwich_scalar_edge():
    cfg = vf.GeneratorConfig(seed=1, dim=3)
    a, b = vf.random_sandwich_pair(cfg, SandwichCondition(2.0, 2.0, 5.0, 5.0))
    np.testing.assert_array_equal(a.a, 2.0 * np.eye(3))
    np.testing.assert_array_equal(b.a, 5.0 * np.eye(3))


@pytest.mark.parametrize("orientation", ["i", "ii"])
@given(seed=st.integers(0, 2**32))
@settings(max_examples=25, deadline=None)
def test_sandwich_pairs_satisfy_loewner_chain(orientation, seed):
    rng = vf.trial_rng(seed, "cond")
    c = vf.random_sandwich_condition(rng, 1e-2, 1e2, orientation)
    cfg = vf.GeneratorConfig(seed=seed, dim=4)
    a, b = vf.random_sandwich_pair(cfg, c)
    low, high = (a, b) if orientation == "i" else (b, a)
    n = 4
    for x, y in [(c.m_prime * identity(n), low), (low, c.m * identity(n)),
                 (c.M * identity(n), high), (high, c.M_prime * identity(n))]:
        assert loewner_cmp(x, y, tol_rel=1e-10).passed
    assert c.satisfied_by(a, b)


def test_sandwich_condition_needs_separated_range():
    with pytest.raises(errors.InvalidCondition):
        vf.random_sandwich_condition(vf.trial_rng(0), 1.0, 1.0)


# -- suites ------------------------------------------------------------------------


def test_amgm_suite_passes():
    res = vf.run_suite("amgm", vf.GeneratorConfig(seed=0, dim=3, trials=100))
    assert res.passed
    assert res.trials_run == 100
    assert res.worst_margin >= 0


@pytest.mark.parametrize("family", ["thm32", "thm33", "thmA", "thmB", "cor31", "log"])
def test_family_suite_passes(family):
    res = vf.run_suite(family, vf.GeneratorConfig(seed=9, dim=4, trials=40))
    assert res.passed, res.failures
    assert res.trials_run + res.skipped == 40


def test_thm31_one_by_one_matches_newdiff():
    cfg = vf.GeneratorConfig(seed=4, dim=1, trials=50)
    for trial in range(cfg.trials):
        rng = vf.trial_rng(cfg.seed, "thm31-scalar", trial)
        a, b = np.exp(rng.uniform(-5, 5, 2))
        nu = float(rng.uniform())
        rep = oy.thm31_bounds(SpdMatrix([[a]]), SpdMatrix([[b]]), nu)
        ref = sy.evaluate_family(sy.ScalarBoundFamily.NewDiff, a, b, nu)
        top = max(float(ref.upper), a, b)
        assert rep.lower_margin.min_eig_of_difference == pytest.approx(
            float(ref.middle - ref.lower), abs=1e-12 * top)
        assert rep.upper_margin.min_eig_of_difference == pytest.approx(
            float(ref.upper - ref.middle), abs=1e-12 * top)


def test_skips_are_counted():
    cfg = vf.GeneratorConfig(seed=0, dim=2, spectrum_range=(20.0, 30.0), trials=5)
    res = vf.run_suite("thm41-exp", cfg)
    assert res.skipped == 5
    assert res.trials_run == 0
    assert res.passed


def test_suite_failures_are_recorded():
    def broken(rng, cfg, nu):
        a = vf.random_spd(cfg, rng=rng)
        return oy.make_report("broken", a * 2.0, a, a, 1e-9)

    fam = vf.Family("broken", broken)
    res = vf.run_suite(fam, vf.GeneratorConfig(seed=0, dim=2, trials=3))
    assert not res.passed
    assert [f.trial for f in res.failures] == [0, 1, 2]
    assert all(f.lower_margin < 0 for f in res.failures)


def test_suites_deterministic():
    cfg = vf.GeneratorConfig(seed=17, dim=3, trials=20)
    r1, r2 = vf.run_suite("thm41-neglog", cfg), vf.run_suite("thm41-neglog", cfg)
    assert r1.rows == r2.rows
    assert vf.format_csv([r1]) == vf.format_csv([r2])


def test_registry_covers_every_family():
    tags = set(vf.FAMILIES)
    for t in ["amgm", "thmA", "thmB", "thm31", "thm32", "thm33", "cor31", "log"]:
        assert t in tags
    for name in ["exp", "neglog", "pow-1", "pow0.5", "pow2", "pow3"]:
        assert f"thm41-{name}" in tags and f"thm42-{name}" in tags
    for p in ["-1", "0.5", "2", "3"]:
        assert f"power{p}" in tags


def test_scalar_family_suites_pass():
    res = vf.scalar_family_suites(seed=2, n=5000)
    assert {r.family_tag for r in res} == {f.tag for f in sy.ScalarBoundFamily}
    assert all(r.passed for r in res)


def test_km_identity_small():
    assert vf.km_identity_check(seed=2, n=2000).passed


def test_oracles_small():
    assert vf.scalar_oracle_check(trials=50, seed=3).passed
    assert vf.commuting_oracle_check(trials=20, seed=3).passed


# -- non-ordering ------------------------------------------------------------------


@pytest.mark.parametrize("mode", ["P", "Q"])
def test_nonordering_default_domains(mode):
    pos, neg = vf.nonordering_search(mode=mode)
    assert pos[2] > 0 > neg[2]
    xmax = 2.0 if mode == "P" else 10.0
    for nu, x, _ in (pos, neg):
        assert 0 < nu < 1 and 0 < x < xmax


def test_midpoint_half_is_negative_p_witness():
    p1, p2, _, _ = sy.surface_values(0.5, 0.5)
    assert float(p2 - p1) == pytest.approx(-0.0266, abs=5e-5)


def test_nonordering_coarse_grid_raises():
    with pytest.raises(errors.NoWitnessFound):
        vf.nonordering_search(grid=(1, 1), mode="P")


def test_surface_grid_shapes_and_centres():
    nu, x, first, second = vf.surface_grid("P", (4, 5))
    assert nu.shape == x.shape == first.shape == second.shape == (4, 5)
    np.testing.assert_allclose(nu[:, 0], [0.125, 0.375, 0.625, 0.875])
    np.testing.assert_allclose(x[0], [0.2, 0.6, 1.0, 1.4, 1.8])


@pytest.mark.parametrize("domain", [((0.0, 1.5), (0.0, 2.0)), ((0.5, 0.5), (0.0, 2.0)),
                                    ((0.0, 1.0), (-1.0, 2.0))])
def test_surface_grid_rejects_domain(domain):
    with pytest.raises(ValueError):
        vf.surface_grid("P", (3, 3), domain)


# -- reporting --------------------------------------------------------------------


def test_text_format():
    ok = vf.SuiteResult("good", 2, trials_run=3, worst_margin=0.5)
    bad = vf.SuiteResult("bad", 1, trials_run=1, failures=[vf.Failure(0, "abc", -1.0, 2.0)])
    text = vf.format_text([ok, bad])
    lines = text.splitlines()
    assert lines[0].startswith("PASS good dim=2 trials=3")
    assert lines[1].startswith("FAIL bad dim=1")
    assert "digest=abc" in lines[2]
    assert lines[-1] == "overall: FAIL (1 failing: bad)"
    assert vf.format_text([ok]).splitlines()[-1] == "overall: PASS (1 suites)"


def test_csv_round_trips_doubles():
    res = vf.run_suite("amgm", vf.GeneratorConfig(seed=1, dim=2, trials=3))
    lines = vf.format_csv([res]).splitlines()
    assert lines[0] == vf.CSV_HEADER
    assert len(lines) == 4
    first = lines[1].split(",")
    assert first[:3] == ["amgm", "2", "0"]
    assert float(first[3]) == res.rows[0].lower_margin
