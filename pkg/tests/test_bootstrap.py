"""Bootstrap pipeline, CSV ingestion, empirical p-values."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hdmean import (
    BootstrapConfig,
    ar1_covariance,
    bootstrap_distribution,
    empirical_p_value,
    make_metro_fixture,
    read_csv,
    run_bootstrap,
    sample_mvn,
    write_csv,
)


class TestReadCsv:
    def test_plain_numeric_file(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2\n3,4\n5,6\n")
        X = read_csv(path)
        assert X.shape == (3, 2)
        assert X[2, 1] == 6.0

    def test_header_skipped(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("a,b\n1,2\n3,4\n")
        assert read_csv(path, has_header=True).shape == (2, 2)

    def test_non_numeric_cell_names_position(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2\n3,abc\n5,6\n")
        with pytest.raises(ValueError, match=r"row 2, column 2"):
            read_csv(path)

    def test_ragged_rows_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("1,2\n3\n")
        with pytest.raises(ValueError, match="row 2"):
            read_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "d.csv"
        path.write_text("")
        with pytest.raises(ValueError, match="no numeric data"):
            read_csv(path)

    def test_roundtrip_with_writer(self, tmp_path):
        path = tmp_path / "d.csv"
        data = np.arange(12.0).reshape(4, 3)
        write_csv(path, data, header=["a", "b", "c"])
        assert np.array_equal(read_csv(path, has_header=True), data)


class TestEmpiricalPValue:
    def test_four_in_a_thousand_lower_tail(self):
        samples = np.concatenate([np.full(4, -1.0), np.full(996, 1.0)])
        assert empirical_p_value(0.0, samples, "lower") == pytest.approx(0.004)

    def test_observed_below_everything(self):
        assert empirical_p_value(-10.0, np.arange(100.0), "lower") == 0.0

    def test_two_sided_at_the_median(self):
        samples = np.arange(-50.0, 51.0)  # symmetric around 0
        assert empirical_p_value(0.0, samples, "two-sided") == pytest.approx(
            1.0, abs=0.02)

    def test_add_one_correction(self):
        samples = np.full(99, 1.0)
        assert empirical_p_value(-1.0, samples, "lower", add_one=True) == pytest.approx(
            1.0 / 100.0)

    def test_empty_samples_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            empirical_p_value(0.0, [], "upper")

    @settings(max_examples=60, deadline=None)
    @given(
        st.lists(st.floats(-100, 100, allow_nan=False), min_size=1, max_size=200),
        st.floats(-100, 100, allow_nan=False),
    )
    def test_tail_proportions_sum_below_one(self, samples, observed):
        lower = empirical_p_value(observed, samples, "lower")
        upper = empirical_p_value(observed, samples, "upper")
        assert 0.0 <= lower <= 1.0 and 0.0 <= upper <= 1.0
        assert lower + upper <= 1.0 + 1e-12
        if observed not in samples:
            assert lower + upper == pytest.approx(1.0)


def _toy_data(seed=0, n=40, p=5, rho=0.3):
    return sample_mvn(np.zeros(p), ar1_covariance(rho, p), n, seed=seed)


class TestBootstrapDistribution:
    def test_returns_exactly_reps_values(self):
        X = _toy_data()
        values, _ = bootstrap_distribution(X, BootstrapConfig(reps=250, seed=1))
        assert values.shape == (250,)
        assert np.all(np.isfinite(values))

    def test_deterministic_per_seed(self):
        X = _toy_data()
        cfg = BootstrapConfig(reps=100, seed=9)
        a, _ = bootstrap_distribution(X, cfg)
        b, _ = bootstrap_distribution(X, cfg)
        assert np.array_equal(a, b)

    def test_resample_size_is_ceil_of_fraction(self, monkeypatch):
        from hdmean import bootstrap as bt
        seen = []

        def spy_factory(method, **kw):
            def stat(X):
                seen.append(X.shape[0])
                return 1.0
            return stat

        monkeypatch.setattr(bt, "statistic_factory", spy_factory)
        X = _toy_data(n=100)
        bootstrap_distribution(X, BootstrapConfig(reps=10, fraction=0.95, seed=2))
        assert set(seen) == {95}

    def test_degenerate_resamples_are_redrawn(self):
        # tiny sample with p close to n: duplicate-heavy resamples make the
        # covariance singular, forcing redraws that must be counted
        X = _toy_data(seed=3, n=7, p=5, rho=0.0)
        values, redrawn = bootstrap_distribution(
            X, BootstrapConfig(reps=60, fraction=1.0, seed=4, method="hotelling"))
        assert values.shape == (60,)
        assert np.all(np.isfinite(values))
        assert redrawn > 0

    def test_mu0_must_match_width(self):
        X = _toy_data()
        with pytest.raises(ValueError, match="mu0"):
            bootstrap_distribution(X, BootstrapConfig(seed=0, mu0=np.zeros(3), reps=5))


class TestRunBootstrap:
    def test_full_pipeline_is_pure_in_inputs(self):
        X = _toy_data(seed=5)
        cfg = BootstrapConfig(reps=200, seed=6, tail="upper")
        a = run_bootstrap(X, cfg)
        b = run_bootstrap(X.copy(), BootstrapConfig(reps=200, seed=6, tail="upper"))
        assert a.observed == b.observed
        assert np.array_equal(a.samples, b.samples)
        assert a.p_value == b.p_value

    def test_p_value_consistent_with_samples(self):
        X = _toy_data(seed=7)
        res = run_bootstrap(X, BootstrapConfig(reps=300, seed=8, tail="upper"))
        assert res.p_value == pytest.approx(np.mean(res.samples > res.observed))

    def test_mu0_shift_matches_manual_centering(self):
        X = _toy_data(seed=9) + 3.0
        mu0 = np.full(5, 3.0)
        a = run_bootstrap(X, BootstrapConfig(reps=100, seed=10, mu0=mu0))
        b = run_bootstrap(X - mu0, BootstrapConfig(reps=100, seed=10))
        assert a.observed == pytest.approx(b.observed)
        assert np.allclose(a.samples, b.samples)

    def test_uncentered_variant_differs(self):
        X = _toy_data(seed=11) + 1.0  # visible signal
        c = run_bootstrap(X, BootstrapConfig(reps=100, seed=12, center=True))
        u = run_bootstrap(X, BootstrapConfig(reps=100, seed=12, center=False))
        assert not np.allclose(c.samples, u.samples)
        # centered resamples forget the signal, uncentered ones keep it
        assert np.median(u.samples) > np.median(c.samples)

    def test_quantile_summary_keys(self):
        X = _toy_data(seed=13)
        res = run_bootstrap(X, BootstrapConfig(reps=100, seed=14))
        assert set(res.quantiles) == {"q005", "q025", "q500", "q975", "q995"}

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BootstrapConfig(reps=0)
        with pytest.raises(ValueError):
            BootstrapConfig(fraction=0.0)
        with pytest.raises(ValueError):
            BootstrapConfig(tail="sideways")


class TestMetroFixture:
    def test_shape_positivity_determinism(self):
        a = make_metro_fixture(30, 12, seed=0)
        b = make_metro_fixture(30, 12, seed=0)
        assert a.shape == (30, 12)
        assert np.all(a > 0)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, make_metro_fixture(30, 12, seed=1))
