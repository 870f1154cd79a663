"""Instance generators: determinism, bounds, moments, order independence."""

import numpy as np
import pytest

from socalloc import (ConfigError, DomainError, GeneratorConfig, generate,
                      request_fields, stream_requests, validate_instance)


class TestDeterminism:
    def test_same_config_same_instance(self):
        cfg = GeneratorConfig("uniform", n=50, m=4, k=5,
                              eta=(0.65, 0.75, 0.85, 0.95), seed=123)
        a = generate(cfg)
        b = generate(cfg)
        assert np.array_equal(a.c, b.c)
        assert np.array_equal(a.a_bar, b.a_bar)
        assert np.array_equal(a.k_diag, b.k_diag)

    def test_different_seeds_differ(self):
        a = generate(GeneratorConfig("uniform", n=20, m=2, k=3, seed=1))
        b = generate(GeneratorConfig("uniform", n=20, m=2, k=3, seed=2))
        assert not np.array_equal(a.c, b.c)

    def test_chi_square_deterministic(self):
        cfg = GeneratorConfig("chi_square", n=30, m=4, k=5, seed=9)
        assert np.array_equal(generate(cfg).a_bar, generate(cfg).a_bar)


class TestOrderIndependence:
    def test_permuted_generation_matches(self):
        cfg = GeneratorConfig("chi_square", n=40, m=3, k=4, seed=77)
        inst = generate(cfg)
        order = np.random.default_rng(0).permutation(40)
        for t in order:
            c, a_bar, k_diag = request_fields(cfg, int(t))
            assert np.array_equal(c, inst.c[t])
            assert np.array_equal(a_bar, inst.a_bar[t])
            assert np.array_equal(k_diag, inst.k_diag[t])

    def test_streaming_equals_batch(self):
        cfg = GeneratorConfig("uniform", n=25, m=4, k=5, seed=5)
        inst = generate(cfg)
        for t, req in enumerate(stream_requests(cfg)):
            assert np.array_equal(req.c, inst.c[t])
            assert np.array_equal(req.a_bar, inst.a_bar[t])
            assert np.array_equal(req.k_diag, inst.k_diag[t])


class TestUniformModel:
    def test_bounds(self):
        inst = generate(GeneratorConfig("uniform", n=200, m=4, k=5, seed=3))
        assert np.all((inst.c >= 0) & (inst.c <= 1))
        assert np.all((inst.a_bar >= 0) & (inst.a_bar <= 4))
        assert np.all((inst.k_diag >= 0) & (inst.k_diag <= 1))

    def test_default_unit_budget(self):
        inst = generate(GeneratorConfig("uniform", n=5, m=3, k=2, seed=0))
        assert np.array_equal(inst.d, np.ones(3))

    def test_custom_budget(self):
        inst = generate(GeneratorConfig("uniform", n=5, m=2, k=2,
                                        d=(0.5, 2.0), seed=0))
        assert np.array_equal(inst.d, [0.5, 2.0])

    def test_generated_instance_validates(self):
        inst = generate(GeneratorConfig("uniform", n=50, m=4, k=5,
                                        eta=(0.65, 0.75, 0.85, 0.95), seed=4))
        assert validate_instance(inst) == []


class TestChiSquareModel:
    def test_moments(self):
        # chi2(3) has mean 3; (2/3)*chi2(4) has mean 8/3.  With n*k =
        # 1e5 revenue draws and n*m*k = 4e5 consumption draws the sample
        # means sit within 1% of the targets.
        inst = generate(GeneratorConfig("chi_square", n=20_000, m=4, k=5, seed=42))
        assert inst.c.size >= 100_000
        assert abs(inst.c.mean() - 3.0) <= 0.03
        assert abs(inst.a_bar.mean() - 8.0 / 3.0) <= 0.08 / 3.0

    def test_variance_field_moment(self):
        # k_diag = ((2/3) chi2(2))^2; chi2(2) has E[X^2] = 8, so the
        # mean is (4/9)*8 = 32/9
        inst = generate(GeneratorConfig("chi_square", n=20_000, m=4, k=5, seed=43))
        target = 32.0 / 9.0
        assert abs(inst.k_diag.mean() - target) <= 0.02 * target

    def test_unbounded_in_practice(self):
        inst = generate(GeneratorConfig("chi_square", n=5000, m=4, k=5, seed=44))
        assert inst.a_bar.max() > 4.0  # exceeds the uniform model's cap


class TestConfig:
    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError):
            GeneratorConfig("weird", n=5, m=2, k=2)

    def test_custom_requires_sampler(self):
        with pytest.raises(ConfigError):
            GeneratorConfig("custom", n=5, m=2, k=2)

    def test_custom_sampler_used(self):
        def sampler(rng, m, k):
            return np.full(k, 2.0), np.ones((m, k)), np.zeros((m, k))

        cfg = GeneratorConfig("custom", n=4, m=2, k=3, sampler=sampler)
        inst = generate(cfg)
        assert np.all(inst.c == 2.0)

    def test_dimensions_must_be_positive(self):
        with pytest.raises(DomainError):
            GeneratorConfig("uniform", n=0, m=2, k=2)

    def test_budget_length_checked(self):
        cfg = GeneratorConfig("uniform", n=5, m=3, k=2, d=(1.0, 2.0))
        with pytest.raises(ConfigError):
            generate(cfg)
