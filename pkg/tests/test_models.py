import numpy as np
import pytest
from scipy import stats

from lpblocks.models import (
    AR1ModelSpec,
    LinearModelSpec,
    NoiseSpec,
    SeedSpec,
    ar1_coefficients,
    model_coefficients,
    noise_of,
    sample_noise,
    simulate,
    simulate_ar1,
    simulate_batch,
    simulate_linear,
)

PARETO2 = NoiseSpec(law="pareto", alpha=2.0)
STUDENT13 = NoiseSpec(law="student", alpha=1.3)


def test_noise_spec_validation():
    with pytest.raises(ValueError):
        NoiseSpec(law="pareto", alpha=0.0)
    with pytest.raises(ValueError):
        NoiseSpec(law="cauchy", alpha=1.0)
    assert PARETO2.positive_prob == 1.0
    assert STUDENT13.positive_prob == 0.5


def test_model_spec_validation():
    with pytest.raises(ValueError):
        LinearModelSpec(coeffs=(0.0, 0.0), noise=PARETO2)
    with pytest.raises(ValueError):
        AR1ModelSpec(phi=1.0, noise=PARETO2)
    with pytest.raises(ValueError):
        AR1ModelSpec(phi=0.5, noise=PARETO2, burn_in=-1)


def test_pareto_noise_support_and_cdf():
    z = sample_noise(PARETO2, 1_000_000, SeedSpec(0, 0))
    assert np.all(z > 1.0)
    assert np.mean(z > 2.0) == pytest.approx(0.25, abs=0.003)


def test_student_noise_symmetric():
    z = sample_noise(STUDENT13, 1_000_000, SeedSpec(0, 1))
    assert np.median(z) == pytest.approx(0.0, abs=0.01)
    # heavy tails present: some values far out
    assert np.max(np.abs(z)) > 100.0


def test_noise_determinism_and_stream_separation():
    a = sample_noise(PARETO2, 1000, SeedSpec(7, 3))
    b = sample_noise(PARETO2, 1000, SeedSpec(7, 3))
    c = sample_noise(PARETO2, 1000, SeedSpec(7, 4))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)


def test_noise_prefix_stability():
    # longer pareto draws extend shorter ones from the same stream
    short = sample_noise(PARETO2, 50, SeedSpec(3, 0))
    long = sample_noise(PARETO2, 80, SeedSpec(3, 0))
    np.testing.assert_array_equal(long[:50], short)


def test_identity_filter_equals_noise():
    spec = LinearModelSpec(coeffs=(1.0,), noise=PARETO2)
    x = simulate_linear(spec, 500, SeedSpec(1, 0))
    z = sample_noise(PARETO2, 500, SeedSpec(1, 0))
    np.testing.assert_array_equal(x, z)


def test_pure_delay_filter_equals_noise():
    # coeffs (0,1) gives X_t = Z_{t-1}: again the first n draws of the stream
    spec = LinearModelSpec(coeffs=(0.0, 1.0), noise=PARETO2)
    x = simulate_linear(spec, 500, SeedSpec(1, 0))
    z = sample_noise(PARETO2, 500, SeedSpec(1, 0))
    np.testing.assert_array_equal(x, z)


def test_linear_mean_matches_pareto_moment():
    spec = LinearModelSpec(coeffs=(1.0, 0.5), noise=NoiseSpec(law="pareto", alpha=3.0))
    x = simulate_linear(spec, 1_000_000, SeedSpec(2, 0))
    # E[Z] = 3/2 for pareto(3), so E[X] = 1.5 * 1.5 = 2.25
    assert np.mean(x) == pytest.approx(2.25, rel=0.02)


def test_linear_filter_recursion_exact():
    spec = LinearModelSpec(coeffs=(1.0, 0.5, -0.25), noise=PARETO2)
    n = 64
    x = simulate_linear(spec, n, SeedSpec(9, 0))
    z = sample_noise(PARETO2, n + 2, SeedSpec(9, 0))
    want = z[2:] + 0.5 * z[1:-1] - 0.25 * z[:-2]
    np.testing.assert_allclose(x, want, rtol=1e-12)


def test_ar1_zero_phi_equals_noise():
    spec = AR1ModelSpec(phi=0.0, noise=PARETO2, burn_in=0)
    x = simulate_ar1(spec, 300, SeedSpec(4, 0))
    z = sample_noise(PARETO2, 300, SeedSpec(4, 0))
    np.testing.assert_array_equal(x, z)


def test_ar1_recursion_exact():
    spec = AR1ModelSpec(phi=0.7, noise=PARETO2, burn_in=5)
    x = simulate_ar1(spec, 50, SeedSpec(4, 1))
    z = sample_noise(PARETO2, 55, SeedSpec(4, 1))
    prev = 0.0
    full = []
    for value in z:
        prev = 0.7 * prev + value
        full.append(prev)
    np.testing.assert_allclose(x, full[5:], rtol=1e-12)


def test_ar1_positive_sign_correlation():
    spec = AR1ModelSpec(phi=0.8, noise=STUDENT13)
    x = simulate_ar1(spec, 8000, SeedSpec(5, 0))
    s = np.sign(x)
    corr = np.corrcoef(s[:-1], s[1:])[0, 1]
    assert corr > 0.3


def test_ar1_determinism():
    spec = AR1ModelSpec(phi=0.8, noise=STUDENT13)
    np.testing.assert_array_equal(simulate_ar1(spec, 100, SeedSpec(6, 2)),
                                  simulate_ar1(spec, 100, SeedSpec(6, 2)))


def test_simulate_dispatch_and_batch():
    spec = AR1ModelSpec(phi=0.5, noise=PARETO2, burn_in=10)
    x = simulate(spec, 40, SeedSpec(8, 0))
    np.testing.assert_array_equal(x, simulate_ar1(spec, 40, SeedSpec(8, 0)))
    batch = simulate_batch(spec, 40, 3, SeedSpec(8, 0))
    assert batch.shape == (3, 40)
    # batch rows come from one stream: first row consumes the same leading noise
    np.testing.assert_array_equal(batch[0], x)


def test_stream_independence_of_block_norms():
    spec = AR1ModelSpec(phi=0.8, noise=STUDENT13)
    m = 100
    a = np.abs(simulate(spec, 4000, SeedSpec(10, 0))).reshape(m, 40).max(axis=1)
    b = np.abs(simulate(spec, 4000, SeedSpec(10, 1))).reshape(m, 40).max(axis=1)
    corr = np.corrcoef(np.log(a), np.log(b))[0, 1]
    assert abs(corr) < 3.0 / np.sqrt(m)


def test_ar1_coefficients_truncation():
    c = ar1_coefficients(0.8, tol=1e-12)
    assert c[0] == 1.0
    assert len(c) == 125
    assert abs(c[-1]) < 1e-12 / 0.8  # |phi|^L below tol at the cut
    c6 = ar1_coefficients(0.6, tol=1e-12)
    assert len(c6) == 56
    np.testing.assert_allclose(c6, 0.6 ** np.arange(56), rtol=1e-13)


def test_model_coefficients_and_noise_of():
    lin = LinearModelSpec(coeffs=(1.0, -0.5), noise=PARETO2)
    np.testing.assert_array_equal(model_coefficients(lin), [1.0, -0.5])
    ar = AR1ModelSpec(phi=0.8, noise=STUDENT13)
    np.testing.assert_allclose(model_coefficients(ar), ar1_coefficients(0.8))
    assert noise_of(lin) is lin.noise
    assert noise_of(ar) is ar.noise


def test_ar1_matches_truncated_linear_in_distribution():
    alpha = 1.3
    noise = NoiseSpec(law="student", alpha=alpha)
    ar = AR1ModelSpec(phi=0.8, noise=noise)
    lin = LinearModelSpec(coeffs=tuple(ar1_coefficients(0.8)), noise=noise)
    n = 100_000
    xa = simulate(ar, n, SeedSpec(11, 0))
    xl = simulate(lin, n, SeedSpec(11, 1))
    ks = stats.ks_2samp(xa, xl).statistic
    assert ks < 0.01
