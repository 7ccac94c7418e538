"""Seeded simulation of regularly varying series: heavy-tailed noise, finite
moving averages, and causal AR(1).

All randomness flows through :class:`SeedSpec`, a counter-based Philox layout
in which distinct (master_seed, stream_id) pairs give independent streams and
the same pair reproduces byte-identical output. Batch helpers generate many
replications at once for Monte Carlo work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

__all__ = [
    "NoiseSpec",
    "LinearModelSpec",
    "AR1ModelSpec",
    "SeedSpec",
    "Model",
    "sample_noise",
    "simulate",
    "simulate_linear",
    "simulate_ar1",
    "simulate_batch",
    "ar1_coefficients",
    "model_coefficients",
]

_NOISE_LAWS = ("pareto", "student")


@dataclass(frozen=True)
class NoiseSpec:
    """iid noise law with tail index alpha.

    pareto: support (1, inf), P(Z > z) = z^-alpha, all draws positive.
    student: symmetric t with alpha degrees of freedom, tail index alpha.
    """

    law: str
    alpha: float

    def __post_init__(self):
        if self.law not in _NOISE_LAWS:
            raise ValueError(f"unknown noise law {self.law!r}; use one of {_NOISE_LAWS}")
        if not self.alpha > 0:
            raise ValueError("tail index alpha must be positive")

    @property
    def positive_prob(self) -> float:
        """P(sign of an extreme draw = +1): 1 for pareto, 1/2 for student."""
        return 1.0 if self.law == "pareto" else 0.5


@dataclass(frozen=True)
class LinearModelSpec:
    """Finite moving average X_t = sum_j coeffs[j] * Z_{t-j}."""

    coeffs: tuple
    noise: NoiseSpec

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        if len(c) == 0 or all(v == 0.0 for v in c):
            raise ValueError("coeffs must contain at least one nonzero entry")
        if not all(math.isfinite(v) for v in c):
            raise ValueError("coeffs must be finite")
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class AR1ModelSpec:
    """Causal AR(1): X_t = phi * X_{t-1} + Z_t, |phi| < 1."""

    phi: float
    noise: NoiseSpec
    burn_in: int = 1000

    def __post_init__(self):
        if not abs(self.phi) < 1:
            raise ValueError("AR(1) requires |phi| < 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be nonnegative")


Model = LinearModelSpec | AR1ModelSpec


@dataclass(frozen=True)
class SeedSpec:
    """Reproducible stream address (master_seed, stream_id)."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self):
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not 0 <= int(v) < 2 ** 64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer")

    def generator(self, *subkey: int) -> np.random.Generator:
        """Philox generator for this stream; extra subkey words derive substreams."""
        entropy = (self.master_seed, self.stream_id, *subkey)
        return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))

    def stream(self, stream_id: int) -> "SeedSpec":
        return SeedSpec(self.master_seed, stream_id)


def _as_seed(seed) -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


def _rng_of(seed) -> np.random.Generator:
    """Seed material to generator; existing generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return _as_seed(seed).generator()


def _noise_matrix(spec: NoiseSpec, shape, rng: np.random.Generator) -> np.ndarray:
    if spec.law == "pareto":
        # inverse CDF on 1-U keeps draws finite: P(Z > z) = z^-alpha exactly
        return (1.0 - rng.random(shape)) ** (-1.0 / spec.alpha)
    z = rng.standard_normal(shape)
    v = rng.chisquare(spec.alpha, shape)
    return z / np.sqrt(v / spec.alpha)


def sample_noise(spec: NoiseSpec, n: int, seed) -> np.ndarray:
    """n iid noise draws.

    Parameters
    ----------
    spec : NoiseSpec
    n : int
        Number of draws, n >= 1.
    seed : SeedSpec or int
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    return _noise_matrix(spec, n, _rng_of(seed))


def _linear_from_noise(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    # z has q extra leading columns; lfilter output is exact once the
    # filter memory is full, so dropping the first q columns gives the
    # exact moving average sum_j coeffs[j] * Z_{t-j}
    q = len(coeffs) - 1
    y = lfilter(coeffs, [1.0], z, axis=-1)
    return y[..., q:] if q else y


def _ar1_from_noise(phi: float, z: np.ndarray, burn_in: int) -> np.ndarray:
    y = lfilter([1.0], [1.0, -phi], z, axis=-1)
    return y[..., burn_in:]


def simulate_linear(spec: LinearModelSpec, n: int, seed) -> np.ndarray:
    """Length-n sample of the moving average (exact, n+q noise draws)."""
    if n < 1:
        raise ValueError("n must be at least 1")
    coeffs = np.asarray(spec.coeffs)
    z = _noise_matrix(spec.noise, n + len(coeffs) - 1, _rng_of(seed))
    return _linear_from_noise(coeffs, z)


def simulate_ar1(spec: AR1ModelSpec, n: int, seed) -> np.ndarray:
    """Length-n AR(1) sample; recursion starts at 0 and burn_in steps are dropped."""
    if n < 1:
        raise ValueError("n must be at least 1")
    z = _noise_matrix(spec.noise, n + spec.burn_in, _rng_of(seed))
    return _ar1_from_noise(spec.phi, z, spec.burn_in)


def simulate(model: Model, n: int, seed) -> np.ndarray:
    """Dispatch on the model kind."""
    if isinstance(model, LinearModelSpec):
        return simulate_linear(model, n, seed)
    if isinstance(model, AR1ModelSpec):
        return simulate_ar1(model, n, seed)
    raise TypeError(f"unsupported model {type(model).__name__}")


def simulate_batch(model: Model, n: int, count: int, seed) -> np.ndarray:
    """(count, n) array of independent replications from one stream.

    The whole batch is a single deterministic draw of the stream; it is not
    row-wise identical to `count` calls of simulate on distinct streams.
    """
    if n < 1 or count < 1:
        raise ValueError("n and count must be at least 1")
    rng = _rng_of(seed)
    if isinstance(model, LinearModelSpec):
        coeffs = np.asarray(model.coeffs)
        z = _noise_matrix(model.noise, (count, n + len(coeffs) - 1), rng)
        return _linear_from_noise(coeffs, z)
    if isinstance(model, AR1ModelSpec):
        z = _noise_matrix(model.noise, (count, n + model.burn_in), rng)
        return _ar1_from_noise(model.phi, z, model.burn_in)
    raise TypeError(f"unsupported model {type(model).__name__}")


def ar1_coefficients(phi: float, tol: float = 1e-12) -> np.ndarray:
    """Moving-average coefficients (1, phi, ..., phi^L) with |phi|^L < tol."""
    if not abs(phi) < 1:
        raise ValueError("requires |phi| < 1")
    if phi == 0.0:
        return np.array([1.0])
    L = max(1, math.ceil(math.log(tol) / math.log(abs(phi))))
    return phi ** np.arange(L + 1)


def model_coefficients(model: Model, tol: float = 1e-12) -> np.ndarray:
    """Coefficient vector of the model, truncating AR(1) at |phi|^L < tol."""
    if isinstance(model, LinearModelSpec):
        return np.asarray(model.coeffs, dtype=np.float64)
    if isinstance(model, AR1ModelSpec):
        return ar1_coefficients(model.phi, tol)
    raise TypeError(f"unsupported model {type(model).__name__}")


def noise_of(model: Model) -> NoiseSpec:
    return model.noise
