"""Source statistics and the mode-overlap data that G3 depends on."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

GRAM_TOL = 1e-10


class UnrealizableOverlaps(ValueError):
    """Overlap moduli and triad phase that no three unit vectors can have."""


@dataclass(frozen=True)
class ClassicalSourceMoments:
    """Intensity statistics of one classical source.

    ``m3c`` is the third central moment. ``dist`` names the intensity law the
    Monte Carlo sampler uses: ``"delta"`` (fixed intensity, needs ``v == 0``)
    or ``"gamma"`` (shape and scale matched to ``x`` and ``v``).
    """

    x: float
    v: float = 0.0
    m3c: float = 0.0
    dist: str = "delta"

    def __post_init__(self):
        if self.x < 0 or self.v < 0:
            raise ValueError(f"mean and variance must be nonnegative, got x={self.x}, v={self.v}")
        if self.dist not in ("delta", "gamma"):
            raise ValueError(f"unknown intensity distribution {self.dist!r}")
        if self.dist == "delta" and self.v != 0:
            raise ValueError("a delta-distributed intensity has zero variance")

    @property
    def excess_third(self) -> float:
        """``<I^3> - <I>^3``."""
        return self.m3c + 3.0 * self.x * self.v

    @classmethod
    def gamma(cls, x: float, v: float) -> "ClassicalSourceMoments":
        """Gamma-distributed intensity; its third central moment is ``2 v^2 / x``."""
        m3c = 2.0 * v * v / x if x > 0 else 0.0
        return cls(x, v, m3c, "gamma" if v > 0 else "delta")

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if self.dist == "delta" or self.v == 0 or self.x == 0:
            return np.full(size, float(self.x))
        shape = self.x * self.x / self.v
        return rng.gamma(shape, self.v / self.x, size=size)


@dataclass(frozen=True)
class QuantumSourceMoments:
    """Photon-number moments of a Fock-diagonal source with energy scale ``energy``."""

    mean_n: float
    second_n: float
    third_n: float = 0.0
    energy: float = 1.0
    dist: Optional[tuple] = None

    def __post_init__(self):
        if self.mean_n < 0:
            raise ValueError("mean photon number must be nonnegative")
        if self.second_n < self.mean_n**2 - 1e-12:
            raise ValueError("second moment below mean squared (negative variance)")
        if not self.energy > 0:
            raise ValueError("source energy must be positive")

    @classmethod
    def from_distribution(cls, probs: Sequence[float], energy: float = 1.0) -> "QuantumSourceMoments":
        """Moments of the photon-number distribution ``probs[n] = P(n)``."""
        p = np.asarray(probs, dtype=float)
        if np.any(p < 0) or not np.isclose(p.sum(), 1.0, atol=1e-12):
            raise ValueError("photon-number distribution must be nonnegative and sum to 1")
        n = np.arange(len(p))
        return cls(float(p @ n), float(p @ n**2), float(p @ n**3), energy, tuple(float(q) for q in p))

    @classmethod
    def poissonian(cls, mean: float, energy: float = 1.0) -> "QuantumSourceMoments":
        return cls(mean, mean**2 + mean, mean**3 + 3 * mean**2 + mean, energy)

    @classmethod
    def with_mu(cls, mu: float, energy: float = 1.0) -> "QuantumSourceMoments":
        """Unit-mean source on photon numbers {0, 1, 2} with the given ``mu``.

        P(1) = mu and P(0) = P(2) = (1 - mu) / 2; this is the only distribution
        on that support with mean 1 and variance ``1 - mu``.
        """
        if not 0.0 <= mu <= 1.0:
            raise ValueError(f"mu={mu} outside [0, 1]")
        side = (1.0 - mu) / 2.0
        return cls.from_distribution([side, mu, side], energy)


def mandel_mu(q: QuantumSourceMoments) -> float:
    """Negated Mandel Q: 1 for a single photon, 0 for Poissonian light."""
    if q.mean_n <= 0:
        raise ValueError("mu is undefined for a source with zero mean photon number")
    return -(q.second_n - q.mean_n**2 - q.mean_n) / q.mean_n**2


@dataclass(frozen=True)
class OverlapSet:
    r12: float
    r23: float
    r31: float
    psi: float = 0.0

    def __post_init__(self):
        for r in (self.r12, self.r23, self.r31):
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"overlap modulus {r} outside [0, 1]")

    @property
    def r2(self) -> np.ndarray:
        return np.array([self.r12, self.r23, self.r31]) ** 2

    @property
    def triad(self) -> complex:
        return self.r12 * self.r23 * self.r31 * np.exp(1j * self.psi)

    def gram(self) -> np.ndarray:
        """Gram matrix ``G[a, b] = <phi_a|phi_b>`` with the whole triad phase on (1, 2)."""
        g12 = self.r12 * np.exp(1j * self.psi)
        return np.array(
            [
                [1.0, g12, self.r31],
                [np.conj(g12), 1.0, self.r23],
                [self.r31, self.r23, 1.0],
            ],
            dtype=complex,
        )

    def is_realizable(self, tol: float = GRAM_TOL) -> bool:
        return bool(np.linalg.eigvalsh(self.gram()).min() >= -tol)


@dataclass(frozen=True)
class GaussianDelayModel:
    """Identical Gaussian pulses; sources 1 and 3 delayed by -tau and +tau."""

    sigma: float
    tau: float

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("spectral width sigma must be positive")

    @property
    def delta(self) -> float:
        return self.sigma * self.tau


def delay_overlaps(delta: float) -> OverlapSet:
    """Overlaps along the symmetric delay path at dimensionless delay ``delta``."""
    r = np.exp(-0.5 * delta * delta)
    return OverlapSet(float(r), float(r), float(np.exp(-2.0 * delta * delta)), 0.0)


def overlaps_from_delay(model: GaussianDelayModel) -> OverlapSet:
    return delay_overlaps(model.delta)


def embed_overlaps(o: OverlapSet, tol: float = GRAM_TOL) -> np.ndarray:
    """Three unit vectors in C^3 realizing ``o``; row ``a`` is mode vector ``phi_a``.

    Uses the Hermitian square root of the Gram matrix, so inner products
    ``<phi_a|phi_b> = conj(phi_a) . phi_b`` reproduce ``o.gram()``.
    """
    g = o.gram()
    evals, evecs = np.linalg.eigh(g)
    if evals.min() < -tol:
        raise UnrealizableOverlaps(
            f"unrealizable overlaps: Gram matrix has eigenvalue {evals.min():.3g}"
        )
    root = (evecs * np.sqrt(np.clip(evals, 0.0, None))) @ evecs.conj().T
    # column a of the Hermitian root is phi_a: sum_m conj(R[m, a]) R[m, b] = G[a, b]
    phi = root.T
    norms = np.linalg.norm(phi, axis=1)
    return phi / norms[:, None]
