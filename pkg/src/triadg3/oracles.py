"""Brute-force reference computations of G3.

None of these share code with the closed-form engine in ``correlation``:

- ``moment_expansion_g3`` sums every index tuple of the phase-averaged
  intensity product directly (exact, classical or quantum moments).
- ``mc_classical_g3`` samples random-phase classical fields.
- ``fock_g3`` applies output annihilation operators to explicit Fock states.
"""

from __future__ import annotations

import itertools
import json
import math
from collections import Counter, defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from ._kernels import mc_block_sums
from .sources import ClassicalSourceMoments, OverlapSet, QuantumSourceMoments, embed_overlaps

N_MAX_LIMIT = 6
JACKKNIFE_BLOCKS = 100


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    std_error: float
    n_samples: int
    seed: Optional[int] = None

    def to_json(self) -> str:
        return json.dumps(
            {"estimate": self.mean, "std_error": self.std_error, "n_samples": self.n_samples, "seed": self.seed}
        )


# ---------------------------------------------------------- exact expansion


def classical_raw_moments(s: ClassicalSourceMoments) -> list[float]:
    """``[1, <I>, <I^2>, <I^3>]``."""
    return [1.0, s.x, s.v + s.x**2, s.excess_third + s.x**3]


def quantum_factorial_moments(s: QuantumSourceMoments) -> list[float]:
    """``[1, E<n>, E^2<n(n-1)>, E^3<n(n-1)(n-2)>]``: normally ordered number moments."""
    e = s.energy
    return [
        1.0,
        e * s.mean_n,
        e**2 * (s.second_n - s.mean_n),
        e**3 * (s.third_n - 3 * s.second_n + 2 * s.mean_n),
    ]


def moment_expansion_g3(U, moments: Sequence[Sequence[float]], gram) -> float:
    """G3 from the full index-tuple expansion of the phase-averaged intensity product.

    ``moments[a][k]`` is the k-th moment of source ``a`` (raw intensity
    moments for classical light, factorial number moments times ``E^k`` for
    quantum light). ``gram[a, b] = <phi_a|phi_b>``.
    """
    U = np.asarray(U, dtype=complex)
    gram = np.asarray(gram, dtype=complex)
    num = 0.0 + 0.0j
    for alpha in itertools.product(range(3), repeat=3):
        counts = Counter(alpha)
        weight = 1.0
        for src, k in counts.items():
            weight *= moments[src][k]
        if weight == 0.0:
            continue
        # only phase-preserving terms survive: beta is a rearrangement of alpha
        for beta in set(itertools.permutations(alpha)):
            term = weight + 0.0j
            for j in range(3):
                term *= np.conj(U[j, alpha[j]]) * U[j, beta[j]] * gram[alpha[j], beta[j]]
            num += term
    den = 1.0
    for j in range(3):
        den *= sum(abs(U[j, a]) ** 2 * moments[a][1] for a in range(3))
    return float(num.real / den)


# --------------------------------------------------------------- Monte Carlo


def _block_stream(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, block])))


def _block_sizes(n_samples: int, n_blocks: int) -> list[int]:
    base, extra = divmod(n_samples, n_blocks)
    return [base + (1 if b < extra else 0) for b in range(n_blocks)]


def jackknife_ratio(block_sums: np.ndarray, block_counts: np.ndarray) -> tuple[float, float]:
    """Leave-one-block-out error of ``mean(P) / (mean(I1) mean(I2) mean(I3))``.

    ``block_sums[b] = (sum P, sum I1, sum I2, sum I3)`` over block ``b``.
    """
    tot = block_sums.sum(axis=0)
    n = block_counts.sum()

    def ratio(sums, count):
        m = sums / count[..., None]
        return m[..., 0] / (m[..., 1] * m[..., 2] * m[..., 3])

    full = float(ratio(tot[None], np.array([n]))[0])
    nb = len(block_counts)
    loo = ratio(tot[None] - block_sums, n - block_counts)
    se = math.sqrt((nb - 1) / nb * float(np.sum((loo - loo.mean()) ** 2)))
    return full, se


def mc_classical_g3(
    U,
    sources: Sequence[ClassicalSourceMoments],
    o: OverlapSet,
    n_samples: int,
    rng_seed: int,
    workers: int = 1,
    global_phase: float = 0.0,
) -> MCEstimate:
    """Random-phase classical-field estimate of G3 with a jackknife error.

    Samples are split into fixed blocks, each drawn from its own stream keyed
    by ``(rng_seed, block)``, so the result does not depend on ``workers``.
    ``global_phase`` is added to every source phase (a no-op in distribution).
    """
    U = np.asarray(U, dtype=complex)
    phi = embed_overlaps(o)
    n_blocks = min(JACKKNIFE_BLOCKS, n_samples)
    sizes = _block_sizes(n_samples, n_blocks)

    def run(block):
        rng = _block_stream(rng_seed, block)
        size = sizes[block]
        amp = np.sqrt(np.column_stack([s.sample(rng, size) for s in sources]))
        phase = rng.uniform(0.0, 2 * np.pi, size=(size, 3)) + global_phase
        return mc_block_sums(U, phi, amp, phase)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            sums = list(pool.map(run, range(n_blocks)))
    else:
        sums = [run(b) for b in range(n_blocks)]
    mean, se = jackknife_ratio(np.array(sums), np.array(sizes, dtype=float))
    return MCEstimate(mean, se, n_samples, rng_seed)


# ------------------------------------------------------------------- Fock


class TruncationError(ValueError):
    pass


def _create(state: dict, mode: int, coeff: complex) -> dict:
    out = defaultdict(complex)
    for occ, amp in state.items():
        n = occ[mode]
        new = occ[:mode] + (n + 1,) + occ[mode + 1 :]
        out[new] += amp * coeff * math.sqrt(n + 1)
    return out


def _annihilate(state: dict, coeffs) -> dict:
    """Apply ``sum_mode coeffs[mode] a_mode`` to a 9-mode state."""
    out = defaultdict(complex)
    for occ, amp in state.items():
        for mode, c in coeffs:
            n = occ[mode]
            if n == 0:
                continue
            new = occ[:mode] + (n - 1,) + occ[mode + 1 :]
            out[new] += amp * c * math.sqrt(n)
    return out


def _norm2(state: dict) -> float:
    return sum(abs(a) ** 2 for a in state.values())


def _fock_input(numbers, phi) -> dict:
    # mode index = 3 * spatial port + internal mode
    state = {(0,) * 9: 1.0 + 0.0j}
    for a, n in enumerate(numbers):
        for _ in range(n):
            acc = defaultdict(complex)
            for m in range(3):
                if phi[a, m] != 0:
                    for occ, amp in _create(state, 3 * a + m, phi[a, m]).items():
                        acc[occ] += amp
            state = acc
        state = {occ: amp / math.sqrt(math.factorial(n)) for occ, amp in state.items()}
    return state


@dataclass(frozen=True)
class FockResult:
    estimate: float
    abs_tol: float
    basis_dim: int

    def to_json(self) -> str:
        return json.dumps(asdict(self))


def fock_g3(
    U, photon_dists: Sequence[Sequence[float]], o: OverlapSet, n_max: int = N_MAX_LIMIT, energy: float = 1.0
) -> FockResult:
    """Exact quantum G3 of three Fock-diagonal sources with equal photon energies.

    ``photon_dists[a][n]`` is the probability of ``n`` photons from source
    ``a``; ``energy`` is the photon energy shared by all sources. The
    normally ordered numerator is ``sum_m ||b_3 b_2 b_1 |psi>||^2``
    averaged over the input mixture, with ``b_{i,m} = sum_a U[i, a] a_{a,m}``.
    """
    U = np.asarray(U, dtype=complex)
    if n_max > N_MAX_LIMIT:
        raise TruncationError(f"n_max={n_max} exceeds the supported limit {N_MAX_LIMIT}")
    dists = [np.trim_zeros(np.asarray(p, dtype=float), "b") for p in photon_dists]
    tops = [len(p) - 1 for p in dists]
    if sum(tops) > n_max:
        raise TruncationError(f"truncation too small: joint photon number up to {sum(tops)} > n_max={n_max}")
    phi = embed_overlaps(o)
    # ops[i][m]: annihilator of output port i in internal mode m
    ops = [[[(3 * a + m, U[i, a]) for a in range(3)] for m in range(3)] for i in range(3)]

    num = 0.0
    means = np.zeros(3)
    for numbers in itertools.product(*(range(t + 1) for t in tops)):
        prob = math.prod(dists[a][n] for a, n in enumerate(numbers))
        if prob == 0.0:
            continue
        psi = _fock_input(numbers, phi)
        for i in range(3):
            means[i] += prob * sum(_norm2(_annihilate(psi, ops[i][m])) for m in range(3))
        if sum(numbers) < 3:
            continue
        for m1 in range(3):
            s1 = _annihilate(psi, ops[0][m1])
            for m2 in range(3):
                s2 = _annihilate(s1, ops[1][m2])
                for m3 in range(3):
                    num += prob * _norm2(_annihilate(s2, ops[2][m3]))
    basis_dim = math.comb(n_max + 9, 9)
    est = (energy**3 * num) / (energy**3 * means.prod())
    return FockResult(float(est), 1e-9, basis_dim)
