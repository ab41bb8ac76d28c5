"""Random configuration generators shared by the oracle batteries."""

import numpy as np

from triadg3.interferometer import BeamSplitter, PhaseShifter, compose_circuit
from triadg3.sources import ClassicalSourceMoments, OverlapSet


def random_circuit(rng, n_elements=8):
    spec = []
    for _ in range(n_elements):
        if rng.random() < 0.6:
            ports = [(1, 2), (2, 3), (1, 3)][rng.integers(3)]
            spec.append(BeamSplitter(ports, rng.uniform(0, 2 * np.pi), rng.uniform(0.5, 1.0)))
        else:
            spec.append(PhaseShifter(int(rng.integers(1, 4)), rng.uniform(0, 2 * np.pi)))
    return tuple(spec)


def random_matrix(rng):
    """Composed random lossy circuit; re-drawn until every output port is lit."""
    while True:
        U = compose_circuit(random_circuit(rng))
        if (np.abs(U) ** 2).sum(axis=1).min() > 0.05:
            return U


def random_overlaps(rng):
    """Overlaps of three random unit vectors in C^3 (realizable, generic triad phase)."""
    z = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    z /= np.linalg.norm(z, axis=1)[:, None]
    g = z.conj() @ z.T
    psi = float(np.angle(g[0, 1] * g[1, 2] * g[2, 0]))
    return OverlapSet(float(abs(g[0, 1])), float(abs(g[1, 2])), float(abs(g[2, 0])), psi)


def random_classical_sources(rng):
    out = []
    for _ in range(3):
        x = rng.uniform(0.2, 3.0)
        if rng.random() < 0.5:
            out.append(ClassicalSourceMoments(x))
        else:
            out.append(ClassicalSourceMoments.gamma(x, rng.uniform(0.05, 1.0) * x * x))
    return out


def random_photon_dists(rng, tops=(2, 2, 2)):
    return [tuple(rng.dirichlet(np.ones(t + 1))) for t in tops]
