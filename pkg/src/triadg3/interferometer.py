"""Three-mode linear optical transfer matrices.

Matrices are indexed ``U[j, a]`` with ``j`` the output port and ``a`` the
input port. Ports are numbered 1..3 in the public API and in serialized
circuits, 0..2 internally.

A circuit is an ordered tuple of elements in the order light meets them, so
the composed matrix is ``M_last @ ... @ M_first``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

THETA0 = float(np.arccos(1.0 / np.sqrt(3.0)))
PHYSICAL_TOL = 1e-12


@dataclass(frozen=True)
class BeamSplitter:
    ports: tuple[int, int]
    theta: float
    eta: float = 1.0

    def __post_init__(self):
        if tuple(self.ports) not in ((1, 2), (2, 3), (1, 3)):
            raise ValueError(f"beamsplitter ports must be (1,2), (2,3) or (1,3), got {self.ports}")
        if not np.isfinite(self.theta):
            raise ValueError("beamsplitter angle must be finite")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError(f"loss parameter eta={self.eta} outside [0, 1]")

    def matrix(self) -> np.ndarray:
        a, b = self.ports[0] - 1, self.ports[1] - 1
        c, s = np.cos(self.theta), np.sin(self.theta)
        m = np.eye(3, dtype=complex)
        m[a, a], m[a, b] = self.eta * c, self.eta * s
        m[b, a], m[b, b] = -self.eta * s, self.eta * c
        return m


@dataclass(frozen=True)
class PhaseShifter:
    port: int
    phi: float

    def __post_init__(self):
        if self.port not in (1, 2, 3):
            raise ValueError(f"phase shifter port must be 1..3, got {self.port}")
        if not np.isfinite(self.phi):
            raise ValueError("phase must be finite")

    def matrix(self) -> np.ndarray:
        m = np.eye(3, dtype=complex)
        m[self.port - 1, self.port - 1] = np.exp(-1j * self.phi)
        return m


CircuitElement = Union[BeamSplitter, PhaseShifter]
CircuitSpec = tuple  # tuple[CircuitElement, ...]


def bell_matrix() -> np.ndarray:
    """Balanced three-port (discrete Fourier) matrix, normalized to be unitary."""
    j = np.arange(3)
    return np.exp(2j * np.pi / 3 * np.outer(j, j)) / np.sqrt(3.0)


def bell_circuit(eta: float = 1.0) -> CircuitSpec:
    """Beamsplitter/phase-shifter decomposition of the Bell three-port, in optical order.

    Every beamsplitter carries the same loss factor ``eta``.
    """
    return (
        BeamSplitter((2, 3), np.pi / 4, eta),
        PhaseShifter(3, np.pi / 2),
        BeamSplitter((1, 2), THETA0, eta),
        BeamSplitter((2, 3), -np.pi / 4, eta),
        PhaseShifter(3, np.pi),
        PhaseShifter(2, np.pi),
    )


def compose_circuit(spec: Sequence[CircuitElement]) -> np.ndarray:
    """Transfer matrix of a circuit; the first element acts first."""
    u = np.eye(3, dtype=complex)
    for element in spec:
        u = element.matrix() @ u
    return u


def with_loss(spec: Sequence[CircuitElement], eta: float) -> CircuitSpec:
    """Copy of ``spec`` with every beamsplitter's loss factor set to ``eta``."""
    return tuple(replace(e, eta=eta) if isinstance(e, BeamSplitter) else e for e in spec)


def perturb_circuit(spec: Sequence[CircuitElement], epsilon: float, rng_seed=None, rng=None) -> CircuitSpec:
    """Redraw every angle and phase from a normal centered on its nominal value.

    ``epsilon`` is the standard deviation in radians; loss factors are kept.
    Pass either a seed or an existing ``numpy.random.Generator``.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    if epsilon == 0:
        return tuple(spec)
    if rng is None:
        rng = np.random.default_rng(rng_seed)
    noise = rng.normal(0.0, epsilon, size=len(spec))
    out = []
    for e, dz in zip(spec, noise):
        if isinstance(e, BeamSplitter):
            out.append(replace(e, theta=e.theta + dz))
        else:
            out.append(replace(e, phi=e.phi + dz))
    return tuple(out)


@dataclass(frozen=True)
class PhysicalCheck:
    ok: bool
    singular_values: np.ndarray

    def __bool__(self):
        return self.ok


def validate_physical(U: np.ndarray) -> PhysicalCheck:
    """A device is physical when no singular value exceeds one."""
    sv = np.linalg.svd(np.asarray(U, dtype=complex), compute_uv=False)
    return PhysicalCheck(bool(sv.max() <= 1.0 + PHYSICAL_TOL), sv)


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 3x3 unitary (QR of a complex Ginibre matrix, phase-fixed)."""
    z = (rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


# ------------------------------------------------------------ serialization


def circuit_to_dict(spec: Sequence[CircuitElement]) -> dict:
    elements = []
    for e in spec:
        if isinstance(e, BeamSplitter):
            elements.append({"bs": {"ports": list(e.ports), "theta": float(e.theta), "eta": float(e.eta)}})
        else:
            elements.append({"ps": {"port": e.port, "phi": float(e.phi)}})
    return {"elements": elements}


def circuit_from_dict(doc: dict) -> CircuitSpec:
    out = []
    for item in doc["elements"]:
        if "bs" in item:
            bs = item["bs"]
            out.append(BeamSplitter(tuple(int(p) for p in bs["ports"]), float(bs["theta"]), float(bs.get("eta", 1.0))))
        elif "ps" in item:
            ps = item["ps"]
            out.append(PhaseShifter(int(ps["port"]), float(ps["phi"])))
        else:
            raise ValueError(f"unknown circuit element {item!r}")
    return tuple(out)


def circuit_to_json(spec: Sequence[CircuitElement]) -> str:
    return json.dumps(circuit_to_dict(spec))


def circuit_from_json(text: str) -> CircuitSpec:
    return circuit_from_dict(json.loads(text))
