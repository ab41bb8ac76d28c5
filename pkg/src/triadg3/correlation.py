"""Closed-form third-order intensity correlations and their delay-path shape."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .sources import ClassicalSourceMoments, OverlapSet, QuantumSourceMoments, delay_overlaps

DARK_TOL = 1e-14


class DarkPortError(ValueError):
    """An output port receives no mean intensity, so G3 is undefined."""

    def __init__(self, port: int, value: float):
        super().__init__(f"dark output port {port}: mean intensity {value:.3g}")
        self.port = port


@dataclass(frozen=True)
class ShapeCoefficients:
    """G3(delta) = S - A exp(-delta^2) - B exp(-4 delta^2) + C exp(-3 delta^2)."""

    S: float
    A: float
    B: float
    C: float

    def evaluate(self, delta) -> np.ndarray:
        d2 = np.asarray(delta, dtype=float) ** 2
        return self.S - self.A * np.exp(-d2) - self.B * np.exp(-4 * d2) + self.C * np.exp(-3 * d2)

    def to_json(self) -> str:
        return json.dumps(asdict(self))


@dataclass(frozen=True)
class SweepCurve:
    delta: np.ndarray
    g3: np.ndarray

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["delta", "g3"])
        for d, g in zip(self.delta, self.g3):
            writer.writerow([f"{d:.17g}", f"{g:.17g}"])
        return buf.getvalue()


# ---------------------------------------------------------------- moments


def classical_moment_arrays(sources: Sequence[ClassicalSourceMoments]):
    x = np.array([s.x for s in sources], dtype=float)
    v = np.array([s.v for s in sources], dtype=float)
    w = np.array([s.excess_third for s in sources], dtype=float)
    return x, v, w


def quantum_moment_arrays(sources: Sequence[QuantumSourceMoments]):
    """Energies and raw photon-number moments ``(E, <n>, <n^2>, <n^3>)``."""
    en = np.array([s.energy for s in sources], dtype=float)
    n1 = np.array([s.mean_n for s in sources], dtype=float)
    n2 = np.array([s.second_n for s in sources], dtype=float)
    n3 = np.array([s.third_n for s in sources], dtype=float)
    return en, n1, n2, n3


def _check_ports(U, x):
    # x may be batched; report the first dark port found
    d = np.einsum("...ia,...a->...i", np.abs(U) ** 2, x)
    dark = d <= DARK_TOL
    if np.any(dark):
        idx = np.argwhere(dark)[0]
        raise DarkPortError(int(idx[-1]) + 1, float(d[tuple(idx)]))
    return d


def _as_batch(U, *rows):
    U = np.asarray(U, dtype=complex)
    if U.ndim == 2:
        U = U[None]
    n = U.shape[0]
    out = [U]
    for r in rows:
        r = np.asarray(r)
        out.append(np.broadcast_to(r, (n,) + r.shape[-1:]) if r.ndim <= 1 else r)
    return out


# -------------------------------------------------------------------- G3


def g3_classical_raw(U, x, v, w, r2, tri) -> np.ndarray:
    """Batched classical G3 from plain arrays (see ``_kernels`` for shapes)."""
    U, x, v, w, r2 = _as_batch(U, x, v, w, r2)
    tri = np.broadcast_to(np.asarray(tri, dtype=complex), (U.shape[0],))
    _check_ports(U, x)
    return _kernels.g3_classical_batch(U, x, v, w, r2, tri)


def g3_quantum_raw(U, en, n1, n2, n3, r2, tri) -> np.ndarray:
    """Batched quantum G3: the classical expression at ``I -> E n`` minus three corrections."""
    U, en, n1, n2, n3, r2 = _as_batch(U, en, n1, n2, n3, r2)
    tri = np.broadcast_to(np.asarray(tri, dtype=complex), (U.shape[0],))
    x = en * n1
    v = en**2 * (n2 - n1**2)
    w = en**3 * (n3 - n1**3)
    d = _check_ports(U, x)
    g_tilde = _kernels.g3_classical_batch(U, x, v, w, r2, tri)
    corr = _kernels.quantum_correction_batch(U, en, n1, n2, r2)
    return g_tilde - corr / d.prod(axis=-1)


def g3_classical(U, sources: Sequence[ClassicalSourceMoments], o: OverlapSet) -> float:
    """Classical random-phase G3 for one interferometer, three sources and one overlap set."""
    x, v, w = classical_moment_arrays(sources)
    return float(g3_classical_raw(U, x, v, w, o.r2, o.triad)[0])


def g3_quantum(U, sources: Sequence[QuantumSourceMoments], o: OverlapSet) -> float:
    """Quantum G3 (normally ordered numerator) for Fock-diagonal sources."""
    en, n1, n2, n3 = quantum_moment_arrays(sources)
    return float(g3_quantum_raw(U, en, n1, n2, n3, o.r2, o.triad)[0])


def g3(U, sources, o: OverlapSet, model: str) -> float:
    if model == "classical":
        return g3_classical(U, sources, o)
    if model == "quantum":
        return g3_quantum(U, sources, o)
    raise ValueError(f"unknown model {model!r}")


# ------------------------------------------------------------------ shape

# indicator probes: (r2 row, triad) for S, a12, a23, a31 and the full overlap point
_PROBE_R2 = np.array([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=float)
_PROBE_TRI = np.array([0, 0, 0, 0, 1], dtype=complex)


def _probe_to_coeffs(vals):
    # vals[..., 5] -> (S, A, B, C)
    s = vals[..., 0]
    a12, a23, a31 = s - vals[..., 1], s - vals[..., 2], s - vals[..., 3]
    c = vals[..., 4] - s + a12 + a23 + a31
    return s, a12 + a23, a31, c


def shape_coefficients_batch(U, moments, model: str):
    """Shape coefficients for a batch of interferometers.

    ``moments`` is ``(x, v, w)`` for the classical model and ``(E, n1, n2, n3)``
    for the quantum one, each shaped (n, 3) or (3,). Returns four (n,) arrays.
    """
    U = np.asarray(U, dtype=complex)
    if U.ndim == 2:
        U = U[None]
    n = U.shape[0]
    ub = np.repeat(U, 5, axis=0)
    mb = [np.repeat(np.broadcast_to(np.asarray(m, dtype=float), (n, 3)), 5, axis=0) for m in moments]
    r2 = np.tile(_PROBE_R2, (n, 1))
    tri = np.tile(_PROBE_TRI, n)
    if model == "classical":
        vals = g3_classical_raw(ub, *mb, r2, tri)
    elif model == "quantum":
        vals = g3_quantum_raw(ub, *mb, r2, tri)
    else:
        raise ValueError(f"unknown model {model!r}")
    return _probe_to_coeffs(vals.reshape(n, 5))


def _moments(sources, model):
    if model == "classical":
        return classical_moment_arrays(sources)
    if model == "quantum":
        return quantum_moment_arrays(sources)
    raise ValueError(f"unknown model {model!r}")


def shape_coefficients(U, sources, model: str) -> ShapeCoefficients:
    """(S, A, B, C) of G3 along the symmetric delay path, found by probing overlaps."""
    s, a, b, c = shape_coefficients_batch(U, _moments(sources, model), model)
    return ShapeCoefficients(float(s[0]), float(a[0]), float(b[0]), float(c[0]))


def sweep_delay(U, sources, model: str, delta_grid) -> SweepCurve:
    """G3 evaluated directly at each delay of a strictly increasing grid."""
    grid = np.asarray(delta_grid, dtype=float)
    if grid.ndim != 1 or np.any(np.diff(grid) <= 0):
        raise ValueError("delta grid must be one-dimensional and strictly increasing")
    ovs = [delay_overlaps(d) for d in grid]
    r2 = np.array([o.r2 for o in ovs])
    tri = np.array([o.triad for o in ovs])
    m = len(grid)
    ub = np.repeat(np.asarray(U, dtype=complex)[None], m, axis=0)
    mb = [np.broadcast_to(arr, (m, 3)) for arr in _moments(sources, model)]
    if model == "classical":
        vals = g3_classical_raw(ub, *mb, r2, tri)
    else:
        vals = g3_quantum_raw(ub, *mb, r2, tri)
    return SweepCurve(grid, vals)
