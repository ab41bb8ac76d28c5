"""Revival classification of G3(delta) from its shape coefficients.

With y = exp(delta^2) the derivative of
G3 = S - A e^{-d^2} - B e^{-4 d^2} + C e^{-3 d^2} is proportional to
``h(y) = A y^3 - 3 C y + 4 B``; every sign change of ``h`` on y > 1 is an
extremum of G3 at nonzero delay. One sign change is a revival, two a dip
sitting inside a revival.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import brentq

TOL = 1e-9
H_RTOL = 1e-12


class Verdict(str, enum.Enum):
    NO_REVIVAL = "NoRevival"
    SIMPLE_REVIVAL = "SimpleRevival"
    DIP_IN_REVIVAL = "DipInRevival"
    DEGENERATE = "Degenerate"


_BY_COUNT = {0: Verdict.NO_REVIVAL, 1: Verdict.SIMPLE_REVIVAL, 2: Verdict.DIP_IN_REVIVAL}


@dataclass(frozen=True)
class RevivalClass:
    verdict: Verdict
    roots_gt1: tuple = ()
    y_min: Optional[float] = None
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0

    @property
    def is_revival(self) -> bool:
        return self.verdict in (Verdict.SIMPLE_REVIVAL, Verdict.DIP_IN_REVIVAL)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        d["roots_gt1"] = list(self.roots_gt1)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def h_poly(y, A, B, C):
    return A * y**3 - 3.0 * C * y + 4.0 * B


def cubic_real_roots(A: float, B: float, C: float) -> list[float]:
    """Real roots of ``A y^3 - 3 C y + 4 B``, closed form then one Newton step."""
    if A == 0.0:
        if C == 0.0:
            return []
        return [4.0 * B / (3.0 * C)]
    # already depressed: y^3 + p y + q, rescaled y = s z so both stay O(1)
    p = -3.0 * C / A
    q = 4.0 * B / A
    s = max(math.sqrt(abs(p)), abs(q) ** (1 / 3))
    if s == 0.0 or not math.isfinite(s):
        return [0.0] if s == 0.0 else []
    p, q = (p / s) / s, ((q / s) / s) / s
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc > 0:
        sq = math.sqrt(disc)
        # larger-magnitude branch avoids cancellation
        u = -q / 2.0 + math.copysign(sq, -q) if q != 0 else sq
        cu = math.copysign(abs(u) ** (1 / 3), u)
        roots = [cu - p / (3.0 * cu)]
    elif p == 0.0:
        roots = [0.0]
    else:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = 3.0 * q / (p * m)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [m * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    roots = [s * r for r in roots]
    polished = []
    for r in roots:
        d = 3.0 * A * r * r - 3.0 * C
        if d != 0.0:
            step = r - h_poly(r, A, B, C) / d
            # keep the step only if it helps (it can overshoot near underflow)
            if math.isfinite(step) and abs(h_poly(step, A, B, C)) <= abs(h_poly(r, A, B, C)):
                r = step
        polished.append(r)
    return sorted(polished)


def _sign(val, tol):
    if abs(val) <= tol:
        return 0
    return 1 if val > 0 else -1


def _breakpoints(A, B, C, a_sign, h_tol):
    """Ordered (y, sign h) samples on (1 + TOL, inf) bracketing every root."""
    y0 = 1.0 + TOL
    pts = [(y0, _sign(h_poly(y0, A, B, C), h_tol))]
    if A != 0.0 and C / A > 0:
        yc = math.sqrt(C / A)
        if yc > y0:
            pts.append((yc, _sign(h_poly(yc, A, B, C), h_tol)))
    if a_sign != 0:
        inf_sign = a_sign
    else:
        inf_sign = _sign(-C, h_tol) or _sign(B, h_tol)
    pts.append((math.inf, inf_sign))
    return pts


def _sign_change_intervals(pts):
    out = []
    last = None
    for y, s in pts:
        if s == 0:
            continue
        if last is not None and s != last[1]:
            out.append((last[0], y))
        last = (y, s)
    return out


def _root_in(lo, hi, A, B, C, candidates):
    for r in candidates:
        if lo < r < hi:
            return r
    if math.isinf(hi):
        hi = max(lo, 1.0) * 2.0
        while np.sign(h_poly(hi, A, B, C)) == np.sign(h_poly(lo, A, B, C)):
            hi *= 2.0
    return brentq(h_poly, lo, hi, args=(A, B, C), xtol=1e-15, rtol=4 * np.finfo(float).eps)


def classify(A: float, B: float, C: float) -> RevivalClass:
    """Count sign changes of ``h`` on y > 1 and name the resulting shape."""
    scale = max(abs(A), abs(B), abs(C))
    y_min = math.sqrt(C / A) if A != 0 and C / A > 0 else None
    base = dict(y_min=y_min, A=float(A), B=float(B), C=float(C))
    if not all(map(math.isfinite, (A, B, C))):
        raise ValueError("shape coefficients must be finite")
    if scale <= TOL:
        return RevivalClass(Verdict.DEGENERATE, **base)
    h_tol = H_RTOL * scale

    # a simple root within TOL of y = 1 makes the count ambiguous
    lo_s = _sign(h_poly(1.0 - TOL, A, B, C), h_tol)
    hi_s = _sign(h_poly(1.0 + TOL, A, B, C), h_tol)
    slope = 3.0 * A - 3.0 * C
    if lo_s * hi_s < 0 or (hi_s == 0 and abs(slope) > math.sqrt(h_tol)):
        return RevivalClass(Verdict.DEGENERATE, **base)

    if abs(A) <= TOL:
        counts = {len(_sign_change_intervals(_breakpoints(A, B, C, s, h_tol))) for s in (-1, 0, 1)}
        if len(counts) > 1:
            return RevivalClass(Verdict.DEGENERATE, **base)

    intervals = _sign_change_intervals(_breakpoints(A, B, C, _sign(A, 0.0), h_tol))
    n = len(intervals)
    if n not in _BY_COUNT:  # pragma: no cover - a cubic has at most two on y > 1 here
        return RevivalClass(Verdict.DEGENERATE, **base)
    cands = cubic_real_roots(A, B, C)
    roots = tuple(float(_root_in(lo, hi, A, B, C, cands)) for lo, hi in intervals)
    return RevivalClass(_BY_COUNT[n], roots, **base)


def stationary_point_no_revival(A: float, B: float, C: float) -> bool:
    """No root y > 1, decided from y_min and h(1); valid only for A, C > 0."""
    if not (A > 0 and C > 0):
        raise ValueError("criterion needs A, C > 0")
    y_min = math.sqrt(C / A)
    h_min = h_poly(y_min, A, B, C)
    return h_min > 0 or (y_min <= 1 and h_poly(1.0, A, B, C) >= 0)


def ymin_and_h1(A: float, B: float, C: float) -> tuple[float, float]:
    if A <= 0:
        raise ValueError("stationary point undefined for A <= 0")
    if C < 0:
        raise ValueError("stationary point undefined for C < 0")
    return math.sqrt(C / A), A + 4.0 * B - 3.0 * C


# -------------------------------------------------------- Bell closed forms


def classical_bell_coeffs(x, v=(0.0, 0.0, 0.0)) -> tuple[float, float, float]:
    """(A, B, C) for the Bell three-port with mean intensities ``x``, variances ``v``."""
    x1, x2, x3 = (float(t) for t in x)
    v1, v2, v3 = (float(t) for t in v)
    if min(x1, x2, x3, v1, v2, v3) < 0:
        raise ValueError("means and variances must be nonnegative")
    tot = x1 + x2 + x3
    if tot == 0:
        raise ValueError("at least one source must have nonzero mean intensity")
    a = 3 * x2 * (x1 + x3) / tot**2 + 3 * (x2 * (v1 + v3) + v2 * (x1 + x3)) / tot**3
    b = 3 * x1 * x3 / tot**2 + 3 * (x1 * v3 + x3 * v1) / tot**3
    c = 12 * x1 * x2 * x3 / tot**3
    return a, b, c


def classical_bell_coeffs_batch(x: np.ndarray, v: np.ndarray):
    """Vectorized ``classical_bell_coeffs`` over rows of (n, 3) arrays."""
    x1, x2, x3 = x.T
    v1, v2, v3 = v.T
    tot = x.sum(axis=1)
    a = 3 * x2 * (x1 + x3) / tot**2 + 3 * (x2 * (v1 + v3) + v2 * (x1 + x3)) / tot**3
    b = 3 * x1 * x3 / tot**2 + 3 * (x1 * v3 + x3 * v1) / tot**3
    c = 12 * x1 * x2 * x3 / tot**3
    return a, b, c


def quantum_bell_coeffs(mu: float) -> tuple[float, float, float]:
    """(A, B, C) for three identical equal-energy sources with parameter ``mu``."""
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"mu={mu} outside [0, 1]")
    return 2.0 * (3.0 - 2.0 * mu) / 9.0, (3.0 - 2.0 * mu) / 9.0, 4.0 / 9.0


# ------------------------------------------------------- simplex inequality


def simplex_form(t1, t2, t3):
    """``t2 (t1 + t3) + 4 t1 t3 - 12 t1 t2 t3``; equals h(1) / 3 for the Bell coefficients."""
    return t2 * (t1 + t3) + 4 * t1 * t3 - 12 * t1 * t2 * t3


STATIONARY_POINTS = {
    "t0": (1 / 6, 2 / 3, 1 / 6),
    "t1": ((1 - math.sqrt(3) / 2) / 3, 1 / 3, (1 + math.sqrt(3) / 2) / 3),
}


@dataclass
class AppendixReport:
    resolution: int
    grid_min: float
    grid_argmin: tuple
    stationary_values: dict = field(default_factory=dict)
    edge_minima: dict = field(default_factory=dict)
    edge_max_mismatch: float = 0.0

    @property
    def ok(self) -> bool:
        return (
            self.grid_min >= -1e-12
            and abs(self.stationary_values["t0"] - 1 / 9) <= 1e-12
            and abs(self.stationary_values["t1"] - 2 / 9) <= 1e-12
            and all(m >= 0 for m in self.edge_minima.values())
            and self.edge_max_mismatch <= 1e-12
        )

    def to_json(self) -> str:
        d = asdict(self)
        d["ok"] = self.ok
        return json.dumps(d, indent=2)


def verify_appendix_a(grid_resolution: int) -> AppendixReport:
    """Dense check that h(1) >= 0 for fixed-intensity sources in the Bell three-port.

    Scans the simplex t1 + t2 + t3 = 1 on a lattice of spacing 1/resolution,
    evaluates the two interior stationary points and the three edge reductions.
    """
    if grid_resolution < 2:
        raise ValueError("grid resolution must be at least 2")
    n = grid_resolution
    i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    keep = i + j <= n
    t1, t2 = i[keep] / n, j[keep] / n
    t3 = 1.0 - t1 - t2
    vals = simplex_form(t1, t2, t3)
    k = int(np.argmin(vals))

    s = np.linspace(0.0, 1.0, n + 1)
    edges = {
        "t1=0": (simplex_form(0.0, s, 1 - s), s * (1 - s)),
        "t2=0": (simplex_form(s, 0.0, 1 - s), 4 * s * (1 - s)),
        "t3=0": (simplex_form(s, 1 - s, 0.0), s * (1 - s)),
    }
    return AppendixReport(
        resolution=n,
        grid_min=float(vals[k]),
        grid_argmin=(float(t1[k]), float(t2[k]), float(t3[k])),
        stationary_values={name: float(simplex_form(*t)) for name, t in STATIONARY_POINTS.items()},
        edge_minima={name: float(red.min()) for name, (_, red) in edges.items()},
        edge_max_mismatch=float(max(np.abs(full - red).max() for full, red in edges.values())),
    )
