"""Monte Carlo campaigns over perturbed, lossy Bell circuits."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .correlation import DARK_TOL, shape_coefficients_batch
from .interferometer import bell_circuit, circuit_to_dict, compose_circuit, perturb_circuit
from .shape import Verdict, classify
from .sources import QuantumSourceMoments

CHUNK = 512
MAX_EXEMPLARS = 10


@dataclass(frozen=True)
class CampaignConfig:
    model: str = "classical"
    epsilon: float = 2 * math.pi / 100
    eta: float = 0.8
    n_trials: int = 10_000
    mu: float = 1.0
    master_seed: int = 0
    x_range: tuple = (0.0, 1.0)
    v_range: tuple = (0.0, 0.0)
    # classical only: use these means instead of drawing them
    fixed_x: Optional[tuple] = None

    def __post_init__(self):
        if self.model not in ("classical", "quantum"):
            raise ValueError(f"unknown model {self.model!r}")
        if self.n_trials < 1:
            raise ValueError("n_trials must be at least 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be nonnegative")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if self.model == "quantum" and not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")

    @classmethod
    def from_dict(cls, doc: dict) -> "CampaignConfig":
        doc = dict(doc)
        if "kind" in doc:
            doc["model"] = doc.pop("kind")
        for key in ("x_range", "v_range", "fixed_x"):
            if doc.get(key) is not None:
                doc[key] = tuple(float(t) for t in doc[key])
        known = cls.__dataclass_fields__
        unknown = set(doc) - set(known)
        if unknown:
            raise ValueError(f"unknown campaign keys: {sorted(unknown)}")
        return cls(**doc)


@dataclass
class CampaignResult:
    config: CampaignConfig
    counts: dict
    n_dark: int
    exemplars: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def n_valid(self) -> int:
        return sum(self.counts.values())

    @property
    def n_simple(self) -> int:
        return self.counts[Verdict.SIMPLE_REVIVAL.value]

    @property
    def n_double(self) -> int:
        return self.counts[Verdict.DIP_IN_REVIVAL.value]

    @property
    def revival_fraction(self) -> float:
        return (self.n_simple + self.n_double) / self.n_valid if self.n_valid else 0.0

    def binomial_error(self) -> float:
        r, n = self.revival_fraction, self.n_valid
        return math.sqrt(r * (1 - r) / n) if n else 0.0

    def to_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "counts": self.counts,
            "n_dark": self.n_dark,
            "revival_fraction": self.revival_fraction,
            "exemplars": self.exemplars,
            "metadata": self.metadata,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1)


def trial_rng(master_seed: int, trial: int) -> np.random.Generator:
    """Independent stream for one trial, keyed on ``(master_seed, trial)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([master_seed, trial])))


def _draw_trial(cfg: CampaignConfig, nominal, trial: int):
    rng = trial_rng(cfg.master_seed, trial)
    spec = perturb_circuit(nominal, cfg.epsilon, rng=rng)
    if cfg.model == "quantum":
        return spec, None, None
    if cfg.fixed_x is not None:
        x = np.array(cfg.fixed_x, dtype=float)
    else:
        x = rng.uniform(*cfg.x_range, size=3)
    v = rng.uniform(*cfg.v_range, size=3) if cfg.v_range[1] > cfg.v_range[0] else np.full(3, cfg.v_range[0])
    return spec, x, v


def quantum_campaign_source(mu: float) -> QuantumSourceMoments:
    return QuantumSourceMoments.with_mu(mu)


def evaluate_trials(cfg: CampaignConfig, start: int, stop: int):
    """Per-trial records ``(trial, RevivalClass | None, (S, A, B, C) | None, spec, x, v)``.

    ``None`` marks a dark-port trial.
    """
    nominal = bell_circuit(cfg.eta)
    specs, us, xs, vs = [], [], [], []
    for t in range(start, stop):
        spec, x, v = _draw_trial(cfg, nominal, t)
        specs.append(spec)
        us.append(compose_circuit(spec))
        xs.append(x)
        vs.append(v)
    U = np.array(us)
    if cfg.model == "classical":
        x = np.array(xs)
        v = np.array(vs)
        moments = (x, v, 3.0 * x * v)  # excess third moment only shifts S
    else:
        q = quantum_campaign_source(cfg.mu)
        n = len(us)
        x = np.full((n, 3), q.energy * q.mean_n)
        moments = tuple(np.full((n, 3), val) for val in (q.energy, q.mean_n, q.second_n, q.third_n))
    d = np.einsum("nia,na->ni", np.abs(U) ** 2, x)
    dark = (d <= DARK_TOL).any(axis=1)

    out = []
    ok = ~dark
    if ok.any():
        coeffs = shape_coefficients_batch(U[ok], tuple(m[ok] for m in moments), cfg.model)
        coeffs = np.column_stack(coeffs)
    k = 0
    for i, t in enumerate(range(start, stop)):
        if dark[i]:
            out.append((t, None, None, specs[i], xs[i], vs[i]))
            continue
        s, a, b, c = coeffs[k]
        k += 1
        out.append((t, classify(a, b, c), (s, a, b, c), specs[i], xs[i], vs[i]))
    return out


def _run(cfg: CampaignConfig, workers: int) -> CampaignResult:
    bounds = [(s, min(s + CHUNK, cfg.n_trials)) for s in range(0, cfg.n_trials, CHUNK)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(lambda b: evaluate_trials(cfg, *b), bounds))
    else:
        chunks = [evaluate_trials(cfg, *b) for b in bounds]

    counts = {v.value: 0 for v in Verdict}
    n_dark = 0
    exemplars = {v.value: [] for v in Verdict if v is not Verdict.NO_REVIVAL}
    for chunk in chunks:
        for t, rc, coeffs, spec, x, v in chunk:
            if rc is None:
                n_dark += 1
                continue
            counts[rc.verdict.value] += 1
            bucket = exemplars.get(rc.verdict.value)
            if bucket is not None and len(bucket) < MAX_EXEMPLARS:
                ex = {
                    "trial": t,
                    "circuit": circuit_to_dict(spec),
                    "coefficients": dict(zip("SABC", map(float, coeffs))),
                    "verdict": rc.verdict.value,
                    "roots_gt1": list(rc.roots_gt1),
                }
                if cfg.model == "classical":
                    ex["x"] = [float(t) for t in x]
                    ex["v"] = [float(t) for t in v]
                else:
                    ex["mu"] = cfg.mu
                bucket.append(ex)

    meta = {}
    if cfg.model == "quantum":
        q = quantum_campaign_source(cfg.mu)
        meta["source"] = {
            "photon_distribution": list(q.dist),
            "mean_n": q.mean_n,
            "second_n": q.second_n,
            "third_n": q.third_n,
            "third_moment_rule": "unique distribution on {0,1,2} with mean 1 and variance 1-mu",
        }
    else:
        meta["source"] = {"third_moment_rule": "m3c = 0; does not affect A, B, C"}
    return CampaignResult(cfg, counts, n_dark, exemplars, meta)


def run_classical_campaign(cfg: CampaignConfig, workers: int = 1) -> CampaignResult:
    """Classify G3 shapes for classical sources through perturbed lossy Bell circuits."""
    if cfg.model != "classical":
        raise ValueError("run_classical_campaign needs model='classical'")
    return _run(cfg, workers)


def run_quantum_campaign(cfg: CampaignConfig, workers: int = 1) -> CampaignResult:
    """Same campaign for three identical quantum sources at ``cfg.mu``."""
    if cfg.model != "quantum":
        raise ValueError("run_quantum_campaign needs model='quantum'")
    return _run(cfg, workers)


def run_campaign(cfg: CampaignConfig, workers: int = 1) -> CampaignResult:
    return _run(cfg, workers)


def mu_scan(cfg: CampaignConfig, mu_grid: Sequence[float], workers: int = 1) -> list:
    """Quantum campaign at each ``mu``; every point reuses the same circuits (same seed)."""
    grid = [float(m) for m in mu_grid]
    if any(not 0.0 <= m <= 1.0 for m in grid):
        raise ValueError("mu grid must lie within [0, 1]")
    base = replace(cfg, model="quantum")
    return [(m, run_quantum_campaign(replace(base, mu=m), workers)) for m in grid]


def mu_scan_csv(scan) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["mu", "r_total", "r_simple", "r_double"])
    for m, res in scan:
        n = res.n_valid or 1
        writer.writerow([f"{m:.17g}", f"{res.revival_fraction:.17g}", f"{res.n_simple / n:.17g}", f"{res.n_double / n:.17g}"])
    return buf.getvalue()


def parse_grid(text: str) -> list[float]:
    """``"start:stop:step"`` (inclusive stop) or a comma-separated list."""
    if ":" in text:
        start, stop, step = (float(t) for t in text.split(":"))
        if step <= 0:
            raise ValueError("grid step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + k * step, 12) for k in range(n)]
    return [float(t) for t in text.split(",") if t.strip()]
