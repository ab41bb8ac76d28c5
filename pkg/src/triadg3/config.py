"""JSON config documents for interferometers, sources and overlaps.

A full document looks like::

    {
      "interferometer": "bell",            # or {"elements": [...]} or {"matrix": [[[re, im], ...], ...]}
      "sources": [
        {"classical": {"x": 1.0, "v": 0.0, "m3c": 0.0, "dist": "delta"},
         "quantum": {"mean_n": 1.0, "second_n": 1.0, "third_n": 1.0, "energy": 1.0}},
        ...
      ],
      "overlaps": {"r12": 0.6, "r23": 0.7, "r31": 0.42, "psi": 0.3},   # or {"delay": {"sigma": 1, "tau": 0.5}}
      "campaign": {"kind": "quantum", "mu": 0.6, "epsilon": 0.0628, "eta": 0.8, "n_trials": 10000},
      "seed": 1234
    }

A quantum source may give ``"dist": [p0, p1, ...]`` instead of moments.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .experiments import CampaignConfig
from .interferometer import bell_matrix, circuit_from_dict, compose_circuit
from .sources import (
    ClassicalSourceMoments,
    GaussianDelayModel,
    OverlapSet,
    QuantumSourceMoments,
    overlaps_from_delay,
)


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    doc: dict

    @classmethod
    def load(cls, path) -> "Config":
        try:
            return cls(json.loads(Path(path).read_text()))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc

    def matrix(self) -> np.ndarray:
        spec = self.doc.get("interferometer", "bell")
        if spec == "bell":
            return bell_matrix()
        if isinstance(spec, dict) and "elements" in spec:
            return compose_circuit(circuit_from_dict(spec))
        if isinstance(spec, dict) and "matrix" in spec:
            m = np.asarray(spec["matrix"], dtype=float)
            if m.shape != (3, 3, 2):
                raise ConfigError("matrix must be 3x3 entries of [re, im]")
            return m[..., 0] + 1j * m[..., 1]
        raise ConfigError(f"cannot interpret interferometer {spec!r}")

    def _source_docs(self) -> list:
        srcs = self.doc.get("sources")
        if not isinstance(srcs, list) or len(srcs) != 3:
            raise ConfigError("config needs exactly three sources")
        return srcs

    def classical_sources(self) -> list:
        out = []
        for s in self._source_docs():
            if "classical" not in s:
                raise ConfigError("every source needs a 'classical' block for the classical model")
            c = s["classical"]
            if c.get("dist") == "gamma" and "m3c" not in c:
                out.append(ClassicalSourceMoments.gamma(float(c["x"]), float(c.get("v", 0.0))))
            else:
                out.append(
                    ClassicalSourceMoments(
                        float(c["x"]), float(c.get("v", 0.0)), float(c.get("m3c", 0.0)), c.get("dist", "delta")
                    )
                )
        return out

    def quantum_sources(self) -> list:
        out = []
        for s in self._source_docs():
            if "quantum" not in s:
                raise ConfigError("every source needs a 'quantum' block for the quantum model")
            q = s["quantum"]
            energy = float(q.get("energy", 1.0))
            if "dist" in q:
                out.append(QuantumSourceMoments.from_distribution(q["dist"], energy))
            else:
                out.append(
                    QuantumSourceMoments(
                        float(q["mean_n"]), float(q["second_n"]), float(q.get("third_n", 0.0)), energy
                    )
                )
        return out

    def sources(self, model: str) -> list:
        if model == "classical":
            return self.classical_sources()
        if model == "quantum":
            return self.quantum_sources()
        raise ConfigError(f"unknown model {model!r}")

    def overlaps(self) -> OverlapSet:
        o = self.doc.get("overlaps")
        if o is None:
            raise ConfigError("config has no 'overlaps' block")
        if "delay" in o:
            return overlaps_from_delay(GaussianDelayModel(float(o["delay"]["sigma"]), float(o["delay"]["tau"])))
        return OverlapSet(float(o["r12"]), float(o["r23"]), float(o["r31"]), float(o.get("psi", 0.0)))

    def campaign(self, seed: Optional[int] = None) -> CampaignConfig:
        c = dict(self.doc.get("campaign") or {})
        if seed is not None:
            c["master_seed"] = seed
        elif "master_seed" not in c and "seed" in self.doc:
            c["master_seed"] = int(self.doc["seed"])
        return CampaignConfig.from_dict(c)

    def seed(self, override: Optional[int] = None) -> int:
        if override is not None:
            return override
        return int(self.doc.get("seed", 0))
