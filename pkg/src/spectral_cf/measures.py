"""Value types shared by the exact and resolvent-based routes."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

WEIGHT_FLOOR = 1e-12  # atoms below this weight are dropped from measures
CDF_MONOTONE_SLACK = 1e-10


@dataclass(frozen=True)
class SpectralMeasure:
    """The scalar measure d<u, E_lam u>: atoms plus optional sampled parts.

    ``atoms`` is a list of (location, weight) pairs; ``density_samples`` and
    ``cdf_samples`` (when present) are (n, 2) arrays of (lambda, value) rows.
    ``epsilon_used`` is 0 for the exact route, the smallest smoothing width
    otherwise.
    """

    atoms: tuple[tuple[float, float], ...]
    method: str
    epsilon_used: float = 0.0
    density_samples: np.ndarray | None = None
    cdf_samples: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def atom_mass(self) -> float:
        return float(sum(w for _, w in self.atoms))

    def density_mass(self) -> float:
        """Trapezoid integral of the sampled continuous part (0 if absent)."""
        if self.density_samples is None or len(self.density_samples) < 2:
            return 0.0
        lam, val = self.density_samples[:, 0], self.density_samples[:, 1]
        return float(np.trapezoid(val, lam))

    def total_mass(self) -> float:
        return self.atom_mass() + self.density_mass()

    def validate(self) -> None:
        for lam, w in self.atoms:
            if w < -WEIGHT_FLOOR:
                raise ValueError(f"negative atom weight {w} at {lam}")
        if self.cdf_samples is not None and len(self.cdf_samples) >= 2:
            vals = self.cdf_samples[:, 1]
            if np.any(np.diff(vals) < -CDF_MONOTONE_SLACK):
                raise ValueError("cdf samples are not nondecreasing")


@dataclass(frozen=True)
class CharacteristicFunctionTrace:
    """Sampled complex function t -> <u, e^{itH} u> with provenance metadata.

    ``method`` is "exact" or "stone"; ``epsilon`` is the smoothing width used
    by the resolvent route (0 for exact); ``meta`` carries truncation /
    quadrature details.
    """

    ts: np.ndarray
    values: np.ndarray
    method: str
    epsilon: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "ts", np.asarray(self.ts, dtype=float))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=complex))
        if self.ts.shape != self.values.shape:
            raise ValueError("ts and values must have equal shapes")

    def at(self, t: float) -> complex:
        """Value at a sampled time (exact match within 1e-12 required)."""
        idx = int(np.argmin(np.abs(self.ts - t)))
        if abs(self.ts[idx] - t) > 1e-12:
            raise KeyError(f"t={t} is not a sample point")
        return complex(self.values[idx])
