"""Dense Hermitian linear algebra: eigendecomposition with projections,
matrix exponential by spectral mapping, and complex shifted solves.

These are the building blocks of the *exact* route; the resolvent route in
:mod:`spectral_cf.stone` never uses the eigendecomposition, so the two stay
independently checkable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstructionError,
    DimensionMismatchError,
    NumericalError,
    PreconditionError,
)
from .measures import WEIGHT_FLOOR, CharacteristicFunctionTrace, SpectralMeasure

HERMITICITY_TOL = 1e-12
STATE_NORM_TOL = 1e-12
SOLVE_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class HermitianOperator:
    """A dense complex square matrix, validated (and symmetrized) Hermitian.

    Asymmetry up to ``HERMITICITY_TOL`` is treated as rounding noise and
    removed by replacing the matrix with (M + M†)/2; anything larger is
    rejected.
    """

    entries: np.ndarray
    label: str | None = None

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ConstructionError(f"expected a square matrix, got shape {m.shape}")
        if m.shape[0] < 1:
            raise ConstructionError("dim must be >= 1")
        asym = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if asym > HERMITICITY_TOL:
            raise ConstructionError(
                f"matrix is not Hermitian: max |M - M†| = {asym:.3e} > {HERMITICITY_TOL:.0e}"
            )
        if asym > 0.0:
            m = (m + m.conj().T) / 2.0
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def norm2_upper(self) -> float:
        """Cheap upper bound for the spectral norm (max Gershgorin radius)."""
        a = np.abs(self.entries)
        return float(np.max(np.sum(a, axis=1))) if self.dim else 0.0

    def gershgorin_bounds(self) -> tuple[float, float]:
        """Interval certainly containing the spectrum."""
        d = np.real(np.diag(self.entries))
        r = np.sum(np.abs(self.entries), axis=1) - np.abs(np.diag(self.entries))
        return float(np.min(d - r)), float(np.max(d + r))


def as_operator(h, label: str | None = None) -> HermitianOperator:
    """Coerce an ndarray or HermitianOperator to HermitianOperator."""
    if isinstance(h, HermitianOperator):
        return h
    return HermitianOperator(np.asarray(h, dtype=complex), label=label)


@dataclass(frozen=True)
class StateVector:
    """A unit vector; norm must be 1 within ``STATE_NORM_TOL``."""

    amplitudes: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if v.size < 1:
            raise ConstructionError("state must have dim >= 1")
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > STATE_NORM_TOL:
            raise ConstructionError(
                f"state norm {nrm!r} differs from 1 by more than {STATE_NORM_TOL:.0e}"
            )
        v.setflags(write=False)
        object.__setattr__(self, "amplitudes", v)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes, max_drift: float = 1e-6) -> tuple["StateVector", float]:
        """Build a state, renormalizing small drift.

        Returns (state, drift) where drift = | ||v|| - 1 | before fixing.
        Raises PreconditionError when the drift exceeds ``max_drift``.
        """
        v = np.asarray(amplitudes, dtype=complex).reshape(-1)
        nrm = float(np.linalg.norm(v))
        drift = abs(nrm - 1.0)
        if nrm == 0.0 or drift > max_drift:
            raise PreconditionError(
                f"state norm {nrm!r} is off by {drift:.3e} (> {max_drift:.0e}); not renormalizing"
            )
        return cls(v / nrm), drift


def as_state(u) -> StateVector:
    if isinstance(u, StateVector):
        return u
    return StateVector(np.asarray(u, dtype=complex))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Distinct eigenvalues (ascending), orthoprojections, multiplicities."""

    eigenvalues: tuple[float, ...]
    projections: tuple[np.ndarray, ...]
    multiplicities: tuple[int, ...]

    @property
    def dim(self) -> int:
        return self.projections[0].shape[0]

    def identity_residual(self) -> float:
        s = sum(self.projections)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def reconstruction_residual(self, h: HermitianOperator) -> float:
        s = sum(lam * p for lam, p in zip(self.eigenvalues, self.projections))
        return float(np.max(np.abs(s - h.entries)))

    def expanded_eigenvalues(self) -> list[float]:
        """Eigenvalues repeated by multiplicity, ascending."""
        out: list[float] = []
        for lam, m in zip(self.eigenvalues, self.multiplicities):
            out.extend([lam] * m)
        return out


def _check_dims(h: HermitianOperator, u: StateVector) -> None:
    if h.dim != u.dim:
        raise DimensionMismatchError(f"operator dim {h.dim} != state dim {u.dim}")


def decompose(h, merge_tol: float | None = None) -> SpectralDecomposition:
    """Eigendecompose with degenerate-eigenvalue merging.

    Eigenvalues whose consecutive gaps are below ``merge_tol`` share one
    projection (sum of the rank-1 projectors). The default tolerance is
    1e-8 * max(1, max|eigenvalue|), so exactly-degenerate eigenvalues split
    only by rounding never produce spurious atoms.
    """
    h = as_operator(h)
    try:
        lams, vecs = np.linalg.eigh(h.entries)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"eigensolver failed for dim {h.dim}: {exc}") from exc
    if merge_tol is None:
        scale = max(1.0, float(np.max(np.abs(lams))) if lams.size else 1.0)
        merge_tol = 1e-8 * scale

    groups: list[list[int]] = [[0]]
    for i in range(1, lams.size):
        if lams[i] - lams[groups[-1][-1]] <= merge_tol:
            groups[-1].append(i)
        else:
            groups.append([i])

    eigenvalues, projections, multiplicities = [], [], []
    for idx in groups:
        block = vecs[:, idx]
        projections.append(block @ block.conj().T)
        eigenvalues.append(float(np.mean(lams[idx])))
        multiplicities.append(len(idx))
    return SpectralDecomposition(tuple(eigenvalues), tuple(projections), tuple(multiplicities))


def matrix_exp_it(h, t: float, dec: SpectralDecomposition | None = None) -> np.ndarray:
    """e^{itH} by spectral mapping: sum of e^{it lam_i} E_i."""
    h = as_operator(h)
    if dec is None:
        dec = decompose(h)
    out = np.zeros((h.dim, h.dim), dtype=complex)
    for lam, p in zip(dec.eigenvalues, dec.projections):
        out += np.exp(1j * t * lam) * p
    return out


def charfun_exact(h, u, ts) -> CharacteristicFunctionTrace:
    """<u, e^{itH} u> = sum_i e^{it lam_i} <u, E_i u> on a grid of times.

    Uses a single eigendecomposition; the weights <u, E_i u> are |V† u|²
    accumulated per eigenbranch, so the result equals the Fourier sum over
    the spectral measure's atoms.
    """
    h, u = as_operator(h), as_state(u)
    _check_dims(h, u)
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    lams, vecs = np.linalg.eigh(h.entries)
    w = np.abs(vecs.conj().T @ u.amplitudes) ** 2
    # phases: (nt, nlam) in lambda-chunks to bound memory for large truncations
    values = np.zeros(ts.size, dtype=complex)
    chunk = max(1, 8_388_608 // max(ts.size, 1))
    for i0 in range(0, lams.size, chunk):
        sl = slice(i0, min(i0 + chunk, lams.size))
        values += np.exp(1j * np.outer(ts, lams[sl])) @ w[sl]
    return CharacteristicFunctionTrace(ts, values, method="exact", epsilon=0.0,
                                       meta={"dim": h.dim})


def spectral_measure(h, u, merge_tol: float | None = None) -> SpectralMeasure:
    """Atoms (lam_i, <u, E_i u>) of the exact vacuum/state spectral measure.

    Weights are real and nonnegative within 1e-12 and sum to 1; atoms with
    weight below ``measures.WEIGHT_FLOOR`` are dropped (they are numerically
    indistinguishable from absent branches).
    """
    h, u = as_operator(h), as_state(u)
    _check_dims(h, u)
    dec = decompose(h, merge_tol=merge_tol)
    atoms = []
    for lam, p in zip(dec.eigenvalues, dec.projections):
        w = complex(u.amplitudes.conj() @ (p @ u.amplitudes))
        if abs(w.imag) > 1e-12 or w.real < -1e-12:
            raise NumericalError(f"weight {w} at {lam} is not a probability")
        if w.real >= WEIGHT_FLOOR:
            atoms.append((lam, float(w.real)))
    total = sum(w for _, w in atoms)
    if abs(total - 1.0) > 1e-10:
        raise NumericalError(f"atom weights sum to {total!r}, not 1")
    return SpectralMeasure(tuple(atoms), method="exact", epsilon_used=0.0)


def shifted_solve(h, z: complex, u) -> np.ndarray:
    """Solve (z I - H) x = u for complex z off the real axis.

    The residual ||(zI-H)x - u|| is checked against 1e-10 * ||u|| (= 1e-10
    for unit states).
    """
    h, u = as_operator(h), as_state(u)
    _check_dims(h, u)
    if complex(z).imag == 0.0:
        raise PreconditionError("shifted_solve requires Im(z) != 0")
    a = z * np.eye(h.dim, dtype=complex) - h.entries
    try:
        x = np.linalg.solve(a, u.amplitudes)
    except np.linalg.LinAlgError as exc:  # pragma: no cover
        raise NumericalError(f"shifted solve failed at z={z}: {exc}") from exc
    resid = float(np.linalg.norm(a @ x - u.amplitudes))
    if resid > SOLVE_RESIDUAL_TOL * float(np.linalg.norm(u.amplitudes)):
        raise NumericalError(f"shifted solve residual {resid:.3e} too large at z={z}")
    return x
