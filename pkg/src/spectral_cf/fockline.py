"""Finite-dimensional realizations of the position/momentum pair on the line.

Two realizations are provided:

* ``FockTruncation`` — number basis e_0..e_{n_max} with ladder matrix
  elements; X and P built from the ladder pair, the vacuum is e_0 exactly.
* ``GridLine`` — uniform periodic grid on [-x_max, x_max) with diagonal X,
  trigonometric (Fourier) spectral differentiation for P, and a sampled,
  renormalized Gaussian vacuum.

Operator identities (normal-ordering expansions, commutators with operator
exponentials, ordered-product disentanglement) are asserted on the interior
block only: ladder operators couple the last basis vectors out of the
truncated subspace, so errors concentrate at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditioningError, PreconditionError
from .forms import splitting, stirling2
from .linalg import HermitianOperator, StateVector, decompose
from .measures import CharacteristicFunctionTrace

OBSERVABLE_MODES = ("X", "P", "X_plus_P", "XP_plus_PX", "quad", "su11_H")


@dataclass(frozen=True)
class FockTruncation:
    n_max: int
    X: np.ndarray
    P: np.ndarray
    A: np.ndarray
    Adag: np.ndarray
    vacuum: StateVector

    @property
    def dim(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class GridLine:
    n_points: int
    x_min: float
    x_max: float
    nodes: np.ndarray
    X: np.ndarray
    P: np.ndarray
    vacuum: StateVector

    @property
    def dim(self) -> int:
        return self.n_points


def make_fock(n_max: int) -> FockTruncation:
    """Truncated number basis with a|n> = sqrt(n)|n-1>, X=(a+a†)/√2, P=(a-a†)/(i√2)."""
    if n_max < 2:
        raise PreconditionError("make_fock requires n_max >= 2")
    a = np.diag(np.sqrt(np.arange(1.0, n_max + 1)), k=1).astype(complex)
    ad = a.conj().T
    x = (a + ad) / np.sqrt(2.0)
    p = (a - ad) / (1j * np.sqrt(2.0))
    vac = np.zeros(n_max + 1)
    vac[0] = 1.0
    return FockTruncation(n_max, x, p, a, ad, StateVector(vac))


def make_grid(n_points: int, x_max: float) -> GridLine:
    """Uniform periodic grid with spectral momentum.

    The nodes are x_j = -x_max + j*(2 x_max / n); P acts as -i d/dx through
    the FFT, which is exactly Hermitian in the discrete inner product. The
    vacuum samples pi^{-1/4} e^{-x^2/2} and is renormalized; x_max must be
    large enough that the boundary amplitudes are negligible.
    """
    if n_points < 16 or n_points % 2 != 0:
        raise PreconditionError("make_grid requires even n_points >= 16")
    if x_max <= 0:
        raise PreconditionError("make_grid requires x_max > 0")
    dx = 2.0 * x_max / n_points
    nodes = -x_max + dx * np.arange(n_points)
    k = 2.0 * np.pi * np.fft.fftfreq(n_points, d=dx)
    p = np.fft.ifft(k[:, None] * np.fft.fft(np.eye(n_points), axis=0), axis=0)
    p = (p + p.conj().T) / 2.0  # remove FFT rounding asymmetry (~1e-16)
    x = np.diag(nodes).astype(complex)
    vac = np.pi ** -0.25 * np.exp(-nodes ** 2 / 2.0)
    vac = vac / np.linalg.norm(vac)
    return GridLine(n_points, float(nodes[0]), x_max, nodes, x, p, StateVector(vac))


def observable_xp(mode: str, space, a: float | None = None, b: float | None = None) -> HermitianOperator:
    """Composite observable on a realization: X, P, X+P, XP+PX, aX²+bP², or
    the quadratic combination (3X² - P²)/4 built from the boson su(1,1) set.

    ``XP_plus_PX`` is the symmetrized product X·P + P·X. On the Fock
    realization it equals i(a†² - a²) on interior rows, and (3X²-P²)/4 equals
    (a†²+a²)/2 + (a a†+a† a)/4 entrywise.
    """
    x, p = space.X, space.P
    if mode == "X":
        m = x
    elif mode == "P":
        m = p
    elif mode == "X_plus_P":
        m = x + p
    elif mode == "XP_plus_PX":
        m = x @ p + p @ x
    elif mode == "quad":
        if a is None or b is None:
            raise PreconditionError("quad mode needs real coefficients a, b")
        m = float(a) * (x @ x) + float(b) * (p @ p)
    elif mode == "su11_H":
        m = 0.25 * (3.0 * (x @ x) - p @ p)
    else:
        raise PreconditionError(f"unknown mode {mode!r}; known: {', '.join(OBSERVABLE_MODES)}")
    m = (m + m.conj().T) / 2.0  # drop rounding asymmetry from the products
    label = mode if mode != "quad" else f"quad({a},{b})"
    return HermitianOperator(m, label=f"{label}@{type(space).__name__}")


def vacuum_charfun(space, mode: str, ts, a: float | None = None, b: float | None = None) -> CharacteristicFunctionTrace:
    """Exact-route vacuum CF of a composite observable on this realization."""
    from .linalg import charfun_exact

    h = observable_xp(mode, space, a=a, b=b)
    tr = charfun_exact(h, space.vacuum, ts)
    tr.meta["space"] = type(space).__name__
    tr.meta["size"] = space.dim
    return tr


def _interior(m: np.ndarray, interior: int) -> np.ndarray:
    return m[:interior, :interior]


def _exp_hermitian(m: np.ndarray, scalar: complex) -> np.ndarray:
    """e^{scalar * M} for Hermitian M via eigendecomposition (never a series)."""
    dec = decompose(HermitianOperator(m))
    out = np.zeros(m.shape, dtype=complex)
    for lam, proj in zip(dec.eigenvalues, dec.projections):
        out += np.exp(scalar * lam) * proj
    return out


def exp_xp(space, c: complex) -> np.ndarray:
    """e^{c·XP} using XP = (XP+PX)/2 + i/2 · I.

    The symmetrized product is Hermitian, so the exponential is a spectral
    mapping times the exact scalar e^{i c / 2}.
    """
    sym = 0.5 * (space.X @ space.P + space.P @ space.X)
    sym = (sym + sym.conj().T) / 2.0
    return _exp_hermitian(sym, c) * np.exp(0.5j * c)


def exp_quadratic_commutators(space: FockTruncation, b: complex, interior: int) -> dict[str, float]:
    """Interior residuals of the three commutation identities satisfied by
    e^{bX²} and e^{ibXP}:

      (cxx)  [e^{bX²}, XP] - 2ib X² e^{bX²}
      (cpp)  e^{ibXP} P² - e^{-2b} P² e^{ibXP}
      (cxp)  [e^{bX²}, P²] - (2b - 4b²X² + 4ib·XP) e^{bX²}

    Requires ||Re(b)·X²|| restricted to the interior <= 5 so the
    exponentials stay representable (purely imaginary b gives a unitary
    factor and has no growth); raises ConditioningError otherwise.
    """
    x2 = space.X @ space.X
    x2 = (x2 + x2.conj().T) / 2.0
    cond = float(np.linalg.norm(complex(b).real * _interior(x2, interior), 2))
    if cond > 5.0:
        raise ConditioningError(
            f"||Re(b)·X²|| on the interior is {cond:.3g} > 5; shrink |b| or the interior"
        )
    xp = space.X @ space.P
    p2 = space.P @ space.P
    ebx2 = _exp_hermitian(x2, b)
    eibxp = exp_xp(space, 1j * b)

    r1 = (ebx2 @ xp - xp @ ebx2) - 2j * b * (x2 @ ebx2)
    r2 = eibxp @ p2 - np.exp(-2.0 * b) * (p2 @ eibxp)
    r3 = (ebx2 @ p2 - p2 @ ebx2) - (2.0 * b * np.eye(space.dim)
                                    - 4.0 * b * b * x2 + 4j * b * xp) @ ebx2
    return {
        "cxx": float(np.max(np.abs(_interior(r1, interior)))),
        "cpp": float(np.max(np.abs(_interior(r2, interior)))),
        "cxp": float(np.max(np.abs(_interior(r3, interior)))),
    }


def xp_power_normal_ordering(space: FockTruncation, n: int, interior: int) -> float:
    """Interior residual of (XP)^n = sum_k (-i)^{n-k} S(n,k) X^k P^k,
    S being the Stirling partition numbers."""
    if not 1 <= n <= 5:
        raise PreconditionError("xp_power_normal_ordering supports 1 <= n <= 5")
    xp = space.X @ space.P
    lhs = np.linalg.matrix_power(xp, n)
    rhs = np.zeros_like(lhs)
    xk = np.eye(space.dim, dtype=complex)
    pk = np.eye(space.dim, dtype=complex)
    for k in range(1, n + 1):
        xk = xk @ space.X
        pk = pk @ space.P
        rhs = rhs + ((-1j) ** (n - k)) * stirling2(n, k) * (xk @ pk)
    return float(np.max(np.abs(_interior(lhs - rhs, interior))))


def quadratic_evolution_residual(space: FockTruncation, a: float, b: float, t: float) -> float:
    """Norm distance between e^{it(aX²+bP²)}·vacuum and the ordered product

        e^{p/2} · e^{qX²} · e^{ipXP} · e^{rP²} · vacuum,

    with (p, q, r) the disentanglement coefficients at s = it and the XP
    factor realized as e^{ip·(XP+PX)/2} e^{-p/2}.
    """
    p, q, r = splitting(a, b, 1j * t)
    h = observable_xp("quad", space, a=a, b=b)
    direct = matrix_action_exp(h.entries, 1j * t, space.vacuum.amplitudes)

    x2 = space.X @ space.X
    x2 = (x2 + x2.conj().T) / 2.0
    p2 = space.P @ space.P
    p2 = (p2 + p2.conj().T) / 2.0
    psi = _exp_hermitian(p2, r) @ space.vacuum.amplitudes
    psi = exp_xp(space, 1j * p) @ psi
    psi = _exp_hermitian(x2, q) @ psi
    psi = np.exp(p / 2.0) * psi
    return float(np.linalg.norm(direct - psi))


def matrix_action_exp(m: np.ndarray, scalar: complex, v: np.ndarray) -> np.ndarray:
    """e^{scalar·M} v for Hermitian M (spectral mapping applied to a vector)."""
    lams, vecs = np.linalg.eigh(m)
    return vecs @ (np.exp(scalar * lams) * (vecs.conj().T @ v))


def ccr_residuals(space, interior: int | None = None) -> dict[str, float]:
    """Canonical commutation diagnostics.

    For a Fock truncation: max-abs of ([X,P] - iI) on the interior block (an
    exact identity there). For a grid: the matrix identity cannot hold (X is
    diagonal, so the commutator has zero diagonal); the meaningful check is
    the weak form ||([X,P] - iI) v|| on Gaussian-localized states, reported
    for the vacuum and for X·vacuum (renormalized).
    """
    comm = space.X @ space.P - space.P @ space.X
    dev = comm - 1j * np.eye(space.dim)
    if isinstance(space, FockTruncation):
        k = interior if interior is not None else space.n_max // 2
        return {"interior_matrix": float(np.max(np.abs(_interior(dev, k))))}
    v0 = space.vacuum.amplitudes
    v1 = space.X @ v0
    v1 = v1 / np.linalg.norm(v1)
    return {
        "weak_vacuum": float(np.linalg.norm(dev @ v0)),
        "weak_xvacuum": float(np.linalg.norm(dev @ v1)),
    }
