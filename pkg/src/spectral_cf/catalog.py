"""Catalogue of generator sets and observables.

Every matrix here is exact (integers, halves, surds), so bracket relations
are checked to 1e-12. The boson realization ``su11-boson(N)`` lives on a
truncated number basis, where relations hold exactly only on the leading
(interior) block; the truncation couples the last two basis vectors out of
the subspace.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import CatalogKeyError, PreconditionError
from .linalg import HermitianOperator, StateVector

SQ2 = float(np.sqrt(2.0))
SQ3 = float(np.sqrt(3.0))

GENERATOR_SET_NAMES = ("sl2R", "su2-pauli", "su11-pauli", "so3", "h3R", "su11-boson(N)")
OBSERVABLE_NAMES = (
    "sl2-H", "sl2-H0", "pauli-1", "pauli-2", "pauli-3", "su11-H", "casimir-so3", "h3-H",
)


@dataclass(frozen=True)
class BracketRelation:
    """[lhs_a, lhs_b] = sum_k coeff_k * generator_k."""

    lhs: tuple[str, str]
    rhs: dict[str, complex]

    def residual(self, gens: dict[str, np.ndarray], interior: int | None = None) -> float:
        a, b = gens[self.lhs[0]], gens[self.lhs[1]]
        lhs = a @ b - b @ a
        rhs = sum(c * gens[name] for name, c in self.rhs.items())
        diff = lhs - rhs
        if interior is not None:
            diff = diff[:interior, :interior]
        return float(np.max(np.abs(diff)))

    def describe(self) -> str:
        def coeff(c: complex) -> str:
            if c == 1:
                return ""
            if c == -1:
                return "-"
            if c.imag == 0:
                return f"{c.real:g}*"
            if c.real == 0:
                return ("i*" if c.imag == 1 else "-i*" if c.imag == -1
                        else f"{c.imag:g}i*")
            return f"({c.real:g}{c.imag:+g}i)*"

        terms = " + ".join(f"{coeff(c)}{n}" for n, c in self.rhs.items())
        return f"[{self.lhs[0]},{self.lhs[1]}] = {terms or '0'}"


@dataclass(frozen=True)
class GeneratorSet:
    name: str
    generators: dict[str, np.ndarray]
    relations: tuple[BracketRelation, ...]
    interior: int | None = None  # None: relations hold on the full matrices

    def verify(self) -> dict[str, float]:
        """Residual of every declared bracket relation."""
        return {r.describe(): r.residual(self.generators, self.interior) for r in self.relations}

    def max_residual(self) -> float:
        return max(self.verify().values())


@dataclass(frozen=True)
class CatalogObservable:
    """An observable with its analytic reference law.

    ``reference_atoms``: unit state -> [(location, weight)], the parametric
    spectral-measure law (conjugate-bilinear in the state's amplitudes).
    ``reference_cf`` names the registered closed form for the catalogue's
    preferred state (where one is defined).
    """

    name: str
    matrix: HermitianOperator
    reference_cf: str | None = None
    reference_atoms: Callable[[np.ndarray], list[tuple[float, float]]] | None = None
    description: str = ""
    meta: dict = field(default_factory=dict)

    def reference_charfun(self, u, ts) -> np.ndarray:
        """Fourier sum over the parametric reference atoms."""
        if self.reference_atoms is None:
            raise CatalogKeyError(f"{self.name} has no parametric reference law")
        amps = np.asarray(u, dtype=complex).reshape(-1) if not isinstance(u, StateVector) \
            else u.amplitudes
        ts = np.asarray(ts, dtype=float)
        out = np.zeros(ts.shape, dtype=complex)
        for lam, w in self.reference_atoms(amps):
            out += w * np.exp(1j * ts * lam)
        return out


def _pauli() -> dict[str, np.ndarray]:
    s1 = np.array([[0, 1], [1, 0]], dtype=complex)
    s2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
    s3 = np.array([[1, 0], [0, -1]], dtype=complex)
    return {"sigma1": s1, "sigma2": s2, "sigma3": s3}


def _ladder(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1)), k=1).astype(complex)


_BOSON_RE = re.compile(r"^su11-boson\((\d+)\)$")


def build_generators(name: str) -> GeneratorSet:
    """Construct a named generator set and verify its bracket relations."""
    if name == "sl2R":
        delta = np.array([[0, 0], [-1, 0]], dtype=complex)
        r = np.array([[0, 1], [0, 0]], dtype=complex)
        rho = np.array([[1, 0], [0, -1]], dtype=complex)
        gens = {"Delta": delta, "R": r, "rho": rho}
        rels = (
            BracketRelation(("Delta", "R"), {"rho": 1}),
            BracketRelation(("rho", "R"), {"R": 2}),
            BracketRelation(("rho", "Delta"), {"Delta": -2}),
        )
        gs = GeneratorSet(name, gens, rels)
    elif name == "su2-pauli":
        p = _pauli()
        rels = (
            BracketRelation(("sigma1", "sigma2"), {"sigma3": 2j}),
            BracketRelation(("sigma2", "sigma3"), {"sigma1": 2j}),
            BracketRelation(("sigma3", "sigma1"), {"sigma2": 2j}),
        )
        gs = GeneratorSet(name, p, rels)
    elif name == "su11-pauli":
        p = _pauli()
        gens = {
            "K1": 0.5j * p["sigma2"],
            "K2": -0.5j * p["sigma1"],
            "K0": 0.5 * p["sigma3"],
        }
        rels = (
            BracketRelation(("K1", "K2"), {"K0": -1j}),
            BracketRelation(("K0", "K1"), {"K2": 1j}),
            BracketRelation(("K2", "K0"), {"K1": 1j}),
        )
        gs = GeneratorSet(name, gens, rels)
    elif name == "so3":
        lx = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], dtype=complex)
        ly = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], dtype=complex)
        lz = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex)
        gens = {"Lx": lx, "Ly": ly, "Lz": lz}
        rels = (
            BracketRelation(("Lx", "Ly"), {"Lz": 1}),
            BracketRelation(("Ly", "Lz"), {"Lx": 1}),
            BracketRelation(("Lz", "Lx"), {"Ly": 1}),
        )
        gs = GeneratorSet(name, gens, rels)
    elif name == "h3R":
        d = np.zeros((3, 3), dtype=complex); d[0, 1] = 1
        x = np.zeros((3, 3), dtype=complex); x[1, 2] = 1
        h = np.zeros((3, 3), dtype=complex); h[0, 2] = 1
        gens = {"D": d, "X": x, "h": h}
        rels = (
            BracketRelation(("D", "X"), {"h": 1}),
            BracketRelation(("D", "h"), {}),
            BracketRelation(("X", "h"), {}),
        )
        gs = GeneratorSet(name, gens, rels)
    else:
        m = _BOSON_RE.match(name)
        if not m:
            raise CatalogKeyError(
                f"unknown generator set {name!r}; known: {', '.join(GENERATOR_SET_NAMES)}"
            )
        n_max = int(m.group(1))
        if n_max < 4:
            raise PreconditionError("su11-boson(N) needs N >= 4")
        a = _ladder(n_max)
        ad = a.conj().T
        gens = {
            "K+": 0.5 * (ad @ ad),
            "K-": 0.5 * (a @ a),
            "K0": 0.25 * (a @ ad + ad @ a),
        }
        rels = (
            BracketRelation(("K0", "K+"), {"K+": 1}),
            BracketRelation(("K0", "K-"), {"K-": -1}),
            BracketRelation(("K+", "K-"), {"K0": -2}),
        )
        # ladder factors reach two steps past the block edge, hence N-1
        gs = GeneratorSet(name, gens, rels, interior=n_max - 1)
    # exact matrices must satisfy brackets to 1e-12; truncated boson entries
    # grow like N, so allow the rounding floor to scale accordingly
    tol = 1e-12 if gs.interior is None else 1e-12 * max(1.0, (len(next(iter(gs.generators.values()))) / 40.0) ** 2)
    resid = gs.max_residual()
    if resid > tol:
        bad = {k: v for k, v in gs.verify().items() if v > tol}
        raise PreconditionError(f"bracket relations violated for {name}: {bad}")
    return gs


def _g_sl2(a: complex, b: complex) -> float:
    """Conjugate-bilinear form behind the two-level sl2 observable's law."""
    return float((abs(a) ** 2 - abs(b) ** 2 + 2 * (np.conj(a) * b).real).real)


def _g_su11(a: complex, b: complex) -> float:
    ab = np.conj(a) * b
    return float(abs(a) ** 2 - abs(b) ** 2 + 2 * ab.real - 2 * ab.imag)


def build_observable(name: str) -> CatalogObservable:
    """Construct a catalogued observable with its reference law."""
    if name == "sl2-H":
        gs = build_generators("sl2R").generators
        m = gs["R"] - gs["Delta"] + gs["rho"]

        def atoms(u):
            g = _g_sl2(u[0], u[1])
            return [(-SQ2, (2 - SQ2 * g) / 4), (SQ2, (2 + SQ2 * g) / 4)]

        return CatalogObservable(name, HermitianOperator(m, label=name), "sl2-H-vacuum", atoms,
                                 "two-level observable built from the sl2R generators")
    if name == "sl2-H0":
        gs = build_generators("sl2R").generators
        m = gs["R"] - gs["Delta"]

        def atoms(u):
            re = float((np.conj(u[0]) * u[1]).real)
            return [(-1.0, 0.5 * (1 - 2 * re)), (1.0, 0.5 * (1 + 2 * re))]

        return CatalogObservable(name, HermitianOperator(m, label=name), "sl2-H0-vacuum", atoms,
                                 "off-diagonal part of sl2-H (equals pauli-1)")
    if name in ("pauli-1", "pauli-2", "pauli-3"):
        p = _pauli()
        idx = int(name[-1])
        m = p[f"sigma{idx}"]
        if idx == 1:
            def atoms(u):
                re = float((np.conj(u[0]) * u[1]).real)
                return [(-1.0, 0.5 * (1 - 2 * re)), (1.0, 0.5 * (1 + 2 * re))]
        elif idx == 2:
            def atoms(u):
                im = float((np.conj(u[0]) * u[1]).imag)
                return [(-1.0, 0.5 * (1 - 2 * im)), (1.0, 0.5 * (1 + 2 * im))]
        else:
            def atoms(u):
                return [(-1.0, float(abs(u[1]) ** 2)), (1.0, float(abs(u[0]) ** 2))]
        return CatalogObservable(name, HermitianOperator(m, label=name), None, atoms,
                                 f"spin observable sigma_{idx}")
    if name == "su11-H":
        gs = build_generators("su11-pauli").generators
        m = 1j * (gs["K1"] + gs["K2"]) + gs["K0"]

        def atoms(u):
            g = _g_su11(u[0], u[1])
            return [(-SQ3 / 2, 0.5 * (1 - g / SQ3)), (SQ3 / 2, 0.5 * (1 + g / SQ3))]

        return CatalogObservable(name, HermitianOperator(m, label=name), "su11-H-e1", atoms,
                                 "Hermitian combination i(K1+K2)+K0 of the su11-pauli generators")
    if name == "casimir-so3":
        gs = build_generators("so3").generators
        m = gs["Lx"] @ gs["Lx"] + gs["Ly"] @ gs["Ly"] + gs["Lz"] @ gs["Lz"]

        def atoms(u):
            return [(-2.0, 1.0)]

        return CatalogObservable(name, HermitianOperator(m, label=name), "casimir-so3", atoms,
                                 "central element Lx^2+Ly^2+Lz^2 = -2I")
    if name == "h3-H":
        gs = build_generators("h3R").generators
        n = gs["D"] + gs["X"] + gs["h"]
        m = n + n.conj().T

        def atoms(u):
            s = u[0] + u[1] + u[2]
            w2 = float(abs(s) ** 2) / 3.0
            return [(-1.0, 1.0 - w2), (2.0, w2)]

        return CatalogObservable(name, HermitianOperator(m, label=name), None, atoms,
                                 "symmetrized Heisenberg element (all-ones matrix minus identity)")
    raise CatalogKeyError(f"unknown observable {name!r}; known: {', '.join(OBSERVABLE_NAMES)}")


def fock_vacuum_state(name: str) -> StateVector:
    """The state annihilated by the set's lowering element (lowest weight).

    Defined for: sl2R ((0,1): Delta u = 0, rho u = -u), su11-pauli
    ((0,1): (K1 - i K2) u = 0, K0 u = -u/2), su11-boson(N) (e0: a e0 = 0).
    """
    if name == "sl2R":
        return StateVector(np.array([0.0, 1.0]))
    if name == "su11-pauli":
        return StateVector(np.array([0.0, 1.0]))
    m = _BOSON_RE.match(name)
    if m:
        n_max = int(m.group(1))
        v = np.zeros(n_max + 1)
        v[0] = 1.0
        return StateVector(v)
    raise CatalogKeyError(f"no vacuum defined for catalogue entry {name!r}")


def reference_states(name: str) -> dict[str, StateVector]:
    """Named unit states used by the analytic reference laws."""
    if name in ("sl2R", "sl2-H", "sl2-H0"):
        return {"vacuum": fock_vacuum_state("sl2R")}
    if name in ("su11-pauli", "su11-H"):
        return {
            "e0": StateVector(np.array([1.0, 0.0])),
            "e1": StateVector(np.array([0.0, 1.0])),
        }
    raise CatalogKeyError(f"no reference states catalogued for {name!r}")


def vacuum_for_observable(name: str) -> StateVector:
    """Map an observable name to its natural vacuum state, when one exists."""
    if name in ("sl2-H", "sl2-H0"):
        return fock_vacuum_state("sl2R")
    if name == "su11-H":
        return fock_vacuum_state("su11-pauli")
    raise CatalogKeyError(f"observable {name!r} has no catalogued vacuum state")


def list_catalog() -> dict[str, list[dict]]:
    """Machine-readable catalogue listing (used by the CLI)."""
    gens = []
    for n in ("sl2R", "su2-pauli", "su11-pauli", "so3", "h3R"):
        gs = build_generators(n)
        gens.append({
            "name": n,
            "generators": list(gs.generators),
            "relations": [r.describe() for r in gs.relations],
        })
    gens.append({
        "name": "su11-boson(N)",
        "generators": ["K+", "K-", "K0"],
        "relations": ["[K0,K+] = K+", "[K0,K-] = -K-", "[K+,K-] = -2*K0"],
    })
    obs = []
    for n in OBSERVABLE_NAMES:
        o = build_observable(n)
        obs.append({
            "name": n,
            "dim": o.matrix.dim,
            "reference_cf": o.reference_cf,
            "description": o.description,
        })
    return {"generator_sets": gens, "observables": obs}
