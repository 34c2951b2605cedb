"""Analytic reference functions and combinatorial kernels.

The registry distinguishes three kinds of forms:

* ``cf``      — validated characteristic functions: f(0)=1, |f|<=1,
                f(-t)=conj(f(t)); these are the arbiter-the-numerics-agree-on
                forms asserted against both computation routes.
* ``display`` — recorded display variants that differ from the validated
                form by an exact, machine-checkable transformation (stored in
                ``relation``); kept so the relationship itself can be asserted.
* ``density`` — probability densities; must integrate to 1 over their
                validity range (checked at registration).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import (
    BranchTrackingError,
    CatalogKeyError,
    PoleError,
    PreconditionError,
)

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

STIRLING_MAX_N = 64


def stirling2(n: int, k: int) -> int:
    """Partition numbers S(n, k) by the exact integer triangle recurrence
    S(n,k) = k·S(n-1,k) + S(n-1,k-1), S(0,0)=1; S(n,k) = 0 outside the
    triangle."""
    if not (0 <= n <= STIRLING_MAX_N and k >= 0):
        raise PreconditionError(f"stirling2 requires 0 <= n <= {STIRLING_MAX_N} and k >= 0")
    if k > n:
        return 0
    return _stirling2(n, k)


@lru_cache(maxsize=None)
def _stirling2(n: int, k: int) -> int:
    if n == 0:
        return 1 if k == 0 else 0
    if k == 0 or k > n:
        return 0
    return k * _stirling2(n - 1, k) + _stirling2(n - 1, k - 1)


def _log_cosh(w: complex) -> complex:
    """log(cosh(w)), overflow-safe (cosh is even, factor out e^{|Re w|})."""
    if w.real < 0:
        w = -w
    return w + cmath.log(0.5 * (1.0 + cmath.exp(-2.0 * w))) if w.real > 0 else \
        cmath.log(cmath.cosh(w))


def splitting(a: float, b: float, s: complex) -> tuple[complex, complex, complex]:
    """Disentanglement coefficients (p, q, r) for e^{s(aX²+bP²)}.

    With mu = sqrt(a·b) (principal branch, i.e. i·sqrt|ab| for ab < 0):

        q(s) = a/(2 mu) · tanh(2 mu s)
        r(s) = b/(2 mu) · tanh(2 mu s)
        p(s) = log(sech(2 mu s))

    These satisfy p' = -4bq, r' = b·e^{2p}, q' = a - 4bq², which is exactly
    what makes the ordered product solve dR/ds = (aX²+bP²) R.

    For ab < 0 the hyperbolic functions are routed through real
    trigonometric/hyperbolic identities when 2·mu·s is purely imaginary or
    purely real (s real, resp. s on the imaginary axis), avoiding complex
    cancellation; zeros of cosh(2 mu s) raise PoleError.
    """
    if a == 0 or b == 0:
        raise PreconditionError("splitting requires a != 0 and b != 0")
    ab = a * b
    mu: complex = complex(math.sqrt(ab)) if ab > 0 else 1j * math.sqrt(-ab)
    w = 2.0 * mu * complex(s)

    scale = max(1.0, abs(w))
    if abs(w.real) < 1e-14 * scale:
        # purely imaginary argument: tanh(i y) = i tan y, cosh(i y) = cos y
        y = w.imag
        c = math.cos(y)
        if abs(c) < 1e-12:
            raise PoleError(f"cosh(2·mu·s) vanishes near s={s}")
        tanh_w: complex = 1j * math.tan(y)
        p = -cmath.log(complex(c))
    elif abs(w.imag) < 1e-14 * scale:
        xre = w.real
        tanh_w = complex(math.tanh(xre))
        p = complex(-(abs(xre) + math.log1p(math.exp(-2.0 * abs(xre))) - math.log(2.0)))
    else:
        ch = cmath.cosh(w)
        if abs(ch) < 1e-12:
            raise PoleError(f"cosh(2·mu·s) vanishes near s={s}")
        tanh_w = cmath.tanh(w)
        p = -_log_cosh(w)
    q = a / (2.0 * mu) * tanh_w
    r = b / (2.0 * mu) * tanh_w
    return p, q, r


@dataclass(frozen=True)
class SplittingFunctions:
    """The coefficient maps s -> p(s), q(s), r(s) for fixed (a, b)."""

    a: float
    b: float

    def p(self, s: complex) -> complex:
        return splitting(self.a, self.b, s)[0]

    def q(self, s: complex) -> complex:
        return splitting(self.a, self.b, s)[1]

    def r(self, s: complex) -> complex:
        return splitting(self.a, self.b, s)[2]


def quadratic_vacuum_cf(a: float, b: float, ts, raw: bool = False):
    """Vacuum CF of aX² + bP² from the disentanglement coefficients.

    Validated form (default):

        f(t) = sqrt(2) e^{p/2} / sqrt( e^{2p} + (2q-1)(2r-1) ),   (p,q,r at s=it)

    which satisfies f(0) = 1. With ``raw=True`` the recorded display variant
    is evaluated instead: e^{2p} replaced by p² and the sign of q flipped
    (the variant's coefficient sqrt(a/b) evaluated on the principal branch);
    it satisfies raw(0) = sqrt(2).

    The complex square root is branch-tracked by continuity from t = 0
    (phase unwrapping with a |delta arg| < pi/2 guard), not taken pointwise.
    Requires ab < 0 (the regime where e^{it(aX²+bP²)} is unitary).
    """
    if a * b >= 0:
        raise PreconditionError("quadratic_vacuum_cf requires ab < 0")
    ts_arr = np.atleast_1d(np.asarray(ts, dtype=float))
    out = np.empty(ts_arr.shape, dtype=complex)
    step = 0.02 / max(1.0, math.sqrt(abs(a * b)))

    def eval_d(t: float) -> tuple[complex, complex]:
        p, q, r = splitting(a, b, 1j * t)
        if raw:
            q = -q
            den = p * p + (2.0 * q - 1.0) * (2.0 * r - 1.0)
        else:
            den = cmath.exp(2.0 * p) + (2.0 * q - 1.0) * (2.0 * r - 1.0)
        return SQRT2 * cmath.exp(p / 2.0), den

    for sgn in (1.0, -1.0):
        sel = (ts_arr > 0) if sgn > 0 else (ts_arr < 0)
        if sgn > 0:
            sel |= (ts_arr == 0.0)
        if not np.any(sel):
            continue
        targets = np.abs(ts_arr[sel])
        tlim = float(np.max(targets))
        path = np.union1d(np.arange(0.0, tlim + step, step), targets)
        nums = np.empty(path.size, dtype=complex)
        dens = np.empty(path.size, dtype=complex)
        for i, tp in enumerate(path):
            nums[i], dens[i] = eval_d(sgn * tp)
        mags = np.abs(dens)
        if np.any(mags < 1e-13):
            raise BranchTrackingError("denominator passes through 0 on the path")
        dphi = np.diff(np.angle(dens))
        dphi = (dphi + np.pi) % (2.0 * np.pi) - np.pi
        if np.any(np.abs(dphi) >= 0.5 * np.pi):
            raise BranchTrackingError(
                "phase step >= pi/2 along the path; refine the step or shrink |t|"
            )
        phase = np.concatenate(([np.angle(dens[0])], np.angle(dens[0]) + np.cumsum(dphi)))
        sqrt_d = np.sqrt(mags) * np.exp(0.5j * phase)
        vals = nums / sqrt_d
        idx = np.searchsorted(path, targets)
        out[sel] = vals[idx]

    return out[0] if np.isscalar(ts) or np.asarray(ts).ndim == 0 else out


@dataclass(frozen=True)
class ClosedForm:
    """A registered analytic form.

    ``relation`` (display variants only) maps (validated evaluate, ts) to the
    values the variant must equal — the exact recorded transformation linking
    the variant to its validated counterpart.
    """

    id: str
    kind: str  # "cf" | "display" | "density"
    evaluate: Callable[[np.ndarray], np.ndarray]
    validity: tuple[float, float]
    provenance: str
    variant_of: str | None = None
    relation: Callable[[Callable, np.ndarray], np.ndarray] | None = None
    relation_note: str = ""


def _ev(fn):
    def wrapped(ts):
        return fn(np.asarray(ts, dtype=complex) * (1.0 + 0.0j)).astype(complex)
    return wrapped


def _sech_sqrt(scale: float):
    def f(ts):
        ts = np.asarray(ts, dtype=float)
        return (1.0 / np.sqrt(np.cosh(scale * ts))).astype(complex)
    return f


def _su11_boson_cf(ts):
    ts = np.asarray(ts, dtype=float)
    arg = SQRT3 * ts / 2.0
    den = np.cosh(arg) - (1j / SQRT3) * np.sinh(arg)
    # Re(den) = cosh >= 1, so the principal square root is already continuous
    return 1.0 / np.sqrt(den)


def _su11_boson_cf_raw(ts):
    ts = np.asarray(ts, dtype=float)
    arg = SQRT3 * ts / 2.0
    sech = 1.0 / np.cosh(arg)
    tanh = np.tanh(arg)
    den = 3.0 + 3.0 * np.log(sech) ** 2 - 3.0 * tanh ** 2 + 4j * SQRT3 * tanh
    # Re(den) = 3(1 - tanh²) + 3 log²(sech) > 0: principal root is continuous
    return np.sqrt(6.0 * sech / den)


_REGISTRY: dict[str, ClosedForm] = {}


def _register(form: ClosedForm) -> None:
    _REGISTRY[form.id] = form


def _build_registry() -> None:
    inf = math.inf
    _register(ClosedForm(
        "sl2-H-vacuum", "cf",
        _ev(lambda t: np.cos(SQRT2 * t) - (1j / SQRT2) * np.sin(SQRT2 * t)),
        (-inf, inf), "two-level observable, vacuum state: two-atom Fourier sum"))
    _register(ClosedForm(
        "sl2-H0-vacuum", "cf", _ev(np.cos),
        (-inf, inf), "off-diagonal two-level observable, vacuum state"))
    _register(ClosedForm(
        "su11-H-e0", "cf",
        _ev(lambda t: np.cos(SQRT3 * t / 2.0) + (1j / SQRT3) * np.sin(SQRT3 * t / 2.0)),
        (-inf, inf), "su(1,1) two-level observable in state (1,0)"))
    _register(ClosedForm(
        "su11-H-e1", "cf",
        _ev(lambda t: np.cos(SQRT3 * t / 2.0) - (1j / SQRT3) * np.sin(SQRT3 * t / 2.0)),
        (-inf, inf), "su(1,1) two-level observable in state (0,1) (lowest weight)"))
    _register(ClosedForm(
        "casimir-so3", "cf", _ev(lambda t: np.exp(-2j * t)),
        (-inf, inf), "Casimir element -2I: deterministic law at -2"))
    _register(ClosedForm(
        "gaussian-X", "cf", _ev(lambda t: np.exp(-t * t / 4.0)),
        (-inf, inf), "position observable, vacuum: N(0, 1/2) law (CDF-derived)"))
    _register(ClosedForm(
        "gaussian-P", "cf", _ev(lambda t: np.exp(-t * t / 4.0)),
        (-inf, inf), "momentum observable, vacuum: N(0, 1/2) law (CDF-derived)"))
    _register(ClosedForm(
        "gaussian-X+P", "cf", _ev(lambda t: np.exp(-t * t / 2.0)),
        (-inf, inf), "X+P, vacuum: standard normal law"))
    _register(ClosedForm(
        "xppx-vacuum", "cf", _sech_sqrt(2.0),
        (-150.0, 150.0), "symmetrized XP+PX, vacuum: dilation-flow Gaussian integral"))
    _register(ClosedForm(
        "su11-boson-vacuum", "cf", _su11_boson_cf,
        (-150.0, 150.0), "(3X²-P²)/4 vacuum CF from the disentangled evolution"))

    _register(ClosedForm(
        "gaussian-X-raw", "display",
        _ev(lambda t: SQRT2 * np.exp(-t * t / 2.0)), (-inf, inf),
        "recorded display variant of gaussian-X",
        variant_of="gaussian-X",
        relation=lambda v, ts: SQRT2 * v(SQRT2 * np.asarray(ts, dtype=float)),
        relation_note="raw(t) = sqrt(2) * validated(sqrt(2) t)"))
    _register(ClosedForm(
        "gaussian-P-raw", "display",
        _ev(lambda t: SQRT2 * np.exp(-t * t / 2.0)), (-inf, inf),
        "recorded display variant of gaussian-P",
        variant_of="gaussian-P",
        relation=lambda v, ts: SQRT2 * v(SQRT2 * np.asarray(ts, dtype=float)),
        relation_note="raw(t) = sqrt(2) * validated(sqrt(2) t)"))
    _register(ClosedForm(
        "xppx-vacuum-raw", "display", _sech_sqrt(1.0), (-300.0, 300.0),
        "recorded display variant of xppx-vacuum (CF of the half-sum (XP+PX)/2)",
        variant_of="xppx-vacuum",
        relation=lambda v, ts: v(np.asarray(ts, dtype=float) / 2.0),
        relation_note="raw(t) = validated(t/2)"))
    _register(ClosedForm(
        "su11-boson-vacuum-raw", "display", _su11_boson_cf_raw, (-150.0, 150.0),
        "recorded display variant of su11-boson-vacuum (p² in place of e^{2p}, "
        "flipped branch of the q coefficient; raw(0) = sqrt(2))",
        variant_of="su11-boson-vacuum",
        relation=None,
        relation_note="raw(t) = quadratic_vacuum_cf(3/4, -1/4, t, raw=True)"))

    _register(ClosedForm(
        "gaussian-X-density", "density",
        lambda lam: np.exp(-np.asarray(lam, dtype=float) ** 2) / math.sqrt(math.pi),
        (-8.0, 8.0), "N(0, 1/2) density, the vacuum law of the position observable"))
    _register(ClosedForm(
        "gaussian-X+P-density", "density",
        lambda lam: np.exp(-np.asarray(lam, dtype=float) ** 2 / 2.0) / math.sqrt(2.0 * math.pi),
        (-9.0, 9.0), "standard normal density, the vacuum law of X+P"))

    _check_registry()


def simpson_weights(n: int, h: float) -> np.ndarray:
    """Composite Simpson weights for n uniformly spaced samples (n odd)."""
    if n < 3 or n % 2 == 0:
        raise PreconditionError("simpson_weights requires odd n >= 3")
    w = np.ones(n)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w * (h / 3.0)


def _check_registry() -> None:
    for form in _REGISTRY.values():
        if form.kind == "cf":
            v = complex(np.asarray(form.evaluate(np.array([0.0])))[0])
            if abs(v - 1.0) > 1e-12:
                raise AssertionError(f"{form.id}: f(0) = {v}, expected 1")
        elif form.kind == "density":
            lo, hi = form.validity
            n = 4001
            lam = np.linspace(lo, hi, n)
            w = simpson_weights(n, lam[1] - lam[0])
            mass = float(np.real(np.sum(w * form.evaluate(lam))))
            if abs(mass - 1.0) > 1e-8:
                raise AssertionError(f"{form.id}: integrates to {mass}, expected 1")


def registry() -> dict[str, ClosedForm]:
    if not _REGISTRY:
        _build_registry()
    return dict(_REGISTRY)


def get_form(form_id: str) -> ClosedForm:
    reg = registry()
    if form_id not in reg:
        raise CatalogKeyError(
            f"unknown closed form {form_id!r}; known: {', '.join(sorted(reg))}"
        )
    return reg[form_id]


def cf_reference(form_id: str, t):
    """Evaluate a registered form at t (scalar or array), checking validity."""
    form = get_form(form_id)
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    lo, hi = form.validity
    if np.any(t_arr < lo) or np.any(t_arr > hi):
        raise PreconditionError(f"{form_id}: argument outside validity range [{lo}, {hi}]")
    vals = np.asarray(form.evaluate(t_arr), dtype=complex)
    if np.isscalar(t) or np.asarray(t).ndim == 0:
        return complex(vals[0])
    return vals
