"""Acceptance suite: one test per delivery criterion.

Each test prints a single summary line (visible on failure or with -s) and
asserts the criterion's frozen tolerances. Criterion 5's sum-observable CDF
check is expected to fail at the requested tolerance on the mandated
discretization; the failure message carries the measured floor and the
resolution argument. See README for the discussion.
"""

import math
import time

import numpy as np
import pytest
from scipy.special import erf

import spectral_cf as s

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)


def _report(num: int, parts: list[tuple[str, float, float]]) -> None:
    """Print one line for the criterion; fail listing every violated part."""
    bad = [(label, err, tol) for label, err, tol in parts if not (err <= tol)]
    status = "FAIL" if bad else "PASS"
    detail = "; ".join(f"{label}: {err:.3e} (tol {tol:.0e})" for label, err, tol in parts)
    print(f"criterion {num} [{status}] {detail}")
    if bad:
        msg = "; ".join(f"{label}: measured {err:.3e} > tolerance {tol:.0e}"
                        for label, err, tol in bad)
        pytest.fail(f"criterion {num}: {msg}")


def test_criterion_1_two_level_exact_suite():
    start = time.monotonic()
    obs = s.build_observable("sl2-H")
    u = s.vacuum_for_observable("sl2-H")

    dec = s.decompose(obs.matrix)
    eig_err = max(abs(dec.eigenvalues[0] + SQRT2), abs(dec.eigenvalues[1] - SQRT2))

    meas = s.spectral_measure(obs.matrix, u)
    (lam_lo, w_lo), (lam_hi, w_hi) = meas.atoms
    atom_err = max(abs(lam_lo + SQRT2), abs(lam_hi - SQRT2),
                   abs(w_lo - (2.0 + SQRT2) / 4.0), abs(w_hi - (2.0 - SQRT2) / 4.0))

    ts = np.linspace(-5.0, 5.0, 256)
    target = np.cos(SQRT2 * ts) - 1j / SQRT2 * np.sin(SQRT2 * ts)
    cf_err = float(np.max(np.abs(s.charfun_exact(obs.matrix, u, ts).values - target)))

    elapsed = time.monotonic() - start
    _report(1, [("eigenvalues +-sqrt2", eig_err, 1e-12),
                ("vacuum atoms", atom_err, 1e-12),
                ("trace vs closed form", cf_err, 1e-12),
                ("runtime (s)", elapsed, 1.0)])


def test_criterion_2_small_matrix_exact_suite():
    start = time.monotonic()
    parts = []
    ts = np.linspace(-5.0, 5.0, 201)

    # Pauli traces in the parametric two-level law
    plus = s.StateVector([1.0 / SQRT2, 1.0 / SQRT2])
    e0 = s.StateVector([1.0, 0.0])
    worst = 0.0
    for name in ("pauli-1", "pauli-2", "pauli-3"):
        obs = s.build_observable(name)
        for u in (plus, e0):
            exact = s.charfun_exact(obs.matrix, u, ts).values
            worst = max(worst, float(np.max(np.abs(exact - obs.reference_charfun(u, ts)))))
    parts.append(("pauli traces", worst, 1e-10))

    # su(1,1) two-level trace and basis-state atom weights
    obs = s.build_observable("su11-H")
    err = 0.0
    for form_id, amps in (("su11-H-e0", (1.0, 0.0)), ("su11-H-e1", (0.0, 1.0))):
        u = s.StateVector(amps)
        exact = s.charfun_exact(obs.matrix, u, ts).values
        err = max(err, float(np.max(np.abs(exact - s.cf_reference(form_id, ts)))))
    parts.append(("su11 traces", err, 1e-10))

    w_plus = 0.5 * (1.0 + 1.0 / SQRT3)
    got0 = dict(s.spectral_measure(obs.matrix, s.StateVector([1.0, 0.0])).atoms)
    got1 = dict(s.spectral_measure(obs.matrix, s.StateVector([0.0, 1.0])).atoms)
    lam_hi = max(got0)
    watom_err = max(abs(lam_hi - SQRT3 / 2.0), abs(got0[lam_hi] - w_plus),
                    abs(got1[max(got1)] - (1.0 - w_plus)))
    parts.append(("su11 atom weights", watom_err, 1e-10))

    # central element: pure phase
    obs = s.build_observable("casimir-so3")
    u = s.StateVector([1.0, 0.0, 0.0])
    exact = s.charfun_exact(obs.matrix, u, ts).values
    parts.append(("casimir trace", float(np.max(np.abs(exact - np.exp(-2j * ts)))), 1e-10))

    # symmetrized Heisenberg element: atoms against the reference law
    obs = s.build_observable("h3-H")
    err = 0.0
    for u in (s.StateVector([1.0, 0.0, 0.0]),
              s.StateVector([1.0 / SQRT3, 1.0 / SQRT3, 1.0 / SQRT3])):
        ref = {lam: w for lam, w in obs.reference_atoms(u.amplitudes) if w > 1e-12}
        got = dict(s.spectral_measure(obs.matrix, u).atoms)
        if len(ref) != len(got):
            err = max(err, 1.0)
            continue
        for lam, w in ref.items():
            nearest = min(got, key=lambda x: abs(x - lam))
            err = max(err, abs(nearest - lam), abs(got[nearest] - w))
    parts.append(("h3 atoms", err, 1e-10))

    parts.append(("runtime (s)", time.monotonic() - start, 1.0))
    _report(2, parts)


def test_criterion_3_bracket_relations():
    start = time.monotonic()
    worst = 0.0
    names = [n for n in s.GENERATOR_SET_NAMES if "(N)" not in n] + ["su11-boson(40)"]
    for name in names:
        worst = max(worst, s.build_generators(name).max_residual())
    _report(3, [("all catalogued brackets", worst, 1e-12),
                ("runtime (s)", time.monotonic() - start, 1.0)])


def test_criterion_4_resolvent_route_on_the_two_level_observable():
    start = time.monotonic()
    obs = s.build_observable("sl2-H")
    u = s.vacuum_for_observable("sl2-H")

    eps = 1e-3
    cfg = s.ResolventProbeConfig(epsilons=(eps,), t_grid=(-30.0, 30.0, 600001))
    ts = np.linspace(-5.0, 5.0, 256)
    st = s.stone_charfun(obs.matrix, u, cfg, ts)
    exact = s.charfun_exact(obs.matrix, u, ts).values
    damp_err = float(np.max(np.abs(st.values - exact * np.exp(-eps * np.abs(ts)))))

    cfg = s.ResolventProbeConfig(epsilons=(4e-3, 2e-3, 1e-3), t_grid=(-30.0, 30.0, 1201))
    meas = s.stone_cdf(obs.matrix, u, cfg)
    ref = dict(obs.reference_atoms(u.amplitudes))
    atom_err = 0.0 if len(meas.atoms) == len(ref) else 1.0
    for lam, w in meas.atoms:
        key = min(ref, key=lambda r: abs(r - lam))
        atom_err = max(atom_err, abs(key - lam), abs(ref[key] - w))

    _report(4, [("damped trace vs exact*e^{-eps|t|}", damp_err, 1e-6),
                ("extrapolated atom recovery", atom_err, 1e-4),
                ("runtime (s)", time.monotonic() - start, 10.0)])


def test_criterion_5_distribution_functions_on_the_line():
    start = time.monotonic()
    line = s.make_grid(512, 10.0)
    dx = float(line.nodes[1] - line.nodes[0])

    # position observable: rungs sit above the grid's eigenvalue spacing dx
    x_op = s.observable_xp("X", line)
    cfg = s.ResolventProbeConfig(
        epsilons=tuple(1.4 * dx * j for j in (5, 4, 3, 2, 1)),
        t_grid=(-7.0, 7.0, 561))
    meas = s.stone_cdf(x_op, line.vacuum, cfg)
    lam, vals = meas.cdf_samples[:, 0], meas.cdf_samples[:, 1]
    keep = np.abs(lam) <= 5.0 + 1e-12
    x_err = float(np.max(np.abs(vals[keep] - 0.5 * (1.0 + erf(lam[keep])))))

    # sum observable: its discretized spectrum is an arithmetic ladder of
    # spacing pi/x_max ~ 0.314, and smoothing widths must stay above that
    # spacing to see a continuum; the extrapolated bias floor is ~2e-3 at
    # this resolution (8 rungs reach ~6e-4), so the 1e-4 target is not
    # attainable on the mandated 512-point, x_max=10 line.
    xp_op = s.observable_xp("X_plus_P", line)
    spacing = math.pi / 10.0
    cfg = s.ResolventProbeConfig(
        epsilons=tuple(1.4 * spacing * j for j in (5, 4, 3, 2, 1)),
        t_grid=(-10.0, 10.0, 561))
    meas = s.stone_cdf(xp_op, line.vacuum, cfg)
    lam, vals = meas.cdf_samples[:, 0], meas.cdf_samples[:, 1]
    keep = np.abs(lam) <= 5.0 + 1e-12
    xp_err = float(np.max(np.abs(vals[keep] - 0.5 * (1.0 + erf(lam[keep] / SQRT2)))))

    ts = np.linspace(-4.0, 4.0, 321)
    cf = s.charfun_exact(xp_op, line.vacuum, ts)
    cf_err = float(np.max(np.abs(cf.values - np.exp(-ts * ts / 2.0))))

    _report(5, [("position cdf vs erf", x_err, 1e-4),
                ("sum-observable cdf vs erf (resolution-limited)", xp_err, 1e-4),
                ("sum-observable trace vs gaussian", cf_err, 1e-4),
                ("runtime (s)", time.monotonic() - start, 60.0)])


def test_criterion_6_symmetrized_product_observable():
    start = time.monotonic()
    fk = s.make_fock(3200)
    ts = np.linspace(-3.0, 3.0, 121)
    target = (1.0 / np.cosh(2.0 * ts)) ** 0.5

    cf = s.vacuum_charfun(fk, "XP_plus_PX", ts)
    exact_err = float(np.max(np.abs(cf.values - target)))

    # display variant is the same law on a halved argument
    raw = s.get_form("xppx-vacuum-raw")
    base = s.get_form("xppx-vacuum")
    rel_err = float(np.max(np.abs(raw.evaluate(ts) - raw.relation(base.evaluate, ts))))

    # resolvent route, corrected for the Poisson damping
    h = s.observable_xp("XP_plus_PX", fk)
    eps = 0.05
    cfg = s.ResolventProbeConfig(epsilons=(eps,), t_grid=(-40.0, 40.0, 11853))
    st = s.stone_charfun(h, fk.vacuum, cfg, ts)
    stone_err = float(np.max(np.abs(st.values * np.exp(eps * np.abs(ts)) - target)))

    # Fourier inversion: unit mass and frozen profile. Beyond |t| ~ 6 the
    # truncated matrix trace is dominated by finite-dimension revivals, so
    # the wide-window inversion takes the law just validated above.
    ts_inv = np.arange(-1000, 1001) * 0.02
    cf_inv = s.CharacteristicFunctionTrace(
        ts_inv, (1.0 / np.cosh(2.0 * ts_inv)) ** 0.5 + 0.0j, method="exact")
    lams = np.linspace(-14.0, 14.0, 2801)
    dens, _ = s.invert_cf_to_density(cf_inv, lams)
    mass_err = abs(float(np.trapezoid(dens, lams)) - 1.0)
    frozen = {1400: 0.417313420837, 1450: 0.327681463842,
              1500: 0.193783492497, 1600: 0.062695729773}
    prof_err = max(abs(dens[i] - v) for i, v in frozen.items())

    _report(6, [("deep-truncation trace vs sech law", exact_err, 1e-6),
                ("display variant relation", rel_err, 1e-12),
                ("corrected resolvent trace", stone_err, 1e-4),
                ("inverted density mass", mass_err, 1e-4),
                ("inverted density profile", prof_err, 1e-6),
                ("runtime (s)", time.monotonic() - start, 120.0)])


def test_criterion_7_operator_identity_suite():
    start = time.monotonic()
    parts = []

    fk = s.make_fock(200)
    su11 = s.observable_xp("su11_H", fk).entries
    k0 = 0.25 * (fk.A @ fk.Adag + fk.Adag @ fk.A)
    kp = 0.5 * (fk.Adag @ fk.Adag)
    km = 0.5 * (fk.A @ fk.A)
    inner = fk.dim // 2
    parts.append(("ladder combination identity",
                  float(np.max(np.abs((kp + km + k0 - su11)[:inner, :inner]))), 1e-8))

    res = s.exp_quadratic_commutators(s.make_fock(120), 0.05j, 60)
    parts.append(("exponential commutators", max(res.values()), 1e-6))

    fk160 = s.make_fock(160)
    worst = max(s.xp_power_normal_ordering(fk160, n, 80) for n in (1, 2, 3, 4))
    parts.append(("normal-ordering powers", worst, 1e-6))

    x, k = 0.7, 3
    lhs = sum(x ** n / math.factorial(n) * s.stirling2(n, k) for n in range(41))
    rhs = (math.exp(x) - 1.0) ** k / math.factorial(k)
    parts.append(("stirling exponential identity", abs(lhs - rhs), 1e-10))

    fk400 = s.make_fock(400)
    ts = np.linspace(-2.0, 2.0, 81)
    cf = s.vacuum_charfun(fk400, "su11_H", ts)
    ref = s.quadratic_vacuum_cf(0.75, -0.25, ts)
    parts.append(("normalized quadratic trace vs numerics",
                  float(np.max(np.abs(cf.values - ref))), 1e-5))

    parts.append(("runtime (s)", time.monotonic() - start, 120.0))
    _report(7, parts)


def test_criterion_8_display_variants_carry_recorded_factors():
    start = time.monotonic()
    parts = []
    line = s.make_grid(256, 8.0)
    ts = np.linspace(-4.0, 4.0, 161)

    # normalized laws against numerics
    gauss = np.exp(-ts * ts / 4.0)
    worst = 0.0
    for mode in ("X", "P"):
        cf = s.vacuum_charfun(line, mode, ts)
        worst = max(worst, float(np.max(np.abs(cf.values - gauss))))
    parts.append(("normalized position/momentum laws", worst, 1e-10))

    # raw variants: exactly sqrt2 * law(sqrt2 t), anchored at raw(0) = sqrt2
    err = 0.0
    for form_id in ("gaussian-X-raw", "gaussian-P-raw"):
        raw = s.get_form(form_id)
        base = s.get_form(raw.variant_of)
        err = max(err, float(np.max(np.abs(raw.evaluate(ts) - raw.relation(base.evaluate, ts)))))
        err = max(err, abs(raw.evaluate(np.array([0.0]))[0] - SQRT2))
        numeric = s.vacuum_charfun(line, "X" if "X" in form_id else "P", SQRT2 * ts).values
        err = max(err, float(np.max(np.abs(raw.evaluate(ts) - SQRT2 * numeric))))
    parts.append(("raw gaussian variants", err, 1e-10))

    # unnormalized quadratic form: sqrt2 at 0, matching the registered display
    ts2 = np.linspace(-2.0, 2.0, 41)
    raw_vals = s.quadratic_vacuum_cf(0.75, -0.25, ts2, raw=True)
    disp = s.get_form("su11-boson-vacuum-raw").evaluate(ts2)
    err = float(np.max(np.abs(raw_vals - disp)))
    err = max(err, abs(raw_vals[20] - SQRT2))
    norm = s.get_form("su11-boson-vacuum").evaluate(ts2)
    err = max(err, abs(norm[20] - 1.0))
    parts.append(("unnormalized quadratic variant", err, 1e-12))

    parts.append(("runtime (s)", time.monotonic() - start, 60.0))
    _report(8, parts)


def test_criterion_9_randomized_property_sweep():
    start = time.monotonic()
    rng = np.random.default_rng(2026)
    ts = np.linspace(-4.0, 4.0, 81)
    recon_err = cf_bound_err = conj_err = group_err = damp_err = 0.0

    for trial in range(100):
        dim = int(rng.integers(2, 33))
        m = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        m = (m + m.conj().T) / 2.0
        h = s.HermitianOperator(3.0 * m / max(1.0, np.max(np.abs(np.linalg.eigvalsh(m)))))
        v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        u = s.StateVector(v / np.linalg.norm(v))

        dec = s.decompose(h)
        recon_err = max(recon_err, dec.reconstruction_residual(h),
                        dec.identity_residual())

        vals = s.charfun_exact(h, u, ts).values
        cf_bound_err = max(cf_bound_err, float(np.max(np.abs(vals))) - 1.0)
        conj_err = max(conj_err, float(np.max(np.abs(vals - np.conj(vals[::-1])))))

        a, b = rng.uniform(-2.0, 2.0, size=2)
        left = s.matrix_exp_it(h, a, dec) @ s.matrix_exp_it(h, b, dec)
        group_err = max(group_err, float(np.max(np.abs(left - s.matrix_exp_it(h, a + b, dec)))))

        if trial % 5 == 0:  # damping at two eps values on a fifth of the draws
            exact = vals
            lo, hi = h.gershgorin_bounds()
            for eps in (0.05, 0.02):
                n = (int((hi - lo + 20.0) / (0.12 * eps)) + 1) | 1
                cfg = s.ResolventProbeConfig(epsilons=(eps,),
                                             t_grid=(lo - 10.0, hi + 10.0, n))
                st = s.stone_charfun(h, u, cfg, ts)
                damp_err = max(damp_err, float(np.max(
                    np.abs(st.values - exact * np.exp(-eps * np.abs(ts))))))

    _report(9, [("reconstruction", recon_err, 1e-10),
                ("trace modulus bound", cf_bound_err, 1e-12),
                ("conjugate symmetry", conj_err, 1e-12),
                ("evolution group law", group_err, 1e-10),
                ("damping identity (two eps)", damp_err, 2e-3),
                ("runtime (s)", time.monotonic() - start, 30.0)])
