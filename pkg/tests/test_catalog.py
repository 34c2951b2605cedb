"""Built-in generator sets and observables against their analytic laws."""

import numpy as np
import pytest

from spectral_cf import (
    GENERATOR_SET_NAMES,
    OBSERVABLE_NAMES,
    StateVector,
    build_generators,
    build_observable,
    charfun_exact,
    fock_vacuum_state,
    list_catalog,
    reference_states,
    spectral_measure,
    vacuum_for_observable,
)
from spectral_cf.errors import CatalogKeyError

SQRT2 = np.sqrt(2.0)
SQRT3 = np.sqrt(3.0)


def states_for(name, dim):
    """Catalogue reference states, or a default unit state for the rest."""
    try:
        return reference_states(name)
    except CatalogKeyError:
        if dim == 2:
            return {"plus": StateVector([1.0 / SQRT2, 1.0 / SQRT2])}
        e0 = np.zeros(dim)
        e0[0] = 1.0
        return {"e0": StateVector(e0)}


@pytest.mark.parametrize("name", [n for n in GENERATOR_SET_NAMES if "(N)" not in n])
def test_bracket_relations_exact_sets(name):
    gens = build_generators(name)
    assert gens.max_residual() < 1e-12, gens.verify()


def test_bracket_relations_boson_realization():
    gens = build_generators("su11-boson(25)")
    assert gens.max_residual() < 1e-12, gens.verify()
    assert gens.interior == 24  # ladder truncation: last row/column excluded


def test_unknown_generator_set_raises():
    with pytest.raises(CatalogKeyError):
        build_generators("so17")


def test_bracket_description_formatting():
    listing = list_catalog()
    rendered = {
        rel
        for entry in listing["generator_sets"]
        for rel in entry["relations"]
    }
    assert "[K0,K+] = K+" in rendered
    assert any(rel.startswith("[sigma1,sigma2] = 2i*sigma3") for rel in rendered)
    # no "1*" or "+0i" artifacts anywhere
    assert not any("1*" in rel and "i*" not in rel for rel in rendered)


def test_two_level_hamiltonian_spectrum_and_vacuum_atoms():
    obs = build_observable("sl2-H")
    u = vacuum_for_observable("sl2-H")
    meas = spectral_measure(obs.matrix, u)
    locs = [lam for lam, _ in meas.atoms]
    weights = [w for _, w in meas.atoms]
    assert abs(locs[0] + SQRT2) < 1e-12 and abs(locs[1] - SQRT2) < 1e-12
    assert abs(weights[0] - (2.0 + SQRT2) / 4.0) < 1e-12
    assert abs(weights[1] - (2.0 - SQRT2) / 4.0) < 1e-12


@pytest.mark.parametrize("name", OBSERVABLE_NAMES)
def test_observable_reference_law_matches_exact_route(name):
    obs = build_observable(name)
    ts = np.linspace(-5.0, 5.0, 101)
    for label, u in states_for(name, obs.matrix.dim).items():
        exact = charfun_exact(obs.matrix, u, ts).values
        ref = obs.reference_charfun(u, ts)
        assert np.max(np.abs(exact - ref)) < 1e-10, (name, label)


@pytest.mark.parametrize("name", OBSERVABLE_NAMES)
def test_observable_reference_atoms_match_exact_measure(name):
    obs = build_observable(name)
    for label, u in states_for(name, obs.matrix.dim).items():
        if obs.reference_atoms is None:
            continue
        ref = {lam: w for lam, w in obs.reference_atoms(u.amplitudes) if w > 1e-12}
        got = {lam: w for lam, w in spectral_measure(obs.matrix, u).atoms}
        assert len(ref) == len(got), (name, label)
        for lam, w in ref.items():
            nearest = min(got, key=lambda x: abs(x - lam))
            assert abs(nearest - lam) < 1e-12, (name, label)
            assert abs(got[nearest] - w) < 1e-12, (name, label)


def test_parametric_two_level_states():
    # reference laws are conjugate-bilinear in (a, b); spot-check random states
    rng = np.random.default_rng(7)
    ts = np.linspace(-4.0, 4.0, 61)
    for name in ("pauli-1", "pauli-2", "pauli-3", "sl2-H", "sl2-H0", "su11-H"):
        obs = build_observable(name)
        for _ in range(6):
            v = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            u = StateVector(v / np.linalg.norm(v))
            exact = charfun_exact(obs.matrix, u, ts).values
            assert np.max(np.abs(exact - obs.reference_charfun(u, ts))) < 1e-12, name


def test_su11_basis_state_weights():
    obs = build_observable("su11-H")
    w_plus = 0.5 * (1.0 + 1.0 / SQRT3)
    for amps, top in (((1.0, 0.0), w_plus), ((0.0, 1.0), 1.0 - w_plus)):
        meas = spectral_measure(obs.matrix, StateVector(amps))
        got = {round(lam, 9): w for lam, w in meas.atoms}
        assert abs(got[round(SQRT3 / 2.0, 9)] - top) < 1e-12


def test_casimir_is_a_scalar_matrix():
    obs = build_observable("casimir-so3")
    assert np.max(np.abs(obs.matrix.entries + 2.0 * np.eye(3))) < 1e-15
    ts = np.linspace(-3.0, 3.0, 41)
    u = StateVector([1.0, 0.0, 0.0])
    vals = charfun_exact(obs.matrix, u, ts).values
    assert np.max(np.abs(vals - np.exp(-2j * ts))) < 1e-13


def test_vacuum_for_observable_and_fock_vacuum():
    u = vacuum_for_observable("sl2-H")
    assert np.allclose(u.amplitudes, [0.0, 1.0])
    with pytest.raises(CatalogKeyError):
        vacuum_for_observable("pauli-1")
    v = fock_vacuum_state("su11-boson(12)")
    assert v.dim == 13 and abs(v.amplitudes[0] - 1.0) < 1e-15


def test_listing_is_complete_and_serializable():
    listing = list_catalog()
    assert {e["name"] for e in listing["observables"]} == set(OBSERVABLE_NAMES)
    set_names = {e["name"] for e in listing["generator_sets"]}
    assert set_names == set(GENERATOR_SET_NAMES)
    for entry in listing["observables"]:
        assert entry["dim"] >= 2 and entry["description"]
