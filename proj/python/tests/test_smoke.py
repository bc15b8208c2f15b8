import numpy as np
import pytest

import nhqfi


def test_two_level_spectrum_is_real_in_unbroken_phase():
    ep, em = nhqfi.two_level_eigenvalues(2.0, 1.0)
    assert ep == pytest.approx(np.sqrt(3.0))
    assert em == pytest.approx(-np.sqrt(3.0))
    assert nhqfi.classify_phase(nhqfi.two_level_hamiltonian(2.0, 1.0))[0] == "Unbroken"


def test_exceptional_point_is_rejected():
    with pytest.raises(nhqfi.DefectiveMatrixError):
        nhqfi.biorthogonal_eig(nhqfi.two_level_hamiltonian(1.0, 1.0))


def test_biorthogonal_pair_is_normalized():
    h = nhqfi.two_level_hamiltonian(2.0, 1.0)
    psi0 = np.array([1, 1], dtype=complex) / np.sqrt(2)
    times, right, left = nhqfi.evolve_pair(h, psi0, 0.0, 3.0, 30)
    assert len(times) == 31
    for r, l in zip(right, left):
        assert abs(np.vdot(l, r) - 1) < 1e-8


def test_qfi_of_maximally_mixed_qubit():
    rho = np.diag([0.5, 0.5]).astype(complex)
    drho = 0.1 * np.diag([0.5, -0.5]).astype(complex)
    assert nhqfi.qfi_mixed(rho, drho) == pytest.approx(0.01)


def test_lindblad_qfi_rises_then_falls():
    model = nhqfi.Model.two_level(0.2, 1.0)
    qfi, cfi = nhqfi.lindblad_information(model, "s", 0.0, 30.0, 300)
    values = np.array(qfi["values"])
    peak = int(np.argmax(values))
    assert 0 < peak < len(values) - 1
    assert np.all(np.array(cfi["values"]) <= values + 1e-6)


def test_control_improves_objective():
    model = nhqfi.Model.two_level(0.2, 1.0)
    report = nhqfi.optimize_controls(model, "s", horizon=10.0, n_intervals=20, max_iter=5)
    trace = report["objective_trace"]
    assert trace[-1] > trace[0]
    assert all(b >= a - 1e-12 for a, b in zip(trace, trace[1:]))


def test_config_round_trip(tmp_path):
    files, log = nhqfi.run_config("scenario: spectrum\ns: 1\nr: 0.5\n", str(tmp_path))
    assert len(files) == 1
    lines = open(files[0]).read().splitlines()
    assert lines[0] == "ratio,re_E_plus,im_E_plus,re_E_minus,im_E_minus"
    assert len(lines) == 202
    assert "Unbroken" in log


def test_unknown_config_key_is_rejected(tmp_path):
    with pytest.raises(nhqfi.ConfigError):
        nhqfi.run_config("scenario: spectrum\ns: 1\nfoo: 2\n", str(tmp_path))
