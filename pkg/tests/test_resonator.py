import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kineticon import constants as const
from kineticon.circuit import derive
from kineticon.errors import AmbiguousResonanceError, BifurcationError, DomainError, ValidityError
from kineticon.resonator import (
    Nanowire,
    ResonatorNetwork,
    SeriesCapacitor,
    SeriesImpedance,
    SeriesInductor,
    ShuntAdmittance,
    ShuntCapacitor,
    TransmissionLine,
    abcd,
    cascade,
    duffing_shift,
    effective_inductance,
    equivalent_circuit,
    fabry_perot,
    find_resonance,
    nanowire_current,
    readout_ok,
    s21,
    s_params,
    small_signal_f0,
    stored_energy,
    sweep_s21,
)

V_PH = const.c / math.sqrt(6.45)


@pytest.fixture(scope="module")
def net():
    return fabry_perot()


@pytest.fixture(scope="module")
def f0(net):
    return small_signal_f0(net)


# element matrices


def test_zero_length_line_is_identity():
    T = abcd(TransmissionLine(50.0, V_PH, 0.0), 100e9)
    assert np.allclose(T, np.eye(2), atol=0)


def test_zero_series_impedance_is_identity():
    T = abcd(SeriesImpedance(lambda f: 0.0 * f, "short"), 100e9)
    assert np.array_equal(T, np.eye(2))


def test_quarter_wave_line():
    f = 100e9
    line = TransmissionLine(70.0, V_PH, V_PH / (4 * f))
    T = abcd(line, f)
    assert np.allclose(T, [[0, 70j], [1j / 70, 0]], atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(l1=st.floats(0, 5e-3), l2=st.floats(0, 5e-3), f=st.floats(1e9, 2e11))
def test_line_additivity(l1, l2, f):
    a, b = TransmissionLine(50.0, V_PH, l1), TransmissionLine(50.0, V_PH, l2)
    joined = TransmissionLine(50.0, V_PH, l1 + l2)
    assert np.allclose(cascade([a, b], f), abcd(joined, f), atol=1e-9)


def test_single_element_cascade():
    el = SeriesCapacitor(1e-15)
    assert np.array_equal(cascade([el], 90e9), abcd(el, 90e9))


def test_lossless_chain_unit_determinant(net):
    f = np.linspace(80e9, 120e9, 101)
    T = cascade(net.elements, f)
    det = T[:, 0, 0] * T[:, 1, 1] - T[:, 0, 1] * T[:, 1, 0]
    assert np.max(np.abs(np.abs(det) - 1)) < 1e-12


def test_vectorized_matches_scalar(net):
    f = np.array([90e9, 100e9, 110e9])
    stacked = cascade(net.elements, f)
    for k, fk in enumerate(f):
        assert np.allclose(stacked[k], cascade(net.elements, fk), rtol=1e-14, atol=0)


def test_element_validation():
    with pytest.raises(DomainError):
        TransmissionLine(0.0, V_PH, 1e-3)
    with pytest.raises(DomainError):
        TransmissionLine(50.0, 2 * const.c, 1e-3)
    with pytest.raises(DomainError):
        abcd(SeriesCapacitor(1e-15), 0.0)
    with pytest.raises(DomainError):
        cascade([], 1e9)
    with pytest.raises(DomainError):
        Nanowire(0.0, 1e-5)


# S-parameters


def test_identity_transmission():
    assert s21(np.eye(2, dtype=complex), 50.0) == 1.0


def test_series_reference_impedance():
    T = abcd(SeriesImpedance(lambda f: 50.0 + 0 * f, "R"), 1e9)
    assert s21(T, 50.0) == pytest.approx(2 / 3, rel=1e-15)


def test_matched_quarter_wave():
    f = 100e9
    T = abcd(TransmissionLine(50.0, V_PH, V_PH / (4 * f)), f)
    assert abs(s21(T, 50.0)) == pytest.approx(1.0, rel=1e-14)


def test_direct_line_all_pass():
    net = [TransmissionLine(50.0, V_PH, 1.3e-3)]
    f = np.linspace(10e9, 200e9, 57)
    assert np.allclose(np.abs(s21(cascade(net, f), 50.0)), 1.0, atol=1e-13)


def test_reference_impedance_positive():
    with pytest.raises(DomainError):
        s21(np.eye(2), 0.0)


def test_losslessness(net):
    f = np.linspace(90e9, 110e9, 2001)
    s11, s12, s21_, s22 = s_params(cascade(net.elements, f), net.Zref)
    assert np.max(np.abs(np.abs(s11) ** 2 + np.abs(s21_) ** 2 - 1)) < 1e-9
    assert np.max(np.abs(np.abs(s22) ** 2 + np.abs(s12) ** 2 - 1)) < 1e-9


def test_reciprocity_asymmetric_chain():
    els = (
        SeriesCapacitor(2e-15),
        TransmissionLine(40.0, V_PH, 0.2e-3),
        Nanowire(1e-9, 1e-5),
        ShuntCapacitor(3e-15),
        TransmissionLine(60.0, V_PH, 0.4e-3, loss=2.0),
        SeriesInductor(0.1e-9),
    )
    f = np.linspace(50e9, 150e9, 301)
    _, s12, s21_, _ = s_params(cascade(els, f), 50.0)
    assert np.max(np.abs(s21_ - s12)) < 1e-12
    rev = cascade(list(reversed(els)), f)
    assert np.max(np.abs(s21(rev, 50.0) - s21_)) < 1e-12


def test_reversed_network_same_transmission(net):
    f = np.linspace(95e9, 105e9, 41)
    a = s21(cascade(net.elements, f), net.Zref)
    b = s21(cascade(net.reversed().elements, f), net.Zref)
    assert np.max(np.abs(a - b)) < 1e-12


def test_lossy_network_is_passive():
    lossy = fabry_perot(loss=5.0)
    f = np.linspace(95e9, 105e9, 501)
    s11, _, s21_, _ = s_params(cascade(lossy.elements, f), lossy.Zref)
    assert np.all(np.abs(s11) ** 2 + np.abs(s21_) ** 2 <= 1 + 1e-12)


def test_custom_admittance_element():
    Y = ShuntAdmittance(lambda f: 1j * 2 * np.pi * f * 3e-15, "C")
    assert np.allclose(abcd(Y, 77e9), abcd(ShuntCapacitor(3e-15), 77e9), rtol=1e-15)


# networks and resonances


def test_network_needs_one_nanowire():
    line = TransmissionLine(50.0, V_PH, 1e-3)
    with pytest.raises(DomainError):
        ResonatorNetwork((line, line), nanowire_index=0)
    with pytest.raises(DomainError):
        ResonatorNetwork((Nanowire(1e-9, 1e-5), Nanowire(1e-9, 1e-5)), nanowire_index=0)


def test_default_network_tuned(net, f0):
    assert f0 == pytest.approx(100e9, rel=1e-12)
    assert net.nanowire.L0k == 1e-9


def test_resonance_below_bare_half_wave(net, f0):
    length = sum(el.length for el in net.elements if isinstance(el, TransmissionLine))
    assert f0 < V_PH / (2 * length)


def test_find_resonance_on_network(net, f0):
    res = find_resonance(sweep_s21(net, 95e9, 105e9, 4001))
    assert res.kind == "peak"
    assert res.f0 == pytest.approx(f0, rel=1e-4)
    assert 20 < res.Q_loaded < 2000


def lorentzian_sweep(f0, Q, n, span, kind="dip", depth=0.9):
    f = np.linspace(f0 * (1 - span), f0 * (1 + span), n)
    line = 1.0 / (1 + 2j * Q * (f - f0) / f0)
    s = 1 - depth * line if kind == "dip" else depth * line
    return list(zip(f.tolist(), s.tolist()))


@pytest.mark.parametrize("kind", ["dip", "peak"])
@pytest.mark.parametrize("Q", [1e2, 1e4])
def test_synthetic_lorentzian_recovery(kind, Q):
    res = find_resonance(lorentzian_sweep(100e9, Q, 4001, 20 / Q, kind))
    assert res.kind == kind
    assert res.f0 == pytest.approx(100e9, rel=1e-6)
    assert res.Q_loaded == pytest.approx(Q, rel=0.01)
    assert res.B == pytest.approx(100e9 / Q, rel=0.01)


def test_off_grid_center_recovered():
    res = find_resonance(lorentzian_sweep(100.000123e9, 1e4, 2001, 2e-3))
    assert res.f0 == pytest.approx(100.000123e9, rel=1e-6)


def test_grid_independence(net):
    coarse = find_resonance(sweep_s21(net, 97e9, 103e9, 2001))
    fine = find_resonance(sweep_s21(net, 97e9, 103e9, 4001))
    assert abs(coarse.f0 - fine.f0) < 1e-7 * fine.f0


def test_stronger_coupling_lowers_q():
    weak = fabry_perot(C_couple=1e-15)
    strong = fabry_perot(C_couple=2e-15)
    q_weak = find_resonance(sweep_s21(weak, 95e9, 105e9, 4001)).Q_loaded
    q_strong = find_resonance(sweep_s21(strong, 90e9, 110e9, 4001)).Q_loaded
    assert q_strong < q_weak


def test_flat_sweep_is_ambiguous():
    flat = [(f, 1.0 + 0j) for f in np.linspace(1e9, 2e9, 101)]
    with pytest.raises(AmbiguousResonanceError):
        find_resonance(flat)


def test_two_resonances_ambiguous():
    f = np.linspace(98e9, 103e9, 4001)
    peaks = sum(0.45 / (1 + 2j * 1e3 * (f - fc) / fc) for fc in (100e9, 101e9))
    with pytest.raises(AmbiguousResonanceError):
        find_resonance(list(zip(f.tolist(), peaks.tolist())))


def test_resonance_outside_range():
    with pytest.raises(AmbiguousResonanceError):
        find_resonance(lorentzian_sweep(100e9, 1e3, 401, 0.02, "peak")[:150])


def test_sweep_validation(net):
    with pytest.raises(DomainError):
        sweep_s21(net, 2e9, 1e9, 10)
    with pytest.raises(DomainError):
        sweep_s21(net, 1e9, 2e9, 1)


# lumped-distributed consistency

EPS = 6.45
F_UNLOADED = 100e9
Z0 = 50.0


def _centred_wire(L):
    half = TransmissionLine(Z0, V_PH, V_PH / (4 * F_UNLOADED))
    # vanishing couplers keep the line ends effectively open
    els = (SeriesCapacitor(1e-20), half, Nanowire(L, 1e-5), half, SeriesCapacitor(1e-20))
    return ResonatorNetwork(els, Zref=50.0, nanowire_index=2)


@pytest.mark.parametrize("fraction", [0.001, 0.01, 0.03, 0.049])
def test_lumped_distributed_pull(fraction):
    L_total = Z0 / (4 * F_UNLOADED)
    f_bare = small_signal_f0(_centred_wire(1e-18 * L_total), guess=F_UNLOADED)
    f = small_signal_f0(_centred_wire(fraction * L_total), guess=f_bare)
    predicted = -fraction / 2
    assert (f - f_bare) / f_bare == pytest.approx(predicted, rel=0.05)


@pytest.mark.xfail(strict=True, reason="Z0/(2 f0) is twice the antinode-referred mode inductance Z0/(4 f0)")
def test_lumped_distributed_pull_with_half_wave_total():
    L_total = Z0 / (2 * F_UNLOADED)
    f_bare = small_signal_f0(_centred_wire(1e-18 * L_total), guess=F_UNLOADED)
    L = 0.01 * L_total
    f = small_signal_f0(_centred_wire(L), guess=f_bare)
    assert (f - f_bare) / f_bare == pytest.approx(-L / (2 * L_total), rel=0.05)


def test_effective_inductance_matches_line_plus_wire():
    net = _centred_wire(1e-13)
    L_eff = effective_inductance(net)
    assert L_eff == pytest.approx(Z0 / (4 * F_UNLOADED) + 1e-13, rel=0.005)


# energy and drive


def test_stored_energy_matches_mode_inductance(net, f0):
    P = 1e-16
    W = stored_energy(net, f0, P)
    I = nanowire_current(net, f0, P)
    assert W == pytest.approx(0.5 * effective_inductance(net) * abs(I) ** 2, rel=1e-3)


def test_stored_energy_linear_in_power(net, f0):
    assert stored_energy(net, f0, 2e-15) == pytest.approx(2 * stored_energy(net, f0, 1e-15), rel=1e-12)


def test_equivalent_circuit(net, f0):
    eq = equivalent_circuit(net)
    d = derive(eq)
    assert d.f_r == pytest.approx(f0, rel=1e-10)
    assert eq.Istar == net.nanowire.Istar
    assert net.nanowire.L0k < eq.L0k < 1.05 * net.nanowire.L0k


# Duffing shift


def test_zero_power(net, f0):
    res = duffing_shift(net, 0.0)
    assert res.f0_shifted == f0 and res.n_photons == 0.0 and res.delta_f == 0.0


def test_negative_power_rejected(net):
    with pytest.raises(DomainError):
        duffing_shift(net, -1e-15)


def test_low_power_linear(net):
    a = duffing_shift(net, 1e-16).delta_f
    b = duffing_shift(net, 0.5e-16).delta_f
    assert a / b == pytest.approx(2.0, rel=0.02)


@pytest.mark.parametrize("P", [1e-17, 1e-16])
def test_shift_per_photon(net, P):
    res = duffing_shift(net, P)
    d = derive(equivalent_circuit(net))
    expected = 3 * d.lam * d.f_r
    assert res.delta_f / res.n_photons == pytest.approx(expected, rel=0.2)


def test_literal_rms_law_is_a_third(net):
    full = duffing_shift(net, 1e-16).delta_f
    literal = duffing_shift(net, 1e-16, kerr_factor=1.0).delta_f
    assert literal / full == pytest.approx(1 / 3, rel=0.01)


@pytest.mark.parametrize("P", np.geomspace(1e-17, 3e-13, 6).tolist())
def test_shift_negative(net, P):
    res = duffing_shift(net, P)
    assert res.converged and res.delta_f < 0 and res.n_photons > 0


def test_bistability_detected(net):
    with pytest.raises(BifurcationError) as info:
        duffing_shift(net, 1e-11)
    err = info.value
    assert err.low_branch is not None or err.high_branch is not None


def test_drive_beyond_critical_current(net):
    with pytest.raises((BifurcationError, ValidityError)):
        duffing_shift(net, 1e-7, check_bistability=False)


# readout criterion


@pytest.mark.parametrize(
    "df, n, B, expected",
    [
        (1e6, 1.0, 1e6, True),
        (0.0, 1.0, 1e6, False),
        (1e6 / (2 * math.pi), 1.0, 1e6, False),
        (math.nextafter(1e6 / (2 * math.pi), math.inf), 1.0, 1e6, True),
        (math.nextafter(1e6 / (2 * math.pi), 0.0), 1.0, 1e6, False),
        (1.0, 0.0, 1e6, True),
        (0.0, 0.0, 1e6, False),
        (5e6, 10.0, 3e6, True),
        (4e6, 10.0, 3e6, False),
    ],
)
def test_readout_boundary(df, n, B, expected):
    assert readout_ok(df, n, B) is expected


@pytest.mark.parametrize("args", [(-1.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, -1.0)])
def test_readout_rejects_negative(args):
    with pytest.raises(DomainError):
        readout_ok(*args)
