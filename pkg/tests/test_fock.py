import math

import numpy as np
import pytest

from ampurify.errors import DomainError, QuadratureError, TruncationError
from ampurify.fock import (
    FilterSpec,
    FockDensity,
    QuadratureGrid,
    apply_attenuator,
    apply_filter,
    apply_heterodyne_mp,
    apply_two_mode_squeezer,
    avg_fidelity_numeric,
    coherent_ket,
    displaced_thermal_density,
    fit_thermal_nbar,
)
from ampurify.params import NoisyEnsemble


def _mean_photons(rho: FockDensity) -> float:
    return float(np.real(np.diag(rho.mat) @ np.arange(rho.dim)))


def _mean_amp(rho: FockDensity) -> complex:
    lower = np.diag(np.sqrt(np.arange(1, rho.dim)), k=1)  # annihilation operator
    return complex(np.trace(rho.mat @ lower))


# ---------------------------------------------------------------------------
# state construction
# ---------------------------------------------------------------------------


def test_coherent_ket_is_normalised():
    ket = coherent_ket(1.2 + 0.4j, 64)
    assert np.linalg.norm(ket) == pytest.approx(1.0, abs=1e-12)


def test_coherent_ket_energy_guard():
    with pytest.raises(TruncationError):
        coherent_ket(5.0, 64)


def test_displaced_thermal_trace_and_occupation():
    rho = displaced_thermal_density(0.8, 0.7, 64)
    assert rho.trace() == pytest.approx(1.0, abs=1e-10)
    assert _mean_photons(rho) == pytest.approx(0.8**2 + 0.7, rel=1e-9)


def test_undisplaced_thermal_diagonal_is_geometric():
    rho = displaced_thermal_density(0.0, 1.0, 32)
    diag = np.real(np.diag(rho.mat))
    ratios = diag[1:12] / diag[:11]
    assert np.allclose(ratios, 0.5, atol=1e-12)
    assert fit_thermal_nbar(rho) == pytest.approx(1.0, abs=1e-10)


def test_displaced_thermal_energy_guard():
    with pytest.raises(TruncationError):
        displaced_thermal_density(3.0, 8.0, 64)


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------


def test_squeezer_on_vacuum_yields_thermal_noise():
    vac = displaced_thermal_density(0.0, 0.0, 24)
    out = apply_two_mode_squeezer(vac, 0.5, dim_anc=48)
    assert out.dim == 24 + 48 - 1
    assert out.trace() == pytest.approx(1.0, abs=1e-12)
    assert _mean_photons(out) == pytest.approx(math.sinh(0.5) ** 2, rel=1e-10)


def test_squeezer_amplifies_coherent_amplitude():
    rho = displaced_thermal_density(0.6, 0.0, 24)
    out = apply_two_mode_squeezer(rho, 0.4, dim_anc=48)
    assert _mean_amp(out) == pytest.approx(math.cosh(0.4) * 0.6, rel=1e-9)


def test_attenuator_keeps_coherent_states_coherent():
    rho = displaced_thermal_density(1.0, 0.0, 48)
    out = apply_attenuator(rho, 0.5)
    target = coherent_ket(math.cos(0.5) * 1.0, 48)
    overlap = float(np.real(target.conj() @ out.mat @ target))
    assert overlap == pytest.approx(1.0, abs=1e-10)


def test_attenuator_scales_thermal_occupation():
    rho = displaced_thermal_density(0.0, 2.0, 48)
    out = apply_attenuator(rho, 0.7)
    assert _mean_photons(out) == pytest.approx(
        math.cos(0.7) ** 2 * _mean_photons(rho), rel=1e-10
    )


def test_attenuator_angle_guard():
    rho = displaced_thermal_density(0.0, 0.0, 8)
    with pytest.raises(DomainError):
        apply_attenuator(rho, -0.1)


def test_filter_reweights_the_diagonal():
    rho = displaced_thermal_density(0.0, 1.0, 32)
    f = FilterSpec(k_cut=6, y=1.3)
    out = apply_filter(rho, f)
    diag_in = np.real(np.diag(rho.mat))
    diag_out = np.real(np.diag(out.mat))
    for n in range(7):
        assert diag_out[n] == pytest.approx(diag_in[n] * 1.3 ** (2 * (n - 6)), rel=1e-12)
    assert np.all(diag_out[7:] == 0.0)


def test_filter_cut_must_fit_inside_the_cutoff():
    rho = displaced_thermal_density(0.0, 0.25, 16)
    with pytest.raises(DomainError):
        apply_filter(rho, FilterSpec(k_cut=16, y=1.1))


def test_heterodyne_mp_on_vacuum_prepares_thermal():
    # Q-function sampling then re-preparation at scale z turns vacuum into
    # a thermal state of occupation z^2
    vac = displaced_thermal_density(0.0, 0.0, 48)
    out = apply_heterodyne_mp(vac, 0.8, QuadratureGrid.polar(64, 24))
    assert out.trace() == pytest.approx(1.0, abs=1e-8)
    assert fit_thermal_nbar(out) == pytest.approx(0.64, rel=1e-6)


def test_heterodyne_mp_scales_the_mean_amplitude():
    rho = displaced_thermal_density(1.1, 0.3, 64)
    out = apply_heterodyne_mp(rho, 0.6, QuadratureGrid.polar(80, 32))
    assert _mean_amp(out) == pytest.approx(0.6 * 1.1, rel=1e-7)


def test_heterodyne_mp_rejects_a_grid_that_misses_the_state():
    rho = displaced_thermal_density(0.0, 2.0, 64)
    with pytest.raises(QuadratureError):
        apply_heterodyne_mp(rho, 0.5, QuadratureGrid.polar(6, 16))


def test_quadrature_grid_guard():
    with pytest.raises(DomainError):
        QuadratureGrid.polar(0, 8)


# ---------------------------------------------------------------------------
# averaged fidelity
# ---------------------------------------------------------------------------


def test_identity_protocol_matches_closed_form():
    ens = NoisyEnsemble(1.0, 1.0, 2.0)
    got = avg_fidelity_numeric(ens, lambda rho: rho, dim=48, radial_nodes=64)
    assert got == pytest.approx(1.0 / 3.0, abs=1e-7)


def test_ratio_form_is_scale_invariant():
    ens = NoisyEnsemble(1.0, 1.0, 1.5)

    def damped_identity(rho):
        return FockDensity(rho.dim, 0.37 * rho.mat)

    plain = avg_fidelity_numeric(ens, lambda r: r, dim=32, radial_nodes=48,
                                 probabilistic=True)
    scaled = avg_fidelity_numeric(ens, damped_identity, dim=32, radial_nodes=48,
                                  probabilistic=True)
    assert scaled == pytest.approx(plain, rel=1e-12)
