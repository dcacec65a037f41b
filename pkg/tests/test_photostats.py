import numpy as np
import pytest
from scipy.stats import poisson

from latticemc.geometry import LatticeSpec, Scenario
from latticemc.optics import ProbeModel, amplitude_table
from latticemc.photostats import (DistributionKind, PhotonDistribution,
                                  cavity_photon_distribution,
                                  conditional_photocount_distribution,
                                  photocount_distribution, poisson_mixture)
from latticemc.states import mott_distribution, superfluid_atom_number
from latticemc.trajectory import TrajectoryState, closed_form_distribution

SPEC = LatticeSpec(100, 100, 50)


def max_model():
    return ProbeModel(Scenario.MAXIMUM, kappa=1.0, u10=1.0, a0=1.0)


def test_poisson_mixture_single_component_is_poisson():
    d = poisson_mixture(np.array([3.5]), np.array([1.0]),
                        DistributionKind.COUNTS)
    np.testing.assert_allclose(d.probabilities,
                               poisson.pmf(d.n_values, 3.5), atol=1e-12)
    assert d.mean == pytest.approx(3.5, abs=1e-9)
    assert d.fano == pytest.approx(1.0, abs=1e-9)
    assert d.mandel_q == pytest.approx(0.0, abs=1e-9)


def test_poisson_mixture_zero_rate_point_mass():
    d = poisson_mixture(np.array([0.0]), np.array([1.0]),
                        DistributionKind.COUNTS)
    assert d.probabilities[0] == pytest.approx(1.0, abs=1e-12)
    assert d.mean == 0.0


def test_poisson_mixture_moments():
    # mixture mean is the weighted rate; variance gains the rate spread
    rates = np.array([1.0, 9.0])
    w = np.array([0.5, 0.5])
    d = poisson_mixture(rates, w, DistributionKind.COUNTS)
    assert d.mean == pytest.approx(5.0, abs=1e-8)
    assert d.variance == pytest.approx(5.0 + 16.0, abs=1e-6)
    assert d.fano == pytest.approx(1.0 + 16.0 / 5.0, abs=1e-6)


def test_poisson_mixture_never_subpoissonian():
    rng = np.random.default_rng(6)
    for _ in range(30):
        rates = rng.uniform(0, 20, size=5)
        w = rng.dirichlet(np.ones(5))
        d = poisson_mixture(rates, w, DistributionKind.COUNTS)
        assert d.fano >= 1.0 - 1e-9


def test_poisson_mixture_tail_truncation():
    d = poisson_mixture(np.array([200.0]), np.array([1.0]),
                        DistributionKind.COUNTS)
    # renormalized after capturing all but < 1e-10 of the mass
    assert d.probabilities.sum() == pytest.approx(1.0, abs=1e-12)
    assert d.mean == pytest.approx(200.0, abs=1e-6)


def test_poisson_mixture_rejects_negative_rates():
    with pytest.raises(ValueError):
        poisson_mixture(np.array([-1.0]), np.array([1.0]),
                        DistributionKind.COUNTS)


def test_photon_distribution_normalization_guard():
    with pytest.raises(ValueError):
        PhotonDistribution(np.arange(2), np.array([0.7, 0.7]),
                           DistributionKind.COUNTS)


def test_cavity_photon_distribution_superfluid():
    p0 = superfluid_atom_number(SPEC)
    model = max_model()
    table = amplitude_table(model, p0.z_values)
    st = TrajectoryState(dist=p0, amplitudes=table, kappa=1.0)
    d = cavity_photon_distribution(st)
    # <n> = |C|^2 <z^2> = |C|^2 (25 + 2500)
    assert d.mean == pytest.approx(abs(model.c_constant) ** 2 * 2525.0,
                                   rel=1e-6)
    assert d.fano > 1.0  # mixture of many coherent intensities


def test_cavity_photon_distribution_mott_is_coherent():
    p0 = mott_distribution(SPEC, np.arange(101))
    model = max_model()
    table = amplitude_table(model, p0.z_values)
    st = TrajectoryState(dist=p0, amplitudes=table, kappa=1.0)
    d = cavity_photon_distribution(st)
    assert d.mandel_q == pytest.approx(0.0, abs=1e-6)
    assert d.mean == pytest.approx(2500.0 * abs(model.c_constant) ** 2,
                                   rel=1e-6)


def test_photocount_distribution_mean_growth():
    p0 = superfluid_atom_number(SPEC)
    model = max_model()
    table = amplitude_table(model, p0.z_values)
    for t in (0.001, 0.003):
        d = photocount_distribution(p0, table, 1.0, t)
        want = 2.0 * 1.0 * t * np.dot(table.intensity, p0.probabilities)
        assert d.mean == pytest.approx(want, rel=1e-8)
        assert d.fano >= 1.0 - 1e-9
    with pytest.raises(ValueError):
        photocount_distribution(p0, table, 1.0, -0.1)


def test_photocount_distribution_zero_time():
    p0 = superfluid_atom_number(SPEC)
    table = amplitude_table(max_model(), p0.z_values)
    d = photocount_distribution(p0, table, 1.0, 0.0)
    assert d.probabilities[0] == pytest.approx(1.0, abs=1e-12)


def test_conditional_photocount_point_mass_at_equal_times():
    p0 = superfluid_atom_number(SPEC)
    table = amplitude_table(max_model(), p0.z_values)
    d = conditional_photocount_distribution(p0, table, 1.0, T=2.0, t=2.0)
    assert d.probabilities[0] == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        conditional_photocount_distribution(p0, table, 1.0, T=2.0, t=1.0)


def test_conditional_photocount_narrows_after_conditioning():
    """Conditioning on a past record reduces the count uncertainty."""
    p0 = superfluid_atom_number(SPEC)
    model = max_model()
    table = amplitude_table(model, p0.z_values)
    dt = 0.002
    prior = photocount_distribution(p0, table, 1.0, dt)
    collapsed = closed_form_distribution(p0, table, 1.0, m=5000, t=2.0)
    post = conditional_photocount_distribution(collapsed, table, 1.0,
                                               T=2.0, t=2.0 + dt)
    assert post.fano < prior.fano
    assert post.fano >= 1.0 - 1e-9
