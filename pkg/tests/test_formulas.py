import math

import pytest

from ampurify.errors import DomainError
from ampurify.formulas import (
    cft,
    det_fidelity,
    fidelity_report,
    photon_output_det,
    photon_output_prob,
    prob_fidelity,
    puri_fidelity,
    tune,
)
from ampurify.params import MultimodeTask, NoisyEnsemble, photon_book, thresholds

RATE_GRID = [(0.5, 0.5), (0.5, 2.0), (1.0, 1.0), (2.0, 0.5), (2.0, 2.0)]


def _ens(lam, mu, g):
    return NoisyEnsemble(lambda_prime=lam, mu=mu, g_prime=g)


# ---------------------------------------------------------------------------
# worked values
# ---------------------------------------------------------------------------


def test_det_worked_point_identity_branch():
    assert det_fidelity(_ens(1.0, 1.0, 2.0)) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_det_worked_point_amplifier_branch():
    # at the amplify threshold g' = 3 both branches give (S+1)/(g'^2 N_C Ntilde) = 1/6
    assert det_fidelity(_ens(1.0, 1.0, 3.0)) == pytest.approx(1.0 / 6.0, abs=1e-15)


def test_prob_worked_point_below_plateau():
    # S/(S + g'^2 N_C N_T) at N_C = N_T = 1, g' = 1.5
    assert prob_fidelity(_ens(1.0, 1.0, 1.5)) == pytest.approx(8.0 / 17.0, abs=1e-15)


def test_puri_worked_point():
    # (lam' + mu)/(lam' + mu + g'^2)
    assert puri_fidelity(_ens(1.0, 1.0, 0.5)) == pytest.approx(2.0 / 2.25, abs=1e-15)


def test_cft_worked_point():
    assert cft(_ens(1.0, 1.0, 2.0)) == pytest.approx(3.0 / 11.0, abs=1e-15)


def test_cft_pure_limit_at_unit_gain():
    assert cft(_ens(1.0, 1e12, 1.0)) == pytest.approx(2.0 / 3.0, rel=1e-11)


# ---------------------------------------------------------------------------
# domain guards
# ---------------------------------------------------------------------------


def test_det_and_prob_require_amplification():
    with pytest.raises(DomainError):
        det_fidelity(_ens(1.0, 1.0, 0.9))
    with pytest.raises(DomainError):
        prob_fidelity(_ens(1.0, 1.0, 0.9))


def test_puri_requires_deamplification():
    with pytest.raises(DomainError):
        puri_fidelity(_ens(1.0, 1.0, 1.1))


# ---------------------------------------------------------------------------
# branch joins and the probabilistic advantage window
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("lam,mu", RATE_GRID)
def test_det_branches_join_at_amplify_threshold(lam, mu):
    det_thr, _ = thresholds(_ens(lam, mu, 1.0))
    book = photon_book(_ens(lam, mu, det_thr))
    high = (book.total + 1.0) / (det_thr**2 * book.n_c * book.n_t_tilde)
    low = 1.0 / ((det_thr - 1.0) ** 2 * book.n_c + book.n_t_tilde)
    assert abs(high - low) <= 1e-12


@pytest.mark.parametrize("lam,mu", RATE_GRID)
def test_prob_branches_join_at_plateau_threshold(lam, mu):
    _, prob_thr = thresholds(_ens(lam, mu, 1.0))
    book = photon_book(_ens(lam, mu, prob_thr))
    high = (book.total + 1.0) / (prob_thr**2 * book.n_c * book.n_t_tilde)
    low = book.total / (book.total + prob_thr**2 * book.n_c * book.n_t)
    assert abs(high - low) <= 1e-12


@pytest.mark.parametrize("lam,mu", RATE_GRID)
def test_prob_meets_purification_at_unit_gain(lam, mu):
    assert abs(prob_fidelity(_ens(lam, mu, 1.0)) - puri_fidelity(_ens(lam, mu, 1.0))) <= 1e-12


@pytest.mark.parametrize("lam,mu", RATE_GRID)
def test_prob_equals_det_exactly_at_passive_filter_gain(lam, mu):
    """The advantage gap has a double root where the tuned filter is passive.

    prob - det over the window 1 < g' < (S+1)/N_C is a perfect square in
    (g'-1) that vanishes at g' = S/N_C; the equality is exact, not a
    crossing, so strict-advantage assertions must sample around it.
    """
    book = photon_book(_ens(lam, mu, 1.0))
    g_t = book.total / book.n_c
    e = _ens(lam, mu, g_t)
    assert abs(prob_fidelity(e) - det_fidelity(e)) <= 1e-13
    assert tune(e).y == pytest.approx(1.0, abs=1e-15)
    for g in (0.5 * (1.0 + g_t), 0.5 * (g_t + thresholds(e)[0])):
        probe = _ens(lam, mu, g)
        assert prob_fidelity(probe) > det_fidelity(probe) + 1e-9


@pytest.mark.parametrize("lam,mu", RATE_GRID)
@pytest.mark.parametrize("scale", [1.0, 1.5, 3.0])
def test_prob_collapses_onto_det_beyond_amplify_threshold(lam, mu, scale):
    det_thr, _ = thresholds(_ens(lam, mu, 1.0))
    e = _ens(lam, mu, scale * det_thr)
    assert abs(prob_fidelity(e) - det_fidelity(e)) <= 1e-12


# ---------------------------------------------------------------------------
# tuning
# ---------------------------------------------------------------------------


def test_tuning_filter_ratio_below_plateau():
    assert tune(_ens(1.0, 1.0, 1.5)).y == pytest.approx(0.75, abs=1e-15)


def test_tuning_filter_ratio_between_plateau_and_threshold():
    t = tune(_ens(1.0, 1.0, 2.5))
    assert t.y == pytest.approx(3.0 / 2.5, abs=1e-15)
    assert not t.plateau


def test_tuning_on_the_plateau():
    t = tune(_ens(1.0, 1.0, 3.5))
    assert t.plateau
    assert t.y == 1.0
    assert t.cosh_r == pytest.approx(3.5 / 3.0, abs=1e-15)
    assert t.cos_theta is None


def test_tuning_never_engages_squeezer_and_filter_together():
    for g in (1.0, 1.7, 2.4, 2.8, 3.0, 4.0):
        t = tune(_ens(1.0, 1.0, g))
        assert t.cosh_r == 1.0 or t.y == 1.0


def test_tuning_purification_side():
    t = tune(_ens(1.0, 1.0, 0.5))
    assert t.cosh_r is None and t.y is None
    assert t.cos_theta == pytest.approx(0.25, abs=1e-15)
    assert t.z == pytest.approx(0.5 / 3.0, abs=1e-15)


def test_tuning_y_is_continuous_at_both_joins():
    _, prob_thr = thresholds(_ens(1.0, 1.0, 1.0))
    below = tune(_ens(1.0, 1.0, prob_thr * (1.0 - 1e-12))).y
    above = tune(_ens(1.0, 1.0, prob_thr * (1.0 + 1e-12))).y
    assert abs(below - above) < 1e-10
    det_thr = thresholds(_ens(1.0, 1.0, 1.0))[0]
    assert tune(_ens(1.0, 1.0, det_thr)).y == 1.0


# ---------------------------------------------------------------------------
# the combined report
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("g", [0.3, 0.8, 1.0])
def test_report_unifies_fidelities_below_unit_gain(g):
    rep = fidelity_report(_ens(1.0, 1.0, g))
    assert rep.det == rep.prob == puri_fidelity(_ens(1.0, 1.0, g))
    assert rep.cft < rep.det


@pytest.mark.parametrize("lam,mu", RATE_GRID)
@pytest.mark.parametrize("g", [0.5, 1.0, 1.5, 2.5, 4.0])
def test_report_is_ordered_and_bounded(lam, mu, g):
    rep = fidelity_report(_ens(lam, mu, g))
    assert 0.0 < rep.cft < 1.0
    assert rep.cft < rep.prob <= 1.0
    assert rep.det <= rep.prob


# ---------------------------------------------------------------------------
# photon bookkeeping
# ---------------------------------------------------------------------------


def test_photon_output_det_worked_ratio():
    # N_C = 2, N_single = 0.5, g = 2: cosh^2 r (N+1) - 1 with cosh r = 8/7
    task = MultimodeTask(lam=0.5, mu=2.0, g=2.0)
    total, single = photon_output_det(task)
    assert single == pytest.approx(47.0 / 49.0, abs=1e-15)
    assert total == pytest.approx(47.0 / 49.0, abs=1e-15)


def test_photon_output_det_identity_below_threshold():
    total, single = photon_output_det(MultimodeTask(lam=1.0, mu=1.0, g=2.0))
    assert total == single == 1.0


def test_photon_output_det_splits_over_output_modes():
    task = MultimodeTask(lam=0.5, mu=2.0, g=2.0, n_in=1, m_out=1)
    task2 = MultimodeTask(lam=0.5, mu=2.0, g=2.0 / math.sqrt(2.0), n_in=1, m_out=2)
    total1, _ = photon_output_det(task)
    total2, single2 = photon_output_det(task2)
    # same reduced gain, so the same bright-mode total, halved per copy
    assert total2 == pytest.approx(total1, rel=1e-12)
    assert single2 == pytest.approx(total1 / 2.0, rel=1e-12)


def test_photon_output_prob_passive_filter_changes_nothing():
    n_t_out, total, single = photon_output_prob(MultimodeTask(lam=1.0, mu=1.0, g=2.0), 1.0)
    assert n_t_out == pytest.approx(1.0, abs=1e-15)
    assert single == pytest.approx(1.0, abs=1e-15)
    assert total == pytest.approx(1.0, abs=1e-15)


def test_photon_output_prob_subunit_filter_purifies():
    n_t_out, _, _ = photon_output_prob(MultimodeTask(lam=1.0, mu=1.0, g=1.2), 0.6)
    assert n_t_out < 1.0


def test_photon_output_prob_rejects_the_pole():
    with pytest.raises(DomainError):
        photon_output_prob(MultimodeTask(lam=1.0, mu=1.0, g=1.5), math.sqrt(2.0))
