import numpy as np
import pytest
from scipy.stats import norm

from numpy.testing import assert_raises, assert_allclose

from daelab.theory import TruncationResult, lipschitz_truncation, \
    monte_carlo_tv
from daelab.util import ContractError, DomainError

from testtools import slow


def test_threshold_solves_density_equation():
    result = lipschitz_truncation(1., 5.)
    assert isinstance(result, TruncationResult)
    assert_allclose(norm.pdf(result.z_c), 1 / 5., rtol=1e-10)
    assert_allclose(result.z_c, np.sqrt(2 * np.log(5 / np.sqrt(2 * np.pi))))
    assert_allclose(result.edge, result.z_c + 5 * norm.cdf(-result.z_c))
    assert 0 <= result.tv <= 1
    assert_allclose(result.tv, result.tv_closed_form, atol=1e-10)


def test_threshold_scales_with_sigma():
    a = lipschitz_truncation(1., 10.)
    b = lipschitz_truncation(2., 20.)
    # p_x(z) = 1/c is scale-covariant when c scales with sigma
    assert_allclose(b.z_c, 2 * a.z_c)
    assert_allclose(b.tv, a.tv)


def test_simplified_threshold_reported_separately():
    result = lipschitz_truncation(1., 10.)
    assert_allclose(result.z_c_simplified,
                    np.sqrt(2 * np.log(10 / (2 * np.pi))))
    assert result.z_c_simplified != result.z_c
    assert np.isnan(lipschitz_truncation(1., 3.).z_c_simplified)
    assert set(result.to_dict()) == {'sigma', 'c', 'z_c', 'tv', 'edge',
                                     'tv_closed_form', 'z_c_simplified'}


def test_peak_density_boundary():
    c = np.sqrt(2 * np.pi)
    result = lipschitz_truncation(1., c)
    assert result.z_c == 0
    assert_allclose(result.edge, c / 2)


def test_domain_errors():
    with assert_raises(DomainError) as cm:
        lipschitz_truncation(1., 2.)
    assert 'no truncation regime' in str(cm.exception)
    assert_raises(ContractError, lipschitz_truncation, 0., 5.)
    assert_raises(ContractError, lipschitz_truncation, 1., -5.)
    assert_raises(DomainError, monte_carlo_tv, 1., 1.)


def test_tv_monotone_in_c():
    cs = np.logspace(np.log10(3), 6, 40)
    tvs = [lipschitz_truncation(1., c).tv for c in cs]
    assert np.all(np.diff(tvs) <= 1e-12)
    assert tvs[-1] < 1e-6


@pytest.mark.parametrize('c', [3., 5., 10.])
def test_monte_carlo_agrees(c):
    result = lipschitz_truncation(1., c)
    tv = monte_carlo_tv(1., c, n_samples=4 * 10**5, random_state=0,
                        chunk_size=10**5)
    assert_allclose(tv, result.tv, atol=3e-3)


def test_monte_carlo_reproducible():
    # chunking does not change the random stream
    assert_allclose(monte_carlo_tv(1., 5., 1000, random_state=3),
                    monte_carlo_tv(1., 5., 1000, random_state=3,
                                   chunk_size=7), rtol=1e-12)


@slow
@pytest.mark.parametrize('c', [3., 5., 10.])
def test_monte_carlo_full_scale(c):
    result = lipschitz_truncation(1., c)
    assert_allclose(monte_carlo_tv(1., c, n_samples=10**7), result.tv,
                    atol=2e-3)
