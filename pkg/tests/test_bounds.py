"""Direct distance bounds and size sandwiches."""

import math

import numpy as np
import pytest

from oneshot_qit import (
    CQState,
    DomainError,
    covering_direct_bound,
    covering_size_bounds,
    pa_direct_bound,
    pa_size_bounds,
    simulate_covering,
    simulate_pa,
    spec_count,
    validate_sandwich_params,
)

from conftest import binary_antipodal, bit_pair_trivial_side, random_cq_state


def test_pa_direct_bound_uniform_four():
    state = CQState([0.25] * 4, [[[1.0]]] * 4)
    # threshold mass vanishes: p(x) never strictly exceeds c
    assert pa_direct_bound(state, 0.25, 2) == pytest.approx(math.sqrt(0.5), abs=1e-12)


def test_pa_direct_bound_large_c_mass_vanishes():
    rng = np.random.default_rng(61)
    state = random_cq_state(rng, 3, 2)
    nu = spec_count(state.marginal())
    c = 1e6
    assert pa_direct_bound(state, c, 4) == pytest.approx(
        math.sqrt(c * nu * 4), abs=1e-9
    )


def test_pa_direct_bound_dominates_exact_distance():
    state = bit_pair_trivial_side()
    for c in (0.4, 0.6, 1.0):
        bound = pa_direct_bound(state, c, 2)
        exact = simulate_pa(state, 2, "exact").value
        assert exact == pytest.approx(0.25, abs=1e-12)
        assert bound >= exact - 1e-9


def test_covering_direct_bound_product_state():
    rng = np.random.default_rng(62)
    rho = np.diag(rng.dirichlet(np.ones(2))).astype(complex)
    state = CQState([0.3, 0.7], [rho, rho])
    nu = spec_count(state.marginal())
    for m in (1, 2, 4):
        bound = covering_direct_bound(state, 1.001, m)
        assert bound == pytest.approx(math.sqrt(nu * 1.001 / m), abs=1e-9)


def test_covering_direct_bound_antipodal():
    state = binary_antipodal()
    # pinched ratio is 2, below c=2.5, so only the overshoot term remains
    bound = covering_direct_bound(state, 2.5, 2)
    assert bound == pytest.approx(math.sqrt(1 * 2.5 / 2), abs=1e-12)
    assert bound >= simulate_covering(state, 2, "exact").value - 1e-9


def test_covering_direct_bound_m_limit():
    state = binary_antipodal()
    tail_only = covering_direct_bound(state, 0.5, 10 ** 12)
    small_m = covering_direct_bound(state, 0.5, 1)
    assert small_m > tail_only
    assert tail_only == pytest.approx(
        covering_direct_bound(state, 0.5, 10 ** 15), abs=1e-6
    )


def test_direct_bounds_dominate_on_corpus(corpus):
    c_grid = (0.02, 0.1, 0.5, 1.0, 2.5)
    for state in corpus:
        for size in (1, 2, 4):
            pa_exact = simulate_pa(state, size, "exact").value
            cov_exact = simulate_covering(state, size, "exact").value
            for c in c_grid:
                assert pa_direct_bound(state, c, size) >= pa_exact - 1e-9
                assert covering_direct_bound(state, c, size) >= cov_exact - 1e-9


# ---------------------------------------------------------------------------
# Parameter validation
# ---------------------------------------------------------------------------

def test_parameter_domain_messages():
    with pytest.raises(DomainError, match="eps/3"):
        validate_sandwich_params(0.3, 0.11, 0.05)
    with pytest.raises(DomainError, match="c must be < delta"):
        validate_sandwich_params(0.4, 0.05, 0.06)
    with pytest.raises(DomainError, match="c must be > 0"):
        validate_sandwich_params(0.4, 0.1, 0.0)
    with pytest.raises(DomainError, match=r"\(1-eps\)/2"):
        validate_sandwich_params(0.9, 0.06, 0.01)
    # the full admissible region is accepted
    validate_sandwich_params(0.4, 0.1, 0.05)
    validate_sandwich_params(0.3, 0.09, 0.04)


def test_pa_bounds_trivial_side_closed_form():
    state = CQState([1.0 / 8.0] * 8, [[[1.0]]] * 8)
    eps, delta, c = 0.4, 0.1, 0.05
    report = pa_size_bounds(state, eps, delta, c)
    eps_low = 1.0 - eps + 3.0 * delta
    expected_lower = math.log2(8) + math.log2(1.0 - eps_low) - math.log2(1.0 / delta ** 4)
    assert report.nu == 1
    assert report.lower_bits == pytest.approx(expected_lower, abs=1e-9)
    eps_high = 1.0 - eps - 2.0 * delta
    expected_upper = (
        math.log2(8) + math.log2(1.0 - eps_high)
        + math.log2((1 + c) / (c * delta)) + math.log2((eps + c) / (delta - c))
    )
    assert report.upper_bits == pytest.approx(expected_upper, abs=1e-9)


def test_covering_bounds_product_state_covering_free():
    rng = np.random.default_rng(63)
    rho = np.diag(rng.dirichlet(np.ones(2))).astype(complex)
    state = CQState([0.5, 0.5], [rho, rho])
    report = covering_size_bounds(state, 0.4, 0.1, 0.05)
    assert report.lower_bits <= 0.0


def test_covering_lower_diverges_as_delta_meets_c():
    state = binary_antipodal()
    values = [
        covering_size_bounds(state, 0.4, 0.1, c).lower_bits
        for c in (0.05, 0.09, 0.0999, 0.099999)
    ]
    assert all(a > b for a, b in zip(values, values[1:]))
    assert values[-1] < -15


def test_sandwich_coherence_on_corpus(corpus):
    for state in corpus[:6]:
        for eps, delta, c in ((0.4, 0.1, 0.05), (0.3, 0.09, 0.04)):
            pa = pa_size_bounds(state, eps, delta, c)
            cov = covering_size_bounds(state, eps, delta, c)
            assert pa.lower_bits <= pa.upper_bits + 1e-9
            assert cov.lower_bits <= cov.upper_bits + 1e-9
            assert math.isfinite(pa.lower_bits) and math.isfinite(pa.upper_bits)
            assert math.isfinite(cov.lower_bits) and math.isfinite(cov.upper_bits)
