"""Divergences between an operator pair (rho, sigma).

Five quantities: the information-spectrum divergence, the hypothesis-
testing divergence, the collision (order-2 sandwiched Renyi) divergence,
the relative entropy, and the relative entropy variance.  All public
values are reported in bits; natural logarithms are used internally.

``sigma`` may be any PSD operator (not necessarily normalized); shifting
it by a positive factor shifts the first four quantities by -log2 of the
factor and leaves the variance unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalError
from .linalg import (
    DEFAULT_CLUSTER_TOL,
    _positive_part_trace_raw,
    _radius,
    as_hermitian,
    eig_herm,
    mat_func,
    projector_leq,
    support_projector,
)

LN2 = math.log(2.0)

_COMMUTATOR_TOL = 1e-10
_SUPPORT_TOL = 1e-8
_DEFAULT_GRID = 2048


@dataclass(frozen=True)
class DivergencePair:
    """A validated (rho, sigma) pair with a cached commutation flag.

    ``rho`` is a density operator (unit trace unless constructed with
    ``normalized=False``, which only relaxes the trace check); ``sigma``
    is PSD and may be unnormalized.
    """

    rho: np.ndarray
    sigma: np.ndarray
    commuting: bool

    @classmethod
    def of(cls, rho, sigma, normalized: bool = True) -> "DivergencePair":
        rho = as_hermitian(rho)
        sigma = as_hermitian(sigma)
        if rho.shape != sigma.shape:
            raise DomainError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
        for name, op in (("rho", rho), ("sigma", sigma)):
            lam_min = float(np.linalg.eigvalsh(op)[0])
            if lam_min < -1e-10:
                raise DomainError(f"{name} is not PSD: eigenvalue {lam_min:.3e}")
        if normalized:
            tr = float(np.trace(rho).real)
            if abs(tr - 1.0) > 1e-10:
                raise DomainError(f"rho has trace {tr}, expected 1")
        comm = rho @ sigma - sigma @ rho
        commuting = float(np.max(np.abs(comm))) <= _COMMUTATOR_TOL
        return cls(rho, sigma, commuting)


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")


def _check_support(pair: DivergencePair) -> None:
    """Require the support of rho to sit inside the support of sigma."""
    proj = support_projector(pair.sigma)
    leak = float(np.trace(pair.rho @ (np.eye(proj.shape[0]) - proj)).real)
    if leak > _SUPPORT_TOL:
        raise DomainError(
            f"support violation: rho carries mass {leak:.3e} outside the "
            "support of sigma"
        )


# ---------------------------------------------------------------------------
# Information-spectrum divergence
# ---------------------------------------------------------------------------

def _commuting_pairs(rho: np.ndarray, sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Joint spectrum (r_i, s_i) of a commuting pair in a common eigenbasis."""
    system = eig_herm(sigma)
    v = system.eigenvectors
    m = v.conj().T @ rho @ v
    r_parts, s_parts = [], []
    for idx in system.clusters():
        block = m[np.ix_(idx, idx)]
        r = np.linalg.eigvalsh(block)
        s_val = float(np.mean(system.eigenvalues[idx]))
        r_parts.append(r)
        s_parts.append(np.full(idx.size, s_val))
    return np.concatenate(r_parts), np.concatenate(s_parts)


def _ds_exact_bits(rho: np.ndarray, sigma: np.ndarray, eps: float) -> float:
    r, s = _commuting_pairs(rho, sigma)
    atol = DEFAULT_CLUSTER_TOL * max(_radius(r), _radius(s))
    keep = s > atol
    mass_off_support = float(np.sum(np.clip(r[~keep], 0.0, None)))
    if mass_off_support > _SUPPORT_TOL:
        raise DomainError(
            f"support violation: rho carries mass {mass_off_support:.3e} where "
            "sigma vanishes"
        )
    r = np.clip(r[keep], 0.0, None)
    s = s[keep]
    ratios = r / s
    order = np.argsort(ratios)
    ratios, r = ratios[order], r[order]
    # accumulate the event mass ratio value by ratio value (ties together)
    values, starts = np.unique(ratios, return_index=True)
    cum = np.cumsum(r)
    bounds = np.append(starts[1:], r.size) - 1
    for value, mass in zip(values, cum[bounds]):
        if mass > eps + 1e-12:
            if value <= 0.0:
                return -math.inf
            return math.log2(value)
    return math.inf  # event mass never exceeds eps (unreachable for densities)


def _ds_event_mass(rho: np.ndarray, sigma: np.ndarray, c: float) -> float:
    proj = projector_leq(rho, c * sigma)
    return float(np.trace(rho @ proj).real)


def _ds_grid_bracket(
    rho: np.ndarray, sigma: np.ndarray, eps: float, grid: int
) -> tuple[float, float, float]:
    """Certified bracket for the non-commuting supremum (values in bits)."""
    inv_sqrt = mat_func(sigma, lambda x: x ** -0.5, support_only=True)
    pencil = np.linalg.eigvalsh(inv_sqrt @ rho @ inv_sqrt)
    atol = DEFAULT_CLUSTER_TOL * _radius(pencil)
    pencil = pencil[pencil > atol]
    if pencil.size == 0:
        return -math.inf, -math.inf, -math.inf
    lo_span, hi_span = float(pencil.min()) * 0.5, float(pencil.max()) * 2.0
    candidates = np.unique(
        np.concatenate([pencil, np.geomspace(lo_span, hi_span, max(grid, 2))])
    )
    feasible = np.array(
        [_ds_event_mass(rho, sigma, c) <= eps + 1e-12 for c in candidates]
    )
    if not feasible.any():
        return -math.inf, -math.inf, -math.inf
    c_lo = float(candidates[feasible].max())
    above = candidates[(candidates > c_lo) & ~feasible]
    if above.size == 0:
        # the scan never found an infeasible point above; report saturation
        return math.log2(c_lo), math.log2(c_lo), math.inf
    c_hi = float(above.min())
    # bisect in log space down to a fixed relative width
    while math.log2(c_hi) - math.log2(c_lo) > 1e-12:
        mid = math.sqrt(c_lo * c_hi)
        if _ds_event_mass(rho, sigma, mid) <= eps + 1e-12:
            c_lo = mid
        else:
            c_hi = mid
    return math.log2(c_hi), math.log2(c_lo), math.log2(c_hi)


def info_spectrum_divergence_bracket(
    pair: DivergencePair, eps: float, grid: int = _DEFAULT_GRID
) -> tuple[float, float, float]:
    """(value, lower, upper) in bits; exact collapses the bracket to a point.

    The value is the largest log-threshold c (base 2) at which the mass
    of the event {rho <= 2^c sigma} under rho still stays at or below
    eps; the supremum itself is a left limit and is not attained.
    """
    _check_eps(eps)
    if pair.commuting:
        value = _ds_exact_bits(pair.rho, pair.sigma, eps)
        return value, value, value
    _check_support(pair)
    return _ds_grid_bracket(pair.rho, pair.sigma, eps, grid)


def info_spectrum_divergence(
    pair: DivergencePair, eps: float, grid: int = _DEFAULT_GRID
) -> float:
    """Largest feasible log-threshold, in bits.

    Exact for commuting pairs (sorted eigenvalue ratios).  For
    non-commuting pairs the threshold scan over the pencil candidates
    plus a log-uniform grid is refined by bisection; the certified
    bracket is available from :func:`info_spectrum_divergence_bracket`.
    """
    return info_spectrum_divergence_bracket(pair, eps, grid)[0]


# ---------------------------------------------------------------------------
# Hypothesis-testing divergence
# ---------------------------------------------------------------------------

def _optimal_test_mass(rho: np.ndarray, sigma: np.ndarray, eps: float) -> float:
    """min Tr[sigma T] over tests 0 <= T <= 1 with Tr[rho T] >= 1 - eps.

    Evaluated through the concave one-dimensional dual
    g(mu) = mu (1 - eps) - Tr[(mu rho - sigma)_+], whose maximum equals
    the primal optimum (randomized tests included).
    """
    target = 1.0 - eps

    def g(mu: float) -> float:
        return mu * target - _positive_part_trace_raw(mu * rho - sigma)

    hi = 1.0
    g_half, g_hi = g(hi / 2.0), g(hi)
    doublings = 0
    while g_hi >= g_half:
        hi *= 2.0
        doublings += 1
        if doublings > 60:
            raise NumericalError(
                "dual bracket failed to enclose a maximum after 60 doublings"
            )
        g_half, g_hi = g(hi / 2.0), g(hi)

    lo = 0.0
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = g(x1), g(x2)
    best = max(f1, f2, g_hi, 0.0)
    while hi - lo > 1e-12 * max(1.0, hi):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = g(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = g(x2)
        best = max(best, f1, f2)
    return best


def hypothesis_test_divergence(pair: DivergencePair, eps: float) -> float:
    """-log2 of the least sigma-mass of a test accepting rho with prob >= 1-eps."""
    _check_eps(eps)
    beta = _optimal_test_mass(pair.rho, pair.sigma, eps)
    if beta <= 0.0:
        return math.inf
    return -math.log2(beta)


def dual_test_objective(pair: DivergencePair, eps: float, mu: float) -> float:
    """The concave dual g(mu) whose maximum is the optimal test mass."""
    _check_eps(eps)
    if mu < 0.0:
        raise DomainError("mu must be non-negative")
    return mu * (1.0 - eps) - _positive_part_trace_raw(mu * pair.rho - pair.sigma)


# ---------------------------------------------------------------------------
# Collision divergence, relative entropy, relative entropy variance
# ---------------------------------------------------------------------------

def collision_divergence(pair: DivergencePair) -> float:
    """log2 of the collision overlap Tr[(sigma^{-1/4} rho sigma^{-1/4})^2].

    Homogeneous of degree 2 in rho, so unnormalized PSD numerators are
    meaningful; requires sigma positive definite on the support of rho.
    """
    _check_support(pair)
    quarter = mat_func(pair.sigma, lambda x: x ** -0.25, support_only=True)
    w = quarter @ pair.rho @ quarter
    value = float(np.trace(w @ w).real)
    if value <= 0.0:
        return -math.inf
    return math.log2(value)


def _log_operators(pair: DivergencePair) -> np.ndarray:
    log_rho = mat_func(pair.rho, math.log, support_only=True)
    log_sigma = mat_func(pair.sigma, math.log, support_only=True)
    return log_rho - log_sigma


def relative_entropy(pair: DivergencePair) -> float:
    """Tr[rho (log rho - log sigma)] in bits, support-restricted logs."""
    _check_support(pair)
    delta = _log_operators(pair)
    return float(np.trace(pair.rho @ delta).real) / LN2


def relative_entropy_variance(pair: DivergencePair) -> float:
    """Second central moment of the log-likelihood operator, in bits^2."""
    _check_support(pair)
    delta = _log_operators(pair)
    mean = float(np.trace(pair.rho @ delta).real)
    second = float(np.trace(pair.rho @ delta @ delta).real)
    return max(second - mean * mean, 0.0) / (LN2 * LN2)
