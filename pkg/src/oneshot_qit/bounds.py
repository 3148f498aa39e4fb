"""Explicit one-shot bounds for randomness extraction and soft covering.

Two levels are provided.  The direct bounds upper-bound the expected
trace distance of a single protocol run (a pinched tail mass plus a
square-root overshoot term).  The size bounds sandwich the log of the
operational size (extractable randomness / minimal codebook size)
between one-shot entropic terms with explicit logarithmic corrections.
All logs are base 2, matching the entropic modules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cq import CQState
from .entropic import conditional_test_entropy, hypothesis_test_information
from .errors import DomainError
from .linalg import DEFAULT_CLUSTER_TOL, eig_herm, spec_count


@dataclass(frozen=True)
class BoundReport:
    """Evaluated sandwich on the log-size of a protocol, with its inputs.

    ``lower_bits <= log2(operational size) <= upper_bits`` for states
    whose exact operational size is certified; ``intermediate`` keeps the
    entropic terms and correction terms that built the two bounds.
    """

    task: str  # "pa" | "covering"
    eps: float
    delta: float
    c: float
    nu: int
    lower_bits: float
    upper_bits: float
    intermediate: dict = field(default_factory=dict)


def validate_sandwich_params(eps: float, delta: float, c: float) -> None:
    """Enforce 0 < c < delta < min(eps/3, (1-eps)/2), naming the violation."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if c <= 0.0:
        raise DomainError(f"c must be > 0, got {c}")
    if c >= delta:
        raise DomainError(f"c must be < delta, got c={c}, delta={delta}")
    if delta >= eps / 3.0:
        raise DomainError(f"delta must be < eps/3, got delta={delta}, eps={eps}")
    if delta >= (1.0 - eps) / 2.0:
        raise DomainError(
            f"delta must be < (1-eps)/2, got delta={delta}, eps={eps}"
        )


def _pinched_exceedance_mass(
    state: CQState, c: float, weight_threshold: bool
) -> float:
    """Mass of the joint state where its marginal-pinched version exceeds
    c times the reference.

    The reference is the identity-weighted marginal when
    ``weight_threshold`` is False (extraction) and the p(x)-weighted
    marginal when True (covering).  Both operators commute with the
    marginal, so the comparison is exact in its eigenbasis.
    """
    system = eig_herm(state.marginal())
    v = system.eigenvectors
    clusters = system.clusters()
    cluster_vals = [float(np.mean(system.eigenvalues[idx])) for idx in clusters]

    masses, gaps = [], []
    for x in range(state.alphabet_size):
        block = v.conj().T @ (state.p[x] * state.rhos[x]) @ v
        t_x = state.p[x] if weight_threshold else 1.0
        for idx, lam in zip(clusters, cluster_vals):
            beta = np.linalg.eigvalsh(block[np.ix_(idx, idx)])
            masses.append(beta)
            gaps.append(beta - c * t_x * lam)
    masses = np.concatenate(masses)
    gaps = np.concatenate(gaps)
    atol = DEFAULT_CLUSTER_TOL * float(np.max(np.abs(gaps)))
    return float(np.sum(masses[gaps > atol]))


def pa_direct_bound(state: CQState, c: float, z_size: int) -> float:
    """Upper bound on the expected extraction distance at output size z_size.

    Pinched tail mass plus sqrt(c * nu * z_size), where nu counts the
    distinct eigenvalues of the marginal.  Valid for every c > 0 under
    the uniform random-function family.
    """
    if c <= 0.0:
        raise DomainError(f"c must be > 0, got {c}")
    if z_size < 1:
        raise DomainError(f"z_size must be >= 1, got {z_size}")
    tail = _pinched_exceedance_mass(state, c, weight_threshold=False)
    nu = spec_count(state.marginal())
    return tail + math.sqrt(c * nu * z_size)


def covering_direct_bound(state: CQState, c: float, m: int) -> float:
    """Upper bound on the expected covering distance at codebook size m.

    Pinched tail mass plus sqrt(nu * c / m); valid for every c > 0 when
    codewords are drawn i.i.d. from p.
    """
    if c <= 0.0:
        raise DomainError(f"c must be > 0, got {c}")
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    tail = _pinched_exceedance_mass(state, c, weight_threshold=True)
    nu = spec_count(state.marginal())
    return tail + math.sqrt(nu * c / m)


def pa_size_bounds(state: CQState, eps: float, delta: float, c: float) -> BoundReport:
    """Sandwich on the log of the maximal extractable randomness."""
    validate_sandwich_params(eps, delta, c)
    nu = spec_count(state.marginal())
    h_low = conditional_test_entropy(state, 1.0 - eps + 3.0 * delta)
    h_high = conditional_test_entropy(state, 1.0 - eps - 2.0 * delta)
    penalty = math.log2(nu * nu / delta ** 4)
    slack = math.log2((1.0 + c) / (c * delta)) + math.log2((eps + c) / (delta - c))
    return BoundReport(
        task="pa",
        eps=eps,
        delta=delta,
        c=c,
        nu=nu,
        lower_bits=h_low - penalty,
        upper_bits=h_high + slack,
        intermediate={
            "entropy_low_bits": h_low,
            "entropy_high_bits": h_high,
            "spectrum_penalty_bits": penalty,
            "correction_bits": slack,
        },
    )


def covering_size_bounds(
    state: CQState, eps: float, delta: float, c: float
) -> BoundReport:
    """Sandwich on the log of the minimal random codebook size."""
    validate_sandwich_params(eps, delta, c)
    nu = spec_count(state.marginal())
    i_low = hypothesis_test_information(state, 1.0 - eps - 2.0 * delta)
    i_high = hypothesis_test_information(state, 1.0 - eps + 3.0 * delta)
    penalty = math.log2(nu * nu / delta ** 4)
    slack = math.log2((1.0 + c) / (c * delta)) + math.log2((eps + c) / (delta - c))
    return BoundReport(
        task="covering",
        eps=eps,
        delta=delta,
        c=c,
        nu=nu,
        lower_bits=i_low - slack,
        upper_bits=i_high + penalty,
        intermediate={
            "information_low_bits": i_low,
            "information_high_bits": i_high,
            "spectrum_penalty_bits": penalty,
            "correction_bits": slack,
        },
    )
