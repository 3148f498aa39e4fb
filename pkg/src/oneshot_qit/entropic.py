"""Entropic quantities of classical-quantum states and asymptotic rate
formulas (Gaussian quantile, second-order expansions, moderate-deviation
rates).  All values are in bits; variances in bits^2.

The second argument of the one-shot information/entropy quantities is
fixed to the p-weighted marginal (respectively the marginal repeated in
every block), not optimized over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cq import CQState, joint_embed
from .divergences import (
    DivergencePair,
    hypothesis_test_divergence,
    relative_entropy,
    relative_entropy_variance,
)
from .errors import DomainError, NumericalError


def hypothesis_test_information(state: CQState, eps: float) -> float:
    """One-shot information of the joint state against p(x)-weighted marginals."""
    emb = joint_embed(state)
    pair = DivergencePair.of(emb.rho_xb, emb.rho_x_tensor_rho_b)
    return hypothesis_test_divergence(pair, eps)


def conditional_test_entropy(state: CQState, eps: float) -> float:
    """One-shot conditional entropy of the classical register given the rest."""
    emb = joint_embed(state)
    pair = DivergencePair.of(emb.rho_xb, emb.one_x_tensor_rho_b)
    return -hypothesis_test_divergence(pair, eps)


def mutual_information_with_variance(state: CQState) -> tuple[float, float]:
    """(information, information variance) of the joint state, in bits / bits^2."""
    emb = joint_embed(state)
    pair = DivergencePair.of(emb.rho_xb, emb.rho_x_tensor_rho_b)
    return relative_entropy(pair), relative_entropy_variance(pair)


def conditional_entropy_with_variance(state: CQState) -> tuple[float, float]:
    """(conditional entropy, conditional variance), in bits / bits^2."""
    emb = joint_embed(state)
    pair = DivergencePair.of(emb.rho_xb, emb.one_x_tensor_rho_b)
    return -relative_entropy(pair), relative_entropy_variance(pair)


# ---------------------------------------------------------------------------
# Gaussian quantile
# ---------------------------------------------------------------------------

_SQRT2 = math.sqrt(2.0)

# rational approximation coefficients (Acklam), refined below by Newton
_QA = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
       1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_QB = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
       6.680131188771972e+01, -1.328068155288572e+01)
_QC = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
       -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_QD = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
       3.754408661907416e+00)


def gaussian_cdf(u: float) -> float:
    """Standard normal cumulative distribution."""
    return 0.5 * math.erfc(-u / _SQRT2)


def _quantile_seed(eps: float) -> float:
    plow, phigh = 0.02425, 1.0 - 0.02425
    if eps < plow:
        q = math.sqrt(-2.0 * math.log(eps))
        return ((((( _QC[0] * q + _QC[1]) * q + _QC[2]) * q + _QC[3]) * q + _QC[4]) * q + _QC[5]) / \
               (((( _QD[0] * q + _QD[1]) * q + _QD[2]) * q + _QD[3]) * q + 1.0)
    if eps > phigh:
        q = math.sqrt(-2.0 * math.log(1.0 - eps))
        return -((((( _QC[0] * q + _QC[1]) * q + _QC[2]) * q + _QC[3]) * q + _QC[4]) * q + _QC[5]) / \
                (((( _QD[0] * q + _QD[1]) * q + _QD[2]) * q + _QD[3]) * q + 1.0)
    q = eps - 0.5
    r = q * q
    return ((((( _QA[0] * r + _QA[1]) * r + _QA[2]) * r + _QA[3]) * r + _QA[4]) * r + _QA[5]) * q / \
           ((((( _QB[0] * r + _QB[1]) * r + _QB[2]) * r + _QB[3]) * r + _QB[4]) * r + 1.0)


def normal_quantile(eps: float) -> float:
    """Inverse of the standard normal CDF, Newton-refined to 1e-10 round trip."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie strictly between 0 and 1, got {eps}")
    x = _quantile_seed(eps)
    for _ in range(4):
        err = gaussian_cdf(x) - eps
        pdf = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        if pdf <= 0.0:
            break
        x -= err / pdf
    if abs(gaussian_cdf(x) - eps) > 1e-10:
        raise NumericalError(f"quantile refinement failed at eps={eps}")
    return x


# ---------------------------------------------------------------------------
# Rate expansions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateExpansion:
    """A first-plus-square-root rate expansion evaluated at blocklength n.

    ``value_at_n`` always equals n * first_order + sqrt(n) *
    second_order_coeff; units are bits (per copy for first_order, per
    sqrt-copy for the coefficient).
    """

    first_order: float
    second_order_coeff: float
    epsilon: float
    n: int
    value_at_n: float

    @classmethod
    def assemble(cls, first_order: float, second_order_coeff: float,
                 epsilon: float, n: int) -> "RateExpansion":
        if n < 1:
            raise DomainError(f"blocklength must be positive, got {n}")
        value = n * first_order + math.sqrt(n) * second_order_coeff
        return cls(first_order, second_order_coeff, epsilon, n, value)


def second_order_value(d: float, v: float, eps: float, n: int) -> RateExpansion:
    """n*d + sqrt(n*v) * quantile(eps), packaged with its coefficients.

    The sign convention is the extraction one (+ quantile); callers that
    need the covering sign flip the coefficient (equivalently evaluate at
    1 - eps) when assembling their expansion.
    """
    if v < 0.0:
        raise DomainError(f"variance must be non-negative, got {v}")
    coeff = math.sqrt(v) * normal_quantile(eps)
    return RateExpansion.assemble(d, coeff, eps, n)


def moderate_rate(d: float, v: float, a_n: float, direction: int) -> float:
    """Per-copy rate d + direction * sqrt(2 v) * a_n for a deviation scale a_n."""
    if v < 0.0:
        raise DomainError(f"variance must be non-negative, got {v}")
    if a_n <= 0.0:
        raise DomainError(f"a_n must be positive, got {a_n}")
    if direction not in (-1, 1):
        raise DomainError(f"direction must be +1 or -1, got {direction}")
    return d + direction * math.sqrt(2.0 * v) * a_n
