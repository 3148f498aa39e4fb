"""Blocklength sweeps on classical pairs: exact finite-n optimal-test
values against their second-order and moderate-deviation predictions.

Only commuting (classical) pairs admit exact finite-n evaluation at
useful blocklengths; the type-class spectrum keeps the cost polynomial
in n.  Values are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cq import iid_type_spectrum
from .divergences import LN2
from .entropic import moderate_rate, second_order_value
from .errors import DomainError


@dataclass(frozen=True)
class SweepRow:
    """One blocklength of an exact-vs-prediction comparison (bits)."""

    n: int
    exact_bits: float
    prediction_bits: float
    residual: float
    regime: str  # "second-order" | "moderate"
    direction: int | None = None


def classical_relative_entropy(p, q) -> float:
    """sum p log2(p/q) for strictly positive q."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    return float(np.sum(p[mask] * np.log2(p[mask] / q[mask])))


def classical_relative_entropy_variance(p, q) -> float:
    """Variance of log2(p/q) under p."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    llr = np.log2(p[mask] / q[mask])
    mean = float(np.sum(p[mask] * llr))
    return max(float(np.sum(p[mask] * llr ** 2)) - mean * mean, 0.0)


def iid_test_divergence(p, q, n: int, eps: float) -> float:
    """Exact optimal-test divergence of the n-fold classical pair, in bits.

    Sorts type classes by likelihood ratio, fills the acceptance mass to
    1 - eps with a fractional weight on the boundary class, and returns
    -log2 of the q-mass accepted.  The acceptance probability under p
    equals 1 - eps exactly by construction.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    spectrum = iid_type_spectrum(p, q, n)
    order = np.argsort(spectrum.llr)[::-1]
    log_p = spectrum.log_p_mass[order]
    log_q = spectrum.log_q_mass[order]

    p_mass = np.exp(log_p)
    cum = np.cumsum(p_mass)
    target = 1.0 - eps
    boundary = int(np.searchsorted(cum, target, side="left"))
    if boundary >= cum.size:
        return 0.0  # the whole space is accepted; unit q-mass

    prior = cum[boundary - 1] if boundary > 0 else 0.0
    fraction = (target - prior) / p_mass[boundary]

    # q-mass accepted, accumulated in log space with compensated summation
    terms = []
    if boundary > 0:
        finite = log_q[:boundary]
        finite = finite[np.isfinite(finite)]
        if finite.size:
            peak = float(finite.max())
            terms.append((peak, float(math.fsum(np.exp(finite - peak)))))
    if fraction > 0.0 and np.isfinite(log_q[boundary]):
        terms.append((float(log_q[boundary] + math.log(fraction)), 1.0))
    if not terms:
        return math.inf
    peak = max(t[0] for t in terms)
    total = math.fsum(scale * math.exp(base - peak) for base, scale in terms)
    return -(peak + math.log(total)) / LN2


def second_order_sweep(p, q, eps: float, n_list) -> list[SweepRow]:
    """Exact values against n*D + sqrt(n*V) * quantile(eps) per blocklength."""
    d = classical_relative_entropy(p, q)
    v = classical_relative_entropy_variance(p, q)
    rows = []
    for n in sorted(int(n) for n in n_list):
        exact = iid_test_divergence(p, q, n, eps)
        prediction = second_order_value(d, v, eps, n).value_at_n
        rows.append(SweepRow(n, exact, prediction, exact - prediction, "second-order"))
    return rows


def moderate_sweep(p, q, t: float, n_list, direction: int) -> list[SweepRow]:
    """Per-copy exact values against D + direction * sqrt(2V) * n^{-t}.

    The deviation scale a_n = n^{-t} needs t in (0, 1/2) so that a_n
    vanishes while n * a_n^2 grows.  direction=-1 evaluates at the
    vanishing branch eps_n = exp(-n * a_n^2); direction=+1 at 1 - eps_n.
    """
    if not 0.0 < t < 0.5:
        raise DomainError(
            f"t must lie in (0, 1/2) so the deviation sequence is moderate, got {t}"
        )
    if direction not in (-1, 1):
        raise DomainError(f"direction must be +1 or -1, got {direction}")
    d = classical_relative_entropy(p, q)
    v = classical_relative_entropy_variance(p, q)
    rows = []
    for n in sorted(int(n) for n in n_list):
        a_n = n ** (-t)
        eps_n = math.exp(-n * a_n * a_n)
        eps_branch = eps_n if direction == -1 else 1.0 - eps_n
        exact = iid_test_divergence(p, q, n, eps_branch) / n
        prediction = moderate_rate(d, v, a_n, direction)
        rows.append(
            SweepRow(n, exact, prediction, exact - prediction, "moderate", direction)
        )
    return rows
