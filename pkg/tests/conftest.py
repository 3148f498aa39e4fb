"""Shared generators, named states, and independent oracles.

Oracles here deliberately avoid the library's computation paths: the
scalar test oracle is a greedy ratio fill, the operator test oracle is a
primal grid search, and trace norms are cross-checked through singular
values.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from oneshot_qit import CQState


# ---------------------------------------------------------------------------
# Random operator generators
# ---------------------------------------------------------------------------

def random_hermitian(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (g + g.conj().T) / 2


def random_density(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_psd(rng, d, scale=1.0):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return scale * (g @ g.conj().T) / d


def random_unitary(rng, d):
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_commuting_pair(rng, d, sigma_floor=0.05):
    """A density and a positive-definite density sharing an eigenbasis."""
    u = random_unitary(rng, d)
    r = rng.dirichlet(np.ones(d))
    s = rng.dirichlet(np.ones(d)) + sigma_floor
    s /= s.sum()
    return u @ np.diag(r) @ u.conj().T, u @ np.diag(s) @ u.conj().T


def random_projector(rng, d):
    u = random_unitary(rng, d)
    k = int(rng.integers(1, d + 1))
    cols = u[:, :k]
    return cols @ cols.conj().T


def random_cq_state(rng, alphabet, dim):
    p = rng.dirichlet(np.ones(alphabet))
    return CQState(p, [random_density(rng, dim) for _ in range(alphabet)])


# ---------------------------------------------------------------------------
# Named states
# ---------------------------------------------------------------------------

def bit_pair_trivial_side():
    """Uniform bit with no side information (blocks of dimension 1)."""
    return CQState(p=[0.5, 0.5], rhos=[[[1.0]], [[1.0]]])


def binary_antipodal():
    """Uniform bit mapped to orthogonal pure states."""
    return CQState(
        p=[0.5, 0.5],
        rhos=[[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 1.0]]],
    )


def classical_diagonal_state(rng, alphabet, dim):
    p = rng.dirichlet(np.ones(alphabet))
    rhos = [np.diag(rng.dirichlet(np.ones(dim))).astype(complex) for _ in range(alphabet)]
    return CQState(p, rhos)


def corpus_states():
    """Ten seeded states, |X| <= 4 and d <= 3, mixing generic, classical,
    trivial-side, and degenerate-spectrum cases."""
    rng = np.random.default_rng(20240917)
    states = [
        bit_pair_trivial_side(),
        binary_antipodal(),
        random_cq_state(rng, 2, 2),
        random_cq_state(rng, 3, 2),
        random_cq_state(rng, 4, 2),
        random_cq_state(rng, 2, 3),
        random_cq_state(rng, 3, 3),
        random_cq_state(rng, 4, 3),
        classical_diagonal_state(rng, 3, 2),
        CQState(p=[0.25] * 4, rhos=[[[1.0]]] * 4),
    ]
    return states


@pytest.fixture(scope="session")
def corpus():
    return corpus_states()


# ---------------------------------------------------------------------------
# Independent oracles
# ---------------------------------------------------------------------------

def scalar_test_oracle(p, q, eps):
    """Optimal q-mass over tests with p-acceptance >= 1 - eps.

    Greedy ratio fill with a fractional boundary outcome; independent of
    the library's dual-optimization path.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    order = sorted(range(p.size), key=lambda i: -(p[i] / q[i]))
    need = 1.0 - eps
    beta = 0.0
    for i in order:
        if need <= 0.0:
            break
        if p[i] <= 0.0:
            continue
        weight = min(1.0, need / p[i])
        beta += weight * q[i]
        need -= weight * p[i]
    return beta


def operator_test_oracle(rho, sigma, eps, n_grid=4000, mu_max=50.0):
    """Primal grid search over likelihood-ratio tests plus boundary mixing.

    Scans projectors onto the positive part of mu*rho - sigma and mixes
    consecutive tests to hit the acceptance constraint exactly.  Returns
    an upper bound on the optimal q-mass that converges from above as the
    grid refines.
    """
    rho = np.asarray(rho)
    sigma = np.asarray(sigma)
    points = []
    for mu in np.geomspace(1e-4, mu_max, n_grid):
        lam, v = np.linalg.eigh(mu * rho - sigma)
        cols = v[:, lam > 0]
        proj = cols @ cols.conj().T
        alpha = float(np.trace(rho @ proj).real)
        beta = float(np.trace(sigma @ proj).real)
        points.append((alpha, beta))
    points.append((1.0, float(np.trace(sigma).real)))  # the full test
    target = 1.0 - eps
    best = math.inf
    for alpha, beta in points:
        if alpha >= target:
            best = min(best, beta)
    points.sort()
    for (a1, b1), (a2, b2) in zip(points, points[1:]):
        if a1 < target <= a2 and a2 > a1:
            w = (target - a1) / (a2 - a1)
            best = min(best, (1 - w) * b1 + w * b2)
    return best


def svd_trace_norm(a):
    return float(np.linalg.svd(np.asarray(a), compute_uv=False).sum())
