"""Exact and Monte-Carlo evaluation of the two protocol distances, plus
certified searches for the operational sizes.

Extraction distance: average over uniformly random function tables
h: X -> Z of half the trace distance between the hashed state and the
uniform target.  Covering distance: average over i.i.d. p-distributed
codebooks of half the trace distance between the codebook average and
the marginal.  Trace norms of block-diagonal operators are taken block
by block.

Determinism: Monte-Carlo draws come from a counter-based generator
keyed by (seed, chunk index) over fixed-size sample chunks, and
per-sample values are aggregated in sample order, so results are
bit-identical for any worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .cq import ENUMERATION_CAP, CQState, HashFamily
from .errors import DomainError

_CHUNK = 4096
_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class SimulationEstimate:
    """An estimated protocol distance.

    ``half_width`` is a 95% normal-approximation confidence half-width
    (0 for exact enumeration, where ``samples`` is the full enumeration
    count).
    """

    value: float
    method: str  # "exact" | "monte-carlo"
    samples: int
    seed: int
    half_width: float


def uniform_function_family(domain_size: int, range_size: int, method: str) -> HashFamily:
    """Descriptor of the hash family behind an estimate."""
    kind = "exhaustive-uniform-function" if method == "exact" else "sampled-uniform-function"
    return HashFamily(domain_size, range_size, kind)


def _check_method(method: str) -> None:
    if method not in ("exact", "mc", "monte-carlo"):
        raise DomainError(f"method must be 'exact' or 'mc', got {method!r}")


def _block_distances(assembled: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Half trace-norm of (assembled - reference) summed over z-blocks.

    ``assembled`` has shape (batch, blocks, d, d); the reference is a
    single (d, d) block subtracted from every one.
    """
    diff = assembled - reference
    if diff.shape[-1] == 1:
        return 0.5 * np.abs(diff[..., 0, 0]).sum(axis=1)
    lam = np.linalg.eigvalsh(diff)
    return 0.5 * np.abs(lam).sum(axis=(1, 2))


def _hash_values(tables: np.ndarray, weights: np.ndarray, z_size: int,
                 target: np.ndarray) -> np.ndarray:
    """Evaluate the extraction distance for a batch of function tables."""
    batch, x_size = tables.shape
    d = weights.shape[-1]
    acc = np.zeros((batch, z_size, d, d), dtype=complex)
    rows = np.arange(batch)
    for x in range(x_size):
        acc[rows, tables[:, x]] += weights[x]
    return _block_distances(acc, target)


def _codebook_values(tables: np.ndarray, rhos: np.ndarray,
                     rho_b: np.ndarray) -> np.ndarray:
    """Evaluate the covering distance for a batch of codebooks."""
    batch, m = tables.shape
    d = rhos.shape[-1]
    acc = np.zeros((batch, d, d), dtype=complex)
    for j in range(m):
        acc += rhos[tables[:, j]]
    acc /= m
    return _block_distances(acc[:, None], rho_b)


def _run_chunks(n_items: int, workers: int, job) -> np.ndarray:
    """Fill a value array chunk by chunk; chunk boundaries are fixed, so
    the result does not depend on the worker count."""
    values = np.empty(n_items, dtype=float)
    spans = [
        (j, start, min(start + _CHUNK, n_items))
        for j, start in enumerate(range(0, n_items, _CHUNK))
    ]
    if workers <= 1:
        for span in spans:
            job(values, *span)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(lambda s: job(values, *s), spans))
    return values


def _mixed_radix_tables(start: int, stop: int, base: int, digits: int) -> np.ndarray:
    idx = np.arange(start, stop, dtype=np.int64)
    table = np.empty((idx.size, digits), dtype=np.int64)
    for pos in range(digits):
        table[:, pos] = (idx // base ** pos) % base
    return table


def _chunk_rng(seed: int, chunk_index: int) -> np.random.Generator:
    key = np.array([seed & _SEED_MASK, chunk_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _mc_summary(values: np.ndarray) -> tuple[float, float]:
    value = float(np.mean(values))
    if values.size < 2:
        return value, math.inf
    half = 1.96 * float(np.std(values, ddof=1)) / math.sqrt(values.size)
    return value, half


def simulate_pa(state: CQState, z_size: int, method: str = "exact",
                samples: int = 100_000, seed: int = 0,
                workers: int = 1) -> SimulationEstimate:
    """Expected extraction distance for output alphabet size z_size.

    Exact mode averages over all z_size**alphabet function tables
    (rejected above the enumeration cap); Monte-Carlo mode draws tables
    uniformly and reports an unbiased mean with its confidence
    half-width.
    """
    if z_size < 1:
        raise DomainError(f"z_size must be >= 1, got {z_size}")
    _check_method(method)
    x_size = state.alphabet_size
    weights = state.p[:, None, None] * state.rhos
    target = state.marginal() / z_size

    if method == "exact":
        total = z_size ** x_size
        if total > ENUMERATION_CAP:
            raise DomainError(
                f"{total} function tables exceed the enumeration cap "
                f"{ENUMERATION_CAP}; use method='mc'"
            )

        def job(values, j, start, stop):
            tables = _mixed_radix_tables(start, stop, z_size, x_size)
            values[start:stop] = _hash_values(tables, weights, z_size, target)

        values = _run_chunks(total, workers, job)
        return SimulationEstimate(float(np.mean(values)), "exact", total, seed, 0.0)

    if samples < 2:
        raise DomainError("monte-carlo needs at least 2 samples")

    def job(values, j, start, stop):
        rng = _chunk_rng(seed, j)
        tables = rng.integers(0, z_size, size=(stop - start, x_size), dtype=np.int64)
        values[start:stop] = _hash_values(tables, weights, z_size, target)

    values = _run_chunks(samples, workers, job)
    value, half = _mc_summary(values)
    return SimulationEstimate(value, "monte-carlo", samples, seed, half)


def _composition_rows(n: int, k: int):
    if k == 1:
        yield (n,)
        return
    for head in range(n + 1):
        for tail in _composition_rows(n - head, k - 1):
            yield (head,) + tail


def simulate_covering(state: CQState, m: int, method: str = "exact",
                      samples: int = 100_000, seed: int = 0,
                      workers: int = 1) -> SimulationEstimate:
    """Expected covering distance for codebook size m.

    Exact mode computes the p^(x)m-weighted average over all alphabet**m
    codebooks; the average depends on a codebook only through its symbol
    histogram, so the enumeration is collapsed over types (the reported
    sample count remains the full codebook count).
    """
    if m < 1:
        raise DomainError(f"m must be >= 1, got {m}")
    _check_method(method)
    rho_b = state.marginal()
    x_size = state.alphabet_size

    if method == "exact":
        total = x_size ** m
        if total > ENUMERATION_CAP:
            raise DomainError(
                f"{total} codebooks exceed the enumeration cap "
                f"{ENUMERATION_CAP}; use method='mc'"
            )
        log_fact = [math.lgamma(j + 1) for j in range(m + 1)]
        with np.errstate(divide="ignore"):
            log_p = np.log(state.p)
        contributions = []
        for t in _composition_rows(m, x_size):
            t_arr = np.array(t, dtype=np.int64)
            if np.any((t_arr > 0) & (state.p == 0.0)):
                continue
            log_w = log_fact[m] - sum(log_fact[j] for j in t)
            log_w += float(np.where(t_arr > 0, t_arr * log_p, 0.0).sum())
            avg = np.tensordot(t_arr / m, state.rhos, axes=1)
            dist = 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(avg - rho_b))))
            contributions.append(math.exp(log_w) * dist)
        return SimulationEstimate(
            float(math.fsum(contributions)), "exact", total, seed, 0.0
        )

    if samples < 2:
        raise DomainError("monte-carlo needs at least 2 samples")

    def job(values, j, start, stop):
        rng = _chunk_rng(seed, j)
        tables = rng.choice(x_size, size=(stop - start, m), p=state.p)
        values[start:stop] = _codebook_values(tables, state.rhos, rho_b)

    values = _run_chunks(samples, workers, job)
    value, half = _mc_summary(values)
    return SimulationEstimate(value, "monte-carlo", samples, seed, half)


# ---------------------------------------------------------------------------
# Certified searches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SearchResult:
    """Outcome of an exact size search.

    ``found`` is the certified size (None when no size up to the cap
    qualifies); ``curve`` lists (size, estimate) for every size tried;
    ``cap_limited`` signals that the certified answer may lie beyond the
    cap (for extraction: the distance at the cap still qualified; for
    covering: nothing qualified).
    """

    found: int | None
    curve: list[tuple[int, SimulationEstimate]]
    cap_limited: bool
    family: HashFamily | None = None


def search_max_extractable(state: CQState, eps: float, z_cap: int,
                           workers: int = 1) -> SearchResult:
    """Largest output size up to z_cap whose extraction distance stays <= eps.

    Runs in exact mode only: a Monte-Carlo curve cannot certify the
    answer.  Sizes whose enumeration exceeds the cap are rejected up
    front.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if z_cap < 1:
        raise DomainError(f"z_cap must be >= 1, got {z_cap}")
    if z_cap ** state.alphabet_size > ENUMERATION_CAP:
        raise DomainError(
            f"exact enumeration infeasible at z={z_cap} "
            f"({z_cap ** state.alphabet_size} tables); lower the cap — the "
            "search refuses monte-carlo estimates for certification"
        )
    curve = [
        (z, simulate_pa(state, z, "exact", workers=workers))
        for z in range(1, z_cap + 1)
    ]
    qualifying = [z for z, est in curve if est.value <= eps + 1e-12]
    found = max(qualifying)  # z=1 gives distance 0, so this is never empty
    cap_limited = curve[-1][1].value <= eps + 1e-12
    return SearchResult(
        found, curve, cap_limited,
        family=uniform_function_family(state.alphabet_size, found, "exact"),
    )


def search_min_codebook(state: CQState, eps: float, m_cap: int,
                        workers: int = 1) -> SearchResult:
    """Smallest codebook size up to m_cap whose covering distance is <= eps."""
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if m_cap < 1:
        raise DomainError(f"m_cap must be >= 1, got {m_cap}")
    if state.alphabet_size ** m_cap > ENUMERATION_CAP:
        raise DomainError(
            f"exact enumeration infeasible at m={m_cap} "
            f"({state.alphabet_size ** m_cap} codebooks); lower the cap — the "
            "search refuses monte-carlo estimates for certification"
        )
    curve = [
        (m, simulate_covering(state, m, "exact", workers=workers))
        for m in range(1, m_cap + 1)
    ]
    qualifying = [m for m, est in curve if est.value <= eps + 1e-12]
    found = min(qualifying) if qualifying else None
    return SearchResult(found, curve, cap_limited=found is None)
