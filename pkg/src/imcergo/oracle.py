"""Desk-scale brute-force oracles over compatible precise Markov chains.

These routines enumerate the precise transition matrices compatible with a
vertex-row model and evaluate expected time averages exactly, giving
independent checks for the nonlinear recursions:

* the max over all time-inhomogeneous matrix sequences must reproduce the
  average recursion exactly (the per-step maximization decouples because
  rows are separately specified);
* the max over homogeneous chains is only a lower bound on the
  repetition-independent upper average at finite horizons (the objective is
  not linear in the matrix), but it approaches the same limit.
"""

from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapExceeded, IntervalRowsPresent
from .model import Gamble, IntervalRow, TransitionModel, VertexRow, _as_values
from .operator import UpperTransitionOperator
from .ergodicity import weak_ergodic_limit

#: Default cap on the number of enumerated chains or sequences.
ENUM_CAP = 10**6

#: Default number of sampled interior chains for the homogeneous oracle.
SAMPLE_COUNT = 200

THREADS_ENV = "IMCERGO_THREADS"


@dataclass(frozen=True)
class PreciseChain:
    """One row-stochastic matrix built from the model's row vertices.

    ``choice`` records the vertex index used for each state; sampled interior
    chains carry ``choice = None``.
    """

    matrix: np.ndarray
    choice: tuple[int, ...] | None = None


@dataclass
class OracleResult:
    value: float
    argmax: str
    count: int
    vertex_value: float | None = None
    sampled_value: float | None = None


def _thread_count() -> int:
    raw = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map(fn, items):
    """Order-preserving map, threaded when IMCERGO_THREADS allows it."""
    workers = _thread_count()
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _vertex_counts(model: TransitionModel) -> list[int]:
    counts = []
    for lab, row in zip(model.states.labels, model.rows):
        if not isinstance(row, VertexRow):
            raise IntervalRowsPresent(
                f"row for state {lab!r} is interval-valued; vertexize the model first"
            )
        counts.append(row.matrix.shape[0])
    return counts


def enumerate_homogeneous(model: TransitionModel, cap: int = ENUM_CAP) -> list[PreciseChain]:
    """All transition matrices formed by picking one vertex per row.

    Enumeration is lexicographic in (state index, vertex index).
    """
    counts = _vertex_counts(model)
    total = int(np.prod(counts, dtype=np.int64))
    if total > cap:
        raise CapExceeded(f"{total} chains exceed the cap {cap}")
    chains = []
    for choice in itertools.product(*(range(c) for c in counts)):
        matrix = np.vstack([model.rows[x].matrix[v] for x, v in enumerate(choice)])
        chains.append(PreciseChain(matrix=matrix, choice=choice))
    return chains


def interval_polytope_vertices(lower, upper, dedup_tol: float = 1e-12) -> np.ndarray:
    """Vertices of a reachable probability-interval credal set.

    Every vertex arises from some ordering of the states: walk the order and
    greedily take each upper bound, clipped so the remaining states can still
    meet their lower bounds.  Duplicates within ``dedup_tol`` are merged.
    """
    lo = np.asarray(lower, dtype=float)
    up = np.asarray(upper, dtype=float)
    n = lo.size
    found: list[np.ndarray] = []
    for order in itertools.permutations(range(n)):
        p = np.array(lo)
        mass = float(lo.sum())
        for y in order:
            take = min(up[y] - lo[y], 1.0 - mass)
            if take > 0.0:
                p[y] += take
                mass += take
        if any(np.max(np.abs(p - q)) <= dedup_tol for q in found):
            continue
        found.append(p)
    return np.vstack(found)


def vertexize_model(model: TransitionModel, cap: int = ENUM_CAP) -> TransitionModel:
    """Replace interval rows by the vertex lists of their polytopes."""
    import math

    rows = []
    for row in model.rows:
        if isinstance(row, IntervalRow):
            if math.factorial(row.n) > cap:
                raise CapExceeded(
                    f"vertex enumeration over {row.n}! orderings exceeds the cap {cap}"
                )
            rows.append(VertexRow(interval_polytope_vertices(row.lower, row.upper)))
        else:
            rows.append(row)
    return TransitionModel(model.states, rows)


def _average_vector(matrix: np.ndarray, f: np.ndarray, k: int) -> np.ndarray:
    """Exact expected time average of ``f`` over ``k`` steps, for every start state."""
    m = f.copy()
    for _ in range(k - 1):
        m = f + matrix @ m
    return m / k


def precise_time_average(chain: PreciseChain, f, x: int, k: int) -> float:
    """Expected time average of ``f`` for one homogeneous chain started at ``x``."""
    if k < 1:
        raise ValueError("k must be positive")
    fv = np.asarray(f.values if isinstance(f, Gamble) else f, dtype=float)
    return float(_average_vector(chain.matrix, fv, k)[x])


def ri_upper_average(
    model: TransitionModel,
    f,
    x: int,
    k: int,
    *,
    samples: int = SAMPLE_COUNT,
    seed: int = 0,
    cap: int = ENUM_CAP,
) -> OracleResult:
    """Lower bound on the repetition-independent upper expected time average.

    Maximizes the exact expected average over all vertex chains plus
    ``samples`` random interior chains (convex combinations of row
    vertices).  The true supremum need not be attained at a vertex for
    finite ``k``, so the result is a lower bound.
    """
    fv = _as_values(f, model.n)
    chains = enumerate_homogeneous(model, cap)
    values = _map(lambda ch: float(_average_vector(ch.matrix, fv, k)[x]), chains)
    best_i = int(np.argmax(values))
    vertex_value = values[best_i]
    argmax = f"vertex chain {chains[best_i].choice}"
    sampled_value = None
    best = vertex_value
    if samples > 0:
        rng = np.random.default_rng(seed)
        sampled_value = -np.inf
        for s in range(samples):
            matrix = np.vstack(
                [
                    rng.dirichlet(np.ones(row.matrix.shape[0])) @ row.matrix
                    for row in model.rows
                ]
            )
            val = float(_average_vector(matrix, fv, k)[x])
            if val > sampled_value:
                sampled_value = val
                if val > best:
                    best = val
                    argmax = f"sampled chain {s}"
    return OracleResult(
        value=best,
        argmax=argmax,
        count=len(chains),
        vertex_value=vertex_value,
        sampled_value=sampled_value,
    )


def ci_upper_average_bruteforce(
    model: TransitionModel, f, x: int, k: int, cap: int = ENUM_CAP
) -> OracleResult:
    """Exact max expected time average over all matrix sequences of length k - 1.

    This enumerates the time-inhomogeneous chains compatible with the model
    (vertex choices may differ per step) and must reproduce the average
    recursion value exactly.
    """
    if k < 1:
        raise ValueError("k must be positive")
    fv = _as_values(f, model.n)
    chains = enumerate_homogeneous(model, cap)
    n_seq = len(chains) ** (k - 1)
    if n_seq > cap:
        raise CapExceeded(f"{n_seq} matrix sequences exceed the cap {cap}")
    best = -np.inf
    best_seq: tuple[int, ...] = ()
    for seq in itertools.product(range(len(chains)), repeat=k - 1):
        m = fv.copy()
        for i in reversed(seq):
            m = fv + chains[i].matrix @ m
        val = float(m[x]) / k
        if val > best:
            best = val
            best_seq = seq
    return OracleResult(value=best, argmax=f"matrix sequence {best_seq}", count=n_seq)


def ri_limit_check(
    model: TransitionModel,
    f,
    *,
    ks: tuple[int, ...] = (100, 1000),
    samples: int = SAMPLE_COUNT,
    seed: int = 0,
    cap: int = ENUM_CAP,
    below_tol: float = 1e-2,
    above_tol: float = 1e-9,
) -> dict:
    """Compare the homogeneous-chain envelope against the weak-ergodic limit.

    For a TCA model the repetition-independent upper averages share the weak
    ergodic limit; this report evaluates the enumerated lower bound at the
    horizons ``ks`` for every start state and flags whether each value lies
    in ``[limit - below_tol, limit + above_tol]`` at the largest horizon.
    """
    op = UpperTransitionOperator(model)
    limit = weak_ergodic_limit(op, f)
    if limit is None:
        raise ValueError("ri_limit_check requires a TCA model")
    fv = _as_values(f, model.n)
    values: dict[int, list[float]] = {}
    for k in ks:
        values[k] = [
            ri_upper_average(model, fv, x, k, samples=samples, seed=seed, cap=cap).value
            for x in range(model.n)
        ]
    k_last = max(ks)
    ok = [
        limit - below_tol <= v <= limit + above_tol for v in values[k_last]
    ]
    ks_sorted = sorted(ks)
    monotone = [
        all(
            values[ks_sorted[i]][x] <= values[ks_sorted[i + 1]][x] + below_tol
            for i in range(len(ks_sorted) - 1)
        )
        for x in range(model.n)
    ]
    return {
        "limit": limit,
        "values": values,
        "in_band": ok,
        "monotone": monotone,
        "all_ok": all(ok),
    }
