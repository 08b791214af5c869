"""Random model generators shared by the test batteries.

Probabilities are multiples of 1/denom (drawn from a multinomial), so that
structural zeros are exact and no transition probability on a support is
smaller than 1/denom.  The structured recipes keep transient excursions
short, which the finite-horizon empirical checks need to stay conclusive.
"""

import warnings

import numpy as np

from imcergo import Gamble, IntervalRow, StateSpace, TransitionModel, VertexRow, classify
from imcergo.model import IntervalNormalizationWarning


def random_pmf(rng, n, support=None, denom=20):
    if support is None:
        support = np.arange(n)
    support = np.asarray(support, dtype=int)
    w = rng.random(support.size) + 0.2
    counts = rng.multinomial(denom, w / w.sum())
    p = np.zeros(n)
    p[support] = counts / denom
    return p


def random_vertex_row(rng, n, support=None, n_vertices=None, denom=20):
    if n_vertices is None:
        n_vertices = int(rng.integers(2, 5))
    return VertexRow([random_pmf(rng, n, support, denom) for _ in range(n_vertices)])


def random_interval_row(rng, n, support=None, denom=20):
    center = random_pmf(rng, n, support, denom)
    lo_slack = rng.integers(0, max(denom // 3, 1) + 1, size=n) / denom
    up_slack = rng.integers(0, max(denom // 3, 1) + 1, size=n) / denom
    lower = np.maximum(center - lo_slack, 0.0)
    upper = np.minimum(center + up_slack, 1.0)
    if support is not None:
        mask = np.zeros(n, dtype=bool)
        mask[np.asarray(support, dtype=int)] = True
        lower[~mask] = 0.0
        upper[~mask] = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntervalNormalizationWarning)
        return IntervalRow(lower, upper)


def _random_row(rng, n, kind, support=None, denom=20, n_vertices=None):
    if kind == "mixed":
        kind = "interval" if rng.random() < 0.4 else "vertex"
    if kind == "interval":
        return random_interval_row(rng, n, support, denom)
    return random_vertex_row(rng, n, support, n_vertices=n_vertices, denom=denom)


def _labels(n):
    return [chr(ord("a") + i) for i in range(n)]


def random_model(rng, n, kind="mixed", denom=20, n_vertices=None):
    """Unstructured model: every row ranges over the full state space."""
    states = StateSpace(_labels(n))
    rows = [_random_row(rng, n, kind, None, denom, n_vertices) for _ in range(n)]
    return TransitionModel(states, rows)


def random_structured_model(rng, n, kind="mixed", denom=4):
    """A model drawn from one of four structural recipes.

    1. free: full supports (usually strongly connected, fast mixing);
    2. split: at least two absorbing states (no top class);
    3. trap: a confining set outside the top class (top class, not absorbing);
    4. funnel: transient states that leak at least half their mass into the
       core every step (top class absorbing, short excursions).
    """
    recipe = rng.choice(["free", "split", "trap", "funnel"], p=[0.4, 0.2, 0.2, 0.2])
    states = StateSpace(_labels(n))
    rows: list = [None] * n
    if recipe == "free":
        rows = [_random_row(rng, n, kind, None, denom) for _ in range(n)]
    elif recipe == "split":
        absorbing = rng.choice(n, size=2, replace=False)
        for x in range(n):
            if x in absorbing:
                rows[x] = VertexRow([np.eye(n)[x]])
            else:
                rows[x] = _random_row(rng, n, kind, None, denom)
    elif recipe == "trap":
        trap_size = 1 if n <= 3 else int(rng.integers(1, 3))
        perm = rng.permutation(n)
        trap = sorted(perm[:trap_size])
        core = sorted(perm[trap_size:])
        for x in range(n):
            if x in trap:
                # one vertex confines to the trap, another may escape
                confining = random_pmf(rng, n, trap, denom)
                escaping = random_pmf(rng, n, None, denom)
                rows[x] = VertexRow([confining, escaping])
            else:
                rows[x] = _random_row(rng, n, kind, core, denom)
    else:  # funnel
        core_size = max(1, n - int(rng.integers(1, n)))
        perm = rng.permutation(n)
        core = sorted(perm[:core_size])
        for x in range(n):
            if x in core:
                rows[x] = _random_row(rng, n, kind, core, denom)
            else:
                # every vertex keeps at least half its mass inside the core
                pmfs = []
                for _ in range(int(rng.integers(2, 4))):
                    inside = random_pmf(rng, n, core, 2 * denom) * 0.5
                    anywhere = random_pmf(rng, n, None, 2 * denom) * 0.5
                    pmfs.append(inside + anywhere)
                rows[x] = VertexRow(pmfs)
    return TransitionModel(states, rows)


def random_anchored_vertex_row(rng, n, anchor, support=None, denom=4):
    """A vertex row whose every pmf puts at least half its mass on ``anchor``.

    The common anchor makes the class Doeblin-mixing with coefficient 1/2,
    which keeps relative-value vectors of the upper operator small; the
    finite-horizon batteries need that to resolve limits at their pinned
    horizons and thresholds.
    """
    pmfs = []
    for _ in range(int(rng.integers(2, 4))):
        base = np.zeros(n)
        base[anchor] = 0.5
        pmfs.append(base + 0.5 * random_pmf(rng, n, support, denom))
    return VertexRow(pmfs)


def random_anchored_interval_row(rng, n, anchor, support=None, denom=4):
    inner = random_interval_row(rng, n, support, denom)
    base = np.zeros(n)
    base[anchor] = 0.5
    lower = base + 0.5 * np.asarray(inner.lower)
    upper = base + 0.5 * np.asarray(inner.upper)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntervalNormalizationWarning)
        return IntervalRow(lower, upper)


def _anchored_row(rng, n, kind, anchor, support=None, denom=4):
    if kind == "mixed":
        kind = "interval" if rng.random() < 0.4 else "vertex"
    if kind == "interval":
        return random_anchored_interval_row(rng, n, anchor, support, denom)
    return random_anchored_vertex_row(rng, n, anchor, support, denom)


def random_battery_model(rng, n, kind="mixed", denom=4):
    """Well-conditioned structured model for the finite-horizon batteries.

    Same four recipes as :func:`random_structured_model`, but rows inside a
    communicating core share an anchor state, so that long-run averages
    settle well within the pinned horizons.  Tail structure (absorbing
    splits, confining traps, leaking transients) is unrestricted where the
    detection margin is O(1) anyway.
    """
    recipe = rng.choice(["free", "split", "trap", "funnel"], p=[0.4, 0.2, 0.2, 0.2])
    states = StateSpace(_labels(n))
    rows: list = [None] * n
    if recipe == "free":
        anchor = int(rng.integers(n))
        rows = [_anchored_row(rng, n, kind, anchor, None, denom) for _ in range(n)]
    elif recipe == "split":
        absorbing = rng.choice(n, size=2, replace=False)
        anchor = int(absorbing[0])
        for x in range(n):
            if x in absorbing:
                rows[x] = VertexRow([np.eye(n)[x]])
            else:
                rows[x] = _anchored_row(rng, n, kind, anchor, None, denom)
    elif recipe == "trap":
        trap_size = 1 if n <= 3 else int(rng.integers(1, 3))
        perm = rng.permutation(n)
        trap = sorted(int(v) for v in perm[:trap_size])
        core = sorted(int(v) for v in perm[trap_size:])
        trap_anchor = trap[0]
        core_anchor = core[0]
        for x in range(n):
            if x in trap:
                confining = random_anchored_vertex_row(rng, n, trap_anchor, trap, denom)
                escaping = random_pmf(rng, n, None, denom)
                rows[x] = VertexRow(list(confining.matrix) + [escaping])
            else:
                rows[x] = _anchored_row(rng, n, kind, core_anchor, core, denom)
    else:  # funnel
        core_size = max(1, n - int(rng.integers(1, n)))
        perm = rng.permutation(n)
        core = sorted(int(v) for v in perm[:core_size])
        anchor = core[0]
        for x in range(n):
            if x in core:
                rows[x] = _anchored_row(rng, n, kind, anchor, core, denom)
            else:
                pmfs = []
                for _ in range(int(rng.integers(2, 4))):
                    base = np.zeros(n)
                    base[anchor] = 0.5
                    pmfs.append(base + 0.5 * random_pmf(rng, n, None, denom))
                rows[x] = VertexRow(pmfs)
    return TransitionModel(states, rows)


def random_strongly_connected_model(rng, n, kind="vertex", denom=8):
    from imcergo import build_graph, decompose

    while True:
        model = random_model(rng, n, kind, denom)
        if len(decompose(build_graph(model)).classes) == 1:
            return model


def random_sc_anchored_model(rng, n, kind="mixed", denom=4):
    """Strongly connected model with a shared half-mass anchor in every row."""
    from imcergo import build_graph, decompose

    while True:
        anchor = int(rng.integers(n))
        states = StateSpace(_labels(n))
        rows = [_anchored_row(rng, n, kind, anchor, None, denom) for _ in range(n)]
        model = TransitionModel(states, rows)
        if len(decompose(build_graph(model)).classes) == 1:
            return model


def random_tca_vertex_model(rng, n, denom=4):
    while True:
        model = random_structured_model(rng, n, kind="vertex", denom=denom)
        if classify(model).tca:
            return model


def random_gamble(rng, states, unit=False):
    vals = rng.uniform(-1.0, 1.0, len(states))
    if unit:
        peak = np.max(np.abs(vals))
        while peak < 1e-6:
            vals = rng.uniform(-1.0, 1.0, len(states))
            peak = np.max(np.abs(vals))
        vals = vals / peak
    return Gamble(states, vals)
