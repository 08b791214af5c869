"""State spaces, gambles, and separately specified credal transition rows.

A transition model assigns to every state a *credal row*: a closed convex set
of probability mass functions over the successor state.  Two representations
are supported, an explicit vertex list and componentwise probability
intervals.  Rows are specified independently of one another, so the induced
set of transition matrices is the full row-wise product.

The one-step row upper expectation implemented here is the scalar building
block of the upper transition operator: for a row set ``M`` and a gamble
``h`` it returns ``sup { p . h : p in M }``.
"""

from __future__ import annotations

import json
import math
import warnings
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DuplicateStateLabels,
    ClassNotClosed,
    IncoherentIntervals,
    PmfMassError,
    SchemaViolation,
)

#: Absolute tolerance for probability-mass validation.  Structural queries
#: (supports, graph edges) never use it; they compare against exact zero.
TOL_MASS = 1e-9


class IntervalNormalizationWarning(UserWarning):
    """Emitted when load-time normalization tightens an interval bound."""


def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


class StateSpace:
    """An ordered, finite collection of distinct state labels."""

    __slots__ = ("labels", "_index")

    def __init__(self, labels: Sequence[str]):
        labels = tuple(str(lab) for lab in labels)
        if not labels:
            raise SchemaViolation("state space must contain at least one state")
        if len(set(labels)) != len(labels):
            raise DuplicateStateLabels(f"duplicate state labels in {labels!r}")
        self.labels = labels
        self._index = {lab: i for i, lab in enumerate(labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, StateSpace) and self.labels == other.labels

    def __repr__(self) -> str:
        return f"StateSpace({list(self.labels)!r})"

    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"unknown state label {label!r}") from None

    def indices(self, labels: Iterable[str | int]) -> tuple[int, ...]:
        """Map labels (or pass through integer indices) to state indices."""
        out = []
        for lab in labels:
            if isinstance(lab, (int, np.integer)):
                i = int(lab)
                if not 0 <= i < len(self.labels):
                    raise IndexError(f"state index {i} out of range")
                out.append(i)
            else:
                out.append(self.index(lab))
        return tuple(out)


class Gamble:
    """A real-valued function on the state space, stored as a vector."""

    __slots__ = ("states", "values")

    def __init__(self, states: StateSpace, values):
        vals = np.asarray(values, dtype=float)
        if vals.shape != (len(states),):
            raise DimensionMismatch(
                f"gamble has {vals.shape} values for {len(states)} states"
            )
        if not np.all(np.isfinite(vals)):
            raise SchemaViolation("gamble values must be finite")
        self.states = states
        self.values = _frozen(vals)

    @classmethod
    def from_dict(cls, states: StateSpace, mapping: Mapping[str, float]) -> "Gamble":
        if set(mapping) != set(states.labels):
            raise SchemaViolation(
                f"gamble keys {sorted(mapping)} do not match states {list(states.labels)}"
            )
        return cls(states, [mapping[lab] for lab in states.labels])

    @classmethod
    def indicator(cls, states: StateSpace, subset: Iterable[str | int]) -> "Gamble":
        vals = np.zeros(len(states))
        vals[list(states.indices(subset))] = 1.0
        return cls(states, vals)

    @classmethod
    def constant(cls, states: StateSpace, value: float) -> "Gamble":
        return cls(states, np.full(len(states), float(value)))

    def __neg__(self) -> "Gamble":
        return Gamble(self.states, -self.values)

    def __getitem__(self, key: str | int) -> float:
        if isinstance(key, str):
            key = self.states.index(key)
        return float(self.values[key])

    def as_dict(self) -> dict[str, float]:
        return {lab: float(v) for lab, v in zip(self.states.labels, self.values)}

    def __repr__(self) -> str:
        return f"Gamble({self.as_dict()!r})"


class Pmf:
    """A probability mass function over the state space."""

    __slots__ = ("probs",)

    def __init__(self, probs):
        vals = np.asarray(probs, dtype=float)
        if vals.ndim != 1 or vals.size == 0:
            raise PmfMassError("pmf must be a nonempty vector")
        if not np.all(np.isfinite(vals)):
            raise PmfMassError("pmf entries must be finite")
        if np.any(vals < -TOL_MASS):
            raise PmfMassError(f"negative probability mass in {vals.tolist()}")
        # Entries within tolerance of zero are clamped so that support
        # queries stay exact.
        vals = np.where(vals < 0.0, 0.0, vals)
        total = math.fsum(map(float, vals))
        if abs(total - 1.0) > TOL_MASS:
            raise PmfMassError(f"pmf mass {total} is not 1 within {TOL_MASS}")
        self.probs = _frozen(vals)

    def __len__(self) -> int:
        return self.probs.size

    def __repr__(self) -> str:
        return f"Pmf({self.probs.tolist()!r})"


def _as_values(h, n: int) -> np.ndarray:
    vals = h.values if isinstance(h, Gamble) else np.asarray(h, dtype=float)
    if vals.shape != (n,):
        raise DimensionMismatch(f"gamble of length {vals.shape} against {n} states")
    return vals


class CredalRow:
    """Base class for one state's set of plausible transition pmfs."""

    n: int

    def upper_expectation(self, h) -> float:
        raise NotImplementedError

    def lower_expectation(self, h) -> float:
        vals = _as_values(h, self.n)
        return -self.upper_expectation(-vals)

    def can_confine(self, mask: np.ndarray) -> bool:
        """Exact test whether some row pmf puts all mass inside ``mask``."""
        raise NotImplementedError

    def upper_support(self) -> np.ndarray:
        """Boolean vector: is the upper probability of each successor > 0?"""
        raise NotImplementedError

    def restrict(self, keep: Sequence[int]) -> "CredalRow":
        """Project the row onto the successor states ``keep``.

        Only valid when the row cannot place mass outside ``keep``;
        raises :class:`ClassNotClosed` otherwise.
        """
        raise NotImplementedError


class VertexRow(CredalRow):
    """A credal row given by the vertices of its pmf polytope."""

    __slots__ = ("matrix", "n")

    def __init__(self, pmfs):
        if isinstance(pmfs, np.ndarray) and pmfs.ndim == 2:
            rows = [Pmf(p) for p in pmfs]
        else:
            rows = [p if isinstance(p, Pmf) else Pmf(p) for p in pmfs]
        if not rows:
            raise SchemaViolation("vertex row needs at least one pmf")
        n = len(rows[0])
        if any(len(p) != n for p in rows):
            raise DimensionMismatch("vertex pmfs have inconsistent lengths")
        self.matrix = _frozen(np.vstack([p.probs for p in rows]))
        self.n = n

    @property
    def pmfs(self) -> tuple[Pmf, ...]:
        return tuple(Pmf(row) for row in self.matrix)

    def upper_expectation(self, h) -> float:
        vals = _as_values(h, self.n)
        return float(np.max(self.matrix @ vals))

    def can_confine(self, mask: np.ndarray) -> bool:
        outside = ~np.asarray(mask, dtype=bool)
        return bool(np.any(np.all(self.matrix[:, outside] == 0.0, axis=1)))

    def upper_support(self) -> np.ndarray:
        return np.any(self.matrix > 0.0, axis=0)

    def restrict(self, keep: Sequence[int]) -> "VertexRow":
        keep = list(keep)
        drop = np.setdiff1d(np.arange(self.n), keep)
        if np.any(self.matrix[:, drop] != 0.0):
            raise ClassNotClosed("row has vertices with mass outside the class")
        return VertexRow(self.matrix[:, keep])

    def __repr__(self) -> str:
        return f"VertexRow({self.matrix.tolist()!r})"


class IntervalRow(CredalRow):
    """A credal row given by componentwise probability intervals.

    Bounds are validated for coherence and then tightened to their reachable
    envelope, so that every stored bound is attained by some pmf in the set.
    """

    __slots__ = ("lower", "upper", "n")

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=float)
        up = np.asarray(upper, dtype=float)
        if lo.ndim != 1 or lo.shape != up.shape or lo.size == 0:
            raise SchemaViolation("interval bounds must be two equal-length vectors")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(up))):
            raise SchemaViolation("interval bounds must be finite")
        if np.any(lo < -TOL_MASS) or np.any(up > 1.0 + TOL_MASS):
            raise IncoherentIntervals("interval bounds must lie in [0, 1]")
        lo = np.clip(lo, 0.0, 1.0)
        up = np.clip(up, 0.0, 1.0)
        if np.any(lo > up + TOL_MASS):
            raise IncoherentIntervals("lower bound exceeds upper bound")
        lo = np.minimum(lo, up)
        sum_lo = math.fsum(map(float, lo))
        sum_up = math.fsum(map(float, up))
        if sum_up < 1.0 - TOL_MASS or sum_lo > 1.0 + TOL_MASS:
            raise IncoherentIntervals(
                f"no pmf fits: sum of lowers {sum_lo}, sum of uppers {sum_up}"
            )
        lo2, up2 = self._reachable(lo, up)
        if np.any(lo2 != lo) or np.any(up2 != up):
            warnings.warn(
                "interval bounds were tightened to their reachable envelope",
                IntervalNormalizationWarning,
                stacklevel=2,
            )
        self.lower = _frozen(lo2)
        self.upper = _frozen(up2)
        self.n = lo2.size

    @staticmethod
    def _reachable(lo: np.ndarray, up: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        sum_lo = math.fsum(map(float, lo))
        sum_up = math.fsum(map(float, up))
        lo2 = np.maximum(lo, 1.0 - (sum_up - up))
        up2 = np.minimum(up, 1.0 - (sum_lo - lo))
        return np.minimum(lo2, up2), up2

    def upper_expectation(self, h) -> float:
        vals = _as_values(h, self.n)
        order = np.argsort(-vals, kind="stable")
        lo = self.lower[order]
        up = self.upper[order]
        suffix = np.concatenate([np.cumsum(lo[::-1])[::-1][1:], [0.0]])
        mass = 0.0
        value = 0.0
        for j, y in enumerate(order):
            cap = 1.0 - mass - suffix[j]
            p = up[j] if up[j] < cap else cap
            if p < lo[j]:
                p = lo[j]
            value += p * vals[y]
            mass += p
        return float(value)

    def can_confine(self, mask: np.ndarray) -> bool:
        mask = np.asarray(mask, dtype=bool)
        if np.any(self.lower[~mask] != 0.0):
            return False
        return math.fsum(float(u) for u in self.upper[mask]) >= 1.0 - TOL_MASS

    def upper_support(self) -> np.ndarray:
        return self.upper > 0.0

    def restrict(self, keep: Sequence[int]) -> "IntervalRow":
        keep = list(keep)
        drop = np.setdiff1d(np.arange(self.n), keep)
        if np.any(self.upper[drop] > 0.0):
            raise ClassNotClosed("row has upper probability mass outside the class")
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", IntervalNormalizationWarning)
            return IntervalRow(self.lower[keep], self.upper[keep])

    def __repr__(self) -> str:
        return f"IntervalRow(lower={self.lower.tolist()!r}, upper={self.upper.tolist()!r})"


class TransitionModel:
    """A separately specified set of transition matrices, one credal row per state."""

    __slots__ = ("states", "rows")

    def __init__(self, states: StateSpace, rows: Sequence[CredalRow]):
        rows = tuple(rows)
        if len(rows) != len(states):
            raise DimensionMismatch(
                f"{len(rows)} rows given for {len(states)} states"
            )
        for lab, row in zip(states.labels, rows):
            if row.n != len(states):
                raise DimensionMismatch(
                    f"row for state {lab!r} has length {row.n}, expected {len(states)}"
                )
        self.states = states
        self.rows = rows

    @property
    def n(self) -> int:
        return len(self.states)

    def restrict(self, keep: Sequence[str | int]) -> "TransitionModel":
        """The sub-model on ``keep``, valid only when ``keep`` is closed."""
        idx = self.states.indices(keep)
        sub_states = StateSpace([self.states.labels[i] for i in idx])
        sub_rows = [self.rows[i].restrict(idx) for i in idx]
        return TransitionModel(sub_states, sub_rows)

    def gamble(self, values) -> Gamble:
        if isinstance(values, Mapping):
            return Gamble.from_dict(self.states, values)
        return Gamble(self.states, values)

    def __repr__(self) -> str:
        return f"TransitionModel(states={list(self.states.labels)!r}, rows={len(self.rows)})"


def row_upper_expectation(row: CredalRow, h) -> float:
    """Supremum over the row credal set of the expectation of ``h``."""
    return row.upper_expectation(h)


def row_lower_expectation(row: CredalRow, h) -> float:
    """Infimum over the row credal set, obtained by conjugacy."""
    return row.lower_expectation(h)


def row_can_confine(row: CredalRow, subset: Sequence[int] | np.ndarray) -> bool:
    """Exact test whether the row upper probability of staying in ``subset`` is 1.

    ``subset`` is a nonempty collection of state indices or a boolean mask.
    """
    mask = np.asarray(subset)
    if mask.dtype != bool:
        idx = np.asarray(subset, dtype=int)
        mask = np.zeros(row.n, dtype=bool)
        mask[idx] = True
    elif mask.shape != (row.n,):
        raise DimensionMismatch(f"mask of length {mask.size} against {row.n} states")
    if not mask.any():
        raise ValueError("subset must be nonempty")
    return row.can_confine(mask)


def _require(cond: bool, msg: str):
    if not cond:
        raise SchemaViolation(msg)


def _parse_row(label: str, spec, n: int) -> CredalRow:
    _require(isinstance(spec, dict), f"row {label!r} must be an object")
    kind = spec.get("type")
    if kind == "vertices":
        _require(set(spec) == {"type", "pmfs"}, f"row {label!r}: expected keys type, pmfs")
        pmfs = spec["pmfs"]
        _require(
            isinstance(pmfs, list) and pmfs and all(isinstance(p, list) for p in pmfs),
            f"row {label!r}: pmfs must be a nonempty list of vectors",
        )
        _require(
            all(len(p) == n for p in pmfs),
            f"row {label!r}: each pmf must have {n} entries",
        )
        return VertexRow(pmfs)
    if kind == "intervals":
        _require(
            set(spec) == {"type", "lower", "upper"},
            f"row {label!r}: expected keys type, lower, upper",
        )
        lower, upper = spec["lower"], spec["upper"]
        _require(
            isinstance(lower, list) and isinstance(upper, list)
            and len(lower) == n and len(upper) == n,
            f"row {label!r}: lower and upper must have {n} entries",
        )
        return IntervalRow(lower, upper)
    raise SchemaViolation(f"row {label!r}: unknown row type {kind!r}")


def load_model(document) -> TransitionModel:
    """Build a validated :class:`TransitionModel` from a JSON document.

    ``document`` may be a JSON string or an already-parsed mapping of the form::

        {"states": ["a", "b"],
         "rows": {"a": {"type": "vertices", "pmfs": [[0, 1]]},
                  "b": {"type": "intervals", "lower": [1, 0], "upper": [1, 0]}}}
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"invalid JSON: {exc}") from exc
    _require(isinstance(document, dict), "model document must be a JSON object")
    _require(set(document) == {"states", "rows"}, "expected exactly the keys states, rows")
    raw_states = document["states"]
    _require(
        isinstance(raw_states, list) and all(isinstance(s, str) for s in raw_states),
        "states must be a list of strings",
    )
    states = StateSpace(raw_states)
    raw_rows = document["rows"]
    _require(isinstance(raw_rows, dict), "rows must be an object keyed by state label")
    _require(
        set(raw_rows) == set(states.labels),
        f"rows keys {sorted(raw_rows)} do not match states {list(states.labels)}",
    )
    rows = [_parse_row(lab, raw_rows[lab], len(states)) for lab in states.labels]
    return TransitionModel(states, rows)


def load_model_file(path) -> TransitionModel:
    with open(path, "r", encoding="utf-8") as fh:
        return load_model(fh.read())


def load_gamble(document, states: StateSpace) -> Gamble:
    """Parse a gamble document ``{"f": {...}}`` or positional ``{"f": [...]}``."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"invalid JSON: {exc}") from exc
    _require(isinstance(document, dict) and set(document) == {"f"}, "expected exactly the key f")
    body = document["f"]
    if isinstance(body, dict):
        return Gamble.from_dict(states, body)
    if isinstance(body, list):
        if len(body) != len(states):
            raise SchemaViolation(
                f"gamble has {len(body)} entries for {len(states)} states"
            )
        return Gamble(states, body)
    raise SchemaViolation("f must be an object keyed by state or a list of numbers")


def load_gamble_file(path, states: StateSpace) -> Gamble:
    with open(path, "r", encoding="utf-8") as fh:
        return load_gamble(fh.read(), states)
