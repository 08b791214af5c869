"""Backend selection and the packed model layout shared by both backends.

The compiled extension (:mod:`imcergo._speedups`) is used when it importable;
otherwise the pure numpy implementation is used.  ``IMCERGO_PURE=1`` forces
the fallback, which is handy for benchmarking and parity testing.
"""

import os

import numpy as np

from .model import IntervalRow, TransitionModel, VertexRow

if os.environ.get("IMCERGO_PURE", "") in ("", "0"):
    try:
        from . import _speedups as _impl
    except ImportError:
        from . import _kernels_py as _impl
else:
    from . import _kernels_py as _impl

BACKEND = _impl.BACKEND


class CompiledModel:
    """Row data packed into flat arrays for the iteration kernels.

    Vertex rows are stacked into one matrix ``verts`` with per-row offsets
    ``vstarts``; interval rows are stacked into ``low``/``upp``.
    """

    __slots__ = ("n", "vrows", "vstarts", "verts", "irows", "low", "upp")

    def __init__(self, model: TransitionModel):
        n = model.n
        vrows, irows = [], []
        blocks = []
        lows, upps = [], []
        for x, row in enumerate(model.rows):
            if isinstance(row, VertexRow):
                vrows.append(x)
                blocks.append(np.array(row.matrix, dtype=float))
            elif isinstance(row, IntervalRow):
                irows.append(x)
                lows.append(np.array(row.lower, dtype=float))
                upps.append(np.array(row.upper, dtype=float))
            else:
                raise TypeError(f"unsupported row type {type(row).__name__}")
        self.n = n
        self.vrows = np.array(vrows, dtype=np.int64)
        self.irows = np.array(irows, dtype=np.int64)
        if blocks:
            counts = np.array([b.shape[0] for b in blocks], dtype=np.int64)
            self.vstarts = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
            self.verts = np.ascontiguousarray(np.vstack(blocks))
        else:
            self.vstarts = np.zeros(1, dtype=np.int64)
            self.verts = np.zeros((0, n))
        if lows:
            self.low = np.ascontiguousarray(np.vstack(lows))
            self.upp = np.ascontiguousarray(np.vstack(upps))
        else:
            self.low = np.zeros((0, n))
            self.upp = np.zeros((0, n))


def compile_model(model: TransitionModel) -> CompiledModel:
    return CompiledModel(model)


def apply_upper(cm: CompiledModel, h: np.ndarray) -> np.ndarray:
    return _impl.apply_upper(cm, np.ascontiguousarray(h, dtype=float))


def run_iterate(cm: CompiledModel, f: np.ndarray, k: int) -> np.ndarray:
    return _impl.run_iterate(cm, np.ascontiguousarray(f, dtype=float), int(k))


def run_average(cm: CompiledModel, f: np.ndarray, k: int, trace=None) -> np.ndarray:
    return _impl.run_average(cm, np.ascontiguousarray(f, dtype=float), int(k), trace)


def run_power(cm: CompiledModel, f: np.ndarray, tol: float, cap: int):
    return _impl.run_power(cm, np.ascontiguousarray(f, dtype=float), float(tol), int(cap))


def run_eigen(cm: CompiledModel, f: np.ndarray, h0: np.ndarray, tol: float, cap: int):
    return _impl.run_eigen(
        cm,
        np.ascontiguousarray(f, dtype=float),
        np.ascontiguousarray(h0, dtype=float),
        float(tol),
        int(cap),
    )
