"""Limit inferences: eigenvalue engine, per-class limits, and the full report.

Two limit quantities are computed for a gamble f:

* the limit upper expectation: the common limit of the operator iterates,
  which exists exactly when the model is ergodic (TCR and TCA);
* the limit upper expected time average: the common limit of the normalized
  average recursion, which exists exactly when the model is weakly ergodic
  (TCA alone) and equals the unique additive eigenvalue of the topical map
  ``h -> f + (upper operator)(h)`` restricted to the top class.

Eigenvalues are estimated by a damped normalized fixed-point iteration.  The
topical map is averaged with the identity each step, which leaves the
eigenpair unchanged up to a factor two on the eigenvalue but makes the
induced accessibility graph aperiodic, so the iteration converges even when
the class itself is periodic.  Residuals are always reported against the
undamped eigen equation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import ClassNotClosed, ClassNotCommunicating, NoConvergence, NotStronglyConnected
from .graph import AccessibilityReport, classify
from .model import Gamble, _as_values
from .operator import UpperTransitionOperator

#: Default iteration cap for eigenvalue estimation and power convergence.
ITER_CAP = 100_000


def _tol_for(f: np.ndarray, tol: float | None) -> float:
    base = 1e-9 if tol is None else float(tol)
    return base * max(1.0, float(np.max(np.abs(f))))


@dataclass(frozen=True)
class EigenEstimate:
    """An additive eigenpair estimate: ``T_f eigvec = eigvec + mu`` within residual."""

    mu: float
    eigvec: Gamble
    residual: float
    iterations: int


@dataclass
class ErgodicityReport:
    accessibility: AccessibilityReport
    ergodic: bool
    weakly_ergodic: bool
    limit_upper: float | None
    limit_lower: float | None
    limit_avg_upper: float | None
    limit_avg_lower: float | None
    per_class_limits: dict[tuple[str, ...], float]
    diagnostics: dict = field(default_factory=dict)


def _strongly_connected(op: UpperTransitionOperator) -> bool:
    from .graph import build_graph, decompose

    return len(decompose(build_graph(op.model)).classes) == 1


def estimate_eigenvalue(
    op: UpperTransitionOperator,
    f,
    class_restriction=None,
    *,
    tol: float | None = None,
    iter_cap: int = ITER_CAP,
    h0=None,
) -> EigenEstimate:
    """Estimate the unique additive eigenvalue of ``h -> f + (upper op)(h)``.

    When ``class_restriction`` is given, the model is first restricted to
    that (closed) subset of states and the eigenpair is computed there; the
    subset must induce a strongly connected accessibility subgraph.
    """
    fv = _as_values(f, op.n)
    if class_restriction is not None:
        idx = op.model.states.indices(class_restriction)
        sub = UpperTransitionOperator(op.model.restrict(idx))
        sub_f = fv[list(idx)]
        if not _strongly_connected(sub):
            raise NotStronglyConnected(
                f"restriction {list(class_restriction)!r} is not strongly connected"
            )
        target = sub
        target_f = sub_f
    else:
        if not _strongly_connected(op):
            raise NotStronglyConnected("accessibility graph is not strongly connected")
        target = op
        target_f = fv
    tol_eig = _tol_for(target_f, tol)
    start = np.zeros(target.n) if h0 is None else _as_values(h0, target.n)
    h, mu, res, iters, converged = kernels.run_eigen(
        target._cm, target_f, start, tol_eig, iter_cap
    )
    if not converged:
        raise NoConvergence(
            f"eigen iteration did not reach tolerance {tol_eig} in {iter_cap} steps",
            iterations=iters,
            residual=res,
        )
    return EigenEstimate(
        mu=float(mu),
        eigvec=Gamble(target.model.states, h),
        residual=float(res),
        iterations=iters,
    )


def per_class_limit(
    op: UpperTransitionOperator,
    f,
    class_states,
    *,
    tol: float | None = None,
    iter_cap: int = ITER_CAP,
) -> float:
    """Common limit of the upper expected time average inside a closed class.

    ``class_states`` must be exactly one closed communication class; the
    limit equals the additive eigenvalue of the class-restricted topical map
    and is the same for every starting state in the class.
    """
    idx = set(op.model.states.indices(class_states))
    report = classify(op.model)
    dec = report.decomposition
    matches = [ci for ci, comp in enumerate(dec.classes) if set(comp) == idx]
    if not matches:
        raise ClassNotCommunicating(
            f"{sorted(class_states)!r} is not a communication class"
        )
    if not dec.closed[matches[0]]:
        raise ClassNotClosed(f"{sorted(class_states)!r} is not closed")
    est = estimate_eigenvalue(
        op, f, class_restriction=sorted(idx), tol=tol, iter_cap=iter_cap
    )
    return est.mu


def limit_upper_expectation(
    op: UpperTransitionOperator,
    f,
    *,
    tol: float | None = None,
    iter_cap: int = ITER_CAP,
    report: AccessibilityReport | None = None,
) -> float | None:
    """The limit of the operator iterates of ``f``, or ``None`` if not ergodic.

    The iterates are run until their spread and their last step are both
    within tolerance; the common limit value is returned.
    """
    fv = _as_values(f, op.n)
    if report is None:
        report = classify(op.model)
    if not (report.tcr and report.tca):
        return None
    tol_eig = _tol_for(fv, tol)
    v, iters, converged = kernels.run_power(op._cm, fv, tol_eig, iter_cap)
    if not converged:
        raise NoConvergence(
            f"operator iterates did not flatten within {iter_cap} steps",
            iterations=iters,
            residual=float(np.max(v) - np.min(v)),
        )
    return float(np.mean(v))


def weak_ergodic_limit(
    op: UpperTransitionOperator,
    f,
    *,
    tol: float | None = None,
    iter_cap: int = ITER_CAP,
    report: AccessibilityReport | None = None,
) -> float | None:
    """The limit of upper expected time averages, or ``None`` when not TCA."""
    if report is None:
        report = classify(op.model)
    if not report.tca:
        return None
    dec = report.decomposition
    top = dec.classes[dec.top_class]
    return per_class_limit(op, f, top, tol=tol, iter_cap=iter_cap)


def full_report(
    op: UpperTransitionOperator,
    f,
    *,
    tol: float | None = None,
    iter_cap: int = ITER_CAP,
) -> ErgodicityReport:
    """Classification plus every limit value that is defined for ``f``.

    Upper and lower limits are both reported (lower values via conjugacy),
    together with the per-closed-class limits of the time average, which
    exist regardless of absorption.
    """
    fv = _as_values(f, op.n)
    acc = classify(op.model)
    dec = acc.decomposition
    ergodic = acc.tcr and acc.tca
    weakly = acc.tca
    diagnostics: dict = {"eigen": {}}

    labels = op.model.states.labels
    per_class: dict[tuple[str, ...], float] = {}
    top_mu = None
    for ci, comp in enumerate(dec.classes):
        if not dec.closed[ci]:
            continue
        key = tuple(labels[i] for i in comp)
        est = estimate_eigenvalue(op, fv, class_restriction=comp, tol=tol, iter_cap=iter_cap)
        per_class[key] = est.mu
        diagnostics["eigen"][",".join(key)] = {
            "iterations": est.iterations,
            "residual": est.residual,
        }
        if dec.top_class == ci:
            top_mu = est.mu

    limit_avg_upper = top_mu if weakly else None
    limit_avg_lower = None
    if weakly:
        top = dec.classes[dec.top_class]
        limit_avg_lower = -per_class_limit(op, -fv, top, tol=tol, iter_cap=iter_cap) + 0.0

    limit_upper = None
    limit_lower = None
    if ergodic:
        limit_upper = limit_upper_expectation(op, fv, tol=tol, iter_cap=iter_cap, report=acc)
        limit_lower = -limit_upper_expectation(op, -fv, tol=tol, iter_cap=iter_cap, report=acc) + 0.0

    return ErgodicityReport(
        accessibility=acc,
        ergodic=ergodic,
        weakly_ergodic=weakly,
        limit_upper=limit_upper,
        limit_lower=limit_lower,
        limit_avg_upper=limit_avg_upper,
        limit_avg_lower=limit_avg_lower,
        per_class_limits=per_class,
        diagnostics=diagnostics,
    )
