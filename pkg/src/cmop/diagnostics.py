"""Standalone certifiers: optimality (KKT) report for the constrained
problem and per-iteration monitors for the solver guarantees.

Every monitor evaluates a literal inequality with an explicit additive
slack scaled to the magnitude of the quantities involved; slack constants
live in the function signatures, not hidden inside. Each returns a
:class:`MonitorReport` whose ``violations`` list one failing check per
line-item (iteration or sample index, lhs, rhs, slack).
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .cmat import (
    ComplexMatrix,
    RealVector,
    frob_norm,
    re_frob_inner,
    row_sq_norms,
    rvector,
)
from .errors import DegenerateRowError, DimensionError, InputError
from .objective import Precomputed, ProblemInstance, evaluate, gradient
from .projection import RowBall, project_rows, vi_residual
from .solvers import IterationRecord

MONITOR_THM2 = "thm2-descent"
MONITOR_THM3_DECREASE = "thm3-decrease"
MONITOR_THM3_FEJER = "thm3-fejer"
MONITOR_LEMMA2 = "lemma2-convexity"
MONITOR_LEMMA4 = "lemma4-vi"
MONITOR_LIPSCHITZ = "lemma3-lipschitz"


@dataclasses.dataclass(frozen=True)
class KktReport:
    """Residuals of the four optimality conditions with recovered
    multipliers.

    stationarity_residual is ||(G + Diag(lambda)) W - B||_F relative to
    ||B||_F; primal_violation, dual_violation and complementarity are the
    raw quantities max(0, max_n(||row_n||^2 - eta)), max(0, -min_n lambda_n)
    and max_n |lambda_n (||row_n||^2 - eta)|.
    """

    stationarity_residual: float
    primal_violation: float
    dual_violation: float
    complementarity: float
    lambda_hat: RealVector
    passed: bool


@dataclasses.dataclass(frozen=True)
class MonitorReport:
    """Outcome of one inequality monitor.

    ``violations`` holds (index, lhs, rhs, slack) for every failed check;
    ``worst_slack`` is the smallest margin lhs - rhs seen across all checks
    (negative margins within the slack still pass).
    """

    name: str
    violations: list[tuple[int, float, float, float]]
    worst_slack: float
    passed: bool


def _build_report(name, margins_and_checks):
    """Assemble a MonitorReport from (index, lhs, rhs, slack) tuples."""
    violations = []
    worst = math.inf
    for idx, lhs, rhs, slack in margins_and_checks:
        margin = lhs - rhs
        worst = min(worst, margin)
        if margin < -slack:
            violations.append((idx, lhs, rhs, slack))
    return MonitorReport(
        name=name,
        violations=violations,
        worst_slack=worst,
        passed=not violations,
    )


def kkt_check(
    pre: Precomputed,
    instance: ProblemInstance,
    w: ComplexMatrix,
    active_tol: float | None = None,
    pass_tol: float = 1e-6,
) -> KktReport:
    """Recover multipliers from an iterate and score all four optimality
    conditions.

    A row is treated as active when its squared norm is within
    ``active_tol`` (default 1e-6 eta) of the budget. For active rows the
    multiplier is the real projection coefficient of the negative-gradient
    row onto the iterate row; whatever part of that row is not parallel to
    the iterate lands in the stationarity residual rather than being
    dropped. ``passed`` requires stationarity <= pass_tol,
    primal <= pass_tol * eta, and dual/complementarity <= pass_tol scaled
    by max(1, max lambda) (times eta for complementarity).
    """
    w = np.asarray(w)
    n, k = pre.b.shape
    if w.shape != (n, k):
        raise DimensionError(f"W must be {n}x{k}, got {w.shape}")
    eta = instance.eta
    if active_tol is None:
        active_tol = 1e-6 * eta
    rs = row_sq_norms(w)
    resid = pre.b - pre.g @ w
    lam = np.zeros(n)
    for i in range(n):
        if rs[i] >= eta - active_tol:
            if rs[i] <= np.finfo(float).tiny:
                raise DegenerateRowError(
                    f"row {i} is active but has zero norm; multiplier unrecoverable"
                )
            lam[i] = re_frob_inner(resid[i : i + 1], w[i : i + 1]) / rs[i]

    stat_abs = frob_norm((pre.g + np.diag(lam)) @ w - pre.b)
    b_norm = frob_norm(pre.b)
    stationarity = stat_abs / b_norm if b_norm > 0.0 else stat_abs
    primal = max(0.0, float(np.max(rs - eta)))
    dual = max(0.0, -float(np.min(lam)))
    comp = float(np.max(np.abs(lam * (rs - eta))))
    lam_scale = max(1.0, float(np.max(lam, initial=0.0)))
    passed = (
        stationarity <= pass_tol
        and primal <= pass_tol * eta
        and dual <= pass_tol * lam_scale
        and comp <= pass_tol * eta * lam_scale
    )
    return KktReport(
        stationarity_residual=stationarity,
        primal_violation=primal,
        dual_violation=dual,
        complementarity=comp,
        lambda_hat=rvector(lam),
        passed=passed,
    )


def monitor_thm2(
    trace: list[IterationRecord], alpha: float, lipschitz: float
) -> MonitorReport:
    """Check the per-iteration descent bound of fixed-step gradient descent:
    decrease >= alpha (1 - alpha L / 2) ||grad||_F^2, with additive slack
    1e-9 (1 + |F(W^t)|)."""
    if not trace:
        raise InputError("cannot monitor an empty trace")
    coeff = alpha * (1.0 - alpha * lipschitz / 2.0)
    checks = (
        (
            rec.iter,
            rec.decrease,
            coeff * rec.grad_norm**2,
            1e-9 * (1.0 + abs(rec.objective)),
        )
        for rec in trace
    )
    return _build_report(MONITOR_THM2, checks)


def monitor_thm3(
    trace: list[IterationRecord],
    iterates: list[ComplexMatrix],
    w_opt: ComplexMatrix,
    alpha: float,
    lipschitz: float,
) -> tuple[MonitorReport, MonitorReport]:
    """Check both projected-descent guarantees along a trace.

    First report: sufficient decrease,
    decrease >= (1/alpha - L) ||W^t - W^{t+1}||_F^2.
    Second report: distance to the constrained optimum is non-increasing,
    ||W^t - W*||^2 >= ||W^{t+1} - W*||^2 + (1 - alpha L) ||W^t - W^{t+1}||^2.
    ``iterates`` must hold W^0 .. W^T aligned with the trace.
    """
    if not trace:
        raise InputError("cannot monitor an empty trace")
    if len(iterates) != len(trace) + 1:
        raise InputError(
            f"iterates must hold one more entry than the trace: "
            f"{len(iterates)} vs {len(trace)}"
        )
    coeff = 1.0 / alpha - lipschitz
    decrease_checks = (
        (
            rec.iter,
            rec.decrease,
            coeff * rec.step_norm**2,
            1e-9 * (1.0 + abs(rec.objective)),
        )
        for rec in trace
    )
    decrease_report = _build_report(MONITOR_THM3_DECREASE, decrease_checks)

    w_opt = np.asarray(w_opt)
    dists = [frob_norm(it - w_opt) ** 2 for it in iterates]
    fejer_coeff = 1.0 - alpha * lipschitz
    slack = 1e-9 * (1.0 + dists[0])
    fejer_checks = (
        (
            rec.iter,
            dists[t],
            dists[t + 1] + fejer_coeff * frob_norm(iterates[t] - iterates[t + 1]) ** 2,
            slack,
        )
        for t, rec in enumerate(trace)
    )
    fejer_report = _build_report(MONITOR_THM3_FEJER, fejer_checks)
    return decrease_report, fejer_report


def monitor_lemma2(
    pre: Precomputed,
    instance: ProblemInstance,
    pairs: list[tuple[ComplexMatrix, ComplexMatrix]],
) -> MonitorReport:
    """Check first-order convexity on the given pairs:
    F(W) >= F(W') + Re<W - W', grad F(W')>, slack 1e-9 (1 + |F(W)|)."""
    checks = []
    for idx, (w, wt) in enumerate(pairs):
        f_w = evaluate(pre, instance, w)
        f_wt = evaluate(pre, instance, wt)
        lin = re_frob_inner(np.asarray(w) - np.asarray(wt), gradient(pre, wt))
        checks.append((idx, f_w, f_wt + lin, 1e-9 * (1.0 + abs(f_w))))
    return _build_report(MONITOR_LEMMA2, checks)


def monitor_lipschitz(
    h: ComplexMatrix,
    lipschitz: float,
    samples: int,
    seed: int,
    cols: int = 1,
) -> MonitorReport:
    """Probe ||H D||_F^2 <= L ||D||_F^2 with seeded random directions D.

    Each check compares the bound L (1 + 1e-8) against the observed
    Rayleigh ratio, so the report's worst_slack recovers the tightest ratio
    seen: tightest = L (1 + 1e-8) - worst_slack.
    """
    if samples < 1:
        raise InputError(f"need at least one sample, got {samples}")
    h = np.asarray(h)
    n = h.shape[1]
    rng = np.random.default_rng(seed)
    bound = lipschitz * (1.0 + 1e-8)
    checks = []
    for i in range(samples):
        d = rng.standard_normal((n, cols)) + 1j * rng.standard_normal((n, cols))
        num = float(np.vdot(h @ d, h @ d).real)
        den = float(np.vdot(d, d).real)
        checks.append((i, bound, num / den, 0.0))
    return _build_report(MONITOR_LIPSCHITZ, checks)


def monitor_lemma4(
    ball: RowBall,
    n: int,
    k: int,
    samples: int,
    seed: int,
    v_scale: float | None = None,
) -> MonitorReport:
    """Monte-Carlo check of the projection's variational inequality.

    Draws ``samples`` pre-projection points V and feasible probes W, and
    requires Re<P(V) - W, V - P(V)> >= -1e-10 on every triple.
    """
    if samples < 1:
        raise InputError(f"need at least one sample, got {samples}")
    if v_scale is None:
        v_scale = 4.0 * ball.radius
    rng = np.random.default_rng(seed)
    checks = []
    for i in range(samples):
        v = rng.uniform(-v_scale, v_scale, (n, k)) + 1j * rng.uniform(
            -v_scale, v_scale, (n, k)
        )
        probe = rng.uniform(-v_scale, v_scale, (n, k)) + 1j * rng.uniform(
            -v_scale, v_scale, (n, k)
        )
        w_test = project_rows(probe, ball)
        w_plus = project_rows(v, ball)
        checks.append((i, vi_residual(w_plus, v, w_test), 0.0, 1e-10))
    return _build_report(MONITOR_LEMMA4, checks)


# --------------------------------------------------------------------------
# Plain-text serialization consumed by the command-line harness
# --------------------------------------------------------------------------


def monitor_report_lines(report: MonitorReport) -> list[str]:
    """Render a monitor report: a summary line, then one violation per line
    as 'violation <name> <index> <lhs> <rhs> <slack>'."""
    status = "passed" if report.passed else "FAILED"
    lines = [
        f"monitor {report.name} {status} "
        f"violations={len(report.violations)} worst_slack={report.worst_slack!r}"
    ]
    for idx, lhs, rhs, slack in report.violations:
        lines.append(f"violation {report.name} {idx} {lhs!r} {rhs!r} {slack!r}")
    return lines


def kkt_report_lines(report: KktReport) -> list[str]:
    """Render a KKT report as one line per residual plus the multipliers."""
    status = "passed" if report.passed else "FAILED"
    return [
        f"kkt {status} stationarity={report.stationarity_residual!r} "
        f"primal={report.primal_violation!r} dual={report.dual_violation!r} "
        f"complementarity={report.complementarity!r}",
        "kkt lambda_hat " + " ".join(repr(float(x)) for x in report.lambda_hat),
    ]
