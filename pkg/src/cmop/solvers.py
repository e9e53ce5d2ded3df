"""Fixed-step solvers for the unconstrained and row-power-constrained
least-squares problems.

Contains plain gradient descent, projected gradient descent on the row
ball, a mirror of the projected method that iterates on the stacked
real/imaginary representation (doubled real dimension), and an exhaustive
active-set oracle that solves the constrained problem to optimality by
enumerating which rows sit on the power boundary.

Flop accounting
---------------
Per-iteration work is reported as a deterministic estimate: the gradient
matmul contributes N^2 K complex multiply-adds and the iterate update N K,
each counted as 8 real flops (4 multiplies + 4 adds), i.e.
``8 N K (N + 1)`` per iteration. Projection comparisons, norms and stopping
bookkeeping are excluded as lower-order terms. Under the same convention
the real-stacked mirror performs 4 real multiply-adds (2 flops each) per
complex one, so its per-iteration count is identical.
"""

from __future__ import annotations

import dataclasses
import itertools
import time
import warnings

import numpy as np

from .cmat import ComplexMatrix, cmatrix, frob_norm, row_sq_norms
from .errors import (
    ConfigError,
    EnumerationGuardError,
    InputError,
    OracleError,
    SingularSystemError,
)
from .objective import (
    Precomputed,
    ProblemInstance,
    _check_w_shape,
    _residual_objective,
    closed_form_unconstrained,
    precompute,
    quad_objective_constant,
)
from .projection import RowBall, project_rows

STOP_DECREASE = "decrease-below-tau"
STOP_GRAD_MAP = "grad-map-below-tol"
STOP_MAX_ITER = "max-iter"
STOP_DIVERGED = "diverged"
STOP_KKT = "kkt-certified"

# Objective blow-up factor beyond which a run is declared divergent.
_DIVERGENCE_FACTOR = 1e6


@dataclasses.dataclass(frozen=True)
class SolverConfig:
    """Step-size policy, stopping rule, and trace options.

    ``alpha`` is either a positive float (fixed step) or a string ``f<frac>``
    with frac in (0, 1), resolved as that fraction of the mode's guaranteed
    step interval: (0, 2/L) for plain descent, (0, 1/L) for the projected
    method. ``tau`` is the primary stopping tolerance on the per-iteration
    objective decrease. ``grad_map_tol`` enables a secondary stop on
    ||W^t - W^{t+1}||_F / alpha when positive (0 disables it).
    ``time_iterations`` opts into wall-clock timing per iteration; it is off
    by default so traces are bit-reproducible.
    """

    alpha: float | str
    tau: float = 1e-12
    max_iter: int = 100_000
    record_trace: bool = True
    grad_map_tol: float = 0.0
    record_iterates: bool = False
    time_iterations: bool = False

    def __post_init__(self):
        if not (isinstance(self.tau, (int, float)) and self.tau > 0.0):
            raise ConfigError(f"tau must be positive, got {self.tau}")
        if self.max_iter < 1:
            raise ConfigError(f"max_iter must be >= 1, got {self.max_iter}")
        if self.grad_map_tol < 0.0:
            raise ConfigError(f"grad_map_tol must be >= 0, got {self.grad_map_tol}")


@dataclasses.dataclass(frozen=True)
class IterationRecord:
    """One solver step: objective is F(W^t) before the step, decrease is
    F(W^t) - F(W^{t+1}), grad_norm is ||grad F(W^t)||_F, step_norm is
    ||W^{t+1} - W^t||_F."""

    iter: int
    objective: float
    decrease: float
    grad_norm: float
    step_norm: float
    flops: int
    elapsed_ns: int


@dataclasses.dataclass
class SolveResult:
    """Solver output. ``trace`` is empty when recording was disabled;
    ``iterates`` holds W^0 .. W^T when iterate recording was requested."""

    w_final: ComplexMatrix
    objective: float
    iterations: int
    converged: bool
    stop_reason: str
    trace: list[IterationRecord]
    iterates: list[ComplexMatrix] | None = None


def per_iteration_flops(n: int, k: int) -> int:
    """Documented per-iteration arithmetic estimate: 8 N K (N + 1)."""
    return 8 * n * k * (n + 1)


def guaranteed_interval_sup(lipschitz: float, mode: str) -> float:
    """Upper end of the step interval with a convergence guarantee."""
    if mode == "gd":
        return 2.0 / lipschitz
    if mode == "pgd":
        return 1.0 / lipschitz
    raise ConfigError(f"unknown step-size mode {mode!r} (expected 'gd' or 'pgd')")


def resolve_alpha(config: SolverConfig, lipschitz: float, mode: str) -> float:
    """Turn the configured step policy into a concrete step size.

    Fixed values are returned verbatim; values at or beyond the mode's
    guaranteed interval trigger a warning but proceed. Fraction policies
    ``f<frac>`` return frac times the interval's upper end.
    """
    if not lipschitz > 0.0:
        raise ConfigError(f"lipschitz must be positive to resolve a step, got {lipschitz}")
    sup = guaranteed_interval_sup(lipschitz, mode)
    spec = config.alpha
    if isinstance(spec, str):
        if not spec.startswith("f"):
            raise ConfigError(f"step policy string must look like 'f0.9', got {spec!r}")
        try:
            frac = float(spec[1:])
        except ValueError as exc:
            raise ConfigError(f"bad fraction in step policy {spec!r}") from exc
        if not 0.0 < frac < 1.0:
            raise ConfigError(f"step fraction must lie in (0, 1), got {frac}")
        return frac * sup
    alpha = float(spec)
    if not alpha > 0.0:
        raise ConfigError(f"fixed step size must be positive, got {alpha}")
    if alpha >= sup:
        warnings.warn(
            f"fixed step {alpha:g} is outside the guaranteed interval "
            f"(0, {sup:g}) for mode {mode!r}; proceeding anyway",
            RuntimeWarning,
            stacklevel=2,
        )
    return alpha


def _quad_value(w, gw, b, const):
    """M-free objective via the cached quadratic form."""
    return 0.5 * float(np.vdot(w, gw).real) - float(np.vdot(w, b).real) + const


def _fixed_step_loop(pre, instance, w0, config, ball, mode):
    """Shared fixed-step iteration for the plain and projected methods."""
    n, k = pre.b.shape
    w = cmatrix(_check_w_shape(w0, n, k))
    alpha = resolve_alpha(config, pre.lipschitz, mode)
    if ball is not None:
        w = project_rows(w, ball)
    const = quad_objective_constant(instance)
    gw = pre.g @ w
    f = _quad_value(w, gw, pre.b, const)
    if not np.isfinite(f):
        raise InputError("objective is non-finite at the initial iterate")
    f_start = f
    flops = per_iteration_flops(n, k)
    trace: list[IterationRecord] = []
    iterates: list[ComplexMatrix] | None = None
    if config.record_iterates:
        iterates = [w.copy()]

    converged = False
    stop_reason = STOP_MAX_ITER
    iterations = 0
    for t in range(config.max_iter):
        t0 = time.perf_counter_ns() if config.time_iterations else 0
        grad = gw - pre.b
        grad_norm = frob_norm(grad)
        w_next = w - alpha * grad
        if ball is not None:
            w_next = project_rows(w_next, ball)
        delta = w_next - w
        gw_next = pre.g @ w_next
        # Exact per-step decrease of the quadratic: differencing two
        # near-equal objective values would bottom out at their ulp long
        # before the iterates stop improving.
        decrease = -float(np.vdot(grad, delta).real) - 0.5 * float(
            np.vdot(delta, gw_next - gw).real
        )
        gw = gw_next
        f_next = _quad_value(w_next, gw, pre.b, const)
        step_norm = frob_norm(delta)
        elapsed = time.perf_counter_ns() - t0 if config.time_iterations else 0
        if config.record_trace:
            trace.append(
                IterationRecord(
                    iter=t,
                    objective=f,
                    decrease=decrease,
                    grad_norm=grad_norm,
                    step_norm=step_norm,
                    flops=flops,
                    elapsed_ns=elapsed,
                )
            )
        if iterates is not None:
            iterates.append(w_next.copy())
        w, f = w_next, f_next
        iterations = t + 1
        if not np.isfinite(f) or f > _DIVERGENCE_FACTOR * f_start:
            stop_reason = STOP_DIVERGED
            break
        if decrease < config.tau:
            converged = True
            stop_reason = STOP_DECREASE
            break
        if config.grad_map_tol > 0.0 and step_norm / alpha < config.grad_map_tol:
            converged = True
            stop_reason = STOP_GRAD_MAP
            break

    return SolveResult(
        w_final=w,
        objective=f,
        iterations=iterations,
        converged=converged,
        stop_reason=stop_reason,
        trace=trace,
        iterates=iterates,
    )


def gd_solve(
    pre: Precomputed,
    instance: ProblemInstance,
    w0: ComplexMatrix,
    config: SolverConfig,
) -> SolveResult:
    """Fixed-step gradient descent W <- W - alpha (G W - B).

    Converges to the unconstrained optimum for alpha in (0, 2/L). Stops when
    the objective decrease falls below tau, on the optional gradient-map
    rule, at max_iter, or on divergence (objective above 1e6 times its
    initial value, or non-finite).
    """
    return _fixed_step_loop(pre, instance, w0, config, ball=None, mode="gd")


def pgd_solve(
    pre: Precomputed,
    instance: ProblemInstance,
    w0: ComplexMatrix,
    ball: RowBall,
    config: SolverConfig,
) -> SolveResult:
    """Projected gradient descent: gradient step, then per-row projection.

    w0 is projected on entry if infeasible, so every iterate is feasible.
    Convergence is guaranteed for alpha in (0, 1/L); the stopping rules
    match gd_solve, with the gradient-map rule reading
    ||W^t - W^{t+1}||_F / alpha.
    """
    return _fixed_step_loop(pre, instance, w0, config, ball=ball, mode="pgd")


def _stack_real(w):
    """[Re W ; Im W] as a contiguous float64 array (2N x K)."""
    return np.ascontiguousarray(np.vstack([np.asarray(w).real, np.asarray(w).imag]))


def _unstack_real(u, n):
    return np.ascontiguousarray(u[:n] + 1j * u[n:])


def _project_stacked(u, n, ball):
    """Row-ball projection in the stacked representation: original row i
    couples stacked rows i and n + i."""
    r = ball.radius
    rs = np.einsum("ij,ij->i", u[:n], u[:n]) + np.einsum("ij,ij->i", u[n:], u[n:])
    ell = np.sqrt(rs)
    mask = (ell - r) > 1e-15
    if not np.any(mask):
        return u.copy()
    out = u.copy()
    scale = (r / ell[mask])[:, None]
    out[:n][mask] = u[:n][mask] * scale
    out[n:][mask] = u[n:][mask] * scale
    return out


def real_augmented_pgd(
    instance: ProblemInstance,
    w0: ComplexMatrix,
    ball: RowBall,
    config: SolverConfig,
    pre: Precomputed | None = None,
) -> SolveResult:
    """Projected gradient descent on the stacked real representation.

    The variable is u = [Re W ; Im W] and the data are the real-stacked
    counterparts of H and A, so the whole iteration runs in a real space of
    doubled dimension. Mathematically this mirrors ``pgd_solve`` step for
    step; iterates map back to the complex ones up to floating-point
    reordering. ``pre`` is only used to resolve fraction step policies
    against the same spectral estimate as the complex route (it is computed
    from the instance when omitted).
    """
    n, k = instance.n, instance.k
    w0 = cmatrix(_check_w_shape(w0, n, k))
    if pre is None:
        pre = precompute(instance)
    alpha = resolve_alpha(config, pre.lipschitz, "pgd")

    h_re = np.ascontiguousarray(instance.h.real)
    h_im = np.ascontiguousarray(instance.h.imag)
    hr = np.block([[h_re, -h_im], [h_im, h_re]])
    ar = _stack_real(instance.a)
    gr = hr.T @ hr
    br = hr.T @ ar
    const = 0.5 * float(np.dot(ar.ravel(), ar.ravel()))

    u = _project_stacked(_stack_real(w0), n, ball)
    gu = gr @ u
    f = 0.5 * float(np.dot(u.ravel(), gu.ravel())) - float(
        np.dot(u.ravel(), br.ravel())
    ) + const
    if not np.isfinite(f):
        raise InputError("objective is non-finite at the initial iterate")
    f_start = f
    flops = per_iteration_flops(n, k)
    trace: list[IterationRecord] = []
    iterates: list[ComplexMatrix] | None = None
    if config.record_iterates:
        iterates = [_unstack_real(u, n)]

    converged = False
    stop_reason = STOP_MAX_ITER
    iterations = 0
    for t in range(config.max_iter):
        t0 = time.perf_counter_ns() if config.time_iterations else 0
        grad = gu - br
        grad_norm = float(np.linalg.norm(grad))
        u_next = u - alpha * grad
        u_next = _project_stacked(u_next, n, ball)
        delta = u_next - u
        gu_next = gr @ u_next
        # Exact per-step decrease, mirroring the complex route.
        decrease = -float(np.dot(grad.ravel(), delta.ravel())) - 0.5 * float(
            np.dot(delta.ravel(), (gu_next - gu).ravel())
        )
        gu = gu_next
        f_next = 0.5 * float(np.dot(u_next.ravel(), gu.ravel())) - float(
            np.dot(u_next.ravel(), br.ravel())
        ) + const
        step_norm = float(np.linalg.norm(delta))
        elapsed = time.perf_counter_ns() - t0 if config.time_iterations else 0
        if config.record_trace:
            trace.append(
                IterationRecord(
                    iter=t,
                    objective=f,
                    decrease=decrease,
                    grad_norm=grad_norm,
                    step_norm=step_norm,
                    flops=flops,
                    elapsed_ns=elapsed,
                )
            )
        if iterates is not None:
            iterates.append(_unstack_real(u_next, n))
        u, f = u_next, f_next
        iterations = t + 1
        if not np.isfinite(f) or f > _DIVERGENCE_FACTOR * f_start:
            stop_reason = STOP_DIVERGED
            break
        if decrease < config.tau:
            converged = True
            stop_reason = STOP_DECREASE
            break
        if config.grad_map_tol > 0.0 and step_norm / alpha < config.grad_map_tol:
            converged = True
            stop_reason = STOP_GRAD_MAP
            break

    return SolveResult(
        w_final=_unstack_real(u, n),
        objective=f,
        iterations=iterations,
        converged=converged,
        stop_reason=stop_reason,
        trace=trace,
        iterates=iterates,
    )


# --------------------------------------------------------------------------
# Exhaustive active-set oracle
# --------------------------------------------------------------------------

_ORACLE_N_CAP = 12


def _candidate_system(pre, lam):
    """Solve (G + Diag(lam)) W = B for the given multiplier vector."""
    try:
        return np.linalg.solve(pre.g + np.diag(lam), pre.b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "candidate system G + Diag(lambda) is singular"
        ) from exc


def _solve_active_candidate(pre, eta, active, inner_tol, inner_max_iter):
    """Find lambda >= 0 supported on ``active`` putting those rows exactly on
    the power boundary, or None when no such multiplier exists.

    Phase 1 is the multiplicative fixed point
    lambda_n <- lambda_n ||row_n(W(lambda))|| / sqrt(eta); phase 2 falls
    back to per-coordinate bisection sweeps. Returns (w, lam, inner_iters).
    Row norms shrink as lambda_n grows, which the bisection relies on.
    """
    n = pre.b.shape[0]
    lam = np.zeros(n)
    if not active:
        w = _candidate_system(pre, lam)
        return w, lam, 1
    idx = np.array(active)
    lam[idx] = 1.0
    inner_iters = 0

    mult_budget = max(inner_max_iter // 2, 8)
    for _ in range(mult_budget):
        w = _candidate_system(pre, lam)
        inner_iters += 1
        rs = row_sq_norms(w)[idx]
        if np.max(np.abs(rs - eta)) <= inner_tol * eta:
            return w, lam, inner_iters
        # A multiplier collapsing toward zero while its row sits inside the
        # budget means the boundary equality has no nonnegative solution.
        if np.any((lam[idx] < 1e-13) & (rs < eta)):
            return None
        lam[idx] *= np.sqrt(rs / eta)

    # Bisection fallback: cyclic per-coordinate root finding on the
    # monotone map lambda_n -> ||row_n(W(lambda))||^2. Each sweep fixes one
    # coordinate exactly given the others, so the residual contracts at the
    # coupling rate between rows; stalling sweeps abort the candidate.
    prev_resid = np.inf
    for _sweep in range(60):
        for coord in idx:
            def row_sq(val):
                nonlocal inner_iters
                lam[coord] = val
                w_loc = _candidate_system(pre, lam)
                inner_iters += 1
                return row_sq_norms(w_loc)[coord]

            if row_sq(0.0) <= eta:
                lam[coord] = 0.0
                continue  # boundary unreachable with positive multiplier
            hi = max(2.0 * lam[coord], 1.0)
            doublings = 0
            while row_sq(hi) > eta:
                hi *= 2.0
                doublings += 1
                if doublings > 200:
                    return None
            lo = 0.0
            for _ in range(80):
                mid = 0.5 * (lo + hi)
                if row_sq(mid) > eta:
                    lo = mid
                else:
                    hi = mid
            lam[coord] = hi
        w = _candidate_system(pre, lam)
        inner_iters += 1
        rs = row_sq_norms(w)[idx]
        resid = float(np.max(np.abs(rs - eta)))
        if resid <= inner_tol * eta and np.all(lam[idx] > 0.0):
            return w, lam, inner_iters
        if resid >= 0.95 * prev_resid:
            return None  # sweeps have stalled
        prev_resid = resid
    return None


def kkt_residuals_for(pre, instance, w, lam):
    """The four optimality residuals for an explicit multiplier vector.

    Returns a dict with keys stationarity (relative to ||B||_F), primal,
    dual, complementarity (the latter three relative to eta and the
    multiplier scale).
    """
    eta = instance.eta
    rs = row_sq_norms(w)
    stat = frob_norm((pre.g + np.diag(lam)) @ w - pre.b)
    b_norm = frob_norm(pre.b)
    lam_scale = max(1.0, float(np.max(lam, initial=0.0)))
    return {
        "stationarity": stat / max(b_norm, np.finfo(float).tiny),
        "primal": max(0.0, float(np.max(rs - eta))) / eta,
        "dual": max(0.0, -float(np.min(lam))),
        "complementarity": float(np.max(np.abs(lam * (rs - eta)))) / (eta * lam_scale),
    }


def active_set_oracle(
    pre: Precomputed,
    instance: ProblemInstance,
    inner_tol: float = 1e-10,
    inner_max_iter: int = 200,
) -> SolveResult:
    """Exact solver for the row-power-constrained problem by enumerating
    all 2^N subsets of boundary rows.

    For each candidate subset the multipliers are solved so the selected
    rows sit exactly on the power boundary; the first candidate passing all
    four optimality residuals within ``inner_tol`` wins. Subsets are tried
    in order of increasing cardinality (the empty set reduces to the
    unconstrained closed form), then lexicographically. Guarded to N <= 12.
    """
    n = pre.b.shape[0]
    if n > _ORACLE_N_CAP:
        raise EnumerationGuardError(
            f"active-set enumeration needs 2^N candidate systems; N={n} exceeds "
            f"the cap of {_ORACLE_N_CAP}"
        )
    if not inner_tol > 0.0:
        raise ConfigError(f"inner_tol must be positive, got {inner_tol}")
    eta = instance.eta
    total_inner = 0
    best = None  # (max residual, w, lam, residuals)

    for size in range(n + 1):
        for subset in itertools.combinations(range(n), size):
            if size == 0:
                w = closed_form_unconstrained(pre)
                lam = np.zeros(n)
                total_inner += 1
            else:
                found = _solve_active_candidate(
                    pre, eta, subset, inner_tol, inner_max_iter
                )
                if found is None:
                    continue
                w, lam, inner_iters = found
                total_inner += inner_iters
            res = kkt_residuals_for(pre, instance, w, lam)
            worst = max(res.values())
            if best is None or worst < best[0]:
                best = (worst, w, lam, res)
            if worst <= inner_tol:
                return SolveResult(
                    w_final=w,
                    objective=_residual_objective(instance, w),
                    iterations=total_inner,
                    converged=True,
                    stop_reason=STOP_KKT,
                    trace=[],
                )

    assert best is not None
    raise OracleError(
        f"no active set satisfied the optimality conditions within {inner_tol:g}; "
        f"best candidate residuals: {best[3]}",
        best_w=best[1],
        best_lambda=best[2],
        best_residuals=best[3],
    )
