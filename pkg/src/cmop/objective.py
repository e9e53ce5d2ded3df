"""The half-squared-residual objective F(W) = 1/2 ||H W - A||_F^2.

Provides the problem container, cached normal-equation data (G = H^H H,
B = H^H A) with a power-iteration estimate of the largest eigenvalue of G
(the smoothness constant L), the analytic gradient G W - B, a central
finite-difference gradient oracle built from the real and imaginary parts
separately, and the unconstrained closed-form solution.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .cmat import (
    ComplexMatrix,
    adjoint_product,
    cmatrix,
    frob_norm,
    re_frob_inner,
)
from .errors import (
    ConfigError,
    DimensionError,
    EstimationError,
    InputError,
    SingularSystemError,
)

# Fixed seed for the power-iteration start vectors: spectral estimation must
# be a deterministic function of the instance.
_POWER_SEED = 0x5EEDC0DE

# Relative residual above which the normal-equation solve is not trusted.
_SOLVE_RESIDUAL_TOL = 1e-9


@dataclasses.dataclass(frozen=True)
class ProblemInstance:
    """A least-squares instance: data matrices H (M x N), A (M x K), and the
    per-row power budget eta used only by the constrained solvers.

    ``n_within_m`` is an advisory flag: N <= M is the generic condition for
    H^H H to be invertible. Instances violating it are still usable, but the
    closed-form solve may fail.
    """

    h: ComplexMatrix
    a: ComplexMatrix
    eta: float

    def __post_init__(self):
        object.__setattr__(self, "h", cmatrix(self.h))
        object.__setattr__(self, "a", cmatrix(self.a))
        object.__setattr__(self, "eta", float(self.eta))
        if self.h.shape[0] != self.a.shape[0]:
            raise DimensionError(
                f"H and A must have the same row count: {self.h.shape} vs {self.a.shape}"
            )
        if not (self.eta > 0.0 and np.isfinite(self.eta)):
            raise InputError(f"eta must be a positive finite real, got {self.eta}")

    @property
    def m(self) -> int:
        return self.h.shape[0]

    @property
    def n(self) -> int:
        return self.h.shape[1]

    @property
    def k(self) -> int:
        return self.a.shape[1]

    @property
    def n_within_m(self) -> bool:
        """Advisory: True when N <= M (generic invertibility of H^H H)."""
        return self.n <= self.m


@dataclasses.dataclass(frozen=True)
class Precomputed:
    """Cached normal-equation data for an instance.

    g is H^H H (Hermitian PSD), b is H^H A, ``lipschitz`` the power-iteration
    estimate of the largest eigenvalue of g, and ``lipschitz_tol`` the last
    observed relative Rayleigh-quotient gap (the estimate's resolution).
    """

    g: ComplexMatrix
    b: ComplexMatrix
    lipschitz: float
    lipschitz_tol: float


def precompute(
    instance: ProblemInstance,
    power_tol: float = 1e-10,
    power_max_iter: int = 10000,
) -> Precomputed:
    """Form G = H^H H and B = H^H A and estimate L = lambda_max(G).

    The estimate runs power iteration on G from a seeded random start and
    stops once successive Rayleigh quotients agree to ``power_tol``
    relative, or after ``power_max_iter`` steps (the last observed gap is
    then reported in ``lipschitz_tol``). A start that lands in the null
    space of G is retried with a fresh seeded vector, up to 3 restarts.
    """
    if not power_tol > 0.0:
        raise ConfigError(f"power_tol must be positive, got {power_tol}")
    g = adjoint_product(instance.h, instance.h)
    b = adjoint_product(instance.h, instance.a)
    lipschitz, gap = _power_iteration_largest_eig(g, power_tol, power_max_iter)
    return Precomputed(g=g, b=b, lipschitz=lipschitz, lipschitz_tol=gap)


def _power_iteration_largest_eig(g, tol, max_iter):
    """Largest eigenvalue of a Hermitian PSD matrix by power iteration."""
    n = g.shape[0]
    scale = float(np.linalg.norm(g))
    null_thresh = 1e-14 * max(scale, np.finfo(float).tiny)
    rng = np.random.default_rng(_POWER_SEED)
    for _attempt in range(4):  # initial start plus up to 3 restarts
        v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        v = v / np.linalg.norm(v)
        gv = g @ v
        if np.linalg.norm(gv) <= null_thresh:
            continue
        rho = float(np.vdot(v, gv).real)
        gap = np.inf
        for _ in range(max_iter):
            norm_gv = np.linalg.norm(gv)
            if norm_gv <= null_thresh:
                break  # collapsed into the null space; restart
            v = gv / norm_gv
            gv = g @ v
            rho_new = float(np.vdot(v, gv).real)
            gap = abs(rho_new - rho) / max(abs(rho_new), np.finfo(float).tiny)
            rho = rho_new
            if gap < tol:
                return max(rho, 0.0), gap
        else:
            # Iteration budget exhausted: return the estimate, report the gap.
            return max(rho, 0.0), gap
    raise EstimationError(
        "power iteration could not leave the null space of H^H H after 3 restarts"
    )


def _check_w_shape(w, n, k):
    w = np.asarray(w)
    if w.shape != (n, k):
        raise DimensionError(f"W must be {n}x{k}, got {w.shape}")
    return w


def _residual_objective(instance: ProblemInstance, w: ComplexMatrix) -> float:
    """Direct form 1/2 ||H w - A||_F^2 from the raw data matrices."""
    r = instance.h @ w - instance.a
    return 0.5 * float(np.vdot(r, r).real)


def evaluate(pre: Precomputed, instance: ProblemInstance, w: ComplexMatrix) -> float:
    """Objective value 1/2 ||H w - A||_F^2 (direct residual form)."""
    w = _check_w_shape(w, instance.n, instance.k)
    return _residual_objective(instance, w)


def gradient(pre: Precomputed, w: ComplexMatrix) -> ComplexMatrix:
    """Complex gradient G w - B from the cached normal-equation data.

    Its real and imaginary parts are exactly the partial derivatives of the
    objective with respect to the real and imaginary parts of w, so the
    zero matrix certifies the normal equations. Cost is independent of M.
    """
    n, k = pre.b.shape
    w = _check_w_shape(w, n, k)
    return pre.g @ w - pre.b


def fd_gradient(
    instance: ProblemInstance, w: ComplexMatrix, step: float | None = None
) -> ComplexMatrix:
    """Central finite-difference gradient over the real/imaginary parts.

    Entry (n, k) is built from four objective evaluations: a symmetric
    difference along the real unit direction plus i times the symmetric
    difference along the imaginary unit direction. Acts as the independent
    check that the analytic gradient's components equal the real-space
    partial derivatives. Default step: 1e-5 * (1 + ||w||_F).
    """
    w = cmatrix(_check_w_shape(w, instance.n, instance.k))
    if step is None:
        step = 1e-5 * (1.0 + frob_norm(w))
    if not step > 0.0:
        raise ConfigError(f"finite-difference step must be positive, got {step}")
    out = np.empty_like(w)
    probe = w.copy()
    for i in range(w.shape[0]):
        for j in range(w.shape[1]):
            orig = w[i, j]
            probe[i, j] = orig + step
            f_plus = _residual_objective(instance, probe)
            probe[i, j] = orig - step
            f_minus = _residual_objective(instance, probe)
            d_re = (f_plus - f_minus) / (2.0 * step)
            probe[i, j] = orig + 1j * step
            f_plus = _residual_objective(instance, probe)
            probe[i, j] = orig - 1j * step
            f_minus = _residual_objective(instance, probe)
            d_im = (f_plus - f_minus) / (2.0 * step)
            probe[i, j] = orig
            out[i, j] = d_re + 1j * d_im
    return out


def closed_form_unconstrained(pre: Precomputed) -> ComplexMatrix:
    """Solve the normal equations G W = B by a dense linear solve.

    The unique unconstrained minimizer when G is invertible. The solve is
    trusted only if ||G W - B||_F <= 1e-9 ||B||_F; otherwise G is treated
    as numerically singular.
    """
    try:
        w = np.linalg.solve(pre.g, pre.b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(
            "H^H H is singular; check the instance's n_within_m advisory flag "
            "(N <= M is required for generic invertibility)"
        ) from exc
    residual = frob_norm(pre.g @ w - pre.b)
    b_norm = frob_norm(pre.b)
    if residual > _SOLVE_RESIDUAL_TOL * b_norm:
        raise SingularSystemError(
            f"normal-equation solve residual {residual:.3e} exceeds "
            f"{_SOLVE_RESIDUAL_TOL:g} * ||B||_F = {_SOLVE_RESIDUAL_TOL * b_norm:.3e}; "
            "H^H H is numerically singular - check the instance's n_within_m "
            "advisory flag (N <= M)"
        )
    return w


def quad_objective_constant(instance: ProblemInstance) -> float:
    """The constant 1/2 ||A||_F^2 completing the cached quadratic form.

    With it, F(w) = 1/2 Re<w, G w> - Re<w, B> + const can be evaluated at a
    cost independent of M; the fixed-step solvers use this form in-loop.
    """
    return 0.5 * re_frob_inner(instance.a, instance.a)
