"""Generic variable-metric Bregman majorization-minimization machinery.

The objective is ``F = f + g`` with ``f`` convex and differentiable on an open
domain and ``g`` convex, possibly nonsmooth. At every anchor ``y`` a separable
Bregman function

    h_y(x) = sum_i a_i(y) nu(x_i) + sum_i b_i(y) x_i^2 / 2

defines the tangent majorant ``q_y(x) = f(y) + <grad f(y), x - y> + D_{h_y}(x, y)``,
and the next iterate minimizes ``g + q_y``.
"""

import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional

import numpy as np

__all__ = [
    "Kernel",
    "NEG_LOG",
    "ZERO",
    "SeparableBregman",
    "ObjectiveSpec",
    "SolverConfig",
    "Status",
    "ConvergenceTrace",
    "bregman_divergence",
    "majorant_value",
    "three_points_residual",
    "quadratic_family",
    "golden_section",
    "separable_prox_golden",
    "vbmm_run",
]


@dataclass(frozen=True)
class Kernel:
    """Scalar convex kernel ``nu`` applied coordinatewise.

    ``divergence`` may be supplied when ``nu(x) - nu(y) - nu'(y)(x - y)`` has a
    better conditioned closed form than the generic difference.
    """

    name: str
    value: Callable[[np.ndarray], np.ndarray]
    derivative: Callable[[np.ndarray], np.ndarray]
    in_domain: Callable[[np.ndarray], np.ndarray]
    divergence: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    def scalar_divergence(self, x, y):
        if self.divergence is not None:
            return self.divergence(x, y)
        return self.value(x) - self.value(y) - self.derivative(y) * (x - y)


def _neglog_divergence(x, y):
    # (r - 1) - log r, written to keep precision when r is close to 1
    u = (x - y) / y
    return u - np.log1p(u)


NEG_LOG = Kernel(
    name="neg_log",
    value=lambda x: -np.log(x),
    derivative=lambda x: -1.0 / x,
    in_domain=lambda x: x > 0.0,
    divergence=_neglog_divergence,
)

ZERO = Kernel(
    name="zero",
    value=lambda x: np.zeros_like(x),
    derivative=lambda x: np.zeros_like(x),
    in_domain=lambda x: np.isfinite(x),
    divergence=lambda x, y: np.zeros_like(x),
)


@dataclass(frozen=True)
class SeparableBregman:
    """Separable Bregman function frozen at one anchor point.

    Attributes
    ----------
    a, b : ndarray
        Nonnegative coefficients ``a_i(y)`` and ``b_i(y)``.
    kernel : Kernel
        The scalar kernel ``nu``.
    anchor : ndarray
        The point ``y`` the coefficients were evaluated at.
    """

    a: np.ndarray
    b: np.ndarray
    kernel: Kernel
    anchor: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=float)
        b = np.asarray(self.b, dtype=float)
        if np.any(a < 0.0) or np.any(b < 0.0):
            raise ValueError("Bregman coefficients must be nonnegative")
        if self.kernel is not ZERO and np.any(a + b <= 0.0):
            raise ValueError("a_i + b_i must be positive for strict convexity")
        if self.kernel is ZERO and np.any(b <= 0.0):
            raise ValueError("quadratic Bregman function needs b_i > 0")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "anchor", np.asarray(self.anchor, dtype=float))

    @property
    def dim(self):
        return self.b.size

    def check_domain(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != self.b.shape:
            raise ValueError(f"expected shape {self.b.shape}, got {x.shape}")
        ok = np.isfinite(x)
        ok &= np.where(self.a > 0.0, self.kernel.in_domain(x), True)
        if not np.all(ok):
            raise ValueError("point outside the domain of the Bregman function")
        return x

    def value(self, x):
        x = self.check_domain(x)
        nu = np.where(self.a > 0.0, self.kernel.value(x), 0.0)
        return float(np.sum(self.a * nu) + 0.5 * np.sum(self.b * x * x))

    def gradient(self, x):
        x = self.check_domain(x)
        dnu = np.where(self.a > 0.0, self.kernel.derivative(x), 0.0)
        return self.a * dnu + self.b * x


def bregman_divergence(h, x, y):
    """``D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>`` for a separable ``h``.

    Evaluated coordinatewise so the result stays accurate, and nonnegative,
    when ``x`` and ``y`` are close.
    """
    x = h.check_domain(x)
    y = h.check_domain(y)
    diff = x - y
    kern = np.where(h.a > 0.0, h.kernel.scalar_divergence(x, y), 0.0)
    return float(np.sum(h.a * kern) + 0.5 * np.sum(h.b * diff * diff))


def three_points_residual(h, x, y, z):
    """LHS minus RHS of the three points identity

    ``D(z, x) - D(z, y) - D(y, x) = <grad h(x) - grad h(y), y - z>``.
    """
    lhs = bregman_divergence(h, z, x) - bregman_divergence(h, z, y) \
        - bregman_divergence(h, y, x)
    rhs = float(np.dot(h.gradient(x) - h.gradient(y), np.asarray(y) - np.asarray(z)))
    return lhs - rhs


@dataclass
class ObjectiveSpec:
    """Composite objective ``F = f + g``.

    Attributes
    ----------
    f, grad_f : callable
        Smooth part and its gradient, defined on the open set ``in_domain``.
    prox : callable
        ``prox(h, y, grad)`` returns the exact minimizer over ``x`` of
        ``g(x) + <grad, x> + D_h(x, y)``.
    g : callable
        Nonsmooth part, ``+inf`` outside its domain. Defaults to zero.
    in_domain : callable
        Membership predicate for the open domain of ``f``.
    """

    f: Callable[[np.ndarray], float]
    grad_f: Callable[[np.ndarray], np.ndarray]
    prox: Callable[[SeparableBregman, np.ndarray, np.ndarray], np.ndarray]
    g: Callable[[np.ndarray], float] = lambda x: 0.0
    in_domain: Callable[[np.ndarray], bool] = lambda x: bool(np.all(np.isfinite(x)))

    def value(self, x):
        return self.f(x) + self.g(x)


def majorant_value(obj, h, y, x):
    """Tangent majorant ``q_y(x) = f(y) + <grad f(y), x - y> + D_h(x, y)``."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    if not obj.in_domain(y):
        raise ValueError("anchor outside the domain of f")
    return obj.f(y) + float(np.dot(obj.grad_f(y), x - y)) + bregman_divergence(h, x, y)


def quadratic_family(b):
    """Anchor-independent family ``h(x) = sum_i b_i x_i^2 / 2``."""
    b = np.asarray(b, dtype=float)

    def family(y):
        y = np.asarray(y, dtype=float)
        return SeparableBregman(np.zeros_like(y), np.broadcast_to(b, y.shape).copy(),
                                ZERO, y)
    return family


_INV_PHI = (np.sqrt(5.0) - 1.0) / 2.0


def golden_section(fun, lower, upper, xtol=1e-12, max_iter=500, dtype=float):
    """Vectorized golden-section search for unimodal ``fun`` on ``[lower, upper]``.

    ``fun`` maps an array of candidate points to an array of values, one per
    coordinate, so independent scalar problems are solved in lockstep.
    Comparing function values limits the located argument to roughly
    ``sqrt(eps)`` relative precision; pass ``dtype=np.longdouble`` to push that
    floor down when ``fun`` is written dtype-generically.
    """
    lower = np.array(lower, dtype=dtype)
    upper = np.array(upper, dtype=dtype)
    a, b = lower.copy(), upper.copy()
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(max_iter):
        if np.all(b - a <= xtol * np.maximum(1.0, np.abs(a))):
            break
        left = fc < fd
        b = np.where(left, d, b)
        a = np.where(left, a, c)
        probe = np.where(left, b - _INV_PHI * (b - a), a + _INV_PHI * (b - a))
        fprobe = fun(probe)
        c, d = np.where(left, probe, d), np.where(left, c, probe)
        fc, fd = np.where(left, fprobe, fd), np.where(left, fc, fprobe)
    x = 0.5 * (a + b)
    # the minimizer may sit on a bound
    cands = np.stack([lower, x, upper])
    vals = np.stack([fun(lower), fun(x), fun(upper)])
    return cands[np.argmin(vals, axis=0), np.arange(x.size)]


def separable_prox_golden(h, y, grad, lower, upper, xtol=1e-12, dtype=float):
    """Brute-force minimizer of ``<grad, x> + D_h(x, y)`` over the box
    ``[lower, upper]``, one golden-section search per coordinate."""
    y = np.asarray(y, dtype=dtype)
    grad = np.asarray(grad, dtype=dtype)

    def coordinate_objective(x):
        kern = np.where(h.a > 0.0, h.kernel.scalar_divergence(x, y), 0.0)
        return grad * (x - y) + h.a * kern + 0.5 * h.b * (x - y) ** 2

    return golden_section(coordinate_objective, lower, upper, xtol=xtol, dtype=dtype)


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 10_000
    rel_change_tolerance: float = 1e-10
    monotonicity_guard: bool = True
    keep_iterates: bool = False

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.rel_change_tolerance > 0.0:
            raise ValueError("rel_change_tolerance must be positive")


class Status(str, Enum):
    CONVERGED = "converged"
    MAX_ITERATIONS = "max-iterations"
    GUARD_VIOLATION = "guard-violation"
    STALLED = "stalled"


@dataclass
class ConvergenceTrace:
    """Per-iteration record of a solver run.

    Row ``k`` describes iterate ``x^(k)``; row 0 is the starting point.
    ``elapsed`` is cumulative wall time in seconds and is informational only.
    ``rse`` is filled when a reference point was supplied.
    """

    iteration: list = field(default_factory=list)
    objective: list = field(default_factory=list)
    elapsed: list = field(default_factory=list)
    rse: list = field(default_factory=list)
    iterates: list = field(default_factory=list)
    status: Status = Status.MAX_ITERATIONS

    def record(self, k, value, elapsed, x, reference=None, keep=False):
        self.iteration.append(k)
        self.objective.append(float(value))
        self.elapsed.append(float(elapsed))
        if reference is not None:
            self.rse.append(relative_squared_error(x, reference))
        if keep:
            self.iterates.append(np.array(x, dtype=float))

    @property
    def n_iterations(self):
        return self.iteration[-1] if self.iteration else 0

    def iterations_to(self, rse_target):
        """First iteration whose RSE is at most ``rse_target``, else None."""
        for k, r in zip(self.iteration, self.rse):
            if r <= rse_target:
                return k
        return None


def relative_squared_error(x, reference):
    ref = np.asarray(reference, dtype=float)
    return float(np.sum((np.asarray(x) - ref) ** 2) / np.sum(ref * ref))


def guard_slack(value):
    return 1e-10 * (1.0 + abs(value))


def vbmm_run(obj, family, x0, cfg=SolverConfig(), reference=None):
    """Variable Bregman majorization-minimization.

    Parameters
    ----------
    obj : ObjectiveSpec
    family : callable
        Maps an anchor ``y`` to the :class:`SeparableBregman` ``h_y``.
    x0 : array_like
        Starting point inside the domain of ``f``.
    cfg : SolverConfig
    reference : array_like, optional
        Point used for the RSE column of the trace.

    Returns
    -------
    x : ndarray
        Last accepted iterate.
    trace : ConvergenceTrace
    """
    x = np.array(x0, dtype=float)
    if not obj.in_domain(x):
        raise ValueError("x0 must lie in the domain of f")
    trace = ConvergenceTrace()
    value = obj.value(x)
    elapsed = 0.0
    trace.record(0, value, elapsed, x, reference, cfg.keep_iterates)

    for k in range(1, cfg.max_iterations + 1):
        tic = time.perf_counter()
        grad = obj.grad_f(x)
        h = family(x)
        x_new = obj.prox(h, x, grad)
        elapsed += time.perf_counter() - tic

        new_value = obj.value(x_new)
        if cfg.monotonicity_guard and not new_value <= value + guard_slack(value):
            trace.status = Status.GUARD_VIOLATION
            return x, trace

        change = np.linalg.norm(x_new - x) / max(np.linalg.norm(x), 1.0)
        x, value = x_new, new_value
        trace.record(k, value, elapsed, x, reference, cfg.keep_iterates)
        if change < cfg.rel_change_tolerance:
            trace.status = Status.CONVERGED
            return x, trace

    trace.status = Status.MAX_ITERATIONS
    return x, trace
