"""Trajectories, fixed points, Jacobians, decay rates and basin sweeps."""
from __future__ import annotations

import enum
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .core import (
    Arith,
    DegenerateSex,
    ExactIterationCapExceeded,
    GonosomalError,
    PopulationState,
    RawState4,
    ReducedState,
    ZeroDenominator,
    fixed_point,
    l1_distance,
    validate_population,
)
from .operators import GonosomalOperator, Mode, apply_unnormalized, hemophilia_operator, reduce, w_step
from .spectra import classify, eigenvalues_2x2, eigenvalues_4x4

log = logging.getLogger(__name__)

MAX_EXACT_STEPS = 64
MAX_EXACT_BITS = 1 << 16
NEWTON_MAX_ITER = 50
MERGE_RADIUS = 1e-6


class NoConvergence(GonosomalError, ArithmeticError):
    pass


class InsufficientData(GonosomalError, ValueError):
    pass


class StopReason(enum.Enum):
    CONVERGED = "converged"
    BUDGET_EXHAUSTED = "budget_exhausted"
    DEGENERATE_SEX = "degenerate_sex"
    EXACT_CAP_EXCEEDED = "exact_cap_exceeded"


@dataclass
class Trajectory:
    states: list
    reduced: list
    stop_reason: StopReason
    steps_taken: int

    @property
    def final(self) -> PopulationState:
        return self.states[-1]

    def reduced_at(self, m: int) -> Optional[ReducedState]:
        """alpha^(m), beta^(m): ratios of the (m+2)-th state."""
        return self.reduced[m]

    def distances(self, target: Optional[PopulationState] = None) -> list:
        target = target or fixed_point(self.states[0].arith)
        return [l1_distance(s, target) for s in self.states]


def _safe_reduce(s: PopulationState) -> Optional[ReducedState]:
    try:
        return reduce(s)
    except ZeroDenominator:
        return None


def iterate(
    op: GonosomalOperator,
    s0: PopulationState,
    max_steps: int,
    eps=0,
    target: Optional[PopulationState] = None,
    max_exact_steps: int = MAX_EXACT_STEPS,
    max_exact_bits: int = MAX_EXACT_BITS,
) -> Trajectory:
    """Record the orbit of ``s0`` until convergence, budget or degeneracy.

    With a ``target`` the stop test is ``l1(state, target) < eps``; without
    one it is the L1 size of the last step. Errors along the way become stop
    reasons. Exact runs stop once ``max_exact_steps`` steps were taken or a
    component needs more than ``max_exact_bits`` bits (sizes double per step).
    """
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    exact = s0.arith is Arith.EXACT
    states = [s0]
    reduced = []
    if target is not None and l1_distance(s0, target) < eps:
        return Trajectory(states, reduced, StopReason.CONVERGED, 0)
    reason = StopReason.BUDGET_EXHAUSTED
    s = s0
    for k in range(1, max_steps + 1):
        if exact and (k > max_exact_steps or s.bits() > max_exact_bits):
            reason = StopReason.EXACT_CAP_EXCEEDED
            break
        try:
            nxt = op(s)
        except DegenerateSex:
            reason = StopReason.DEGENERATE_SEX
            break
        states.append(nxt)
        if k >= 2:
            reduced.append(_safe_reduce(nxt))
        if target is not None:
            done = l1_distance(nxt, target) < eps
        else:
            done = l1_distance(nxt, s) < eps
        s = nxt
        if done:
            reason = StopReason.CONVERGED
            break
    return Trajectory(states, reduced, reason, len(states) - 1)


def exact_orbit(s0: PopulationState, steps: int, max_exact_bits: int = MAX_EXACT_BITS) -> list:
    """Exact W-orbit; raises once the bit budget is exhausted."""
    op = hemophilia_operator()
    traj = iterate(op, s0, steps, max_exact_steps=steps, max_exact_bits=max_exact_bits)
    if traj.stop_reason is StopReason.EXACT_CAP_EXCEEDED:
        raise ExactIterationCapExceeded(
            f"exact orbit exceeded {max_exact_bits} bits after {traj.steps_taken} steps"
        )
    return traj.states


# --------------------------------------------------------------------------
# Jacobians


def jacobian_F(r: ReducedState) -> list:
    """Analytic 2x2 Jacobian of the reduced map (exact for rational input)."""
    a, b = r
    den_a = 6 + 3 * a
    num_b = 3 * a + 4 * a * b
    den_b = 6 + 6 * b + num_b
    return [
        [(18 + 6 * b) / den_a**2, (6 + 4 * a) / den_a],
        [(3 + 4 * b) * (6 + 6 * b) / den_b**2, (4 * a * (6 + 6 * b) - 6 * num_b) / den_b**2],
    ]


def _raw_map(op: Optional[GonosomalOperator]):
    op = op or hemophilia_operator()
    return op.step_coords


def jacobian_W(s: PopulationState, h=1e-4, op: Optional[GonosomalOperator] = None) -> list:
    """Central-difference Jacobian of W on R^4 with one Richardson step.

    Combines step sizes ``h`` and ``h/2``: J = (4 D(h/2) - D(h)) / 3.
    Exact states use exact perturbations, so only truncation error remains.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    f = _raw_map(op)
    base = list(s.as_tuple())
    h = s.arith.convert(h)

    def central(step):
        cols = []
        for a in range(4):
            plus = base.copy()
            minus = base.copy()
            plus[a] += step
            minus[a] -= step
            fp, fm = f(plus), f(minus)
            cols.append([(p - q) / (2 * step) for p, q in zip(fp, fm)])
        return [[cols[a][k] for a in range(4)] for k in range(4)]

    coarse = central(h)
    fine = central(h / 2)
    return [[(4 * fine[k][a] - coarse[k][a]) / 3 for a in range(4)] for k in range(4)]


def _analytic_jacobian(op: GonosomalOperator, coords: Sequence[float]) -> np.ndarray:
    """Exact derivative of N_k / (S_f S_m) for a bilinear cross-table map."""
    n = op.n_female
    females = sum(coords[:n])
    males = sum(coords[n:])
    denom = females * males
    dnum = np.zeros((op.size, op.size))
    for i, j, k, p in op._terms:
        dnum[k, i] += float(p) * coords[j]
        dnum[k, j] += float(p) * coords[i]
    image = np.array(op.step_coords(list(coords)))
    dden = np.array([males] * n + [females] * (op.size - n))
    return (dnum - np.outer(image, dden)) / denom


# --------------------------------------------------------------------------
# Fixed points


@dataclass
class FixedPointReport:
    location: PopulationState
    residual: float
    jacobian: list
    eigenvalues: list
    classification: str


def barycentric_lattice(n: int) -> list:
    """Integer points (i, j, k, l), i + j + k + l = n, off the set Theta.

    Lexicographic order; this order is the lattice index used everywhere.
    """
    pts = []
    for i, j, k in itertools.product(range(n + 1), repeat=3):
        l = n - i - j - k
        if l < 0 or i + j == 0 or k + l == 0:
            continue
        pts.append((i, j, k, l))
    return pts


def lattice_state(point, n: int) -> PopulationState:
    return validate_population(*(Fraction(c, n) for c in point))


def _residual_exact(op: GonosomalOperator, coords) -> Fraction:
    exact = [Fraction(c) for c in coords]
    image = op.step_coords(exact)
    return sum(abs(p - q) for p, q in zip(image, exact))


def _slice_residual(op, p):
    coords = [p[0], p[1], p[2], 1.0 - p[0] - p[1] - p[2]]
    exact = [Fraction(c) for c in coords]
    image = op.step_coords(exact)
    diff = [image[k] - exact[k] for k in range(3)]
    g = np.array([float(d) for d in diff])
    # squared 2-norm in exact arithmetic; a float sum would underflow near the root
    return coords, g, sum(d * d for d in diff)


def _newton_slice(op: GonosomalOperator, start: Sequence[float]) -> tuple:
    """Damped Newton for W(s) = s on the affine slice sum(s) = 1.

    Coordinates (x, y, u) parametrise the slice. Residuals are evaluated in
    exact arithmetic at each float iterate: the fixed point is nonhyperbolic,
    so the Jacobian is nearly singular there and float residuals would stall
    the iteration around sqrt(machine epsilon).
    """
    p = np.array(start[:3], dtype=float)
    coords, g, res = _slice_residual(op, p)
    for _ in range(NEWTON_MAX_ITER):
        if res == 0:
            break
        jac = _analytic_jacobian(op, coords)
        jac3 = jac[:3, :3] - jac[:3, 3:4] - np.eye(3)
        try:
            delta = -np.linalg.solve(jac3, g)
        except np.linalg.LinAlgError:
            delta = -np.linalg.lstsq(jac3, g, rcond=None)[0]
        t = 1.0
        while True:
            trial = p + t * delta
            try:
                tc, tg, tres = _slice_residual(op, trial)
                if tres < res:
                    break
            except DegenerateSex:
                pass
            t /= 2
            if t < 2.0**-30:
                raise NoConvergence("line search failed")
        step = np.max(np.abs(trial - p))
        p, coords, g, res = trial, tc, tg, tres
        if step < 1e-17:
            break
    return coords, _residual_exact(op, coords)


def _in_simplex(coords, slack=1e-9) -> bool:
    return all(c >= -slack for c in coords) and coords[0] + coords[1] > slack and coords[2] + coords[3] > slack


def _recognise_rational(op, coords, max_den: int = 10**6):
    """Snap to a nearby simple rational point if it is an exact fixed point."""
    snapped = [max(Fraction(c).limit_denominator(max_den), Fraction(0)) for c in coords]
    total = sum(snapped)
    if total == 0:
        return None
    snapped = [c / total for c in snapped]
    try:
        if _residual_exact(op, snapped) == 0:
            return validate_population(*snapped)
    except GonosomalError:
        return None
    return None


def fixed_point_report(op: GonosomalOperator, s: PopulationState, residual=None) -> FixedPointReport:
    if residual is None:
        residual = _residual_exact(op, s.as_tuple())
    jac = jacobian_W(s.to(Arith.FLOAT), op=op)
    eig = eigenvalues_4x4(jac)
    return FixedPointReport(s, residual, jac, eig, classify(eig))


def find_fixed_points(
    op: Optional[GonosomalOperator] = None,
    grid_per_axis: int = 20,
    refine_tol: float = 1e-12,
    dropped: Optional[list] = None,
) -> list:
    """Fixed points of a normalized operator inside S^{2,2}.

    Lattice points whose residual L1(W(s) - s) is no larger than at any lattice
    neighbour seed a damped Newton solve. Converged roots inside the simplex are
    merged within 1e-6 (L1). Failed candidates are logged and, if ``dropped``
    is a list, appended to it as (start, reason) pairs.
    """
    op = op or hemophilia_operator()
    if grid_per_axis < 4:
        raise ValueError("grid_per_axis must be >= 4")
    n = grid_per_axis
    pts = barycentric_lattice(n)
    stepper = op.float_stepper()
    residual = {}
    for pt in pts:
        s = [c / n for c in pt]
        residual[pt] = sum(abs(a - b) for a, b in zip(stepper(*s), s))
    candidates = []
    for pt in pts:
        neighbours = []
        for a, b in itertools.permutations(range(4), 2):
            if pt[a] == 0:
                continue
            q = list(pt)
            q[a] -= 1
            q[b] += 1
            q = tuple(q)
            if q in residual:
                neighbours.append(residual[q])
        if all(residual[pt] <= r for r in neighbours):
            candidates.append(pt)

    roots = []
    for pt in candidates:
        start = [c / n for c in pt]
        try:
            coords, res = _newton_slice(op, start)
        except (NoConvergence, DegenerateSex) as exc:
            log.warning("fixed-point candidate %s dropped: %s", pt, exc)
            if dropped is not None:
                dropped.append((pt, str(exc)))
            continue
        if res >= refine_tol or not _in_simplex(coords):
            reason = "outside simplex" if res < refine_tol else f"residual {float(res):.3g}"
            log.warning("fixed-point candidate %s dropped: %s", pt, reason)
            if dropped is not None:
                dropped.append((pt, reason))
            continue
        if any(sum(abs(a - b) for a, b in zip(coords, r[0])) < MERGE_RADIUS for r in roots):
            continue
        roots.append((coords, res))

    reports = []
    for coords, res in roots:
        exact = _recognise_rational(op, coords)
        if exact is not None:
            reports.append(fixed_point_report(op, exact, Fraction(0)))
        else:
            clipped = [max(c, 0.0) for c in coords]
            total = sum(clipped)
            state = validate_population(*(c / total for c in clipped))
            reports.append(fixed_point_report(op, state, float(res)))
    return reports


def reduced_fixed_point_spectrum(r: ReducedState = ReducedState(Fraction(0), Fraction(0))):
    """Jacobian of F at ``r`` and its (exact where possible) eigenvalues."""
    jac = jacobian_F(r)
    return jac, eigenvalues_2x2(jac)


# --------------------------------------------------------------------------
# Decay rate


@dataclass
class DecayFit:
    exponent: float
    log_constant: float
    residual: float
    drift: float
    power_law: bool
    n_points: int


def fit_power_law(values: Sequence[float], indices: Optional[Sequence[float]] = None, drift_tol=0.05) -> DecayFit:
    """Fit values ~ C * m^(-p) on the tail half of the sequence.

    ``drift`` compares the exponents fitted on the two quarters of that tail;
    a genuine power law keeps them equal, geometric decay does not.
    """
    if indices is None:
        indices = range(1, len(values) + 1)
    pairs = [(float(m), float(v)) for m, v in zip(indices, values) if v > 0 and m > 0]
    if len(pairs) < 100:
        raise InsufficientData(f"need >= 100 positive values, got {len(pairs)}")
    tail = pairs[len(pairs) // 2 :]

    def fit(chunk):
        lx = np.log([m for m, _ in chunk])
        ly = np.log([v for _, v in chunk])
        slope, intercept = np.polyfit(lx, ly, 1)
        resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
        return -float(slope), float(intercept), resid

    p, c, resid = fit(tail)
    half = len(tail) // 2
    p1, _, _ = fit(tail[:half])
    p2, _, _ = fit(tail[half:])
    drift = abs(p2 - p1)
    return DecayFit(p, c, resid, drift, drift <= drift_tol * max(abs(p), 1e-12), len(tail))


def estimate_decay_exponent(traj: Trajectory) -> DecayFit:
    """Power-law fit of alpha^(m) + beta^(m) along the reduced orbit (m >= 1)."""
    sums = []
    ms = []
    for m, r in enumerate(traj.reduced):
        if m >= 1 and r is not None:
            sums.append(float(r.total()))
            ms.append(m)
    return fit_power_law(sums, ms)


# --------------------------------------------------------------------------
# Basin sweep


@dataclass
class SweepRecord:
    index: int
    initial: PopulationState
    iterations_to_eps: Optional[int]
    final_distance: float
    stop_reason: StopReason = field(default=StopReason.CONVERGED)


def _sweep_vectorised(chunk, n, eps, max_iter):
    """Same per-point float operations as the scalar loop, run on arrays.

    Elementwise IEEE arithmetic is identical in numpy and Python, so every
    point sees bit-identical iterates whichever path or chunking runs it.
    """
    pts = np.array([pt for _, pt in chunk], dtype=float).T / n
    x, y, u, v = (pts[c].copy() for c in range(4))
    count = x.size
    dist = np.abs(x - 0.5) + np.abs(y) + np.abs(u - 0.5) + np.abs(v)
    iters = np.zeros(count, dtype=np.int64)
    active = dist >= eps
    it = 0
    while it < max_iter and active.any():
        nx, ny, nu, nv = w_step(x, y, u, v)
        x = np.where(active, nx, x)
        y = np.where(active, ny, y)
        u = np.where(active, nu, u)
        v = np.where(active, nv, v)
        it += 1
        iters[active] = it
        dist = np.where(active, np.abs(x - 0.5) + np.abs(y) + np.abs(u - 0.5) + np.abs(v), dist)
        active &= dist >= eps
    out = []
    for k, (index, pt) in enumerate(chunk):
        done = dist[k] < eps
        reason = StopReason.CONVERGED if done else StopReason.BUDGET_EXHAUSTED
        out.append((index, pt, int(iters[k]) if done else None, float(dist[k]), reason))
    return out


def _sweep_chunk(args):
    op, chunk, n, eps, max_iter = args
    step = op.float_stepper()
    if step is w_step:
        return _sweep_vectorised(chunk, n, eps, max_iter)
    tx, ty, tu, tv = 0.5, 0.0, 0.5, 0.0
    out = []
    for index, pt in chunk:
        x, y, u, v = (c / n for c in pt)
        dist = abs(x - tx) + abs(y - ty) + abs(u - tu) + abs(v - tv)
        it = 0
        reason = StopReason.BUDGET_EXHAUSTED
        while True:
            if dist < eps:
                reason = StopReason.CONVERGED
                break
            if it >= max_iter:
                break
            try:
                x, y, u, v = step(x, y, u, v)
            except (ZeroDivisionError, DegenerateSex):
                reason = StopReason.DEGENERATE_SEX
                break
            it += 1
            dist = abs(x - tx) + abs(y - ty) + abs(u - tu) + abs(v - tv)
        out.append((index, pt, it if reason is StopReason.CONVERGED else None, dist, reason))
    return out


def basin_sweep(
    op: Optional[GonosomalOperator] = None,
    grid_per_axis: int = 10,
    eps: float = 1e-4,
    max_iter: int = 100_000,
    worker_count: int = 1,
) -> list:
    """Iterate every barycentric lattice point of S^{2,2} towards (1/2, 0, 1/2, 0).

    Float iteration; records come back in lattice order whatever the number
    of workers.
    """
    op = op or hemophilia_operator()
    n = grid_per_axis
    indexed = list(enumerate(barycentric_lattice(n)))
    if worker_count <= 1:
        rows = _sweep_chunk((op, indexed, n, eps, max_iter))
    else:
        size = max(1, math.ceil(len(indexed) / worker_count))
        chunks = [indexed[i : i + size] for i in range(0, len(indexed), size)]
        with ProcessPoolExecutor(max_workers=worker_count) as pool:
            rows = [r for part in pool.map(_sweep_chunk, [(op, c, n, eps, max_iter) for c in chunks]) for r in part]
    return [
        SweepRecord(index, lattice_state(pt, n), iters, dist, reason)
        for index, pt, iters, dist, reason in rows
    ]


# --------------------------------------------------------------------------
# Unnormalized operator


class Verdict(enum.Enum):
    ORIGIN = "origin"
    INFINITY = "infinity"
    UNDECIDED = "undecided"


@dataclass
class UnnormalizedOrbit:
    verdict: Verdict
    steps: int
    final_norm: float


def classify_unnormalized_orbit(
    s: RawState4,
    op: Optional[GonosomalOperator] = None,
    low: float = 1e-12,
    high: float = 1e12,
    max_steps: int = 10_000,
) -> UnnormalizedOrbit:
    """Follow the unnormalized map until the max-norm leaves [low, high]."""
    op = op or hemophilia_operator(Mode.UNNORMALIZED)
    for k in range(max_steps + 1):
        norm = float(s.norm())
        if norm < low:
            return UnnormalizedOrbit(Verdict.ORIGIN, k, norm)
        if norm > high:
            return UnnormalizedOrbit(Verdict.INFINITY, k, norm)
        if k < max_steps:
            s = apply_unnormalized(op, s)
    return UnnormalizedOrbit(Verdict.UNDECIDED, max_steps, float(s.norm()))
