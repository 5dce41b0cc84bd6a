"""Executable checks of the bounds, orderings and identities satisfied by W and F.

Every check samples initial states, follows their orbits and evaluates each
claim as ``lhs <= rhs`` (or an equality) on every recorded step. Exact mode
uses rationals and zero tolerance; float mode uses the per-check tolerances in
:data:`FLOAT_TOLERANCES`.

Exact orbits cannot be followed literally for long: the bit size of the
iterates doubles with every application of W. In exact mode an orbit is
therefore a chain of exact windows. From every orbit point ``p_k`` the four
iterates ``W(p_k) .. W^4(p_k)`` are computed exactly, every claim is checked
inside that window, and ``p_{k+1}`` is ``W(p_k)`` itself while it stays below
``snap_bits`` bits, or a rounding of it onto the simplex (denominator
``2**32``) otherwise. All claims involve at most four consecutive iterates, so
every check still runs on genuine exact W-chains.
"""
from __future__ import annotations

import functools
import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from gmpy2 import mpq

from .analysis import find_fixed_points, jacobian_W, reduced_fixed_point_spectrum
from .core import Arith, PopulationState, S0_EXACT, format_scalar, validate_population
from .operators import hemophilia_operator, w_step
from .spectra import classify, eigenvalues_4x4

WINDOW = 4
THETA_GAP = 1e-3

FLOAT_TOLERANCES = {
    "lemma1": 1e-12,
    "lemma2": 1e-12,
    "lemma3": 1e-12,
    "monotone_sum": 1e-12,
    "commutation": 1e-10,
    "y_v_decay": 1e-12,
    "boundary_stress": 1e-12,
    "limit_equation": 0.0,
    "fixed_point": 1e-10,
    "spectrum": 1e-6,
}

CHECK_ORDER = (
    "lemma1",
    "lemma2",
    "lemma3",
    "monotone_sum",
    "commutation",
    "y_v_decay",
    "boundary_stress",
    "limit_equation",
    "fixed_point",
    "spectrum",
)

# checks that do not depend on the arithmetic mode or the sampled orbits
MODE_FREE = ("limit_equation", "fixed_point", "spectrum")


@dataclass
class SuiteConfig:
    sample_count: int = 1000
    seed: int = 42
    arithmetic: Arith = Arith.EXACT
    orbit_length: int = 30
    max_denominator: int = 10_000
    snap_bits: int = 64
    scan_step: float = 1e-3
    fixed_point_grid: int = 20
    reference_steps: int = 10_000

    def __post_init__(self):
        if isinstance(self.arithmetic, str):
            self.arithmetic = Arith.parse(self.arithmetic)
        if self.sample_count < 1:
            raise ValueError("sample_count must be >= 1")
        if self.orbit_length < 3:
            raise ValueError("orbit_length must be >= 3")

    def tolerance(self, check_id: str) -> float:
        if self.arithmetic is Arith.EXACT and check_id not in MODE_FREE:
            return 0.0
        return FLOAT_TOLERANCES[check_id]


@dataclass
class CheckResult:
    check_id: str
    samples: int
    failures: int
    worst_violation: float
    tolerance: float
    witness: Optional[dict] = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failures == 0


# --------------------------------------------------------------------------
# Orbit bundles


class OrbitBundle:
    """Windows of ``WINDOW + 1`` consecutive iterates for many orbits.

    ``level(d)`` returns (x, y, u, v) arrays of shape (steps, samples) holding
    ``W^d`` of each window's base point. Float bundles are views into one
    orbit array; exact bundles hold Fractions in object arrays.
    """

    def __init__(self, levels, seeds, arith: Arith):
        self.levels = levels
        self.seeds = seeds
        self.arith = arith

    @property
    def shape(self):
        return self.levels[0][0].shape

    @property
    def size(self) -> int:
        steps, count = self.shape
        return steps * count

    def level(self, d: int):
        return self.levels[d]

    def base_state(self, step: int, sample: int) -> list:
        return [c[step, sample] for c in self.levels[0]]

    @classmethod
    def from_orbit_array(cls, orbit: np.ndarray, seeds) -> "OrbitBundle":
        """``orbit`` has shape (n_states, 4, samples) with orbit[k+1] = W(orbit[k])."""
        steps = orbit.shape[0] - WINDOW
        levels = [tuple(orbit[d : d + steps, c, :] for c in range(4)) for d in range(WINDOW + 1)]
        return cls(levels, seeds, Arith.FLOAT)

    @classmethod
    def from_sequences(cls, sequences: Sequence[Sequence[PopulationState]]) -> "OrbitBundle":
        """Build windows from explicit state sequences of equal length >= 5.

        Consecutive states are taken at face value, so corrupted sequences can
        be fed to the checks.
        """
        n = len(sequences[0])
        if n < WINDOW + 1 or any(len(seq) != n for seq in sequences):
            raise ValueError("sequences must share a length >= 5")
        arith = sequences[0][0].arith
        dtype = object if arith is Arith.EXACT else float
        orbit = np.empty((n, 4, len(sequences)), dtype=dtype)
        for j, seq in enumerate(sequences):
            for k, s in enumerate(seq):
                orbit[k, :, j] = s.as_tuple()
        steps = n - WINDOW
        levels = [tuple(orbit[d : d + steps, c, :] for c in range(4)) for d in range(WINDOW + 1)]
        return cls(levels, [seq[0] for seq in sequences], arith)


def sample_exact_states(count: int, rng: random.Random, max_den: int = 10_000) -> list:
    """Random rational states: four uniform rationals p/q, q <= max_den, normalised."""
    out = []
    while len(out) < count:
        comps = []
        for _ in range(4):
            q = rng.randint(1, max_den)
            comps.append(Fraction(rng.randint(0, q), q))
        total = sum(comps)
        if total == 0:
            continue
        x, y, u, v = (c / total for c in comps)
        if x + y < THETA_GAP or u + v < THETA_GAP:
            continue
        out.append(validate_population(x, y, u, v))
    return out


def sample_float_states(count: int, rng: np.random.Generator) -> np.ndarray:
    """Array (4, count) of uniform simplex-normalised states away from Theta."""
    chunks = []
    have = 0
    while have < count:
        raw = rng.random((4, count))
        raw /= raw.sum(axis=0)
        keep = (raw[0] + raw[1] >= THETA_GAP) & (raw[2] + raw[3] >= THETA_GAP)
        chunks.append(raw[:, keep])
        have += int(keep.sum())
    return np.concatenate(chunks, axis=1)[:, :count]


def float_orbits(initial: np.ndarray, steps: int) -> np.ndarray:
    """Vectorised float orbits, shape (steps + 1, 4, samples)."""
    orbit = np.empty((steps + 1,) + initial.shape)
    orbit[0] = initial
    for k in range(steps):
        orbit[k + 1] = np.array(w_step(*orbit[k]))
    return orbit


def _snap(p, den: int = 1 << 32) -> tuple:
    """Round onto the grid 1/den, keeping the sum exactly one and zeros zero."""
    comps = [mpq(int(c * den), den) for c in p]
    big = max(range(4), key=lambda k: comps[k])
    comps[big] += 1 - sum(comps)
    return tuple(comps)


def _bits(p) -> int:
    return max(max(c.numerator.bit_length(), c.denominator.bit_length()) for c in p)


def exact_windows(seeds: Sequence[PopulationState], steps: int, snap_bits: int = 64) -> OrbitBundle:
    """Exact windows along (possibly re-seeded) orbits; see the module docstring.

    Arithmetic runs on gmpy2 rationals, which hold the same values as
    Fractions at a fraction of the cost.
    """
    n = len(seeds)
    levels = [[np.empty((steps, n), dtype=object) for _ in range(4)] for _ in range(WINDOW + 1)]
    relinks = 0
    for j, seed in enumerate(seeds):
        p = tuple(mpq(c.numerator, c.denominator) for c in seed)
        for k in range(steps):
            window = [p]
            for _ in range(WINDOW):
                window.append(w_step(*window[-1]))
            for d, state in enumerate(window):
                for c in range(4):
                    levels[d][c][k, j] = state[c]
            p = window[1]
            if _bits(p) > snap_bits:
                p = _snap(p)
                relinks += 1
    bundle = OrbitBundle([tuple(lv) for lv in levels], list(seeds), Arith.EXACT)
    bundle.relinks = relinks
    return bundle


@functools.lru_cache(maxsize=8)
def _cached_bundle(arith: Arith, count: int, seed: int, steps: int, max_den: int, snap_bits: int):
    if arith is Arith.EXACT:
        seeds = sample_exact_states(count, random.Random(seed), max_den)
        return exact_windows(seeds, steps, snap_bits)
    initial = sample_float_states(count, np.random.default_rng(seed))
    seeds = [PopulationState(*map(float, initial[:, j])) for j in range(count)]
    return OrbitBundle.from_orbit_array(float_orbits(initial, steps + WINDOW - 1), seeds)


def orbit_bundle(cfg: SuiteConfig) -> OrbitBundle:
    return _cached_bundle(
        cfg.arithmetic, cfg.sample_count, cfg.seed, cfg.orbit_length, cfg.max_denominator, cfg.snap_bits
    )


# --------------------------------------------------------------------------
# Violation bookkeeping


def _as_float(v) -> float:
    return float(v)


def _combine(excesses: Sequence[np.ndarray]) -> np.ndarray:
    return functools.reduce(np.maximum, excesses)


def _tally(check_id: str, excess: np.ndarray, tol: float, bundle: Optional[OrbitBundle] = None, points=None) -> CheckResult:
    """Summarise an array of claim excesses (lhs - rhs) into a CheckResult."""
    excess = np.asarray(excess)
    flat = excess.reshape(-1)
    failures = int(np.count_nonzero(flat > tol))
    worst = flat.max() if flat.size else 0
    worst = max(_as_float(worst), 0.0) + 0.0
    witness = None
    if failures:
        idx = int(np.argmax(flat))
        if bundle is not None and excess.ndim == 2:
            step, sample = np.unravel_index(idx, excess.shape)
            witness = {
                "sample": int(sample),
                "step": int(step),
                "state": [format_scalar(c) for c in bundle.base_state(step, sample)],
            }
        elif points is not None:
            witness = {"point": [format_scalar(c) for c in points[idx]]}
        else:
            witness = {"index": idx}
    return CheckResult(check_id, int(flat.size), failures, worst, tol, witness)


def _tolerance(bundle: OrbitBundle, check_id: str) -> float:
    return 0.0 if bundle.arith is Arith.EXACT else FLOAT_TOLERANCES[check_id]


# --------------------------------------------------------------------------
# Individual claims (pure functions of an orbit bundle)


def lemma1_excess(bundle: OrbitBundle) -> np.ndarray:
    """Orderings of W(s) and the four two-step sandwich chains, literally.

    With s1 = W(s) and s2 = W(s1):
    1/8 <= u1/(4(u1+v1)) <= x2 <= u1/(2(u1+v1)) <= 1/2,
    0 <= v1/(3(u1+v1)) <= y2 <= (u1+2v1)/(4(u1+v1)) <= 1/2,
    1/4 <= (2x1+y1)/(4(x1+y1)) <= u2 <= (3x1+2y1)/(6(x1+y1)) <= 1/2,
    0 <= y1/(4(x1+y1)) <= v2 <= y1/(3(x1+y1)) <= 1/3.
    """
    x1, y1, u1, v1 = bundle.level(1)
    x2, y2, u2, v2 = bundle.level(2)
    f1 = x1 + y1
    m1 = u1 + v1
    chains = [
        (Fraction(1, 8), u1 / (4 * m1), x2, u1 / (2 * m1), Fraction(1, 2)),
        (0, v1 / (3 * m1), y2, (u1 + 2 * v1) / (4 * m1), Fraction(1, 2)),
        (Fraction(1, 4), (2 * x1 + y1) / (4 * f1), u2, (3 * x1 + 2 * y1) / (6 * f1), Fraction(1, 2)),
        (0, y1 / (4 * f1), v2, y1 / (3 * f1), Fraction(1, 3)),
    ]
    if bundle.arith is Arith.FLOAT:
        chains = [tuple(float(c) if isinstance(c, (int, Fraction)) else c for c in ch) for ch in chains]
    parts = [x1 - u1, v1 - y1, y1 - u1]
    for chain in chains:
        for lo, hi in zip(chain, chain[1:]):
            parts.append(lo - hi)
    return _combine(parts)


def domain_excess(alpha, beta) -> np.ndarray:
    """How far (alpha, beta) lies outside [0,4] x [0,1]; <= 0 inside."""
    alpha = np.asarray(alpha)
    beta = np.asarray(beta)
    return _combine([-alpha, alpha - 4, -beta, beta - 1])


def reduced_level(bundle: OrbitBundle, d: int):
    x, y, u, v = bundle.level(d)
    return y / x, v / u


def lemma2_excess(bundle: OrbitBundle) -> np.ndarray:
    return _combine([domain_excess(*reduced_level(bundle, d)) for d in range(2, WINDOW + 1)])


def _F(alpha, beta):
    ab4 = 4 * alpha * beta
    num_b = 3 * alpha + ab4
    return (6 * beta + 3 * alpha + ab4) / (6 + 3 * alpha), num_b / (6 + 6 * beta + num_b)


def lemma3_excess(alpha, beta) -> np.ndarray:
    """F(Delta) inside [0,2] x [0,1], beta' <= alpha', and the two-step sum decreases."""
    a1, b1 = _F(alpha, beta)
    a2, b2 = _F(a1, b1)
    return _combine([-a1, a1 - 2, -b1, b1 - 1, b1 - a1, (a2 + b2) - (a1 + b1)])


def monotone_excess(sums: np.ndarray) -> np.ndarray:
    """Positive where a sequence (axis 0) increases."""
    sums = np.asarray(sums)
    return sums[1:] - sums[:-1]


def corollary_excess(bundle: OrbitBundle) -> np.ndarray:
    """alpha+beta nonincreasing from reduced index 1 on, and 0 <= beta <= alpha there."""
    a3, b3 = reduced_level(bundle, 3)
    a4, b4 = reduced_level(bundle, 4)
    sums = np.stack([a3 + b3, a4 + b4])
    return _combine([monotone_excess(sums)[0], b3 - a3, b4 - a4, -b3, -b4])


def commutation_excess(bundle: OrbitBundle) -> np.ndarray:
    """|reduce(W(s)) - F(reduce(s))| (relative in float mode) where x, u > 0."""
    parts = []
    for d in (0, 2):
        x, y, u, v = bundle.level(d)
        ok = (x > 0) & (u > 0)
        xs = np.where(ok, x, 1)
        us = np.where(ok, u, 1)
        fa, fb = _F(y / xs, v / us)
        x1, y1, u1, v1 = bundle.level(d + 1)
        na = y1 / np.where(ok, x1, 1)
        nb = v1 / np.where(ok, u1, 1)
        if bundle.arith is Arith.FLOAT:
            ea = np.abs(na - fa) / np.maximum(1.0, np.abs(fa))
            eb = np.abs(nb - fb) / np.maximum(1.0, np.abs(fb))
        else:
            ea, eb = abs(na - fa), abs(nb - fb)
        parts.append(np.where(ok, np.maximum(ea, eb), 0))
    return _combine(parts)


def y_v_decay_excess(bundle: OrbitBundle) -> np.ndarray:
    x2, y2, u2, v2 = bundle.level(2)
    alpha, beta = y2 / x2, v2 / u2
    return _combine([y2 - alpha / 2, v2 - beta / 2, -y2, -v2])


# --------------------------------------------------------------------------
# Checks


def check_lemma1(cfg: SuiteConfig) -> CheckResult:
    bundle = orbit_bundle(cfg)
    return _tally("lemma1", lemma1_excess(bundle), cfg.tolerance("lemma1"), bundle)


def check_lemma2(cfg: SuiteConfig) -> CheckResult:
    bundle = orbit_bundle(cfg)
    return _tally("lemma2", lemma2_excess(bundle), cfg.tolerance("lemma2"), bundle)


def lemma3_points(cfg: SuiteConfig) -> list:
    """Corners of Delta, random points of Delta and the reduced orbit points."""
    exact = cfg.arithmetic is Arith.EXACT
    conv = Fraction if exact else float
    pts = [(conv(a), conv(b)) for a, b in ((0, 0), (4, 0), (0, 1), (4, 1))]
    rng = random.Random(cfg.seed + 3)
    q = cfg.max_denominator
    for _ in range(cfg.sample_count):
        if exact:
            pts.append((Fraction(rng.randint(0, 4 * q), q), Fraction(rng.randint(0, q), q)))
        else:
            pts.append((4 * rng.random(), rng.random()))
    alpha, beta = reduced_level(orbit_bundle(cfg), 2)
    pts.extend(zip(alpha.reshape(-1).tolist(), beta.reshape(-1).tolist()))
    return pts


def check_lemma3(cfg: SuiteConfig, points=None) -> CheckResult:
    pts = lemma3_points(cfg) if points is None else points
    dtype = object if cfg.arithmetic is Arith.EXACT else float
    alpha = np.array([p[0] for p in pts], dtype=dtype)
    beta = np.array([p[1] for p in pts], dtype=dtype)
    return _tally("lemma3", lemma3_excess(alpha, beta), cfg.tolerance("lemma3"), points=pts)


def check_monotone_sum(cfg: SuiteConfig) -> CheckResult:
    bundle = orbit_bundle(cfg)
    return _tally("monotone_sum", corollary_excess(bundle), cfg.tolerance("monotone_sum"), bundle)


def check_commutation(cfg: SuiteConfig) -> CheckResult:
    bundle = orbit_bundle(cfg)
    return _tally("commutation", commutation_excess(bundle), cfg.tolerance("commutation"), bundle)


def reference_orbit_tail(steps: int = 10_000, start=(0.0, 0.5, 0.5, 0.0)) -> float:
    """max(y, v) over the final 10% of a float orbit."""
    orbit = float_orbits(np.array(start, dtype=float).reshape(4, 1), steps)[:, :, 0]
    tail = orbit[-(steps // 10) :]
    return float(max(tail[:, 1].max(), tail[:, 3].max()))


def check_y_v_decay(cfg: SuiteConfig) -> CheckResult:
    bundle = orbit_bundle(cfg)
    excess = y_v_decay_excess(bundle)
    result = _tally("y_v_decay", excess, cfg.tolerance("y_v_decay"), bundle)
    tail = reference_orbit_tail(cfg.reference_steps)
    result.samples += 1
    if tail >= 1e-3:
        result.failures += 1
        result.worst_violation = max(result.worst_violation, tail - 1e-3)
        result.witness = result.witness or {"reference_tail_max": repr(tail)}
    x2, y2, _, _ = bundle.level(2)
    tight = np.count_nonzero(y2 > (y2 / x2) / 4)
    result.notes = {"reference_tail_max_y_v": tail, "steps_with_y_above_quarter_alpha": int(tight)}
    return result


def check_boundary_stress(cfg: SuiteConfig) -> CheckResult:
    """The lemma1 and lemma2 claims from float states with x+y (or u+v) in [1e-9, 1e-3]."""
    rng = np.random.default_rng(cfg.seed + 7)
    count = min(cfg.sample_count, 2000)
    small = 10.0 ** rng.uniform(-9, -3, count)
    shares = rng.random((2, count))
    female_side = rng.random(count) < 0.5
    females = np.where(female_side, small, 1 - small)
    males = 1 - females
    raw = np.stack([females * shares[0], females * (1 - shares[0]), males * shares[1], males * (1 - shares[1])])
    seeds = [PopulationState(*map(float, raw[:, j])) for j in range(count)]
    bundle = OrbitBundle.from_orbit_array(float_orbits(raw, 10 + WINDOW - 1), seeds)
    excess = np.maximum(lemma1_excess(bundle), lemma2_excess(bundle))
    return _tally("boundary_stress", excess, FLOAT_TOLERANCES["boundary_stress"], bundle)


# --------------------------------------------------------------------------
# Limit equation


def limit_equation_residual(a, b):
    """|a + b - F_alpha(a, b) - F_beta(a, b)|, exact for rational input."""
    fa, fb = _F(a, b)
    return abs(a + b - fa - fb)


def check_limit_equation(a, b):
    """Residual of the limit equation at (a, b) with 0 <= b <= a, (a, b) in the domain."""
    from .core import DomainViolation

    if not (0 <= b <= a <= 4 and b <= 1):
        raise DomainViolation(f"({a}, {b}) violates 0 <= b <= a, a <= 4, b <= 1")
    return limit_equation_residual(a, b)


@dataclass
class RootScan:
    grid_points: int
    hits: list
    spurious: list
    min_residual_outside: float
    refined_roots: list


def scan_limit_equation(step: float = 1e-3, threshold: float = 1e-9, radius: float = 2e-3) -> RootScan:
    """Brute-force grid over {0 <= b <= min(a, 1), a <= 4}, then local refinement.

    A grid point is a hit when its residual is below ``threshold``. Hits
    farther than ``radius`` (L-infinity) from the origin are spurious. Every
    local minimum of the grid residual below 1e-6 is refined on a 100x finer
    local grid to locate the root it points at.
    """
    na = int(round(4 / step))
    nb = int(round(1 / step))
    a = np.arange(na + 1) * step
    b = np.arange(nb + 1) * step
    A, B = np.meshgrid(a, b, indexing="ij")
    valid = B <= A + 1e-15
    R = limit_equation_residual(A, B)
    R = np.where(valid, R, np.inf)
    hits_mask = R < threshold
    near = np.maximum(A, B) <= radius + 1e-15
    hits = [(float(A[i, j]), float(B[i, j])) for i, j in zip(*np.nonzero(hits_mask))]
    spurious = [(float(A[i, j]), float(B[i, j])) for i, j in zip(*np.nonzero(hits_mask & ~near))]
    outside = np.where(valid & ~near, R, np.inf)
    # local minima among the 4-neighbours
    padded = np.pad(R, 1, constant_values=np.inf)
    centre = padded[1:-1, 1:-1]
    is_min = (
        (centre <= padded[:-2, 1:-1])
        & (centre <= padded[2:, 1:-1])
        & (centre <= padded[1:-1, :-2])
        & (centre <= padded[1:-1, 2:])
        & (centre < 1e-6)
    )
    refined = []
    for i, j in zip(*np.nonzero(is_min)):
        a0, b0 = A[i, j], B[i, j]
        fa = np.clip(a0 + np.linspace(-step, step, 201), 0, 4)
        fb = np.clip(b0 + np.linspace(-step, step, 201), 0, 1)
        FA, FB = np.meshgrid(fa, fb, indexing="ij")
        FR = np.where(FB <= FA, limit_equation_residual(FA, FB), np.inf)
        k = np.unravel_index(np.argmin(FR), FR.shape)
        refined.append((float(FA[k]), float(FB[k]), float(FR[k])))
    return RootScan(int(valid.sum()), hits, spurious, float(outside.min()), refined)


def run_limit_equation(cfg: SuiteConfig) -> CheckResult:
    scan = scan_limit_equation(cfg.scan_step)
    failures = len(scan.spurious)
    worst = max(0.0, 1e-9 - scan.min_residual_outside) if failures else 0.0
    witness = {"point": [repr(a) for a in scan.spurious[0]]} if failures else None
    return CheckResult(
        "limit_equation",
        scan.grid_points,
        failures,
        worst,
        FLOAT_TOLERANCES["limit_equation"],
        witness,
        {
            "hits_near_origin": len(scan.hits) - failures,
            "min_residual_outside_origin_box": scan.min_residual_outside,
            "refined_minima": [list(r) for r in scan.refined_roots],
        },
    )


# --------------------------------------------------------------------------
# Fixed point and spectrum


def run_fixed_point(cfg: SuiteConfig) -> CheckResult:
    reports = find_fixed_points(hemophilia_operator(), cfg.fixed_point_grid)
    tol = FLOAT_TOLERANCES["fixed_point"]
    dists = [float(sum(abs(a - b) for a, b in zip(r.location, S0_EXACT))) for r in reports]
    worst = max(dists) if dists else float("inf")
    failures = abs(len(reports) - 1) + sum(d > tol for d in dists[:1])
    witness = None
    if failures:
        witness = {"points": [[format_scalar(c) for c in r.location] for r in reports]}
    notes = {
        "count": len(reports),
        "residuals": [format_scalar(r.residual) if isinstance(r.residual, Fraction) else repr(r.residual) for r in reports],
        "classification": [r.classification for r in reports],
    }
    return CheckResult("fixed_point", 1, failures, worst, tol, witness, notes)


def run_spectrum(cfg: SuiteConfig) -> CheckResult:
    jac_f, eig_f = reduced_fixed_point_spectrum()
    exact_ok = sorted(eig_f) == [Fraction(-1, 2), Fraction(1)]
    jac_w = jacobian_W(S0_EXACT.to(Arith.FLOAT))
    eig_w = eigenvalues_4x4(jac_w)
    gap = min(abs(abs(lam) - 1) for lam in eig_w)
    tol = FLOAT_TOLERANCES["spectrum"]
    failures = (0 if exact_ok else 1) + (0 if gap <= tol else 1)
    notes = {
        "F_eigenvalues": [format_scalar(Fraction(e)) if not isinstance(e, complex) else repr(e) for e in eig_f],
        "W_eigenvalues": [repr(complex(e)) for e in eig_w],
        "W_classification": classify(eig_w),
    }
    witness = None if not failures else {"F_eigenvalues": notes["F_eigenvalues"], "unit_gap": repr(gap)}
    return CheckResult("spectrum", 2, failures, gap, tol, witness, notes)


CHECKS = {
    "lemma1": check_lemma1,
    "lemma2": check_lemma2,
    "lemma3": check_lemma3,
    "monotone_sum": check_monotone_sum,
    "commutation": check_commutation,
    "y_v_decay": check_y_v_decay,
    "boundary_stress": check_boundary_stress,
    "limit_equation": run_limit_equation,
    "fixed_point": run_fixed_point,
    "spectrum": run_spectrum,
}


def select_checks(only: Optional[Sequence[str]] = None) -> list:
    if not only:
        return list(CHECK_ORDER)
    chosen = []
    for name in only:
        matches = [c for c in CHECK_ORDER if c == name or c.startswith(name)]
        if not matches:
            raise KeyError(f"unknown check {name!r}; choose from {', '.join(CHECK_ORDER)}")
        chosen.extend(m for m in matches if m not in chosen)
    return [c for c in CHECK_ORDER if c in chosen]


def run_suite(cfg: SuiteConfig, only: Optional[Sequence[str]] = None) -> list:
    """Run the selected checks (all by default) in fixed order."""
    return [CHECKS[name](cfg) for name in select_checks(only)]


def suite_passed(results: Sequence[CheckResult]) -> bool:
    return all(r.passed for r in results)


def report_document(cfg: SuiteConfig, results: Sequence[CheckResult]) -> dict:
    header = asdict(cfg)
    header["arithmetic"] = cfg.arithmetic.value
    return {
        "config": header,
        "tolerances": {name: cfg.tolerance(name) for name in CHECK_ORDER},
        "passed": suite_passed(results),
        "checks": [
            {
                "id": r.check_id,
                "samples": r.samples,
                "failures": r.failures,
                "worst_violation": r.worst_violation,
                "tolerance": r.tolerance,
                "witness": r.witness,
                "notes": r.notes,
            }
            for r in results
        ],
    }


def report_text(cfg: SuiteConfig, results: Sequence[CheckResult]) -> str:
    return json.dumps(report_document(cfg, results), indent=2, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, Fraction):
        return format_scalar(obj)
    if isinstance(obj, complex):
        return repr(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    raise TypeError(f"not serialisable: {type(obj)}")
