"""Acceptance criteria 1-9, each at its stated scale and tolerance.

Every test records one pass/fail line; the lines are printed as they happen
(visible with ``-s``) and again in the terminal summary.
"""
import csv
import io
import json
import random
import time
from fractions import Fraction as Q

import numpy as np
import pytest

from gonosomal import verify
from gonosomal.analysis import (
    MAX_EXACT_BITS,
    ExactIterationCapExceeded,
    Verdict,
    classify_unnormalized_orbit,
    exact_orbit,
    find_fixed_points,
    jacobian_W,
    reduced_fixed_point_spectrum,
)
from gonosomal.cli import main
from gonosomal.core import Arith, RawState4, fixed_point
from gonosomal.operators import (
    Mode,
    apply_general,
    apply_unnormalized,
    apply_W,
    hemophilia_operator,
    reconstruct_next,
    reduce,
)
from gonosomal.spectra import classify, eigenvalues_4x4
from oracles import W_oracle, similarity_eigenvalues

RESULTS = {}
S0 = fixed_point(Arith.EXACT)


def record(n, ok, detail):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"
    RESULTS[n] = line
    print(line)
    assert ok, line


def random_states(count=1000, seed=2024):
    return verify.sample_exact_states(count, random.Random(seed))


@pytest.fixture(scope="module")
def sweeps(tmp_path_factory):
    """cmd_sweep at grid 10 with 8 and with 1 worker, written to files."""
    out = {}
    d = tmp_path_factory.mktemp("sweep")
    for workers in (8, 1):
        path = d / f"sweep_w{workers}.csv"
        t0 = time.perf_counter()
        code = main(["sweep", "--grid", "10", "--eps", "1e-4", "--max-iter", "100000", "--workers", str(workers), "--out", str(path)])
        out[workers] = (code, path.read_bytes(), time.perf_counter() - t0)
    return out


@pytest.fixture(scope="module")
def verify_reports(tmp_path_factory):
    """Full cmd_verify runs: exact twice (fresh caches) and float once."""
    d = tmp_path_factory.mktemp("verify")
    runs = {}
    for name, argv in (
        ("exact_a", ["--arith", "exact", "--samples", "1000", "--orbit-length", "30"]),
        ("exact_b", ["--arith", "exact", "--samples", "1000", "--orbit-length", "30"]),
        ("float", ["--arith", "f64", "--samples", "10000", "--orbit-length", "200"]),
    ):
        verify._cached_bundle.cache_clear()
        path = d / f"{name}.json"
        t0 = time.perf_counter()
        code = main(["verify", "--seed", "42", "--out", str(path), *argv])
        runs[name] = (code, path.read_bytes(), time.perf_counter() - t0)
    return runs


def test_criterion_1_exact_fixed_point():
    image = apply_W(S0)
    residual = sum(abs(a - b) for a, b in zip(image, S0))
    ok = image == S0 and residual == 0 and W_oracle(*S0) == S0.as_tuple()
    record(1, ok, f"W(1/2,0,1/2,0) = ({', '.join(map(str, image))}), rational residual {residual}")


def test_criterion_2_uniqueness_on_20_grid():
    t0 = time.perf_counter()
    reports = find_fixed_points(hemophilia_operator(), 20)
    elapsed = time.perf_counter() - t0
    dist = [float(sum(abs(a - b) for a, b in zip(r.location, S0))) for r in reports]
    ok = len(reports) == 1 and dist[0] <= 1e-10 and elapsed < 10
    record(2, ok, f"{len(reports)} fixed point(s), L1 distance to s0 {dist}, {elapsed:.1f}s")


def test_criterion_3_spectrum():
    _, eig_f = reduced_fixed_point_spectrum()
    exact_ok = set(eig_f) == {Q(1), Q(-1, 2)} and all(isinstance(e, Q) for e in eig_f)
    jac = jacobian_W(fixed_point(Arith.FLOAT))
    eig_w = eigenvalues_4x4(jac)
    gap = min(abs(abs(e) - 1) for e in eig_w)
    # independent cross-check of the same matrix through LAPACK after a similarity transform
    ref_gap = min(abs(abs(e) - 1) for e in similarity_eigenvalues(jac))
    ok = exact_ok and gap <= 1e-6 and ref_gap <= 1e-6 and classify(eig_w) == "nonhyperbolic"
    record(3, ok, f"F eigenvalues {[str(e) for e in eig_f]}, W unit-modulus gap {gap:.1e}, {classify(eig_w)}")


LEMMA_CHECKS = ("lemma1", "lemma2", "lemma3", "monotone_sum", "commutation", "y_v_decay")


def test_criterion_4_lemma_suites(verify_reports):
    lines = []
    ok = True
    total = 0.0
    for name, label in (("exact_a", "10^3 exact x 30"), ("float", "10^4 f64 x 200")):
        code, text, elapsed = verify_reports[name]
        total += elapsed
        doc = json.loads(text)
        checks = {c["id"]: c for c in doc["checks"]}
        fails = {c: checks[c]["failures"] for c in LEMMA_CHECKS}
        ok &= code == 0 and not any(fails.values())
        lines.append(f"{label}: failures {sum(fails.values())}")
    ok &= total < 120
    record(4, ok, "; ".join(lines) + f"; {total:.0f}s")


@pytest.mark.xfail(raises=ExactIterationCapExceeded, strict=True, reason="exact iterate size doubles per step")
def test_criterion_4_literal_exact_orbits_exceed_bit_cap():
    """A literal 30-step exact orbit needs about 2^30 times the seed's bits.

    The suite instead follows exact windows along re-seeded orbits; this test
    documents that the literal reading cannot run at desk scale.
    """
    seed = random_states(1)[0]
    exact_orbit(seed, 30, max_exact_bits=MAX_EXACT_BITS)


def test_criterion_5_limit_equation_scan():
    t0 = time.perf_counter()
    scan = verify.scan_limit_equation(1e-3, threshold=1e-9, radius=2e-3)
    elapsed = time.perf_counter() - t0
    ok = not scan.spurious and scan.hits and elapsed < 60
    record(
        5,
        ok,
        f"{scan.grid_points} grid points, {len(scan.hits)} hit(s) near origin, {len(scan.spurious)} elsewhere, "
        f"min residual outside {scan.min_residual_outside:.2e}, {elapsed:.1f}s",
    )


def test_criterion_6_global_attraction(sweeps):
    code, data, elapsed = sweeps[8]
    rows = list(csv.DictReader(io.StringIO(data.decode())))
    missing = [r for r in rows if r["stop_reason"] != "converged"]
    worst = max(int(r["iterations_to_eps"]) for r in rows if r["iterations_to_eps"])
    ok = code == 0 and len(rows) == 264 and not missing and elapsed < 300
    detail = f"{len(rows) - len(missing)}/{len(rows)} reached eps 1e-4, max iterations {worst}, {elapsed:.0f}s with 8 workers"
    if missing:
        detail += f"; not reached: {[r['index'] for r in missing]}"
    record(6, ok, detail)


def test_criterion_7_oracle_equivalence():
    op = hemophilia_operator()
    states = random_states()
    t0 = time.perf_counter()
    general = sum(apply_general(op, s) != apply_W(s) for s in states)
    usable = [s for s in states if s.x > 0 and s.u > 0]
    recon = sum(reconstruct_next(reduce(s), strict=False) != apply_W(s) for s in usable)
    elapsed = time.perf_counter() - t0
    ok = general == 0 and recon == 0 and len(usable) >= 990 and elapsed < 30
    record(
        7,
        ok,
        f"apply_general mismatches {general}/{len(states)}, reconstruct_next mismatches {recon}/{len(usable)} "
        f"(states with x, u > 0), {elapsed:.1f}s",
    )


def test_criterion_8_determinism(sweeps, verify_reports):
    sweep_same = sweeps[1][1] == sweeps[8][1]
    verify_same = verify_reports["exact_a"][1] == verify_reports["exact_b"][1]
    record(8, sweep_same and verify_same, f"sweep CSV 1 vs 8 workers identical: {sweep_same}; verify reports identical: {verify_same}")


def test_criterion_9_unnormalized_mode():
    op = hemophilia_operator(Mode.UNNORMALIZED)
    t0 = time.perf_counter()
    bad = 0
    for s in random_states():
        r = RawState4(*s)
        if apply_unnormalized(op, r.scaled(2)) != apply_unnormalized(op, r).scaled(4):
            bad += 1
    rng = np.random.default_rng(9)
    verdicts = {v: 0 for v in Verdict}
    for _ in range(1000):
        direction = rng.random(4) + 1e-3
        scale = 10.0 ** rng.uniform(-2, 2)
        verdicts[classify_unnormalized_orbit(RawState4(*(scale * direction / direction.sum()))).verdict] += 1
    elapsed = time.perf_counter() - t0
    ok = bad == 0 and verdicts[Verdict.UNDECIDED] == 0 and elapsed < 30
    record(
        9,
        ok,
        f"homogeneity failures {bad}/1000; verdicts origin {verdicts[Verdict.ORIGIN]}, "
        f"infinity {verdicts[Verdict.INFINITY]}, undecided {verdicts[Verdict.UNDECIDED]}; {elapsed:.1f}s",
    )
