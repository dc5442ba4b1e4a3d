"""Acceptance criteria, one verdict line each (printed in the terminal
summary).  Failing criteria are reported as failures; the reasons are in
the project decisions ledger."""
import math
import time

import numpy as np
from hypothesis import given, settings

import test_solgraph
import test_solvers
from acceptance_log import note, report
from reference_data import PUMA_POSES_DEG, PUMA_TD
from strategies import bindings, exprs
from symik.emitters import EmitTarget, emit, guard_scan
from symik.exprcore import DomainError, canonicalize, eval_numeric
from symik.exprparse import parse_expr, print_expr
from symik.kinmodel import builtin_robot, numeric_fk, pose_bindings
from symik.pipeline import solve
from symik.program import evaluate_poses
from symik.verify import check_reachability, fuzz, verify_round_trip

PUMA_SEED = (30, 50, 40, 45, 120, 60)
PUMA_SOLVERS = {"th_1": "sin_and_cos", "th_3": "x2y2", "th_23": "simultaneous", "th_2": "algebra",
                "th_4": "tangent", "th_5": "tangent", "th_6": "tangent"}


def _deg_diff(a, b):
    return abs((a - b + 180.0) % 360.0 - 180.0)


def _puma_poses_deg(sr, seed_deg):
    r = sr.robot
    seed = {f"th_{i + 1}": math.radians(v) for i, v in enumerate(seed_deg)}
    rep = verify_round_trip(r, sr.poses, seed)
    return rep, [[math.degrees(p.values[u.name]) for u in r.unknowns] for p in rep.pose_sets]


def _table_match(ours, table):
    """Worst per-pose deviation under the best one-to-one pairing (greedy is
    exact here: every pose has a unique nearest row)."""
    worst, used = 0.0, set()
    for q in ours:
        dev, k = min((max(_deg_diff(x, y) for x, y in zip(q, row)), k) for k, row in enumerate(table))
        used.add(k)
        worst = max(worst, dev)
    return worst, len(used) == len(table) == len(ours)


def test_criterion_1_puma_end_to_end():
    t0 = time.perf_counter()
    sr = solve(builtin_robot("puma"))
    dt = time.perf_counter() - t0
    solvers = sr.solver_of()
    ok = (sr.outcome.fully_solved and len(sr.poses) == 8 and solvers == PUMA_SOLVERS and dt <= 60)
    assert report("1", ok, f"PUMA {sr.outcome.kind.value}, {len(sr.poses)} pose sets, "
                           f"solvers {'match' if solvers == PUMA_SOLVERS else solvers}, {dt:.1f} s (limit 60 s)")


def test_criterion_2_puma_fk(puma_seed):
    r = builtin_robot("puma")
    t = numeric_fk(r, {**r.constants, **puma_seed})
    dev = float(np.max(np.abs(t[:3] - np.array(PUMA_TD))))
    assert report("2", dev <= 1e-4, f"PUMA T_d max entry deviation {dev:.2e} (tol 1e-4), Px = {t[0, 3]:.5f}")


def test_criterion_3_puma_pose_table(solved):
    sr = solved("puma")
    _, ours = _puma_poses_deg(sr, PUMA_SEED)
    worst, bijective = _table_match(ours, PUMA_POSES_DEG)
    seed_dev = min(max(_deg_diff(x, y) for x, y in zip(q, PUMA_SEED)) for q in ours)
    ok = bijective and worst <= 1e-3 and seed_dev <= 1e-4
    # same comparison from a seed scaled the way the reference table appears to be
    scaled = tuple(v * (1 - 1.6e-6) for v in PUMA_SEED)
    _, ours_s = _puma_poses_deg(sr, scaled)
    worst_s, bij_s = _table_match(ours_s, PUMA_POSES_DEG)
    note("3b", f"seed scaled by (1 - 1.6e-6): table deviation {worst_s:.2e} deg, one-to-one {bij_s}")
    assert report("3", ok, f"PUMA table as a set: worst deviation {worst:.3e} deg (tol 1e-3), "
                           f"one-to-one {bijective}; seed recovered within {seed_dev:.1e} deg (tol 1e-4)")


def test_criterion_4_puma_round_trip(solved):
    sr = solved("puma")
    rep, _ = _puma_poses_deg(sr, PUMA_SEED)
    res = rep.max_residual
    ok = len(rep.pose_sets) == 8 and res <= 1e-4
    assert report("4", ok, f"PUMA {len(rep.pose_sets)} poses through FK, max residual {res:.1e} (tol 1e-4)")


def test_criterion_5_chair_helper(solved):
    sr = solved("chair_helper")
    s = sr.solver_of()
    reports = fuzz(sr.robot, sr.poses, 100, seed=0, tol=1e-6)
    passed = sum(r.passed for r in reports)
    parts = {
        "FullySolved": sr.outcome.fully_solved,
        f"4 pose sets (got {len(sr.poses)})": len(sr.poses) == 4,
        "d_1 algebra": s.get("d_1") == "algebra",
        f"th_2 sine-or-cosine (got {s.get('th_2')})": s.get("th_2") == "sine_or_cosine",
        "th_3/th_4/th_5 tangent": all(s.get(v) == "tangent" for v in ("th_3", "th_4", "th_5")),
        f"fuzz {passed}/100": passed == 100,
    }
    detail = "; ".join(f"{k} {'ok' if v else 'NO'}" for k, v in parts.items())
    assert report("5", all(parts.values()), "Chair Helper: " + detail)


def test_criterion_6_olson13(solved):
    sr = solved("olson13")
    multi = {v.name: [p.name for p in ps] for v, ps in sr.graph.multi_parent_variables().items()}
    want = {v: ["th_3", "th_4"] for v in ("th_5", "d_1", "d_2")}
    reports = fuzz(sr.robot, sr.poses, 100, seed=0)
    passed = sum(r.passed for r in reports)
    ok = (sr.outcome.fully_solved and len(sr.poses) == 4 and multi == want
          and not sr.graph.is_tree and passed == 100)
    assert report("6", ok, f"Olson13 {sr.outcome.kind.value}, {len(sr.poses)} pose sets, "
                           f"multi-parent {multi}, fuzz {passed}/100")


def test_criterion_7_solver_oracles():
    cases = {
        "algebra": test_solvers.test_algebra_oracle,
        "sine or cosine (sin)": test_solvers.test_sin_oracle,
        "sine or cosine (cos)": test_solvers.test_cos_oracle,
        "tangent": test_solvers.test_tangent_known_factor_oracle,
        "sinANDcos": test_solvers.test_sin_and_cos_oracle,
        "simultaneous": test_solvers.test_simultaneous_oracle,
        "x2y2": test_solvers.test_x2y2_oracle,
    }
    failed = []
    for name, fn in cases.items():
        try:
            fn(np.random.default_rng(2024))
        except AssertionError:
            failed.append(name)
    assert report("7", not failed, f"{len(cases)} oracle runs x {test_solvers.N_INSTANCES} instances, "
                                   f"scan step {test_solvers.STEP}, match {test_solvers.MATCH}, "
                                   f"soundness {test_solvers.SOUND}; failed: {failed or 'none'}")


def test_criterion_8_expression_properties():
    table = {s.name: s for s in __import__("strategies").SYMS}
    counts = {"idempotence": 0, "eval/canonicalize": 0, "parse/print": 0}

    @settings(max_examples=500, database=None)
    @given(exprs)
    def idem(e):
        counts["idempotence"] += 1
        c = canonicalize(e)
        assert canonicalize(c) == c

    @settings(max_examples=500, database=None)
    @given(exprs, bindings)
    def commutes(e, b):
        counts["eval/canonicalize"] += 1
        try:
            v0, v1 = eval_numeric(e, b), eval_numeric(canonicalize(e), b)
        except DomainError:
            return
        assert abs(v0 - v1) <= 1e-10 * (1 + abs(v0))

    @settings(max_examples=500, database=None)
    @given(exprs)
    def round_trip(e):
        counts["parse/print"] += 1
        c = canonicalize(e)
        assert parse_expr(print_expr(c), table) == c

    failed = []
    for name, fn in (("idempotence", idem), ("eval/canonicalize", commutes), ("parse/print", round_trip)):
        try:
            fn()
        except AssertionError:
            failed.append(name)
    ok = not failed and all(n >= 500 for n in counts.values())
    assert report("8", ok, ", ".join(f"{k} {v} cases" for k, v in counts.items())
                  + f"; failed: {failed or 'none'}")


def _no_nan(sr, b):
    vals = [v for e in evaluate_poses(sr.program, b) for v in e.values.values()]
    ns = {}
    exec(emit(sr, EmitTarget.PYTHON), ns)
    code = [v for q, _ in ns["solve"](*[b[n] for n in sr.program.inputs]) for v in q]
    return all(math.isfinite(v) for v in vals + code)


def test_criterion_9_reachability(solved):
    sr = solved("planar2r")
    r = sr.robot
    reach = r.constants["l_1"] + r.constants["l_2"]
    b = {**r.constants, **pose_bindings(np.eye(4))}
    b["Px"] = reach + 1.0
    flags = check_reachability(sr.poses, b)
    flagged_2r = all(f for f in flags)
    nan_free = _no_nan(sr, b)

    puma = solved("puma")
    pb = {**puma.robot.constants,
          **pose_bindings(numeric_fk(puma.robot, {**puma.robot.constants,
                                                  **{f"th_{i + 1}": math.radians(v) for i, v in enumerate(PUMA_SEED)}}))}
    pb.update(Px=20.0, Py=5.0, Pz=3.0)
    pflags = check_reachability(puma.poses, pb)
    kinds = sorted({x.kind.name for f in pflags if f for x in f})
    note("9b", f"PUMA point beyond reach: {sum(bool(f) for f in pflags)}/{len(pflags)} pose sets flagged "
               f"{kinds}, NaN-free {_no_nan(puma, pb)}")

    scans = {}
    for name in ("puma", "chair_helper", "olson13"):
        for t in (EmitTarget.PYTHON, EmitTarget.CPP):
            sites, guards = guard_scan(emit(solved(name), t), t)
            scans[f"{name}/{t.value}"] = guards >= sites > 0
    ok = flagged_2r and nan_free and all(scans.values())
    assert report("9", ok, f"2R target {reach + 1.0:g} from base: {sum(bool(f) for f in flags)}/{len(flags)} "
                           f"pose sets flagged (expected all), NaN-free {nan_free}; guard scan "
                           f"{sum(scans.values())}/{len(scans)} pass")


def test_criterion_10_substitute_suite():
    failed = []
    for fn in (test_solgraph.test_enumeration_matches_brute_force, test_solgraph.test_pruned_edges_are_implied):
        try:
            fn()
        except AssertionError:
            failed.append(fn.__name__)
    assert report("10", not failed, "success-rate table over a robot corpus not reproducible (three DH tables "
                                    "available); substitute: pose-set enumeration equals brute force on random "
                                    f"graphs (<=4 vars, <=3 branches), pruning sound; failed: {failed or 'none'}")
