"""Acceptance criteria 1-9, one test each, with a PASS/FAIL line per criterion."""
import time

import numpy as np
import pytest

from canodual.bundled import load_example, random_problem
from canodual.canonical import Region, gmat
from canodual.dual_solver import DualClass, find_critical_points
from canodual.linalg import DefClass, definiteness, inverse_order_check, lemma4_check, schur_psd_check
from canodual.oracle import cross_validate, fd_errors, grid_scan
from canodual.perturbation import perturb_and_solve
from canodual.problem import SolverConfig, normalize_beta
from canodual.report import solve
from canodual.triality import VerdictKind, build_subspace_P, classify_pair, make_pair
from helpers import order_instance, schur_instance, bordered_instance

SQ2 = np.sqrt(2.0)
NONDEG = 1e-7  # relative eigenvalue margin separating nondegenerate pairs


def _timed_solve(p):
    t = time.perf_counter()
    rep = solve(p)
    return rep, time.perf_counter() - t


def _close(a, b, tol):
    return bool(np.max(np.abs(np.asarray(a, dtype=float) - np.asarray(b, dtype=float))) <= tol)


def _find(pairs, sigma, tol=1e-6):
    hits = [r for r in pairs if _close(r.sigma, sigma, tol)]
    return hits[0] if len(hits) == 1 else None


def _lean(p):
    # property suites only need the points found, not completeness
    return SolverConfig.for_problem(p, multistart_count=16 * p.m)


def test_criterion_1_example1(acceptance):
    rep, dt = _timed_solve(load_example(1))
    expected = {
        (1 + SQ2, 3.35991198): ("GlobalMin", -14.0421),
        (1.5, 2.59827880): ("LocalMin", -4.3050),
        (1 - SQ2, -0.45819078): ("LocalMax", 0.5971),
        (1 - SQ2, 2.59827880): ("SaddleDual", None),
        (1.5, -0.45819078): ("SaddleDual", None),
    }
    ok = len(rep.pairs) == 5 and dt < 1.0
    for sigma, (kind, value) in expected.items():
        r = _find(rep.pairs, sigma)
        ok &= r is not None and r.kind == kind
        if ok and value is not None:
            ok &= abs(r.primal_value - value) <= 1e-3
    g = rep.global_min
    ok &= g is not None and _close(g.x, [2.41421356, 2.77845711], 1e-6)
    acceptance(1, ok, f"{len(rep.pairs)} dual critical points, Pi(x1) = {g.primal_value:.4f}, {dt:.2f} s")


def test_criterion_2_example2(acceptance):
    rep, dt = _timed_solve(load_example(2))
    expected = [
        (0.90489505, [1.27678581, 2.86000142], "GlobalMin"),
        (-0.12552589, [-2.76475703, -0.32414004], "WeakDoubleMinPrimalRestricted"),
        (-3.974788888, [-0.21557976, -0.06283003], "LocalMax"),
    ]
    ok = len(rep.pairs) == 3 and dt < 1.0
    for sigma, x, kind in expected:
        r = _find(rep.pairs, [sigma])
        ok &= r is not None and r.kind == kind and _close(r.x, x, 1e-6)
    weak = _find(rep.pairs, [-0.12552589])
    ok &= weak is not None and weak.certificate["valid"] and weak.primal_inertia[0] and weak.primal_inertia[2]
    acceptance(2, ok, f"verdicts {[r.kind for r in rep.pairs]}, {dt:.2f} s")


def test_criterion_3_example3(acceptance):
    rep, dt = _timed_solve(load_example(3))
    expected = [
        ([-0.35012607, 3.48303916], "GlobalMin", 4.20307342),
        ([-2.98705125, -2.66978626], "LocalMax", -0.29381114),
        ([-0.70765026, 2.64881606], "WeakDoubleMinDualRestricted", None),
    ]
    ok = len(rep.pairs) == 3 and dt < 1.0
    for sigma, kind, x in expected:
        r = _find(rep.pairs, sigma)
        ok &= r is not None and r.kind == kind and (x is None or _close(r.x, [x], 1e-6))
    q = _find(rep.pairs, [-0.70765026, 2.64881606])
    ok &= q is not None and q.certificate["side"] == "dual" and q.certificate["valid"]
    ok &= q is not None and q.dual_class == DualClass.SADDLE.value
    acceptance(3, ok, f"verdicts {[r.kind for r in rep.pairs]}, {dt:.2f} s")


def test_criterion_4_example4(acceptance):
    p = load_example(4)
    rep, dt = _timed_solve(p)
    ok = rep.degenerate and len(rep.pairs) == 1 and dt < 1.0
    only = rep.pairs[0]
    ok &= _close(only.sigma, [-0.5, -0.5], 1e-6) and _close(only.x, [0, 0], 1e-9) and only.kind == "LocalMax"
    t = time.perf_counter()
    up = perturb_and_solve(p, [0.001, 0.005])
    down = perturb_and_solve(p, [0.001, -0.005])
    dt2 = (time.perf_counter() - t) / 2
    g, h = up.global_min, down.global_min
    ok &= g is not None and h is not None and dt2 < 1.0
    ok &= _close(g.sigma, [0.00299107, 0.00199602], 1e-6) and abs(g.dual_value + 0.00500648) <= 1e-6
    ok &= _close(g.x, [0.000495793, 1.00249], 1e-5) and _close(h.x, [0.000496288, -1.00249], 1e-5)
    acceptance(4, ok, f"degenerate={rep.degenerate}, perturbed x = {np.round(g.x, 6).tolist()} / "
                      f"{np.round(h.x, 6).tolist()}, {max(dt, dt2):.2f} s")


def test_criterion_5_gap(acceptance):
    rng = np.random.default_rng(2024)
    problems = [(load_example(i), None) for i in (1, 2, 3, 4)]
    for _ in range(100):
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        p = random_problem(rng, n, m, beta=bool(rng.random() < 0.3))
        problems.append((p, _lean(normalize_beta(p))))
    checked, worst = 0, 0.0
    for p, cfg in problems:
        q = normalize_beta(p)
        cfg = cfg if cfg is not None else SolverConfig.for_problem(q)
        for dcp in find_critical_points(q, cfg, include_outside=True):
            pair = make_pair(q, dcp, cfg.definiteness_tol)
            worst = max(worst, pair.gap_residual / (1.0 + abs(pair.primal.value)))
            checked += 1
    acceptance(5, worst <= 1e-8 and checked > 100,
               f"{checked} pairs on 104 problems, max relative gap {worst:.2e} (limit 1e-8)")


def test_criterion_6_hessians(acceptance):
    rng = np.random.default_rng(6)
    worst, done = 0.0, 0
    while done < 100:
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        p = random_problem(rng, n, m, definite_B=bool(rng.random() < 0.5))
        x = rng.normal(size=n)
        sigma = rng.normal(size=m) * 2.0
        w = np.abs(np.linalg.eigvalsh(gmat(p, sigma)))
        if w.min() < 1e-2 * (1.0 + w.max()):
            continue  # too close to a pole for a fair difference quotient
        worst = max(worst, *fd_errors(p, x, "primal"), *fd_errors(p, sigma, "dual"))
        done += 1
    acceptance(6, worst <= 1e-5, f"100 instances, max relative FD error {worst:.2e} (limit 1e-5)")


def test_criterion_7_matrix_equivalences(acceptance):
    rng = np.random.default_rng(7)
    bad = [0, 0, 0]
    held = [0, 0, 0]
    for _ in range(1000):
        lhs, rhs = inverse_order_check(*order_instance(rng))
        bad[0] += lhs != rhs
        held[0] += lhs
        direct, via = schur_psd_check(*schur_instance(rng))
        bad[1] += direct != via
        held[1] += direct
        lhs, rhs = lemma4_check(*bordered_instance(rng))
        bad[2] += lhs != rhs
        held[2] += lhs
    acceptance(7, sum(bad) == 0,
               f"3 x 1000 instances, disagreements {bad}, instances where the property holds {held}")


def _nondeg(pair):
    pd = definiteness(pair.primal.hess, NONDEG)
    dd = definiteness(pair.dual.hess, NONDEG)
    return pd, dd, not (pd.inertia[1] or dd.inertia[1] or pair.diagnostics)


def test_criterion_8_triality(acceptance):
    rng = np.random.default_rng(8)
    square = weak_max = weak_min = 0
    failures = []
    for i in range(100):
        n = int(rng.integers(1, 5))
        p = random_problem(rng, n, n)
        cfg = _lean(p)
        for dcp in find_critical_points(p, cfg):
            if dcp.region is not Region.SA_MINUS:
                continue
            pair = make_pair(p, dcp, cfg.definiteness_tol)
            pd, dd, good = _nondeg(pair)
            if not good:
                continue
            square += 1
            if (pd.cls is DefClass.POS_DEF) != (dd.cls is DefClass.POS_DEF) or \
                    (pd.cls is DefClass.NEG_DEF) != (dd.cls is DefClass.NEG_DEF):
                failures.append(f"n=m={n} instance {i}: primal {pd.cls.value}, dual {dd.cls.value}")
    done = 0
    while done < 100:
        n, m = int(rng.integers(1, 5)), int(rng.integers(1, 5))
        if n == m:
            continue
        done += 1
        p = random_problem(rng, n, m, shift=2.0 * (done % 2))
        cfg = _lean(p)
        for dcp in find_critical_points(p, cfg):
            if dcp.region is not Region.SA_MINUS:
                continue
            pair = make_pair(p, dcp, cfg.definiteness_tol)
            pd, dd, good = _nondeg(pair)
            if not good:
                continue
            if dd.cls is DefClass.NEG_DEF:
                weak_max += 1
                if not pd.nsd:
                    failures.append(f"n={n} m={m}: dual max but primal {pd.cls.value}")
            if dd.cls is DefClass.POS_DEF and m < n:
                weak_min += 1
                cert = build_subspace_P(pair, cfg.definiteness_tol)
                v = classify_pair(pair, cfg, p)
                if pd.cls is not DefClass.INDEFINITE or not cert.valid or v.kind is not VerdictKind.WEAK_PRIMAL:
                    failures.append(f"n={n} m={m}: dual min, primal {pd.cls.value}, P valid={cert.valid}")
    ok = not failures and square > 0 and weak_max > 0 and weak_min > 0
    acceptance(8, ok, f"{square} square S- pairs, {weak_max} double-max and {weak_min} weak double-min "
                      f"pairs (m != n), failures {failures[:3]}")


def test_criterion_9_oracle(acceptance):
    problems = {f"example{i}": load_example(i) for i in (1, 2, 3, 4)}
    reports = {k: solve(p) for k, p in problems.items()}
    mism = {k: len(cross_validate(reports[k], p)["mismatches"]) for k, p in problems.items()}
    grid_gap = []
    p4 = load_example(4)
    n2 = [(problems["example1"], reports["example1"]), (problems["example2"], reports["example2"]),
          (p4.with_f(p4.f + np.array([0.001, 0.005])), perturb_and_solve(p4, [0.001, 0.005]))]
    for p, rep in n2:
        g = rep.global_min
        box = np.tile([-4.0, 4.0], (2, 1))
        scan = grid_scan(p, box, 200)
        grid_gap.append(scan.value - g.primal_value)
    ok = all(v == 0 for v in mism.values()) and min(grid_gap) >= -1e-6
    acceptance(9, ok, f"mismatches {mism}, min(grid best - GlobalMin) over n = 2 problems "
                      f"{min(grid_gap):.3g} (limit -1e-6)")
