"""Solve pipeline and the structured report it produces.

A report is plain data: every field serializes to the same YAML family as
problem files (17 significant digits), and ``Report.from_dict`` restores an
equal value.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

from .canonical import Region
from .dual_solver import SearchStats, find_critical_points
from .errors import DegenerateInput, InfeasibleDual, ParseError
from .problem import (QuarticProblem, SolverConfig, dump_yaml, normalize_beta, problem_digest,
                      problem_from_dict, problem_to_dict)
from .triality import CriticalPair, TrialityVerdict, VerdictKind, classify_pair, make_pair

REPORT_VERSION = 1


def _f(v) -> float:
    return float(v)


def _vec(v) -> list:
    return [float(a) for a in np.ravel(v)]


@dataclass
class PairRecord:
    """Flattened (CriticalPair, TrialityVerdict) for reporting."""

    x: list
    sigma: list
    region: str
    primal_value: float
    dual_value: float
    gap_residual: float
    primal_inertia: list
    dual_inertia: list
    dual_class: str
    kind: str
    branch: str
    certificate: dict | None = None
    probe: dict | None = None
    notes: list = field(default_factory=list)
    rank_label: str = ""

    @classmethod
    def from_pair(cls, pair: CriticalPair, verdict: TrialityVerdict | None, tol: float) -> "PairRecord":
        from .linalg import definiteness

        cert = probe = None
        notes = list(pair.diagnostics)
        kind, branch = "Unclassified", "Excluded"
        if verdict is not None:
            kind, branch = verdict.kind.value, verdict.theorem_branch.value
            notes.extend(verdict.notes)
            if verdict.certificate is not None:
                c = verdict.certificate
                cert = {
                    "side": c.side,
                    "basis": np.asarray(c.basis, dtype=float).tolist(),
                    "rank": int(c.rank),
                    "restricted_hessian_eigs": _vec(c.restricted_hessian_eigs),
                    "valid": bool(c.valid),
                }
            if verdict.probe is not None:
                pr = verdict.probe
                probe = {"radius": _f(pr.radius), "samples": int(pr.samples), "min_delta": _f(pr.min_delta),
                         "passed": bool(pr.passed)}
        return cls(
            x=_vec(pair.x), sigma=_vec(pair.sigma), region=pair.dual.region.value,
            primal_value=_f(pair.primal.value), dual_value=_f(pair.dual.value),
            gap_residual=_f(pair.gap_residual),
            primal_inertia=list(definiteness(pair.primal.hess, tol).inertia),
            dual_inertia=list(definiteness(pair.dual.hess, tol).inertia),
            dual_class=pair.dual_class.value, kind=kind, branch=branch,
            certificate=cert, probe=probe, notes=notes,
        )

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}

    @classmethod
    def from_dict(cls, doc: dict) -> "PairRecord":
        return cls(**doc)


@dataclass
class Report:
    problem_digest: str
    problem: QuarticProblem
    pairs: list  # PairRecord, ascending primal value
    excluded: list  # PairRecord for dual critical points with indefinite G
    diagnostics: dict
    config_echo: dict
    oracle_summary: dict | None = None
    perturbation: dict | None = None
    degenerate: bool = False

    @property
    def global_min(self) -> PairRecord | None:
        return next((r for r in self.pairs if r.kind == VerdictKind.GLOBAL_MIN.value), None)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "problem_digest": self.problem_digest,
            "problem": problem_to_dict(self.problem),
            "degenerate": bool(self.degenerate),
            "perturbation": self.perturbation,
            "pairs": [r.to_dict() for r in self.pairs],
            "excluded": [r.to_dict() for r in self.excluded],
            "diagnostics": self.diagnostics,
            "oracle_summary": self.oracle_summary,
            "config": self.config_echo,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        try:
            return cls(
                problem_digest=doc["problem_digest"],
                problem=problem_from_dict(doc["problem"]),
                pairs=[PairRecord.from_dict(r) for r in doc["pairs"]],
                excluded=[PairRecord.from_dict(r) for r in doc["excluded"]],
                diagnostics=doc["diagnostics"],
                config_echo=doc["config"],
                oracle_summary=doc.get("oracle_summary"),
                perturbation=doc.get("perturbation"),
                degenerate=bool(doc.get("degenerate", False)),
            )
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed report: {exc}") from None

    def to_yaml(self) -> str:
        return dump_yaml(self.to_dict(), header="canodual report")

    @classmethod
    def from_yaml(cls, text: str) -> "Report":
        return cls.from_dict(yaml.safe_load(text))

    def __eq__(self, other):
        if not isinstance(other, Report):
            return NotImplemented
        return self.to_yaml() == other.to_yaml()

    def to_text(self) -> str:
        lines = [f"problem {self.problem_digest[:16]}  n={self.problem.n} m={self.problem.m}"]
        if self.perturbation:
            lines.append(f"perturbed: f_pert = {self.perturbation['f_pert']} "
                         f"(|f_pert|_inf = {self.perturbation['norm_inf']:.3g})")
        lines.append(f"{len(self.pairs)} dual critical point(s) in S+ / S- / boundary, "
                     f"{len(self.excluded)} with indefinite G")
        for i, r in enumerate(self.pairs, 1):
            label = f" [{r.rank_label}]" if r.rank_label else ""
            lines.append(f"{i:3d}. {r.kind:<31s} Pi = {r.primal_value: .10g}  region {r.region}{label}")
            lines.append(f"     x = {_fmt(r.x)}  sigma = {_fmt(r.sigma)}")
            if r.certificate:
                c = r.certificate
                lines.append(f"     certificate {c['side']}: rank {c['rank']}, restricted eigs "
                             f"{_fmt(c['restricted_hessian_eigs'])}, valid={c['valid']}")
            for note in r.notes:
                lines.append(f"     note: {note}")
        for r in self.excluded:
            lines.append(f"  -  excluded sigma = {_fmt(r.sigma)}  Pi = {r.primal_value: .10g}")
        if self.degenerate:
            lines.append("degenerate: no dual critical point with G(sigma) >= 0; try --perturb")
        d = self.diagnostics
        lines.append(f"seeds {d['seeds_used']} (skipped {d['seeds_skipped']}), newton failures "
                     f"{d['newton_failures']}, dedup merges {d['dedup_merges']}")
        if self.oracle_summary is not None:
            s = self.oracle_summary
            lines.append(f"oracle: {s['oracle_minimizers']} local minimizer(s), grid best "
                         f"{_num(s.get('grid_best'))}, mismatches {len(s['mismatches'])}")
            for mm in s["mismatches"]:
                lines.append(f"  mismatch [{mm['check']}]: {mm['detail']}")
        return "\n".join(lines) + "\n"


def _fmt(v) -> str:
    return "(" + ", ".join(f"{a:.10g}" for a in v) + ")"


def _num(v) -> str:
    return "n/a" if v is None else f"{v:.10g}"


def _rank_labels(records: list) -> None:
    mins = [r for r in records if r.kind in (VerdictKind.LOCAL_MIN.value, VerdictKind.GLOBAL_MIN.value)]
    maxs = [r for r in records if r.kind == VerdictKind.LOCAL_MAX.value]
    local_mins = [r for r in mins if r.kind == VerdictKind.LOCAL_MIN.value]
    if local_mins:
        max(local_mins, key=lambda r: r.primal_value).rank_label = "largest local min found"
    if maxs:
        max(maxs, key=lambda r: r.primal_value).rank_label = "largest local max found"


def solve(p: QuarticProblem, cfg: SolverConfig | None = None) -> Report:
    """Dual critical points, recovered primal points and triality verdicts."""
    original = p
    p = normalize_beta(p)
    cfg = cfg if cfg is not None else SolverConfig.for_problem(p)
    stats = SearchStats()
    points = find_critical_points(p, cfg, include_outside=True, stats=stats)
    pairs, excluded, infeasible = [], [], 0
    tol = cfg.definiteness_tol
    for dcp in points:
        try:
            pair = make_pair(p, dcp, tol)
        except InfeasibleDual:
            infeasible += 1
            continue
        if dcp.region is Region.OUTSIDE:
            excluded.append(PairRecord.from_pair(pair, None, tol))
            continue
        try:
            verdict = classify_pair(pair, cfg, p)
            rec = PairRecord.from_pair(pair, verdict, tol)
        except DegenerateInput as exc:
            rec = PairRecord.from_pair(pair, None, tol)
            rec.notes.append(f"degenerate: {exc}")
        pairs.append(rec)
    key = lambda r: (r.primal_value, r.sigma)  # noqa: E731
    pairs.sort(key=key)
    excluded.sort(key=key)
    _rank_labels(pairs)
    diagnostics = stats.to_dict()
    diagnostics["infeasible_points"] = infeasible
    report = Report(problem_digest(original), original, pairs, excluded, diagnostics, cfg.to_dict())
    report.degenerate = detect_degeneracy(report)
    return report


def detect_degeneracy(report: Report) -> bool:
    """True when no reported pair has G(sigma) positive (semi)definite."""
    return not any(r.region == Region.SA_PLUS.value or r.kind == VerdictKind.GLOBAL_MIN.value
                   for r in report.pairs)
