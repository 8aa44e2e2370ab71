"""Schema comparison: per-step error counts and node/arc precision-recall.

A candidate refinement is scored against each feasible ground truth and
the closest (minimum-total) report is returned, so a legitimate design
choice (say, descriptive vs discretized) is never penalized as long as
one alternative made the same call.

Error categories map one-to-one to the refinement steps, plus a Structure
bucket for graph breakage (missing/extra arcs, fake suffix nodes).
"""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import DfmSchema, split_additivity_suffix


class NameNorm(enum.Enum):
    EXACT = "exact"
    CASE_INSENSITIVE_ALNUM = "case-insensitive-alnum"


class Category(enum.Enum):
    RENAMING = "Renaming"
    ADDITIVITY = "Additivity"
    DESCRIPTIVE_OR_DISCRETIZED = "DescriptiveOrDiscretized"
    OPTIONAL = "Optional"
    TIME_HIERARCHY = "TimeHierarchy"
    REMOVAL = "Removal"
    STRUCTURE = "Structure"


@dataclass(frozen=True)
class MatchConfig:
    name_normalization: NameNorm = NameNorm.CASE_INSENSITIVE_ALNUM
    weights: dict[Category, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for w in self.weights.values():
            if w < 0:
                raise ValueError("category weights must be >= 0")

    def weight(self, category: Category) -> float:
        return self.weights.get(category, 1.0)

    def normalize(self, name: str) -> str:
        if self.name_normalization is NameNorm.EXACT:
            return name
        return "".join(ch for ch in name.lower() if ch.isalnum())


class EmptyGroundTruthError(Exception):
    pass


@dataclass(frozen=True)
class GroundTruthSet:
    alternatives: tuple[DfmSchema, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "alternatives", tuple(self.alternatives))
        if not self.alternatives:
            raise EmptyGroundTruthError("at least one ground-truth schema is required")


@dataclass(frozen=True)
class Discrepancy:
    category: Category
    expected: str
    found: str


@dataclass(frozen=True)
class DiffReport:
    errors_by_category: dict[Category, int]
    node_precision: float
    node_recall: float
    arc_precision: float
    arc_recall: float
    detail: tuple[Discrepancy, ...] = ()
    # scoring notes: a wrong shared-hierarchy merge counts once per wrong arc
    metadata: dict[str, str] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return sum(self.errors_by_category.values())

    def weighted_total(self, cfg: MatchConfig) -> float:
        return sum(cfg.weight(c) * n for c, n in self.errors_by_category.items())

    def to_dict(self) -> dict:
        return {
            "errors_by_category": {c.value: self.errors_by_category.get(c, 0) for c in Category},
            "total": self.total,
            "node_precision": self.node_precision,
            "node_recall": self.node_recall,
            "arc_precision": self.arc_precision,
            "arc_recall": self.arc_recall,
            "detail": [
                {"category": d.category.value, "expected": d.expected, "found": d.found}
                for d in self.detail
            ],
            "metadata": dict(self.metadata),
        }


def _node_kind(schema: DfmSchema, node: str) -> str:
    if node == schema.fact:
        return "fact"
    if node in schema.measure_names:
        return "measure"
    return "attribute"


def _node_set(schema: DfmSchema) -> list[str]:
    return sorted({schema.fact} | set(schema.measure_names) | set(schema.attributes))


def _arc_identity(schema: DfmSchema) -> set[tuple[str, str, Optional[str]]]:
    """Arcs in node-identity space: measure endpoints collapse to their
    base name so an additivity relabel does not perturb arc comparison."""
    rendered_to_base = {m.rendered_name: m.name for m in schema.measures}
    out = set()
    for d in schema.dependencies:
        out.add(
            (
                rendered_to_base.get(d.source, d.source),
                rendered_to_base.get(d.target, d.target),
                d.role,
            )
        )
    return out


def match_nodes(
    candidate: DfmSchema, truth: DfmSchema, cfg: MatchConfig = MatchConfig()
) -> dict[str, str]:
    """Greedy partial mapping candidate node -> truth node: exact
    normalized-name equality first, then unique substring containment.
    Deterministic: ties break lexicographically."""
    cand = _node_set(candidate)
    tru = _node_set(truth)
    mapping: dict[str, str] = {}
    used: set[str] = set()

    by_norm: dict[str, list[str]] = {}
    for t in tru:
        by_norm.setdefault(cfg.normalize(t), []).append(t)
    for c in cand:
        pool = [t for t in by_norm.get(cfg.normalize(c), []) if t not in used]
        if pool:
            mapping[c] = pool[0]
            used.add(pool[0])

    for c in cand:
        if c in mapping:
            continue
        nc = cfg.normalize(c)
        hits = [
            t
            for t in tru
            if t not in used
            and nc
            and cfg.normalize(t)
            and (nc in cfg.normalize(t) or cfg.normalize(t) in nc)
        ]
        if len(hits) == 1:
            mapping[c] = hits[0]
            used.add(hits[0])
    return mapping


def _looks_time_node(cfg: MatchConfig, name: str) -> bool:
    n = cfg.normalize(name) if cfg.name_normalization is not NameNorm.EXACT else name.lower()
    return n.endswith("month") or n.endswith("year") or n in ("month", "year")


def _is_fake_suffix_node(schema: DfmSchema, other: DfmSchema, node: str) -> bool:
    bases = set(schema.measure_names) | set(other.measure_names)
    stripped, _ = split_additivity_suffix(node)
    return node in bases or (stripped != node and stripped in bases)


def diff_one(
    candidate: DfmSchema, truth: DfmSchema, cfg: MatchConfig = MatchConfig()
) -> DiffReport:
    """Score the candidate against a single ground truth."""
    mapping = match_nodes(candidate, truth, cfg)
    return _score(candidate, truth, mapping, cfg)


def _score(
    candidate: DfmSchema,
    truth: DfmSchema,
    mapping: dict[str, str],
    cfg: MatchConfig,
) -> DiffReport:
    counts = {c: 0 for c in Category}
    detail: list[Discrepancy] = []

    def hit(category: Category, expected: str, found: str) -> None:
        counts[category] += 1
        detail.append(Discrepancy(category, expected, found))

    cand_nodes = _node_set(candidate)
    truth_nodes = _node_set(truth)
    matched_truth = set(mapping.values())

    for c, t in sorted(mapping.items()):
        ck, tk = _node_kind(candidate, c), _node_kind(truth, t)
        if ck != tk:
            hit(Category.ADDITIVITY, f"{tk} {t}", f"{ck} {c}")
            continue
        if ck == "measure":
            cm, tm = candidate.measure(c), truth.measure(t)
            if cm and tm and cm.additivity is not tm.additivity:
                hit(Category.ADDITIVITY, tm.rendered_name, cm.rendered_name)
        if cfg.normalize(c) != cfg.normalize(t):
            hit(Category.RENAMING, t, c)
        if ck == "attribute":
            if (c in candidate.descriptive) != (t in truth.descriptive):
                hit(
                    Category.DESCRIPTIVE_OR_DISCRETIZED,
                    f"{t} descriptive={t in truth.descriptive}",
                    f"{c} descriptive={c in candidate.descriptive}",
                )
            if (c in candidate.optional) != (t in truth.optional):
                hit(
                    Category.OPTIONAL,
                    f"{t} optional={t in truth.optional}",
                    f"{c} optional={c in candidate.optional}",
                )

    for c in cand_nodes:
        if c in mapping:
            continue
        if _is_fake_suffix_node(candidate, truth, c):
            hit(Category.STRUCTURE, "(no counterpart)", f"fake node {c}")
        elif _looks_time_node(cfg, c):
            hit(Category.TIME_HIERARCHY, "(absent)", c)
        else:
            hit(Category.REMOVAL, "(removed)", c)
    for t in truth_nodes:
        if t in matched_truth:
            continue
        if _looks_time_node(cfg, t):
            hit(Category.TIME_HIERARCHY, t, "(missing)")
        else:
            hit(Category.REMOVAL, t, "(missing)")

    # arcs between matched nodes, projected into truth's node space
    cand_arcs = _arc_identity(candidate)
    truth_arcs = _arc_identity(truth)
    projected = {
        (mapping[s], mapping[t], r)
        for (s, t, r) in cand_arcs
        if s in mapping and t in mapping
    }
    truth_scoped = {
        (s, t, r) for (s, t, r) in truth_arcs if s in matched_truth and t in matched_truth
    }
    proj_pairs = {(s, t) for (s, t, _r) in projected}
    truth_pairs = {(s, t) for (s, t, _r) in truth_scoped}
    for s, t in sorted(proj_pairs - truth_pairs):
        hit(Category.STRUCTURE, "(no such arc)", f"{s} -> {t}")
    for s, t in sorted(truth_pairs - proj_pairs):
        hit(Category.STRUCTURE, f"{s} -> {t}", "(missing arc)")
    for s, t in sorted(proj_pairs & truth_pairs):
        roles_c = {r for (ss, tt, r) in projected if (ss, tt) == (s, t)}
        roles_t = {r for (ss, tt, r) in truth_scoped if (ss, tt) == (s, t)}
        if roles_c != roles_t:
            hit(
                Category.STRUCTURE,
                f"{s} -> {t} roles {sorted(map(str, roles_t))}",
                f"roles {sorted(map(str, roles_c))}",
            )

    node_matched = len(mapping)
    node_precision = node_matched / len(cand_nodes) if cand_nodes else 1.0
    node_recall = node_matched / len(truth_nodes) if truth_nodes else 1.0
    arc_matched = len(proj_pairs & truth_pairs)
    all_cand_pairs = {(s, t) for (s, t, _r) in cand_arcs}
    all_truth_pairs = {(s, t) for (s, t, _r) in truth_arcs}
    arc_precision = arc_matched / len(all_cand_pairs) if all_cand_pairs else 1.0
    arc_recall = arc_matched / len(all_truth_pairs) if all_truth_pairs else 1.0

    return DiffReport(
        errors_by_category=counts,
        node_precision=node_precision,
        node_recall=node_recall,
        arc_precision=arc_precision,
        arc_recall=arc_recall,
        detail=tuple(detail),
        metadata={"shared_hierarchy_error_unit": "per wrong arc"},
    )


def diff(
    candidate: DfmSchema,
    truth: GroundTruthSet | Sequence[DfmSchema],
    cfg: MatchConfig = MatchConfig(),
) -> DiffReport:
    """Score against every feasible refinement and keep the closest."""
    if not isinstance(truth, GroundTruthSet):
        truth = GroundTruthSet(tuple(truth))
    best: Optional[DiffReport] = None
    for alt in truth.alternatives:
        report = diff_one(candidate, alt, cfg)
        if best is None or report.weighted_total(cfg) < best.weighted_total(cfg):
            best = report
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# exhaustive matcher: the small-schema oracle for the greedy matcher


def _eligible(cfg: MatchConfig, c: str, t: str) -> bool:
    nc, nt = cfg.normalize(c), cfg.normalize(t)
    return bool(nc and nt) and (nc == nt or nc in nt or nt in nc)


def diff_exhaustive(
    candidate: DfmSchema, truth: DfmSchema, cfg: MatchConfig = MatchConfig()
) -> DiffReport:
    """Try every maximal assignment over the name-eligibility graph and
    return the minimum-total report. Exponential; intended for schemata of
    up to a dozen nodes as a test oracle for the greedy matcher."""
    cand = _node_set(candidate)
    tru = _node_set(truth)
    eligible = {c: [t for t in tru if _eligible(cfg, c, t)] for c in cand}

    best: Optional[DiffReport] = None

    def assign(i: int, mapping: dict[str, str], used: set[str]) -> None:
        nonlocal best
        if i == len(cand):
            report = _score(candidate, truth, dict(mapping), cfg)
            if best is None or report.weighted_total(cfg) < best.weighted_total(cfg):
                best = report
            return
        c = cand[i]
        for t in eligible[c]:
            if t in used:
                continue
            mapping[c] = t
            used.add(t)
            assign(i + 1, mapping, used)
            del mapping[c]
            used.remove(t)
        assign(i + 1, mapping, used)

    assign(0, {}, set())
    assert best is not None
    return best


# ---------------------------------------------------------------------------
# report rendering


def report_render(report: DiffReport, format: str = "text") -> str:
    if format == "text":
        lines = [f"total: {report.total}"]
        for c in Category:
            lines.append(f"  {c.value}: {report.errors_by_category.get(c, 0)}")
        lines.append(
            "nodes: precision {:.3f} recall {:.3f}".format(
                report.node_precision, report.node_recall
            )
        )
        lines.append(
            "arcs: precision {:.3f} recall {:.3f}".format(
                report.arc_precision, report.arc_recall
            )
        )
        for d in report.detail:
            lines.append(f"  [{d.category.value}] expected {d.expected}; found {d.found}")
        return "\n".join(lines) + "\n"
    if format == "json":
        return json.dumps(report.to_dict(), indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["category", "errors"])
        for c in Category:
            writer.writerow([c.value, report.errors_by_category.get(c, 0)])
        writer.writerow(["total", report.total])
        return buf.getvalue()
    raise ValueError(f"unknown report format {format!r}")
