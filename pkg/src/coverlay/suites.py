"""Cross-check suites over generated corpora, with deterministic reports.

Each suite runs one equivalence or construction over a built-in corpus
plus a seeded batch of random instances; the same seed reproduces the same
corpus across suites.  Canonical reports are JSON with sorted keys and no
timing data, so reruns with one seed are byte-identical; wall-clock
timings appear only in the human-readable rendering.  Malformed corpus
entries are reported per entry and never abort a suite.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass
from fractions import Fraction

from . import generators as gen
from .actions import deck_group, is_overlay_action, is_regular
from .chains import check_unique_lifting, find_irregular_loop
from .errors import InputError
from .group_covers import coset_overlay_structure, lift_group_structure
from .groups import (FiniteGroup, find_isomorphism, inverse_set, is_normal,
                     product_set, quotient_group, subgroups)
from .instances import Instance
from .metrics import chain_metric, check_local_isometry, remetrize_base
from .nerve import induced_map, is_simplicial_covering, verify_pullback
from .overlay import OVERLAY_METHODS, is_overlay_structure
from .spaces import chain_components, is_covering_structure


@dataclass
class SuiteEntry:
    instance: str
    status: str  # ok | violation | error | skipped
    detail: str
    record: dict
    seconds: float


@dataclass
class SuiteReport:
    suite: str
    seed: int
    count: int
    entries: list

    @property
    def violations(self) -> list:
        return [e for e in self.entries if e.status == "violation"]

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> str:
        doc = {
            "suite": self.suite,
            "seed": self.seed,
            "count": self.count,
            "ok": self.ok,
            "summary": {
                "total": len(self.entries),
                "ok": sum(e.status == "ok" for e in self.entries),
                "violations": len(self.violations),
                "errors": sum(e.status == "error" for e in self.entries),
                "skipped": sum(e.status == "skipped" for e in self.entries),
            },
            "violations": [e.instance for e in self.violations],
            "entries": [{
                "instance": e.instance,
                "status": e.status,
                "detail": e.detail,
                "record": _jsonable(e.record),
            } for e in self.entries],
        }
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"

    def human(self) -> str:
        lines = [f"suite {self.suite} (seed={self.seed}, count={self.count})"]
        for e in self.entries:
            lines.append(f"  [{e.status:9s}] {e.instance} ({e.seconds * 1000:.1f} ms)"
                         + (f" -- {e.detail}" if e.detail else ""))
        total = sum(e.seconds for e in self.entries)
        lines.append(f"  {'PASS' if self.ok else 'FAIL'}: "
                     f"{len(self.entries)} entries, {len(self.violations)} violations, "
                     f"{total:.2f} s")
        return "\n".join(lines) + "\n"


def _jsonable(value):
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, (frozenset, set)):
        return sorted(_jsonable(v) for v in value)
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    return value


def _structured(inst: Instance):
    p = inst.maps[inst.manifest["map"]]
    if p.structure is None:
        raise InputError(f"{inst.name}: map carries no structure")
    return p


# ---------------------------------------------------------------- corpora

def _random_corpus(seed: int, count: int) -> list:
    rng = random.Random(seed)
    return [gen.random_instance(rng, f"rnd{i:03d}") for i in range(count)]


def _cycle_grid() -> list:
    return [gen.gen_cycle_cover(k, n, m)
            for k in (1, 2, 3) for n in (3, 4, 5, 6) for m in range(1, n + 1)]


def _wedge_fixed() -> list:
    return [gen.gen_wedge_cover((1,), (1,)),
            gen.gen_wedge_cover((2, 1, 3), (1, 3, 2)),
            gen.gen_wedge_cover((2, 3, 1), (2, 3, 1))]


def _corpus_equivalence(seed: int, count: int) -> list:
    items = _cycle_grid() + _random_corpus(seed, count)
    return [(inst.name, inst) for inst in items]


def _corpus_thm63(seed: int, count: int) -> list:
    items = _cycle_grid() + _wedge_fixed() + _random_corpus(seed, count)
    return [(inst.name, inst) for inst in items]


def _corpus_thm54(seed: int, count: int) -> list:
    fixed = [(1, 5, 2, 3), (2, 5, 2, 3), (1, 6, 2, 3), (2, 6, 2, 4),
             (2, 7, 2, 3), (1, 8, 2, 3), (2, 8, 2, 3), (1, 9, 3, 5), (2, 9, 3, 5)]
    rng = random.Random(seed)
    draws = set()
    for _ in range(count):
        v = rng.choice((2, 3))
        n = rng.randint(9, 10) if v == 3 else rng.randint(5, 9)
        k = rng.randint(1, 2)
        u = rng.randint(2 * v - 1, min(n, 2 * v))
        draws.add((k, n, v, u))
    items = [gen.gen_metric_pipeline(*params) for params in fixed + sorted(draws)]
    return [(inst.name, inst) for inst in items]


def _corpus_prop33(seed: int, count: int) -> list:
    fixed = [(4, 2, 1), (4, 2, 2), (6, 3, 1), (6, 3, 2), (6, 3, 3),
             (6, 2, 1), (6, 2, 2), (8, 4, 2), (8, 4, 3), (8, 4, 4),
             (9, 3, 2), (9, 3, 3), (10, 5, 2), (10, 5, 3)]
    rng = random.Random(seed)
    draws = set()
    for _ in range(count):
        n = rng.randint(3, 10)
        step = rng.randint(1, n - 1)
        m = rng.randint(1, n)
        draws.add((n, step, m))
    items = [gen.gen_rotation_action(*params) for params in fixed + sorted(draws)]
    return [(inst.name, inst) for inst in items]


def _corpus_prop35(seed: int, count: int) -> list:
    entries = []
    for n in range(1, 17):
        group = FiniteGroup.cyclic(n)
        for h in subgroups(group):
            entries.append((f"{group.name}[{','.join(sorted(h))}]", (group, h, None)))
    d4 = FiniteGroup.dihedral(4)
    for h in subgroups(d4):
        entries.append((f"{d4.name}[{','.join(sorted(h))}]", (d4, h, None)))
    rng = random.Random(seed)
    for i in range(count):
        group = FiniteGroup.cyclic(rng.randint(2, 16))
        hs = subgroups(group)
        h = hs[rng.randrange(len(hs))]
        u = _random_symmetric(group, rng)
        entries.append((f"draw{i:03d}_{group.name}", (group, h, [u])))
    return entries


def _random_symmetric(group: FiniteGroup, rng: random.Random) -> frozenset:
    chosen = {group.identity}
    for g in sorted(group.elements):
        if g in chosen:
            continue
        if rng.random() < 0.4:
            chosen.add(g)
            chosen.add(group.inv(g))
    return frozenset(chosen)


def _corpus_thm64(seed: int, count: int) -> list:
    entries = [("lift_Z10", ("reconstruct", 2, 5)),
               ("lift_Z18", ("reconstruct", 2, 9)),
               ("lift_identity_Z4", ("identity", 4)),
               ("roundtrip_Z10_q5", ("roundtrip", 10, 5)),
               ("roundtrip_Z12_q6", ("roundtrip", 12, 6)),
               ("roundtrip_Z15_q5", ("roundtrip", 15, 5))]
    rng = random.Random(seed)
    pool = [(order, q) for order in range(6, 21) for q in range(5, order)
            if order % q == 0]
    draws = set()
    for _ in range(count):
        draws.add(pool[rng.randrange(len(pool))])
    for order, q in sorted(draws):
        entries.append((f"roundtrip_Z{order}_q{q}_draw", ("roundtrip", order, q)))
    return entries


# ---------------------------------------------------------------- checkers

def _check_prop44(inst: Instance):
    p = _structured(inst)
    verdicts = {m: is_overlay_structure(p, method=m).is_overlay
                for m in OVERLAY_METHODS}
    agree = len(set(verdicts.values())) == 1
    return ({"verdicts": verdicts}, "ok" if agree else "violation",
            "" if agree else "overlay methods disagree")


def _check_thm53(inst: Instance):
    p = _structured(inst)
    if not is_covering_structure(p, p.structure):
        return ({}, "skipped", "not a covering structure")
    unique = check_unique_lifting(p).holds
    overlay = is_overlay_structure(p).is_overlay
    record = {"unique_lifting": unique, "overlay": overlay}
    agree = unique == overlay
    return (record, "ok" if agree else "violation",
            "" if agree else "unique lifting disagrees with the overlay verdict")


def _check_thm71(inst: Instance):
    p = _structured(inst)
    if not is_covering_structure(p, p.structure):
        return ({}, "skipped", "not a covering structure")
    verdicts = {"overlay": is_overlay_structure(p).is_overlay}
    for cap in (2, 3):
        f = induced_map(p, dimension_cap=cap)
        verdicts[f"full_cap{cap}"] = is_simplicial_covering(f, "full")[0]
        verdicts[f"one_skeleton_cap{cap}"] = is_simplicial_covering(f, "one_skeleton")[0]
    agree = len(set(verdicts.values())) == 1
    return ({"verdicts": verdicts}, "ok" if agree else "violation",
            "" if agree else "nerve verdicts disagree")


def _check_thm63(inst: Instance):
    p = _structured(inst)
    if not is_covering_structure(p, p.structure):
        return ({}, "skipped", "not a covering structure")
    if not is_overlay_structure(p).is_overlay:
        return ({}, "skipped", "not an overlay structure")
    if len(chain_components(p.structure)) > 1:
        return ({}, "skipped", "domain is chain-disconnected")
    regular = is_regular(p)
    witness = find_irregular_loop(p)
    deck = len(deck_group(p))
    record = {"regular": regular, "deck_order": deck,
              "irregular_witness": witness is not None,
              "loop": list(witness.loop.points) if witness else None}
    problems = []
    if regular and witness is not None:
        problems.append("irregular loop found on a regular overlay")
    expect = inst.manifest.get("expect", {})
    for key in ("regular", "deck_order", "irregular_witness"):
        if key in expect and record[key] != expect[key]:
            problems.append(f"expected {key}={expect[key]}, got {record[key]}")
    return (record, "violation" if problems else "ok", "; ".join(problems))


def _check_thm54(inst: Instance):
    p = _structured(inst)
    dy = remetrize_base(inst.metrics["dY"], inst.covers["U"], inst.covers["V"])
    dx = chain_metric(p, dy)
    iso = check_local_isometry(p, dx, dy, Fraction(1))
    sample = min(dx.pairs().items())
    record = {"unit_ball_isometry": iso,
              "sample_pair": list(sample[0]), "sample_distance": sample[1]}
    return (record, "ok" if iso else "violation",
            "" if iso else "unit balls are not isometric")


def _check_prop33(inst: Instance):
    action = inst.actions[inst.manifest["action"]]
    cover = inst.covers[inst.manifest["cover"]]
    verdicts = {"def31": is_overlay_action(action, cover, "def31"),
                "prop33b": is_overlay_action(action, cover, "prop33b")}
    agree = len(set(verdicts.values())) == 1
    return ({"verdicts": verdicts}, "ok" if agree else "violation",
            "" if agree else "action methods disagree")


def _symmetric_subsets(group: FiniteGroup) -> list:
    """All symmetric subsets containing the identity, via inverse-pair classes."""
    classes = []
    seen = set()
    for g in sorted(group.elements):
        if g == group.identity or g in seen:
            continue
        cls = frozenset({g, group.inv(g)})
        seen |= cls
        classes.append(cls)
    subsets = [frozenset({group.identity})]
    for cls in classes:
        subsets += [s | cls for s in subsets]
    return subsets


def _check_prop35(payload):
    group, h, candidates = payload
    if candidates is None:
        candidates = _symmetric_subsets(group)
    normal = is_normal(group, h)
    passing = []
    failures = []
    data = []
    for u in candidates:
        u2 = product_set(group, u, u)
        if (product_set(group, u2, u2) & h) != {group.identity}:
            continue
        result = coset_overlay_structure(group, h, u)
        passing.append(u)
        if not result.overlay:
            (failures if normal else data).append(sorted(u))
    record = {"order": group.order(), "subgroup": sorted(h), "normal": normal,
              "candidates": len(candidates), "passing_condition": len(passing),
              "overlay_failures": failures, "non_normal_data": data}
    if normal and failures:
        return (record, "violation", "coset structure failed the overlay check")
    return (record, "ok", "" if normal else "non-normal subgroup, data only")


def _check_thm64(payload):
    kind = payload[0]
    if kind == "reconstruct":
        _, k, n = payload
        inst = gen.gen_cycle_cover(k, n, 3)
        p = _structured(inst)
        target = FiniteGroup.cyclic(n)
        elems = target.elements
        unit = frozenset({elems[-1], elems[0], elems[1]})
        lifted = lift_group_structure(p, target, unit, p.domain.sorted_points[0])
        expected = FiniteGroup.cyclic(k * n)
        iso = find_isomorphism(lifted, expected) is not None
        kernel = len(p.fiber(target.identity))
        record = {"group_order": lifted.order(), "kernel_size": kernel,
                  "isomorphic_to_expected": iso}
        ok = iso and kernel == k
        return (record, "ok" if ok else "violation",
                "" if ok else "lifted group is not the expected cyclic group")
    if kind == "identity":
        _, n = payload
        inst = gen.gen_cycle_cover(1, n, 1)
        p = _structured(inst)
        target = FiniteGroup.cyclic(n)
        unit = frozenset({target.identity})
        lifted = lift_group_structure(p, target, unit, target.identity)
        same = lifted.table == target.table
        return ({"table_preserved": same}, "ok" if same else "violation",
                "" if same else "identity lift changed the table")
    _, order, q = payload
    group = FiniteGroup.cyclic(order)
    h = frozenset(group.elements[i] for i in range(0, order, q))
    elems = group.elements
    unit = frozenset({elems[-1], elems[0], elems[1]})
    result = coset_overlay_structure(group, h, unit)
    if not result.overlay:
        return ({"overlay": False}, "violation", "coset structure is not an overlay")
    quotient, _rep = quotient_group(group, h)
    w = frozenset(result.quotient_map(u) for u in unit)
    lifted = lift_group_structure(result.quotient_map, quotient, w, group.identity)
    iso = find_isomorphism(lifted, group) is not None
    record = {"quotient_order": quotient.order(), "lift_order": lifted.order(),
              "isomorphic_to_original": iso}
    return (record, "ok" if iso else "violation",
            "" if iso else "round trip lost the group")


def _check_cor72(inst: Instance):
    p = _structured(inst)
    if not is_covering_structure(p, p.structure):
        return ({}, "skipped", "not a covering structure")
    if not is_overlay_structure(p).is_overlay:
        return ({}, "skipped", "not an overlay structure")
    report = verify_pullback(p)
    counts_match = report.solution_counts == report.fiber_sizes
    record = {"commutes": report.commutes, "counts_match": counts_match,
              "solution_counts": report.solution_counts,
              "fiber_sizes": report.fiber_sizes}
    ok = report.ok and counts_match
    return (record, "ok" if ok else "violation",
            "" if ok else "pullback solutions disagree with fibers")


SUITES = {
    "prop44": (_corpus_equivalence, _check_prop44),
    "thm53": (_corpus_equivalence, _check_thm53),
    "thm71": (_corpus_equivalence, _check_thm71),
    "thm63": (_corpus_thm63, _check_thm63),
    "thm54": (_corpus_thm54, _check_thm54),
    "prop33": (_corpus_prop33, _check_prop33),
    "prop35": (_corpus_prop35, _check_prop35),
    "thm64": (_corpus_thm64, _check_thm64),
    "cor72": (_corpus_equivalence, _check_cor72),
}

SUITE_NAMES = tuple(SUITES)


def run_suite(name: str, corpus: list | None = None, seed: int = 0,
              count: int = 200) -> SuiteReport:
    """Run one named suite; the corpus defaults to the suite's own builder.

    A supplied corpus must be a list of instances (or, for the group
    suites, payload pairs as produced by the builders); entries that fail
    to load or check are reported as errors without stopping the run.
    """
    if name not in SUITES:
        raise InputError(f"unknown suite {name!r} (have {', '.join(SUITE_NAMES)})")
    builder, checker = SUITES[name]
    if corpus is None:
        items = builder(seed, count)
    else:
        items = [(item.name, item) if isinstance(item, Instance) else item
                 for item in corpus]
    entries = []
    for label, payload in items:
        started = time.perf_counter()
        try:
            record, status, detail = checker(payload)
        except Exception as exc:  # malformed entries must not abort the suite
            record, status, detail = {}, "error", f"{type(exc).__name__}: {exc}"
        entries.append(SuiteEntry(label, status, detail, record,
                                  time.perf_counter() - started))
    return SuiteReport(name, seed, count, entries)
