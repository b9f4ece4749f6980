"""Instance files: named spaces, covers, maps, groups, actions, and metrics.

The on-disk form is JSON with sorted keys, two-space indentation, sorted
point lists, and rationals as "p/q" strings; serializing a parsed
canonical file reproduces it byte for byte.  Cross-references are by name
and every object is validated on load by its own constructor.

Schema sketch::

    {"spaces":  {NAME: {"points": [...], "metric": {"pairs": [[a, b, "p/q"], ...]}}},
     "covers":  {NAME: {"space": NAME, "sets": {ID: [points]}}},
     "maps":    {NAME: {"domain": NAME, "codomain": NAME,
                        "pairs": [[x, y], ...], "structure": COVER_NAME}},
     "groups":  {NAME: {"elements": [...], "table": [[...]]}},
     "actions": {NAME: {"group": NAME, "space": NAME, "perm": {g: [points]}}},
     "metrics": {NAME: {"space": NAME, "provenance": P, "pairs": [[a, b, "p/q"], ...]}},
     "manifest": {...}}

Group tables are matrices aligned with the serialized element order, and
action permutations list images aligned with the sorted point order of the
underlying space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

from .actions import GroupAction
from .errors import InputError
from .groups import FiniteGroup
from .metrics import MetricTable
from .spaces import Cover, CoverMap, FiniteSpace


def frac_str(value) -> str:
    q = Fraction(value)
    return f"{q.numerator}/{q.denominator}"


def parse_frac(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"bad rational {text!r}: {exc}") from None


@dataclass
class Instance:
    """A bundle of named objects plus a manifest of intended checks."""

    spaces: dict = field(default_factory=dict)
    covers: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    manifest: dict = field(default_factory=dict)
    refs: dict = field(default_factory=lambda: {
        "covers": {}, "maps": {}, "actions": {}, "metrics": {}})

    @property
    def name(self) -> str:
        return self.manifest.get("name", "unnamed")

    def add_space(self, name: str, space: FiniteSpace) -> None:
        self.spaces[name] = space

    def add_cover(self, name: str, cover: Cover, space_name: str) -> None:
        self.covers[name] = cover
        self.refs["covers"][name] = space_name

    def add_map(self, name: str, cover_map: CoverMap, domain: str, codomain: str,
                structure: str | None = None) -> None:
        self.maps[name] = cover_map
        self.refs["maps"][name] = {
            "domain": domain, "codomain": codomain, "structure": structure}

    def add_group(self, name: str, group: FiniteGroup) -> None:
        self.groups[name] = group

    def add_action(self, name: str, action: GroupAction, group_name: str,
                   space_name: str) -> None:
        self.actions[name] = action
        self.refs["actions"][name] = {"group": group_name, "space": space_name}

    def add_metric(self, name: str, metric: MetricTable, space_name: str) -> None:
        self.metrics[name] = metric
        self.refs["metrics"][name] = space_name


def _metric_pairs(table: dict) -> list:
    return sorted([a, b, frac_str(d)] for (a, b), d in table.items())


def serialize_instance(instance: Instance) -> str:
    doc: dict = {}
    spaces = {}
    for name, sp in instance.spaces.items():
        entry: dict = {"points": sorted(sp.points)}
        if sp.metric is not None:
            entry["metric"] = {"pairs": _metric_pairs(sp.metric)}
        spaces[name] = entry
    doc["spaces"] = spaces
    doc["covers"] = {
        name: {"space": instance.refs["covers"][name],
               "sets": {cid: sorted(s) for cid, s in cover}}
        for name, cover in instance.covers.items()}
    maps = {}
    for name, m in instance.maps.items():
        ref = instance.refs["maps"][name]
        entry = {"domain": ref["domain"], "codomain": ref["codomain"],
                 "pairs": sorted([x, y] for x, y in m.mapping.items())}
        if ref["structure"] is not None:
            entry["structure"] = ref["structure"]
        maps[name] = entry
    doc["maps"] = maps
    doc["groups"] = {
        name: {"elements": sorted(g.elements),
               "table": [[g.mult(a, b) for b in sorted(g.elements)]
                         for a in sorted(g.elements)]}
        for name, g in instance.groups.items()}
    actions = {}
    for name, a in instance.actions.items():
        ref = instance.refs["actions"][name]
        pts = a.space.sorted_points
        actions[name] = {
            "group": ref["group"], "space": ref["space"],
            "perm": {g: [a.perm[g][x] for x in pts] for g in a.group.elements}}
    doc["actions"] = actions
    doc["metrics"] = {
        name: {"space": instance.refs["metrics"][name],
               "provenance": t.provenance,
               "pairs": _metric_pairs(t.pairs())}
        for name, t in instance.metrics.items()}
    doc["manifest"] = instance.manifest
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _parse_metric_pairs(pairs) -> dict:
    return {(a, b): parse_frac(d) for a, b, d in pairs}


def parse_instance(text: str) -> Instance:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise InputError("instance file must be a JSON object")
    inst = Instance()
    try:
        for name, entry in doc.get("spaces", {}).items():
            metric = entry.get("metric")
            table = _parse_metric_pairs(metric["pairs"]) if metric else None
            inst.add_space(name, FiniteSpace(entry["points"], table))
        for name, entry in doc.get("covers", {}).items():
            space = inst.spaces[entry["space"]]
            inst.add_cover(name, Cover(space, entry["sets"]), entry["space"])
        for name, entry in doc.get("groups", {}).items():
            inst.add_group(name, FiniteGroup.from_matrix(
                entry["elements"], entry["table"], name=name))
        for name, entry in doc.get("metrics", {}).items():
            space = inst.spaces[entry["space"]]
            inst.add_metric(name, MetricTable(
                space, _parse_metric_pairs(entry["pairs"]),
                entry.get("provenance", "given")), entry["space"])
        for name, entry in doc.get("maps", {}).items():
            domain = inst.spaces[entry["domain"]]
            codomain = inst.spaces[entry["codomain"]]
            structure = entry.get("structure")
            cover = inst.covers[structure] if structure else None
            inst.add_map(name, CoverMap(domain, codomain,
                                        dict(entry["pairs"]), cover),
                         entry["domain"], entry["codomain"], structure)
        for name, entry in doc.get("actions", {}).items():
            group = inst.groups[entry["group"]]
            space = inst.spaces[entry["space"]]
            pts = space.sorted_points
            perm = {g: dict(zip(pts, images))
                    for g, images in entry["perm"].items()}
            inst.add_action(name, GroupAction(group, space, perm),
                            entry["group"], entry["space"])
    except KeyError as exc:
        raise InputError(f"unresolved or missing reference: {exc}") from None
    except (TypeError, AttributeError) as exc:
        raise InputError(f"malformed instance document: {exc}") from None
    inst.manifest = doc.get("manifest", {})
    return inst


def load_instance(path) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_instance(fh.read())


def dump_instance(instance: Instance, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_instance(instance))
