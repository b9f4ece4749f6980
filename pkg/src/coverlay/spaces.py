"""Finite spaces, covers, maps, and the slice machinery built on them.

The model is uniformly discrete.  A space is a finite set of opaque string
identifiers, every subset counts as open, and every point map is continuous
for free; "homeomorphism onto the image" therefore just means injection.
All operations in this package inherit that dictionary.  Lexicographic order
on point identifiers is the canonical order wherever determinism matters.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InputError

Pair = tuple[str, str]


def _norm_pair(x: str, y: str) -> Pair:
    return (x, y) if x <= y else (y, x)


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise InputError(f"expected an exact rational, got {value!r}")


class FiniteSpace:
    """A finite point set, optionally carrying an exact rational metric.

    The metric, when present, is validated exactly: symmetry, positivity off
    the diagonal, and the triangle inequality over all triples.
    """

    def __init__(self, points: Iterable[str], metric: Mapping | None = None):
        pts = frozenset(points)
        if not pts:
            raise InputError("a space needs at least one point")
        for x in pts:
            if not isinstance(x, str):
                raise InputError(f"point identifiers must be strings, got {x!r}")
        self.points: frozenset[str] = pts
        self.sorted_points: tuple[str, ...] = tuple(sorted(pts))
        self.metric: dict[Pair, Fraction] | None = (
            None if metric is None else self._checked_metric(metric)
        )

    def _checked_metric(self, metric: Mapping) -> dict[Pair, Fraction]:
        table: dict[Pair, Fraction] = {}
        for key, value in metric.items():
            x, y = tuple(key)
            if x not in self.points or y not in self.points:
                raise InputError(f"metric mentions unknown points {key!r}")
            d = _as_fraction(value)
            if x == y:
                if d != 0:
                    raise InputError(f"nonzero self-distance at {x}")
                continue
            pair = _norm_pair(x, y)
            if table.get(pair, d) != d:
                raise InputError(f"asymmetric distances for {pair}")
            table[pair] = d
        pts = self.sorted_points
        for i, x in enumerate(pts):
            for y in pts[i + 1:]:
                pair = (x, y)
                if pair not in table:
                    raise InputError(f"metric missing the pair {pair}")
                if table[pair] <= 0:
                    raise InputError(f"non-positive distance for {pair}")
        for x in pts:
            for y in pts:
                for z in pts:
                    if self._d(table, x, z) > self._d(table, x, y) + self._d(table, y, z):
                        raise InputError(f"triangle inequality fails at ({x},{y},{z})")
        return table

    @staticmethod
    def _d(table, x, y):
        return Fraction(0) if x == y else table[_norm_pair(x, y)]

    def distance(self, x: str, y: str) -> Fraction:
        if self.metric is None:
            raise InputError("space carries no metric")
        return self._d(self.metric, x, y)

    def __contains__(self, x) -> bool:
        return x in self.points

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"FiniteSpace({len(self.points)} points)"


def _auto_ids(sets: Iterable[frozenset[str]], prefix: str) -> dict[str, frozenset[str]]:
    distinct = sorted(set(sets), key=sorted)
    width = max(2, len(str(max(len(distinct) - 1, 0))))
    return {f"{prefix}{i:0{width}d}": s for i, s in enumerate(distinct)}


class Cover:
    """A deduplicated family of nonempty subsets whose union is the space.

    Elements equal as sets are merged; the surviving identifier is the
    lexicographically least of the merged ones.  Iteration is in sorted-id
    order.  ``sets`` may be a mapping id -> points or a bare iterable of
    point sets, in which case identifiers are generated.
    """

    def __init__(self, space: FiniteSpace, sets, id_prefix: str = "c"):
        self.space = space
        if isinstance(sets, Mapping):
            raw = {str(k): frozenset(v) for k, v in sets.items()}
        else:
            raw = _auto_ids((frozenset(s) for s in sets), id_prefix)
        by_set: dict[frozenset[str], str] = {}
        for cid in sorted(raw):
            s = raw[cid]
            if not s:
                raise InputError(f"cover element {cid} is empty")
            if not s <= space.points:
                raise InputError(f"cover element {cid} leaves the space")
            by_set.setdefault(s, cid)
        self.sets: dict[str, frozenset[str]] = {
            cid: s for s, cid in sorted(by_set.items(), key=lambda kv: kv[1])
        }
        self._id_by_set = by_set
        covered = frozenset().union(*self.sets.values())
        if covered != space.points:
            missing = sorted(space.points - covered)[:3]
            raise InputError(f"family does not cover the space (missing {missing})")

    def ids(self) -> tuple[str, ...]:
        return tuple(self.sets)

    def __iter__(self):
        return iter(self.sets.items())

    def __len__(self) -> int:
        return len(self.sets)

    def __getitem__(self, cid: str) -> frozenset[str]:
        try:
            return self.sets[cid]
        except KeyError:
            raise InputError(f"no cover element named {cid!r}") from None

    def id_of(self, s: frozenset[str]) -> str | None:
        return self._id_by_set.get(frozenset(s))

    def set_family(self) -> frozenset[frozenset[str]]:
        return frozenset(self.sets.values())

    def containing(self, x: str) -> tuple[str, ...]:
        return tuple(cid for cid, s in self.sets.items() if x in s)

    def __repr__(self) -> str:
        return f"Cover({len(self.sets)} elements over {len(self.space)} points)"


class CoverMap:
    """A surjective point map, optionally with a designated structure cover.

    ``structure``, when present, is a cover of the domain; it is the family
    the lifting and slice-decomposition operations work with.
    """

    def __init__(self, domain: FiniteSpace, codomain: FiniteSpace,
                 mapping: Mapping[str, str], structure: Cover | None = None):
        self.domain = domain
        self.codomain = codomain
        m = {str(k): str(v) for k, v in mapping.items()}
        if set(m) != set(domain.points):
            raise InputError("mapping is not total on the domain")
        if not set(m.values()) <= codomain.points:
            raise InputError("mapping leaves the codomain")
        if set(m.values()) != set(codomain.points):
            raise InputError("mapping is not surjective")
        self.mapping = m
        if structure is not None and structure.space.points != domain.points:
            raise InputError("structure cover lives on a different space")
        self.structure = structure
        fibers: dict[str, set[str]] = {y: set() for y in codomain.points}
        for x, y in m.items():
            fibers[y].add(x)
        self._fibers = {y: frozenset(s) for y, s in fibers.items()}

    def __call__(self, x: str) -> str:
        try:
            return self.mapping[x]
        except KeyError:
            raise InputError(f"{x!r} is not a point of the domain") from None

    def image(self, subset: Iterable[str]) -> frozenset[str]:
        return frozenset(self(x) for x in subset)

    def fiber(self, y: str) -> frozenset[str]:
        try:
            return self._fibers[y]
        except KeyError:
            raise InputError(f"{y!r} is not a point of the codomain") from None

    def fibers(self) -> dict[str, frozenset[str]]:
        return dict(self._fibers)

    def with_structure(self, structure: Cover) -> "CoverMap":
        return CoverMap(self.domain, self.codomain, self.mapping, structure)

    def __repr__(self) -> str:
        return f"CoverMap({len(self.domain)} -> {len(self.codomain)} points)"


@dataclass(frozen=True)
class SliceDecomposition:
    """A partition of a saturated preimage into copies of the target set."""

    target: frozenset[str]
    blocks: tuple[frozenset[str], ...]


def star(x: str, cover: Cover) -> frozenset[str]:
    """Union of all cover elements containing ``x``."""
    if x not in cover.space.points:
        raise InputError(f"{x!r} is not a point of the covered space")
    return frozenset().union(*(cover.sets[cid] for cid in cover.containing(x)))


def check_slice(p: CoverMap, subset: Iterable[str]) -> SliceDecomposition | None:
    """Test whether ``subset`` is a slice of ``p``; return a witness partition.

    In the finite discrete model a set is a slice exactly when the map is
    injective on it and all fibers over its image share one cardinality: the
    remaining fiber points can then be zipped, in sorted order, into the
    further blocks of a partition.  That equivalence is relied on here and is
    exercised against a brute-force partition search in the test-suite.
    """
    u = frozenset(subset)
    if not u:
        raise InputError("the empty set is not a candidate slice")
    if not u <= p.domain.points:
        raise InputError("candidate slice leaves the domain")
    images = {}
    for x in sorted(u):
        y = p(x)
        if y in images:
            return None
        images[y] = x
    target = frozenset(images)
    sizes = {len(p.fiber(y)) for y in target}
    if len(sizes) != 1:
        return None
    depth = sizes.pop()
    rest = {y: sorted(p.fiber(y) - {images[y]}) for y in sorted(target)}
    blocks = [u]
    for j in range(depth - 1):
        blocks.append(frozenset(rest[y][j] for y in rest))
    return SliceDecomposition(target=target, blocks=tuple(blocks))


def is_slice(p: CoverMap, subset: Iterable[str]) -> bool:
    return check_slice(p, subset) is not None


def _resolve_element(within: Cover, element) -> str:
    if isinstance(element, str):
        if element not in within.sets:
            raise InputError(f"{element!r} is not an element of the cover")
        return element
    cid = within.id_of(frozenset(element))
    if cid is None:
        raise InputError("the given set is not an element of the cover")
    return cid


def slice_decompositions(p: CoverMap, element, within: Cover,
                         first_only: bool = False) -> list[tuple[str, ...]]:
    """All partitions of the saturated preimage into elements of ``within``.

    Each returned tuple lists element ids that are pairwise disjoint, have
    image exactly the image of ``element``, union to the full preimage of
    that image, and include ``element`` itself.  An empty list means the
    element admits no such decomposition inside ``within``.  Backtracking
    exact-cover search; exponential in the worst case, fine at desk scale.
    """
    if within.space.points != p.domain.points:
        raise InputError("cover lives on a different space than the map domain")
    uid = _resolve_element(within, element)
    uset = within.sets[uid]
    target = p.image(uset)
    region = frozenset().union(*(p.fiber(y) for y in target))
    candidates = [cid for cid, s in within if p.image(s) == target]
    if not (uset <= region):
        raise InputError("element leaves its own saturated preimage")

    out: list[tuple[str, ...]] = []

    def extend(chosen: list[str], covered: frozenset[str]) -> bool:
        if covered == region:
            out.append(tuple(sorted(chosen)))
            return first_only
        pivot = min(region - covered)
        for cid in candidates:
            s = within.sets[cid]
            if pivot in s and not (s & covered):
                if extend(chosen + [cid], covered | s):
                    return True
        return False

    extend([uid], uset)
    for sel in out:
        # Post-hoc partition check on every returned value.
        union: set[str] = set()
        for cid in sel:
            block = within.sets[cid]
            assert not (union & block), "decomposition blocks overlap"
            union |= block
        assert union == region, "decomposition misses part of the preimage"
    return sorted(set(out))


def covering_structure_defect(p: CoverMap, cover: Cover):
    """First element stopping ``cover`` from being a covering structure.

    Returns ``None`` when every element is a slice whose saturated preimage
    splits into elements of the cover with the same image, i.e. when the
    cover is a covering structure of ``p``; otherwise a pair
    ``(element_id, reason)``.
    """
    if cover.space.points != p.domain.points:
        raise InputError("cover lives on a different space than the map domain")
    for cid, s in cover:
        if check_slice(p, s) is None:
            return (cid, "not a slice")
        if not slice_decompositions(p, cid, cover, first_only=True):
            return (cid, "no decomposition into cover elements")
    return None


def is_covering_structure(p: CoverMap, cover: Cover) -> bool:
    return covering_structure_defect(p, cover) is None


def image_cover(p: CoverMap, cover: Cover, id_prefix: str = "u") -> Cover:
    """The family of images of the cover elements, deduplicated, on the codomain."""
    return Cover(p.codomain, (p.image(s) for _, s in cover), id_prefix)


def adjacency(cover: Cover) -> dict[str, frozenset[str]]:
    """For each point, the set of points sharing a cover element with it."""
    adj: dict[str, set[str]] = {x: {x} for x in cover.space.points}
    for _, s in cover:
        for x in s:
            adj[x] |= s
    return {x: frozenset(s) for x, s in adj.items()}


def chain_components(cover: Cover) -> tuple[frozenset[str], ...]:
    """Connected components of the shares-an-element relation, sorted by minimum."""
    adj = adjacency(cover)
    seen: set[str] = set()
    comps = []
    for x in sorted(cover.space.points):
        if x in seen:
            continue
        comp = {x}
        frontier = [x]
        while frontier:
            z = frontier.pop()
            for w in adj[z]:
                if w not in comp:
                    comp.add(w)
                    frontier.append(w)
        seen |= comp
        comps.append(frozenset(comp))
    return tuple(comps)
