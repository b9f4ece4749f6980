"""Nerves of covers, induced simplicial maps, and the pullback check.

The nerve has one vertex per cover element and a simplex for every family
of elements with a common point (up to an optional dimension cap).  A
structured map induces a vertex map between nerves which is always
simplicial; deciding whether it is combinatorially a covering, on stars or
on the one-skeleton, characterizes overlay structures and is cross-checked
against the direct overlay verdicts by the corpus suites.

The star condition used here is the standard combinatorial surrogate for
the statement about geometric realizations: stars must map isomorphically
as inclusion posets and preimages of stars must split disjointly.  Any
corpus disagreement with the direct verdicts is flagged, never patched.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .errors import InputError, InternalInvariantError, PreconditionError
from .overlay import is_overlay_structure
from .spaces import Cover, CoverMap, image_cover


class SimplicialComplex:
    """An abstract simplicial complex over string vertex ids."""

    def __init__(self, vertices, simplices, dimension_cap: int | None = None):
        self.vertices = frozenset(vertices)
        simps = frozenset(frozenset(s) for s in simplices)
        for s in simps:
            if not s:
                raise InputError("the empty simplex is not stored")
            if not s <= self.vertices:
                raise InputError("simplex mentions unknown vertices")
            if dimension_cap is not None and len(s) > dimension_cap + 1:
                raise InputError("simplex exceeds the dimension cap")
            for v in s:
                if len(s) > 1 and not (s - {v}) in simps:
                    raise InputError("simplices are not downward closed")
        for v in self.vertices:
            if frozenset([v]) not in simps:
                raise InputError(f"vertex {v} is missing as a simplex")
        self.simplices = simps
        self.dimension_cap = dimension_cap
        self._stars: dict[str, frozenset] = {}

    def star(self, v: str) -> frozenset[frozenset[str]]:
        if v not in self._stars:
            if v not in self.vertices:
                raise InputError(f"{v!r} is not a vertex")
            self._stars[v] = frozenset(s for s in self.simplices if v in s)
        return self._stars[v]

    def neighbors(self, v: str) -> frozenset[str]:
        return frozenset(u for s in self.star(v) if len(s) == 2 for u in s if u != v)

    def edges(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(tuple(sorted(s)) for s in self.simplices if len(s) == 2))

    def dimension(self) -> int:
        return max(len(s) for s in self.simplices) - 1

    def __repr__(self) -> str:
        return f"SimplicialComplex({len(self.vertices)} vertices, {len(self.simplices)} simplices)"


def build_nerve(cover: Cover, dimension_cap: int | None = 3) -> SimplicialComplex:
    """Nerve of a cover: simplices are families with a common point.

    Grown one dimension at a time; common intersections only shrink, so the
    growth stops on its own when ``dimension_cap`` is ``None``.
    """
    inters: dict[frozenset[str], frozenset[str]] = {
        frozenset([cid]): s for cid, s in cover}
    layers = [set(inters)]
    while layers[-1]:
        size = len(next(iter(layers[-1])))
        if dimension_cap is not None and size > dimension_cap:
            break
        nxt = set()
        for simp in layers[-1]:
            top = max(simp)
            for cid in cover.ids():
                if cid <= top:
                    continue
                common = inters[simp] & cover.sets[cid]
                if common:
                    bigger = simp | {cid}
                    inters[bigger] = common
                    nxt.add(bigger)
        layers.append(nxt)
    return SimplicialComplex(cover.ids(), inters.keys(), dimension_cap)


class SimplicialMap:
    """A vertex map carrying every simplex of the source onto a target simplex."""

    def __init__(self, source: SimplicialComplex, target: SimplicialComplex,
                 vertex_map: dict[str, str]):
        if set(vertex_map) != set(source.vertices):
            raise InputError("vertex map is not total on the source")
        if not set(vertex_map.values()) <= target.vertices:
            raise InputError("vertex map leaves the target")
        for s in source.simplices:
            if frozenset(vertex_map[v] for v in s) not in target.simplices:
                raise InputError(f"image of simplex {sorted(s)} is not a simplex")
        self.source = source
        self.target = target
        self.vertex_map = dict(vertex_map)

    def __call__(self, v: str) -> str:
        return self.vertex_map[v]

    def map_simplex(self, s: frozenset[str]) -> frozenset[str]:
        return frozenset(self.vertex_map[v] for v in s)


def induced_map(p: CoverMap, cover: Cover | None = None,
                dimension_cap: int | None = 3) -> SimplicialMap:
    """The nerve map sending each structure element to its image element."""
    if cover is None:
        cover = p.structure
    if cover is None:
        raise InputError("no cover given and the map carries no structure")
    base = image_cover(p, cover)
    src = build_nerve(cover, dimension_cap)
    tgt = build_nerve(base, dimension_cap)
    vmap = {cid: base.id_of(p.image(s)) for cid, s in cover}
    try:
        return SimplicialMap(src, tgt, vmap)
    except InputError as exc:  # images of intersecting sets intersect
        raise InternalInvariantError(f"induced map failed to be simplicial: {exc}")


def is_simplicial_covering(f: SimplicialMap, mode: str = "full"):
    """Decide whether a simplicial map is combinatorially a covering.

    ``one_skeleton``: every vertex's neighbor set maps bijectively onto the
    neighbor set of its image.  ``full``: for every target vertex, the
    stars of its preimages are pairwise disjoint, exhaust the preimage of
    its star, and each maps isomorphically (as an inclusion poset) onto it.
    Returns ``(verdict, witness)`` with a witness exactly on failure.
    """
    if mode not in ("full", "one_skeleton"):
        raise InputError(f"unknown mode {mode!r}")
    covered = set(f.vertex_map.values())
    for u in sorted(f.target.vertices):
        if u not in covered:
            return False, ("uncovered_vertex", u)

    if mode == "one_skeleton":
        for v in sorted(f.source.vertices):
            nb = sorted(f.source.neighbors(v))
            seen: dict[str, str] = {}
            for w in nb:
                img = f(w)
                if img in seen:
                    return False, ("edge_collision", v, seen[img], w)
                seen[img] = w
            want = f.target.neighbors(f(v))
            if set(seen) != set(want):
                return False, ("neighbor_mismatch", v, tuple(sorted(set(want) - set(seen))))
        return True, None

    for u in sorted(f.target.vertices):
        pre = sorted(v for v in f.source.vertices if f(v) == u)
        for i, v1 in enumerate(pre):
            for v2 in pre[i + 1:]:
                overlap = f.source.star(v1) & f.source.star(v2)
                if overlap:
                    return False, ("star_overlap", u, v1, v2, min(overlap, key=sorted))
        target_star = f.target.star(u)
        for v in pre:
            images: dict[frozenset, frozenset] = {}
            for s in f.source.star(v):
                img = f.map_simplex(s)
                if img in images:
                    return False, ("star_collision", v, images[img], s)
                images[img] = s
            if set(images) != set(target_star):
                return False, ("star_mismatch", v, u)
            for s in f.source.star(v):
                for t in f.source.star(v):
                    if (s <= t) != (f.map_simplex(s) <= f.map_simplex(t)):
                        return False, ("star_order", v, s, t)
        pre_star = {s for s in f.source.simplices if u in f.map_simplex(s)}
        spanned = set().union(*(f.source.star(v) for v in pre)) if pre else set()
        if pre_star != spanned:
            return False, ("star_preimage", u)
    return True, None


@dataclass(frozen=True)
class RationalPoint:
    """A point of a nerve: exact barycentric coordinates on a simplex support."""

    coordinates: tuple[tuple[str, Fraction], ...]

    @property
    def support(self) -> frozenset[str]:
        return frozenset(v for v, c in self.coordinates)

    def coordinate(self, v: str) -> Fraction:
        return dict(self.coordinates).get(v, Fraction(0))

    @classmethod
    def build(cls, coords: dict[str, Fraction], ambient: SimplicialComplex) -> "RationalPoint":
        nonzero = tuple(sorted((v, c) for v, c in coords.items() if c != 0))
        for v, c in nonzero:
            if c < 0:
                raise InputError(f"negative coordinate at {v}")
        if sum(c for _, c in nonzero) != 1:
            raise InputError("coordinates do not sum to one")
        if frozenset(v for v, _ in nonzero) not in ambient.simplices:
            raise InputError("support is not a simplex of the ambient complex")
        return cls(nonzero)


@dataclass(frozen=True)
class PullbackReport:
    """Per-point solution counts for the nerve-pullback identity."""

    ok: bool
    commutes: bool
    solution_counts: dict
    fiber_sizes: dict
    mismatches: tuple


def verify_pullback(p: CoverMap, cover: Cover | None = None) -> PullbackReport:
    """Check that the map is recovered as a pullback of its nerve covering.

    Builds the indicator-over-degree partition of unity downstairs, pulls
    it back upstairs (each coordinate vanishing off its element), verifies
    that pushing forward along the nerve map commutes with the map itself,
    and for every base point matches the solutions of the barycentric
    equation against the fiber.  Uncapped nerves, exact rationals
    throughout: sums hold with equality, never within tolerance.
    """
    if cover is None:
        cover = p.structure
    if cover is None:
        raise InputError("no cover given and the map carries no structure")
    verdict = is_overlay_structure(p, cover)
    if not verdict.is_overlay:
        raise PreconditionError("not an overlay structure", witness=verdict.witness)
    base = image_cover(p, cover)
    nerve_map = induced_map(p, cover, dimension_cap=None)
    src, tgt = nerve_map.source, nerve_map.target

    def phi(y: str) -> RationalPoint:
        hits = base.containing(y)
        return RationalPoint.build(
            {uid: Fraction(1, len(hits)) for uid in hits}, tgt)

    def psi(x: str) -> RationalPoint:
        y = p(x)
        deg = len(base.containing(y))
        coords = {vid: Fraction(1, deg) for vid, s in cover if x in s}
        return RationalPoint.build(coords, src)

    def push(z: RationalPoint) -> RationalPoint:
        out: dict[str, Fraction] = {}
        for vid, c in z.coordinates:
            uid = nerve_map(vid)
            out[uid] = out.get(uid, Fraction(0)) + c
        return RationalPoint.build(out, tgt)

    mismatches = []
    commutes = True
    for x in sorted(p.domain.points):
        if push(psi(x)) != phi(p(x)):
            commutes = False
            mismatches.append(("commute", x))

    over: dict[str, list[str]] = {}
    for vid, s in cover:
        over.setdefault(base.id_of(p.image(s)), []).append(vid)

    counts: dict[str, int] = {}
    sizes: dict[str, int] = {}
    for y in sorted(p.codomain.points):
        uids = base.containing(y)
        choices = [sorted(over[uid]) for uid in uids]
        solutions = []
        for pick in product(*choices):
            common = cover.sets[pick[0]]
            for vid in pick[1:]:
                common = common & cover.sets[vid]
                if not common:
                    break
            if common:
                solutions.append(frozenset(pick))
        counts[y] = len(solutions)
        sizes[y] = len(p.fiber(y))
        supports = {psi(x).support for x in p.fiber(y)}
        if supports != set(solutions) or len(supports) != sizes[y]:
            mismatches.append(("solutions", y))
    ok = commutes and all(counts[y] == sizes[y] for y in counts) and not mismatches
    return PullbackReport(ok, commutes, counts, sizes, tuple(mismatches))


def to_dot(complex_: SimplicialComplex, name: str = "nerve") -> str:
    """One-skeleton as a DOT graph: a node per element, an edge per overlap."""
    lines = [f"graph {name} {{"]
    for v in sorted(complex_.vertices):
        lines.append(f'  "{v}";')
    for a, b in complex_.edges():
        lines.append(f'  "{a}" -- "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def complex_to_json(complex_: SimplicialComplex) -> dict:
    """Full simplex list in the instance-file style."""
    return {
        "vertices": sorted(complex_.vertices),
        "simplices": sorted(sorted(s) for s in complex_.simplices),
        "dimension_cap": complex_.dimension_cap,
    }
