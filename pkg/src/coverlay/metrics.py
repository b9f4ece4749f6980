"""Exact rational metrics: local isometry checks and metric construction.

No floating point anywhere: distances are `fractions.Fraction` values and
every comparison is exact equality.  Balls are open throughout, which is
what makes the separation arguments below work with strict inequalities.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .errors import InputError, InternalInvariantError, PreconditionError
from .overlay import is_overlay_structure
from .spaces import (Cover, CoverMap, FiniteSpace, adjacency, chain_components,
                     image_cover, star)

PROVENANCES = ("given", "remetrized", "chain_constructed")


class MetricTable:
    """An exact metric on a finite space, tagged with how it arose."""

    def __init__(self, space: FiniteSpace, distances: Mapping, provenance: str = "given"):
        if provenance not in PROVENANCES:
            raise InputError(f"unknown provenance {provenance!r}")
        # FiniteSpace performs the full axiom validation.
        self._carrier = FiniteSpace(space.points, distances)
        self.space = space
        self.provenance = provenance

    @classmethod
    def from_space(cls, space: FiniteSpace, provenance: str = "given") -> "MetricTable":
        if space.metric is None:
            raise InputError("space carries no metric")
        return cls(space, space.metric, provenance)

    def d(self, x: str, y: str) -> Fraction:
        return self._carrier.distance(x, y)

    def ball(self, center: str, radius) -> frozenset[str]:
        r = Fraction(radius)
        return frozenset(z for z in self.space.points if self.d(center, z) < r)

    def pairs(self) -> dict[tuple[str, str], Fraction]:
        return dict(self._carrier.metric)

    def __repr__(self) -> str:
        return f"MetricTable({self.provenance}, {len(self.space)} points)"


def check_local_isometry(p: CoverMap, dx: MetricTable, dy: MetricTable, radius) -> bool:
    """Is the map an exact isometry from every r-ball onto its image r-ball?

    When it is, the family of r/3-balls upstairs is additionally asserted
    to be an overlay structure of the map; failure of that assertion is an
    internal error, never a verdict.
    """
    r = Fraction(radius)
    if r <= 0:
        raise InputError("radius must be positive")
    if dx.space.points != p.domain.points or dy.space.points != p.codomain.points:
        raise InputError("metric tables do not match the map's spaces")
    for x in sorted(p.domain.points):
        bx = dx.ball(x, r)
        by = dy.ball(p(x), r)
        images = [p(z) for z in sorted(bx)]
        if len(set(images)) != len(images) or set(images) != by:
            return False
        for z in bx:
            for w in bx:
                if dy.d(p(z), p(w)) != dx.d(z, w):
                    return False
    third = r / 3
    balls = Cover(p.domain, ({dx.ball(x, third) for x in p.domain.points}), id_prefix="b")
    if not is_overlay_structure(p, balls).is_overlay:
        raise InternalInvariantError("third-radius balls failed to form an overlay structure")
    return True


def remetrize_base(base: MetricTable, coarse: Cover, fine: Cover) -> MetricTable:
    """Inflate a base metric so that radius-2 balls respect the fine cover.

    Requires every star of the fine cover to sit inside a coarse element.
    The new distance adds, to the old one, the total variation of the
    indicator-over-degree partition of unity subordinate to the fine cover.
    Points sharing no fine element end up at distance above 2, so every
    radius-2 ball lands inside a star of the fine cover, hence inside a
    coarse element; both facts are asserted.
    """
    space = base.space
    if coarse.space.points != space.points or fine.space.points != space.points:
        raise InputError("covers do not live on the metric's space")
    for y in sorted(space.points):
        sty = star(y, fine)
        if not any(sty <= s for _, s in coarse):
            raise InputError(f"star of {y} in the fine cover fits in no coarse element")

    deg = {y: len(fine.containing(y)) for y in space.points}

    def phi(j: str, y: str) -> Fraction:
        return Fraction(1, deg[y]) if y in fine.sets[j] else Fraction(0)

    pts = space.sorted_points
    table = {}
    for i, y in enumerate(pts):
        for z in pts[i + 1:]:
            bump = sum((abs(phi(j, y) - phi(j, z)) for j in fine.ids()), Fraction(0))
            table[(y, z)] = base.d(y, z) + bump
    out = MetricTable(space, table, provenance="remetrized")
    for i, y in enumerate(pts):
        for z in pts[i + 1:]:
            if not any(y in s and z in s for _, s in fine):
                if out.d(y, z) <= 2:
                    raise InternalInvariantError(
                        f"separated pair ({y},{z}) ended up within distance 2")
    for y in pts:
        if not out.ball(y, 2) <= star(y, fine):
            raise InternalInvariantError(f"radius-2 ball at {y} leaves its star")
    return out


def chain_metric(p: CoverMap, dy: MetricTable) -> MetricTable:
    """Shortest-chain metric upstairs over a base metric downstairs.

    The structure cover must be an overlay structure whose image family is
    exactly the family of radius-2 balls of the base metric, and the domain
    must be chain-connected.  The distance between two points is the least
    total base-length of a structure chain joining them; on a finite space
    the minimum is attained by simple paths, so plain shortest paths on the
    shares-an-element graph compute it.

    Asserted afterwards: distinct points of one fiber sit at distance 2 or
    more, every distance dominates the distance of the images, and the map
    is an exact isometry on every unit ball.
    """
    cover = p.structure
    if cover is None:
        raise InputError("map carries no structure cover")
    if dy.space.points != p.codomain.points:
        raise InputError("base metric does not live on the codomain")
    verdict = is_overlay_structure(p, cover)
    if not verdict.is_overlay:
        raise PreconditionError("not an overlay structure", witness=verdict.witness)
    balls = frozenset(dy.ball(y, 2) for y in p.codomain.points)
    if image_cover(p, cover).set_family() != balls:
        raise PreconditionError(
            "structure images are not the radius-2 balls of the base metric")
    _require_connected_domain(cover)

    pts = p.domain.sorted_points
    index = {x: i for i, x in enumerate(pts)}
    n = len(pts)
    dist: list[list[Fraction | None]] = [[None] * n for _ in range(n)]
    for i in range(n):
        dist[i][i] = Fraction(0)
    adj = adjacency(cover)
    for x in pts:
        for z in adj[x]:
            if z == x:
                continue
            w = dy.d(p(x), p(z))
            i, j = index[x], index[z]
            if dist[i][j] is None or w < dist[i][j]:
                dist[i][j] = dist[j][i] = w
    for k in range(n):
        for i in range(n):
            dik = dist[i][k]
            if dik is None:
                continue
            for j in range(n):
                dkj = dist[k][j]
                if dkj is None:
                    continue
                alt = dik + dkj
                if dist[i][j] is None or alt < dist[i][j]:
                    dist[i][j] = alt

    table = {}
    for i, x in enumerate(pts):
        for j in range(i + 1, n):
            d = dist[i][j]
            if d is None:
                raise InternalInvariantError("connected domain produced no path")
            table[(x, pts[j])] = d
    out = MetricTable(p.domain, table, provenance="chain_constructed")

    for y in sorted(p.codomain.points):
        fib = sorted(p.fiber(y))
        for i, x in enumerate(fib):
            for z in fib[i + 1:]:
                if out.d(x, z) < 2:
                    raise InternalInvariantError(
                        f"fiber points {x},{z} are closer than 2")
    for i, x in enumerate(pts):
        for z in pts[i + 1:]:
            if out.d(x, z) < dy.d(p(x), p(z)):
                raise InternalInvariantError(
                    f"distance of ({x},{z}) undercuts the image distance")
    if not check_local_isometry(p, out, dy, Fraction(1)):
        raise InternalInvariantError("unit balls failed to map isometrically")
    return out


def _require_connected_domain(cover: Cover) -> None:
    comps = chain_components(cover)
    if len(comps) > 1:
        a, b = min(comps[0]), min(comps[1])
        raise InputError(
            f"domain is chain-disconnected: {a} and {b} lie in different components")
