"""Group actions on finite spaces, quotients, deck groups, and regularity.

Connectivity throughout is chain connectivity: the transitive closure of
the shares-a-structure-element relation.  Deck transformations are grown
along a spanning tree from a base point by unique chain lifting and then
verified globally; each one is determined by its value at the base point.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import InputError, InternalInvariantError, PreconditionError
from .groups import FiniteGroup
from .overlay import is_overlay_structure
from .spaces import (Cover, CoverMap, FiniteSpace, adjacency, chain_components,
                     is_covering_structure, star)


class GroupAction:
    """A finite group acting by permutations on a finite space."""

    def __init__(self, group: FiniteGroup, space: FiniteSpace,
                 perm: dict[str, dict[str, str]]):
        self.group = group
        self.space = space
        if set(perm) != set(group.elements):
            raise InputError("permutation table is not total on the group")
        pts = space.points
        for g, table in perm.items():
            if set(table) != set(pts) or set(table.values()) != set(pts):
                raise InputError(f"{g} does not act as a permutation")
        e = group.identity
        if any(perm[e][x] != x for x in pts):
            raise InputError("identity does not act trivially")
        for g in group.elements:
            for h in group.elements:
                gh = group.mult(g, h)
                for x in pts:
                    if perm[g][perm[h][x]] != perm[gh][x]:
                        raise InputError(f"action is not a homomorphism at ({g},{h})")
        self.perm = {g: dict(t) for g, t in perm.items()}

    def apply(self, g: str, x: str) -> str:
        return self.perm[g][x]

    def translate(self, g: str, subset: Iterable[str]) -> frozenset[str]:
        return frozenset(self.perm[g][x] for x in subset)

    def orbit(self, x: str) -> frozenset[str]:
        return frozenset(self.perm[g][x] for g in self.group.elements)

    def orbits(self) -> tuple[frozenset[str], ...]:
        seen: set[str] = set()
        out = []
        for x in sorted(self.space.points):
            if x not in seen:
                orb = self.orbit(x)
                seen |= orb
                out.append(orb)
        return tuple(out)

    def __repr__(self) -> str:
        return f"GroupAction({self.group.name} on {len(self.space)} points)"


def is_free(action: GroupAction) -> bool:
    """No element other than the identity fixes a point."""
    e = action.group.identity
    return all(action.perm[g][x] != x
               for g in action.group.elements if g != e
               for x in action.space.points)


def is_action_slice(action: GroupAction, subset: Iterable[str]) -> bool:
    """A set meeting its own translates only under the identity."""
    u = frozenset(subset)
    if not u:
        raise InputError("the empty set is not a candidate slice")
    if not u <= action.space.points:
        raise InputError("candidate slice leaves the space")
    e = action.group.identity
    return all(not (u & action.translate(g, u))
               for g in action.group.elements if g != e)


def quotient(action: GroupAction) -> tuple[FiniteSpace, CoverMap]:
    """Orbit space and projection; representatives are lexicographic minima."""
    rep = {x: min(action.orbit(x)) for x in action.space.points}
    qspace = FiniteSpace(set(rep.values()))
    return qspace, CoverMap(action.space, qspace, rep)


ACTION_METHODS = ("def31", "prop33b")


def is_overlay_action(action: GroupAction, cover: Cover, method: str = "def31") -> bool:
    """Decide overlay-ness of a free action against a given cover.

    ``def31``: the cover is a covering structure of the orbit projection
    and every star is a slice of the action.  ``prop33b``: every pair of
    elements admits a group translate making their union a slice of the
    action.  The two agree on saturated covers; the corpus suite asserts it.
    """
    if method not in ACTION_METHODS:
        raise InputError(f"unknown method {method!r}")
    if not is_free(action):
        raise InputError("action is not free")
    if cover.space.points != action.space.points:
        raise InputError("cover lives on a different space")
    if method == "def31":
        _, proj = quotient(action)
        if not is_covering_structure(proj, cover):
            return False
        return all(is_action_slice(action, star(x, cover))
                   for x in sorted(action.space.points))
    for _, uset in cover:
        for _, vset in cover:
            if not any(is_action_slice(action, uset | action.translate(g, vset))
                       for g in action.group.elements):
                return False
    return True


@dataclass(frozen=True)
class DeckGroup:
    """Self-maps commuting with the projection and permuting the structure."""

    map: CoverMap
    transformations: tuple[dict, ...]

    def __len__(self) -> int:
        return len(self.transformations)

    def orbit(self, x: str) -> frozenset[str]:
        return frozenset(h[x] for h in self.transformations)

    def orbits(self) -> tuple[frozenset[str], ...]:
        seen: set[str] = set()
        out = []
        for x in sorted(self.map.domain.points):
            if x not in seen:
                orb = self.orbit(x)
                seen |= orb
                out.append(orb)
        return tuple(out)

    def is_transitive_on(self, fiber: frozenset[str]) -> bool:
        return self.orbit(min(fiber)) == fiber

    def permutation_lists(self) -> list[list[str]]:
        pts = self.map.domain.sorted_points
        return [[h[x] for x in pts] for h in self.transformations]

    def as_group(self) -> FiniteGroup:
        pts = self.map.domain.sorted_points
        keys = [tuple(h[x] for x in pts) for h in self.transformations]
        width = max(2, len(str(len(keys) - 1)))
        names = {k: f"d{i:0{width}d}" for i, k in enumerate(sorted(keys))}
        table = {}
        for h, kh in zip(self.transformations, keys):
            for g, kg in zip(self.transformations, keys):
                comp = tuple(h[g[x]] for x in pts)
                table[(names[kh], names[kg])] = names[comp]
        return FiniteGroup(sorted(names.values()), table, name="deck")


def _checked_overlay(p: CoverMap, cover: Cover | None) -> Cover:
    if cover is None:
        cover = p.structure
    if cover is None:
        raise InputError("no cover given and the map carries no structure")
    verdict = is_overlay_structure(p, cover)
    if not verdict.is_overlay:
        raise PreconditionError("not an overlay structure", witness=verdict.witness)
    return cover


def _require_connected(cover: Cover) -> None:
    comps = chain_components(cover)
    if len(comps) > 1:
        a, b = min(comps[0]), min(comps[1])
        raise InputError(
            f"domain is chain-disconnected: {a} and {b} lie in different components")


def _spanning_tree(cover: Cover, root: str) -> list[tuple[str, str]]:
    """BFS tree edges (child, parent) in deterministic order."""
    adj = adjacency(cover)
    seen = {root}
    order: list[tuple[str, str]] = []
    frontier = [root]
    while frontier:
        nxt = []
        for z in frontier:
            for w in sorted(adj[z]):
                if w not in seen:
                    seen.add(w)
                    order.append((w, z))
                    nxt.append(w)
        frontier = nxt
    return order


def deck_group(p: CoverMap, cover: Cover | None = None) -> DeckGroup:
    """All deck transformations, grown by chain transport from a base point.

    For each point of the base fiber, the assignment base -> point extends
    along a spanning tree by unique lifting; candidates failing to be
    structure-preserving bijections over the map are discarded.  Distinct
    survivors differ at the base point by construction.
    """
    cover = _checked_overlay(p, cover)
    _require_connected(cover)
    adj = adjacency(cover)
    x0 = min(p.domain.points)
    tree = _spanning_tree(cover, x0)
    family = cover.set_family()
    found = []
    for x1 in sorted(p.fiber(p(x0))):
        h = {x0: x1}
        for child, parent in tree:
            ends = p.fiber(p(child)) & adj[h[parent]]
            if len(ends) != 1:
                raise InternalInvariantError("non-unique transport under an overlay")
            h[child] = next(iter(ends))
        if len(set(h.values())) != len(p.domain):
            continue
        if any(frozenset(h[x] for x in s) not in family for s in family):
            continue
        found.append(h)
    pts = p.domain.sorted_points
    found.sort(key=lambda h: tuple(h[x] for x in pts))
    group = DeckGroup(p, tuple(found))
    _validate_deck_closure(group)
    return group


def _validate_deck_closure(group: DeckGroup) -> None:
    pts = group.map.domain.sorted_points
    keys = {tuple(h[x] for x in pts) for h in group.transformations}
    if tuple(pts) not in keys:
        raise InternalInvariantError("deck group is missing the identity")
    for h in group.transformations:
        for g in group.transformations:
            if tuple(h[g[x]] for x in pts) not in keys:
                raise InternalInvariantError("deck transformations are not closed")
        inv = {v: k for k, v in h.items()}
        if tuple(inv[x] for x in pts) not in keys:
            raise InternalInvariantError("deck group is missing an inverse")


def is_regular(p: CoverMap, cover: Cover | None = None) -> bool:
    """Deck transitivity on the base fiber; the authoritative regularity test.

    When transitive, the orbit partition is checked to agree with the fiber
    partition, which realizes the quotient comparison: orbits biject with
    base points compatibly with the projections.
    """
    group = deck_group(p, cover)
    x0 = min(p.domain.points)
    transitive = group.is_transitive_on(p.fiber(p(x0)))
    if transitive:
        orbits = set(group.orbits())
        fibers = set(p.fibers().values())
        if orbits != fibers:
            raise InternalInvariantError("deck orbits disagree with fibers")
    return transitive


def factor_through_deck(p: CoverMap, cover: Cover | None = None) -> tuple[CoverMap, CoverMap]:
    """Split the map into the deck-orbit projection and an induced overlay.

    Returns (projection, induced map); the composition equals the original
    map pointwise, and the induced map carries the images of the structure
    elements as its own overlay structure, which is asserted.
    """
    cover = _checked_overlay(p, cover)
    group = deck_group(p, cover)
    rep = {x: min(group.orbit(x)) for x in p.domain.points}
    qspace = FiniteSpace(set(rep.values()))
    proj = CoverMap(p.domain, qspace, rep, structure=cover)
    qsets = {frozenset(rep[x] for x in s) for _, s in cover}
    qcover = Cover(qspace, qsets, id_prefix="q")
    induced = CoverMap(qspace, p.codomain, {r: p(r) for r in qspace.points},
                       structure=qcover)
    for x in p.domain.points:
        if induced(proj(x)) != p(x):
            raise InternalInvariantError("factorization does not compose to the map")
    if not is_overlay_structure(induced, qcover).is_overlay:
        raise InternalInvariantError("induced map is not an overlay")
    return proj, induced
