"""Chains against a cover, their lifts, and regularity probes.

A chain is a point sequence whose consecutive members share a cover
element; a loop is a chain returning to its start.  Lifting a chain along
a structured map means producing a chain upstairs, valid against the
structure cover, that maps onto it pointwise.  Overlay structures are
exactly the covers with unique lifts, and the one-step check below decides
that: longer chains lift stepwise, so existence and uniqueness propagate
by induction (the test-suite spot-checks longer chains as a guard).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InputError, InternalInvariantError, PreconditionError
from .overlay import is_overlay_structure
from .spaces import Cover, CoverMap, FiniteSpace, adjacency, image_cover


@dataclass(frozen=True)
class Chain:
    """A nonempty point sequence validated against a cover."""

    space: FiniteSpace
    points: tuple[str, ...]
    cover: Cover

    def __post_init__(self):
        if not self.points:
            raise InputError("a chain needs at least one point")
        if self.cover.space.points != self.space.points:
            raise InputError("chain cover lives on a different space")
        for x in self.points:
            if x not in self.space.points:
                raise InputError(f"chain point {x!r} is not in the space")
        for i in range(len(self.points) - 1):
            a, b = self.points[i], self.points[i + 1]
            if not any(a in s and b in s for _, s in self.cover):
                raise InputError(f"no cover element contains both {a} and {b}")

    @property
    def is_loop(self) -> bool:
        return self.points[0] == self.points[-1]

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True)
class Lift:
    """A structure-chain upstairs lying over a chain downstairs."""

    chain: Chain
    of: Chain
    map: CoverMap

    def __post_init__(self):
        if len(self.chain.points) != len(self.of.points):
            raise InputError("lift and base chain have different lengths")
        for x, y in zip(self.chain.points, self.of.points):
            if self.map(x) != y:
                raise InputError(f"lift point {x} does not lie over {y}")


def _structure_and_base(p: CoverMap) -> tuple[Cover, Cover]:
    if p.structure is None:
        raise InputError("map carries no structure cover")
    return p.structure, image_cover(p, p.structure)


def lift_chain(p: CoverMap, chain: Chain, start: str) -> list[Lift]:
    """All lifts of ``chain`` starting at ``start``, in lexicographic order.

    A lift step from x over (y, y') ranges over the points of the fiber of
    y' sharing a structure element with x.  Shared suffixes are memoized by
    (position, point).  For an overlay structure the result has exactly one
    entry; otherwise it may be empty or longer.
    """
    cover, base_cover = _structure_and_base(p)
    base = Chain(p.codomain, chain.points, base_cover)
    if start not in p.domain.points:
        raise InputError(f"{start!r} is not a point of the domain")
    if p(start) != base.points[0]:
        raise InputError("start point does not lie over the chain's first point")
    adj = adjacency(cover)
    n = len(base.points)
    memo: dict[tuple[int, str], tuple[tuple[str, ...], ...]] = {}

    def suffixes(i: int, x: str) -> tuple[tuple[str, ...], ...]:
        if i == n - 1:
            return ((x,),)
        key = (i, x)
        if key not in memo:
            out = []
            for nxt in sorted(p.fiber(base.points[i + 1]) & adj[x]):
                out.extend((x,) + rest for rest in suffixes(i + 1, nxt))
            memo[key] = tuple(out)
        return memo[key]

    return [Lift(chain=Chain(p.domain, seq, cover), of=base, map=p)
            for seq in suffixes(0, start)]


@dataclass(frozen=True)
class LiftingVerdict:
    """Whether every one-step chain lifts uniquely from every start."""

    holds: bool
    witness: tuple | None = None


def check_unique_lifting(p: CoverMap, cover: Cover | None = None) -> LiftingVerdict:
    """Existence-and-uniqueness of lifts, decided on one-step chains.

    Checks every pair of points sharing an image-cover element, from every
    admissible start: there must be exactly one continuation.  Stepwise
    induction extends the verdict to chains of any length.  On covering
    structures this agrees with the overlay verdict.
    """
    if cover is None:
        if p.structure is None:
            raise InputError("no cover given and the map carries no structure")
        cover = p.structure
    base_cover = image_cover(p, cover)
    adj = adjacency(cover)
    pairs = sorted({(y0, y1) for _, el in base_cover for y0 in el for y1 in el})
    for y0, y1 in pairs:
        for x0 in sorted(p.fiber(y0)):
            ends = p.fiber(y1) & adj[x0]
            if len(ends) != 1:
                return LiftingVerdict(False, ((y0, y1), x0, tuple(sorted(ends))))
    return LiftingVerdict(True)


@dataclass(frozen=True)
class IrregularLoop:
    """A loop downstairs with one returning and one straying lift."""

    loop: Chain
    loop_lift: Lift
    nonloop_lift: Lift

    def __post_init__(self):
        if not self.loop.is_loop:
            raise InputError("witness chain is not a loop")
        if not self.loop_lift.chain.is_loop or self.nonloop_lift.chain.is_loop:
            raise InputError("witness lifts do not have the claimed shapes")


def _transports(p: CoverMap, cover: Cover, base_cover: Cover):
    """Unique one-step transport maps between fibers over co-covered pairs."""
    adj = adjacency(cover)
    steps: dict[str, dict[str, dict[str, str]]] = {}
    pairs = sorted({(y0, y1) for _, el in base_cover for y0 in el for y1 in el if y0 != y1})
    for y0, y1 in pairs:
        t = {}
        for x in p.fiber(y0):
            ends = p.fiber(y1) & adj[x]
            if len(ends) != 1:
                raise InternalInvariantError("non-unique lift under an overlay structure")
            t[x] = next(iter(ends))
        steps.setdefault(y0, {})[y1] = t
    return steps


def find_irregular_loop(p: CoverMap, max_len: int | None = None) -> IrregularLoop | None:
    """Search bounded loops for one with both a returning and a straying lift.

    Breadth-first over (base point, fiber transport) states, so the
    shortest witness within the bound is found first.  ``None`` is not a
    regularity proof; the deck-transitivity check is the authoritative one.
    """
    cover, base_cover = _structure_and_base(p)
    verdict = is_overlay_structure(p, cover)
    if not verdict.is_overlay:
        raise PreconditionError("not an overlay structure", witness=verdict.witness)
    if max_len is None:
        max_len = 2 * len(p.domain)
    steps = _transports(p, cover, base_cover)
    for y0 in sorted(p.codomain.points):
        fiber0 = tuple(sorted(p.fiber(y0)))
        start = (y0, fiber0)
        parent: dict[tuple, tuple | None] = {start: None}
        depth = {start: 0}
        queue = deque([start])
        while queue:
            state = queue.popleft()
            y, imgs = state
            d = depth[state]
            if y == y0 and d >= 1:
                fixed = [a for a, b in zip(fiber0, imgs) if a == b]
                moved = [a for a, b in zip(fiber0, imgs) if a != b]
                if fixed and moved:
                    pts = []
                    node = state
                    while node is not None:
                        pts.append(node[0])
                        node = parent[node]
                    loop = Chain(p.codomain, tuple(reversed(pts)), base_cover)
                    good = lift_chain(p, loop, fixed[0])
                    bad = lift_chain(p, loop, moved[0])
                    if len(good) != 1 or len(bad) != 1:
                        raise InternalInvariantError("overlay lift was not unique")
                    return IrregularLoop(loop, good[0], bad[0])
            if d >= max_len:
                continue
            for y2 in sorted(steps.get(y, {})):
                t = steps[y][y2]
                nxt = (y2, tuple(t[x] for x in imgs))
                if nxt not in parent:
                    parent[nxt] = state
                    depth[nxt] = d + 1
                    queue.append(nxt)
    return None
