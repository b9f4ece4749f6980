"""Overlay structures: verdicts, and the two refinement constructions.

A covering structure is an overlay structure when every point's star is a
slice.  Two further characterizations are implemented side by side so the
three can be cross-checked on whole corpora: no element may meet two
distinct elements with equal images, and every intersection of elements
must map bijectively onto the intersection of their images.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InputError, InternalInvariantError, PreconditionError
from .spaces import (Cover, CoverMap, check_slice, covering_structure_defect,
                     image_cover, star)

OVERLAY_METHODS = ("definition", "prop44b", "prop44c")


@dataclass(frozen=True)
class OverlayVerdict:
    """Outcome of an overlay check; ``witness`` is set exactly on failure."""

    is_overlay: bool
    method: str
    witness: tuple | None = None


def _require_covering_structure(p: CoverMap, cover: Cover) -> None:
    defect = covering_structure_defect(p, cover)
    if defect is not None:
        cid, reason = defect
        raise PreconditionError(
            f"not a covering structure: element {cid} {reason}", witness=defect)


def is_overlay_structure(p: CoverMap, cover: Cover | None = None,
                         method: str = "definition") -> OverlayVerdict:
    """Decide overlay-ness of a covering structure by one of three routes.

    ``definition`` checks that every star is a slice.  ``prop44b`` checks
    that no element intersects two distinct elements with equal images.
    ``prop44c`` checks that every intersection of two elements is carried
    bijectively onto the intersection of the images.  The three agree on
    covering structures; the corpus suites assert exactly that.

    A cover that is not a covering structure is a precondition failure, not
    a negative verdict.
    """
    if cover is None:
        cover = p.structure
    if cover is None:
        raise InputError("no cover given and the map carries no structure")
    if method not in OVERLAY_METHODS:
        raise InputError(f"unknown method {method!r}")
    _require_covering_structure(p, cover)

    if method == "definition":
        for x in sorted(p.domain.points):
            st = star(x, cover)
            if check_slice(p, st) is None:
                return OverlayVerdict(False, method, ("star", x, st))
        return OverlayVerdict(True, method)

    if method == "prop44b":
        for uid, uset in cover:
            images: dict[frozenset, str] = {}
            for vid, vset in cover:
                if not (uset & vset):
                    continue
                img = p.image(vset)
                if img in images:
                    return OverlayVerdict(False, method, ("images", uid, images[img], vid))
                images[img] = vid
        return OverlayVerdict(True, method)

    ids = cover.ids()
    for i, uid in enumerate(ids):
        uset = cover.sets[uid]
        for vid in ids[i:]:
            vset = cover.sets[vid]
            inter = uset & vset
            if not inter:
                continue
            want = p.image(uset) & p.image(vset)
            got = p.image(inter)
            if len(got) != len(inter) or got != want:
                return OverlayVerdict(False, method, ("intersection", uid, vid))
    return OverlayVerdict(True, method)


def _blocks_by_image(p: CoverMap, cover: Cover) -> dict[frozenset, list[frozenset]]:
    """Group overlay-structure elements by image.

    For an overlay structure the elements sharing an image are exactly the
    slices over it: pairwise disjoint with union the whole preimage.  That
    is re-checked here rather than assumed.
    """
    groups: dict[frozenset, list[frozenset]] = {}
    for _, s in cover:
        groups.setdefault(p.image(s), []).append(s)
    for img, blocks in groups.items():
        region = frozenset().union(*(p.fiber(y) for y in img))
        union: set = set()
        for b in blocks:
            if union & b:
                raise InternalInvariantError("overlay slices over one image overlap")
            union |= b
        if union != region:
            raise InternalInvariantError("overlay slices miss part of a preimage")
    return groups


def refine_overlay_structure(p: CoverMap, cover: Cover, refinement: Cover) -> Cover:
    """Carry an overlay structure down to a refinement of its image cover.

    Every element W of ``refinement`` must sit inside some element of the
    image cover; the slices over that element are intersected with the
    preimage of W.  The result does not depend on which containing element
    is used, which is asserted, and is again an overlay structure whose
    image cover equals the refinement.
    """
    verdict = is_overlay_structure(p, cover)
    if not verdict.is_overlay:
        raise PreconditionError("not an overlay structure", witness=verdict.witness)
    if refinement.space.points != p.codomain.points:
        raise InputError("refinement must cover the codomain")
    groups = _blocks_by_image(p, cover)
    pieces: list[frozenset] = []
    for wid, wset in refinement:
        containers = [img for img in groups if wset <= img]
        if not containers:
            raise InputError(f"refinement element {wid} lies in no image element")
        pre = frozenset().union(*(p.fiber(y) for y in wset))
        families = []
        for img in sorted(containers, key=sorted):
            families.append(frozenset(b & pre for b in groups[img]))
        if any(f != families[0] for f in families[1:]):
            raise InternalInvariantError(
                f"slice choice over {wid} depends on the containing element")
        pieces.extend(families[0])
    out = Cover(p.domain, pieces, id_prefix="s")
    if not is_overlay_structure(p, out).is_overlay:
        raise InternalInvariantError("refined family is not an overlay structure")
    if image_cover(p, out).set_family() != refinement.set_family():
        raise InternalInvariantError("refined family has the wrong image cover")
    return out


def refine_to_covering_structure(p: CoverMap, slices: Cover) -> Cover:
    """Refine a cover by slices into a covering structure.

    Per fiber, each point keeps its lexicographically first containing
    element, trimmed to the common image of the fiber's choices, and the
    pairwise overlaps inside a fiber are removed.  The result is a covering
    structure refining the input.
    """
    for cid, s in slices:
        if check_slice(p, s) is None:
            raise InputError(f"element {cid} is not a slice")
    chosen: dict[str, frozenset] = {}
    for x in sorted(p.domain.points):
        first = slices.containing(x)[0]
        chosen[x] = slices.sets[first]
    common: dict[str, frozenset] = {}
    for y in sorted(p.codomain.points):
        imgs = [p.image(chosen[x]) for x in sorted(p.fiber(y))]
        acc = imgs[0]
        for img in imgs[1:]:
            acc &= img
        common[y] = acc
    trimmed: dict[str, frozenset] = {}
    for x in sorted(p.domain.points):
        region = frozenset().union(*(p.fiber(y) for y in common[p(x)]))
        trimmed[x] = chosen[x] & region
    pieces = []
    for x in sorted(p.domain.points):
        others = frozenset().union(
            *(trimmed[x] & trimmed[x2] for x2 in sorted(p.fiber(p(x))) if x2 != x))
        piece = trimmed[x] - others
        if piece:
            pieces.append(piece)
    out = Cover(p.domain, pieces, id_prefix="s")
    if covering_structure_defect(p, out) is not None:
        raise InternalInvariantError("trimmed family is not a covering structure")
    for _, s in out:
        if not any(s <= big for _, big in slices):
            raise InternalInvariantError("trimmed family does not refine the input")
    return out
