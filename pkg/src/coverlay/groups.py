"""Finite groups as explicit multiplication tables, plus subgroup utilities.

Everything is validated at construction: closure, identity, inverses, and
associativity (exhaustively up to order 64, by seeded sampling above).
Element names are opaque strings; the cyclic and dihedral constructors
zero-pad indices so lexicographic order matches numeric order.
"""

from __future__ import annotations

import random
from typing import Iterable, Mapping

from .errors import InputError

_ASSOC_EXHAUSTIVE_LIMIT = 64
_ASSOC_SAMPLES = 20000


class FiniteGroup:
    def __init__(self, elements: Iterable[str], table: Mapping, name: str = ""):
        elems = tuple(elements)
        if len(set(elems)) != len(elems) or not elems:
            raise InputError("group elements must be distinct and nonempty")
        self.elements = elems
        self.name = name or f"group{len(elems)}"
        t = {(str(a), str(b)): str(c) for (a, b), c in table.items()}
        eset = set(elems)
        for a in elems:
            for b in elems:
                c = t.get((a, b))
                if c is None:
                    raise InputError(f"table is missing the product ({a},{b})")
                if c not in eset:
                    raise InputError(f"product ({a},{b}) leaves the group")
        self.table = t
        identity = None
        for e in elems:
            if all(t[(e, a)] == a == t[(a, e)] for a in elems):
                identity = e
                break
        if identity is None:
            raise InputError("no identity element")
        self.identity = identity
        inv = {}
        for a in elems:
            for b in elems:
                if t[(a, b)] == identity == t[(b, a)]:
                    inv[a] = b
                    break
            else:
                raise InputError(f"{a} has no inverse")
        self.inverse_table = inv
        self._check_associativity()

    def _check_associativity(self):
        elems = self.elements
        if len(elems) <= _ASSOC_EXHAUSTIVE_LIMIT:
            triples = ((a, b, c) for a in elems for b in elems for c in elems)
        else:
            rng = random.Random(0)
            triples = ((rng.choice(elems), rng.choice(elems), rng.choice(elems))
                       for _ in range(_ASSOC_SAMPLES))
        for a, b, c in triples:
            if self.mult(self.mult(a, b), c) != self.mult(a, self.mult(b, c)):
                raise InputError(f"associativity fails at ({a},{b},{c})")

    def mult(self, a: str, b: str) -> str:
        try:
            return self.table[(a, b)]
        except KeyError:
            raise InputError(f"({a!r},{b!r}) is not a pair of group elements") from None

    def inv(self, a: str) -> str:
        try:
            return self.inverse_table[a]
        except KeyError:
            raise InputError(f"{a!r} is not a group element") from None

    def order(self) -> int:
        return len(self.elements)

    def element_order(self, a: str) -> int:
        n, x = 1, a
        while x != self.identity:
            x = self.mult(x, a)
            n += 1
        return n

    @classmethod
    def from_matrix(cls, elements: Iterable[str], rows: Iterable[Iterable[str]],
                    name: str = "") -> "FiniteGroup":
        elems = tuple(elements)
        table = {}
        for a, row in zip(elems, rows):
            row = tuple(row)
            if len(row) != len(elems):
                raise InputError("table rows must match the element count")
            for b, c in zip(elems, row):
                table[(a, b)] = c
        return cls(elems, table, name)

    @classmethod
    def cyclic(cls, n: int) -> "FiniteGroup":
        if n < 1:
            raise InputError("cyclic groups need positive order")
        width = len(str(n - 1))
        names = [f"{i:0{width}d}" for i in range(n)]
        table = {(names[i], names[j]): names[(i + j) % n]
                 for i in range(n) for j in range(n)}
        return cls(names, table, name=f"Z{n}")

    @classmethod
    def dihedral(cls, n: int) -> "FiniteGroup":
        """Symmetries of the n-gon, order 2n: rotations r_i, reflections s_i."""
        if n < 1:
            raise InputError("dihedral groups need positive n")
        width = len(str(n - 1))
        r = [f"r{i:0{width}d}" for i in range(n)]
        s = [f"s{i:0{width}d}" for i in range(n)]
        table = {}
        for i in range(n):
            for j in range(n):
                table[(r[i], r[j])] = r[(i + j) % n]
                table[(r[i], s[j])] = s[(i + j) % n]
                table[(s[i], r[j])] = s[(i - j) % n]
                table[(s[i], s[j])] = r[(i - j) % n]
        return cls(r + s, table, name=f"D{n}")

    def __repr__(self) -> str:
        return f"FiniteGroup({self.name}, order {len(self.elements)})"


def closure(group: FiniteGroup, seed: Iterable[str]) -> frozenset[str]:
    current = set(seed) | {group.identity}
    grown = True
    while grown:
        grown = False
        for a in sorted(current):
            for b in sorted(current):
                c = group.mult(a, b)
                if c not in current:
                    current.add(c)
                    grown = True
    return frozenset(current)


def is_subgroup(group: FiniteGroup, subset: Iterable[str]) -> bool:
    h = frozenset(subset)
    if group.identity not in h or not h <= set(group.elements):
        return False
    return all(group.mult(a, b) in h for a in h for b in h) and \
        all(group.inv(a) in h for a in h)


def subgroups(group: FiniteGroup) -> tuple[frozenset[str], ...]:
    """All subgroups, found by closing each known subgroup with one element."""
    trivial = frozenset([group.identity])
    found = {trivial}
    frontier = [trivial]
    while frontier:
        h = frontier.pop()
        for g in group.elements:
            if g in h:
                continue
            k = closure(group, h | {g})
            if k not in found:
                found.add(k)
                frontier.append(k)
    return tuple(sorted(found, key=lambda s: (len(s), sorted(s))))


def is_normal(group: FiniteGroup, subgroup: Iterable[str]) -> bool:
    h = frozenset(subgroup)
    return all(group.mult(group.mult(g, a), group.inv(g)) in h
               for g in group.elements for a in h)


def normal_subgroups(group: FiniteGroup) -> tuple[frozenset[str], ...]:
    return tuple(h for h in subgroups(group) if is_normal(group, h))


def product_set(group: FiniteGroup, left: Iterable[str], right: Iterable[str]) -> frozenset[str]:
    return frozenset(group.mult(a, b) for a in left for b in right)


def inverse_set(group: FiniteGroup, subset: Iterable[str]) -> frozenset[str]:
    return frozenset(group.inv(a) for a in subset)


def quotient_group(group: FiniteGroup, subgroup: Iterable[str]):
    """Quotient by a normal subgroup; returns (quotient, projection map).

    Coset representatives are lexicographic minima, and the quotient's
    elements are exactly those representative names.
    """
    h = frozenset(subgroup)
    if not is_subgroup(group, h):
        raise InputError("not a subgroup")
    if not is_normal(group, h):
        raise InputError("subgroup is not normal")
    rep = {}
    for g in group.elements:
        rep[g] = min(group.mult(g, a) for a in h)
    reps = sorted(set(rep.values()))
    table = {(a, b): rep[group.mult(a, b)] for a in reps for b in reps}
    return FiniteGroup(reps, table, name=f"{group.name}/{len(h)}"), rep


def generating_sequence(group: FiniteGroup) -> tuple[str, ...]:
    gens: list[str] = []
    have = closure(group, [])
    for g in sorted(group.elements):
        if g not in have:
            gens.append(g)
            have = closure(group, gens)
        if len(have) == group.order():
            break
    return tuple(gens)


def _extend_hom(a: FiniteGroup, b: FiniteGroup, gen_images: dict[str, str]):
    """Grow a generator assignment into a full homomorphism, or fail."""
    images = {a.identity: b.identity}
    images.update(gen_images)
    frontier = sorted(images)
    while frontier:
        nxt = []
        for x in frontier:
            for g, img in gen_images.items():
                y = a.mult(x, g)
                want = b.mult(images[x], img)
                if y in images:
                    if images[y] != want:
                        return None
                else:
                    images[y] = want
                    nxt.append(y)
        frontier = nxt
    if len(images) != a.order():
        return None
    return images


def find_isomorphism(a: FiniteGroup, b: FiniteGroup) -> dict[str, str] | None:
    """Brute-force isomorphism search, meant for orders up to about 20."""
    if a.order() != b.order():
        return None
    profile = sorted(a.element_order(x) for x in a.elements)
    if profile != sorted(b.element_order(x) for x in b.elements):
        return None
    gens = generating_sequence(a)
    by_order: dict[int, list[str]] = {}
    for y in b.elements:
        by_order.setdefault(b.element_order(y), []).append(y)

    def assign(i: int, chosen: dict[str, str]):
        if i == len(gens):
            images = _extend_hom(a, b, chosen)
            if images and len(set(images.values())) == b.order():
                ok = all(images[a.mult(x, y)] == b.mult(images[x], images[y])
                         for x in a.elements for y in a.elements)
                if ok:
                    return images
            return None
        g = gens[i]
        for y in by_order.get(a.element_order(g), []):
            chosen[g] = y
            out = assign(i + 1, chosen)
            if out:
                return out
            del chosen[g]
        return None

    return assign(0, {})
