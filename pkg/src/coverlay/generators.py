"""Instance generators: cyclic covers, glued wedge covers, random corpora.

Every generator self-tests on emit: the verdicts documented in the
instance manifest are recomputed and must match before the instance is
handed out.  Point names are zero-padded so lexicographic order agrees
with the intended cyclic or sheet order.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .errors import InputError, InternalInvariantError
from .groups import FiniteGroup, closure
from .instances import Instance
from .overlay import is_overlay_structure
from .spaces import Cover, CoverMap, FiniteSpace, is_covering_structure


def _cycle_names(n: int) -> list[str]:
    width = len(str(n - 1))
    return [f"{i:0{width}d}" for i in range(n)]


def _cycle_metric(names: list[str], eps: Fraction) -> dict:
    n = len(names)
    table = {}
    for i in range(n):
        for j in range(i + 1, n):
            gap = min(j - i, n - (j - i))
            table[(names[i], names[j])] = gap * eps
    return table


def cycle_space(n: int, eps: Fraction | None = None) -> FiniteSpace:
    """An n-point cycle, optionally with the scaled round-the-cycle metric."""
    if n < 1:
        raise InputError("cycles need at least one point")
    names = _cycle_names(n)
    metric = None if eps is None else _cycle_metric(names, Fraction(eps))
    return FiniteSpace(names, metric)


def arcs_cover(space: FiniteSpace, length: int) -> Cover:
    """All cyclic arcs of a given length, one per start point, deduplicated."""
    pts = space.sorted_points
    n = len(pts)
    if not 1 <= length:
        raise InputError("arcs need positive length")
    width = len(str(n - 1))
    sets = {f"a{i:0{width}d}": frozenset(pts[(i + j) % n] for j in range(min(length, n)))
            for i in range(n)}
    return Cover(space, sets)


def cycle_reduction(k: int, n: int, eps: Fraction | None = None) -> CoverMap:
    """The reduction of a kn-cycle onto an n-cycle, without structure."""
    big = cycle_space(k * n, eps)
    small = cycle_space(n, eps)
    bigpts, smallpts = big.sorted_points, small.sorted_points
    mapping = {bigpts[i]: smallpts[i % n] for i in range(k * n)}
    return CoverMap(big, small, mapping)


def gen_cycle_cover(k: int, n: int, m: int, eps: Fraction | None = None) -> Instance:
    """Cyclic cover instance: kn-cycle over n-cycle with length-m arcs.

    Expected verdicts, recorded in the manifest and self-tested: the arcs
    form a covering structure exactly when m <= n, and an overlay structure
    exactly when additionally the star width 2m-1 fits in the base (the
    one-sheet case k = 1 is injective, so always an overlay once covering).
    """
    if k < 1 or n < 3 or m < 1:
        raise InputError("need k >= 1, n >= 3, m >= 1")
    if m > k * n:
        raise InputError("arc length exceeds the total cycle")
    p = cycle_reduction(k, n, eps)
    structure = arcs_cover(p.domain, m)
    p = p.with_structure(structure)
    covering = m <= n
    overlay = covering and (k == 1 or 2 * m - 1 <= n)

    inst = Instance()
    inst.add_space("X", p.domain)
    inst.add_space("Y", p.codomain)
    inst.add_cover("S", structure, "X")
    inst.add_map("p", p, "X", "Y", "S")
    if eps is not None:
        inst.add_metric("dX", _space_metric(p.domain), "X")
        inst.add_metric("dY", _space_metric(p.codomain), "Y")
    name = f"cycle_k{k}_n{n}_m{m}" + (f"_eps{eps}".replace("/", "q") if eps else "")
    inst.manifest = {
        "name": name, "kind": "cycle", "map": "p", "structure": "S",
        "params": {"k": k, "n": n, "m": m},
        "expect": {"covering": covering, "overlay": overlay},
    }
    _self_test_cycle(inst)
    return inst


def _space_metric(space: FiniteSpace):
    from .metrics import MetricTable
    return MetricTable.from_space(space)


def _self_test_cycle(inst: Instance) -> None:
    p = inst.maps["p"]
    expect = inst.manifest["expect"]
    covering = is_covering_structure(p, p.structure)
    if covering != expect["covering"]:
        raise InternalInvariantError(f"{inst.name}: covering verdict {covering}")
    overlay = covering and is_overlay_structure(p).is_overlay
    if overlay != expect["overlay"]:
        raise InternalInvariantError(f"{inst.name}: overlay verdict {overlay}")


def _perm_group(k: int, *perms: tuple[int, ...]) -> set[tuple[int, ...]]:
    """Subgroup of the symmetric group on 1..k generated by image tuples."""
    identity = tuple(range(1, k + 1))
    elems = {identity}
    frontier = [identity]
    while frontier:
        g = frontier.pop()
        for s in perms:
            h = tuple(s[g[i] - 1] for i in range(k))
            if h not in elems:
                elems.add(h)
                frontier.append(h)
    return elems


def _check_permutation(sigma, k: int) -> tuple[int, ...]:
    s = tuple(sigma)
    if sorted(s) != list(range(1, k + 1)):
        raise InputError(f"{sigma!r} is not a permutation of 1..{k}")
    return s


def gen_wedge_cover(sigma_a, sigma_b) -> Instance:
    """A sheeted cover of a two-loop wedge graph, glued by two permutations.

    The base is a five-point model of two circles joined at a hub, each
    circle carrying two interior points; the base cover consists of the six
    edge pairs, which is fine enough for the lifted edge cover to be an
    overlay structure whatever the gluing.  Sheet i runs along loop "a"
    into sheet sigma_a(i) and along loop "b" into sheet sigma_b(i).  The
    generated permutation group must act transitively on the sheets so the
    total space is chain-connected.

    The manifest records the expected overlay, regularity, and deck-group
    order, derived independently from the permutation group: the cover is
    regular exactly when the stabilizer of a sheet is normal, and the deck
    group has one element per sheet fixed by every stabilizer element.
    """
    sa = _check_permutation(sigma_a, len(tuple(sigma_a)))
    k = len(sa)
    sb = _check_permutation(sigma_b, k)
    group = _perm_group(k, sa, sb)
    reachable = {g[0] for g in group}
    if reachable != set(range(1, k + 1)):
        raise InputError("the two permutations do not act transitively on the sheets")

    base_pts = ["a0", "a1", "b0", "b1", "h"]
    base = FiniteSpace(base_pts)
    base_sets = {
        "eA0": {"h", "a0"}, "eA1": {"a0", "a1"}, "eA2": {"a1", "h"},
        "eB0": {"h", "b0"}, "eB1": {"b0", "b1"}, "eB2": {"b1", "h"},
    }

    def sheet(label: str, i: int) -> str:
        return f"{label}_{i:02d}"

    total_pts = [sheet(lbl, i) for lbl in base_pts for i in range(1, k + 1)]
    total = FiniteSpace(total_pts)
    sets = {}
    for i in range(1, k + 1):
        sets[f"eA0_{i:02d}"] = {sheet("h", i), sheet("a0", i)}
        sets[f"eA1_{i:02d}"] = {sheet("a0", i), sheet("a1", i)}
        sets[f"eA2_{i:02d}"] = {sheet("a1", i), sheet("h", sa[i - 1])}
        sets[f"eB0_{i:02d}"] = {sheet("h", i), sheet("b0", i)}
        sets[f"eB1_{i:02d}"] = {sheet("b0", i), sheet("b1", i)}
        sets[f"eB2_{i:02d}"] = {sheet("b1", i), sheet("h", sb[i - 1])}
    structure = Cover(total, sets)
    mapping = {sheet(lbl, i): lbl for lbl in base_pts for i in range(1, k + 1)}
    p = CoverMap(total, base, mapping, structure)

    stabilizer = {g for g in group if g[0] == 1}
    normal = all(tuple(g[s[_inv(g, i) - 1] - 1] for i in range(1, k + 1)) in stabilizer
                 for g in group for s in stabilizer)
    deck_order = sum(1 for i in range(1, k + 1)
                     if all(s[i - 1] == i for s in stabilizer))

    inst = Instance()
    inst.add_space("X", total)
    inst.add_space("Y", base)
    inst.add_cover("S", structure, "X")
    inst.add_cover("U", Cover(base, base_sets), "Y")
    inst.add_map("p", p, "X", "Y", "S")
    inst.manifest = {
        "name": f"wedge_k{k}_a{''.join(map(str, sa))}_b{''.join(map(str, sb))}",
        "kind": "wedge", "map": "p", "structure": "S",
        "params": {"k": k, "sigma_a": list(sa), "sigma_b": list(sb)},
        "expect": {"covering": True, "overlay": True, "regular": normal,
                   "deck_order": deck_order, "irregular_witness": not normal},
    }
    _self_test_wedge(inst)
    return inst


def _inv(perm: tuple[int, ...], i: int) -> int:
    return perm.index(i) + 1


def _self_test_wedge(inst: Instance) -> None:
    p = inst.maps["p"]
    if not is_overlay_structure(p).is_overlay:
        raise InternalInvariantError(f"{inst.name}: lifted edges are not an overlay")


def random_instance(rng: random.Random, tag: str) -> Instance:
    """A random covering structure over a random surjection, at most 12 points.

    All fiber singletons are always included (they decompose each other),
    and a few random slice transversals are added together with the rest of
    their decompositions, so the family is a covering structure by
    construction; that is still re-checked before the instance is emitted.
    Overlay-ness varies with the overlaps between transversal draws.
    """
    ysize = rng.randint(1, 6)
    fiber_sizes = [rng.randint(1, 3) for _ in range(ysize)]
    while sum(fiber_sizes) > 12:
        fiber_sizes[rng.randrange(ysize)] = max(1, fiber_sizes[rng.randrange(ysize)] - 1)
    ypts = [f"y{i}" for i in range(ysize)]
    xpts = []
    mapping = {}
    fibers: dict[str, list[str]] = {}
    count = 0
    for y, size in zip(ypts, fiber_sizes):
        fibers[y] = []
        for _ in range(size):
            x = f"x{count:02d}"
            count += 1
            xpts.append(x)
            mapping[x] = y
            fibers[y].append(x)
    domain = FiniteSpace(xpts)
    codomain = FiniteSpace(ypts)

    family = [frozenset([x]) for x in xpts]
    by_depth: dict[int, list[str]] = {}
    for y, size in zip(ypts, fiber_sizes):
        by_depth.setdefault(size, []).append(y)
    for _ in range(rng.randint(0, 3)):
        depth = rng.choice(sorted(by_depth))
        pool = by_depth[depth]
        targets = rng.sample(pool, rng.randint(1, len(pool)))
        columns = {y: rng.sample(fibers[y], depth) for y in targets}
        for j in range(depth):
            family.append(frozenset(columns[y][j] for y in targets))

    structure = Cover(domain, family, id_prefix="s")
    p = CoverMap(domain, codomain, mapping, structure)
    if not is_covering_structure(p, structure):
        raise InternalInvariantError(f"{tag}: generated family is not a covering structure")

    inst = Instance()
    inst.add_space("X", domain)
    inst.add_space("Y", codomain)
    inst.add_cover("S", structure, "X")
    inst.add_map("p", p, "X", "Y", "S")
    inst.manifest = {"name": tag, "kind": "random", "map": "p", "structure": "S",
                     "expect": {"covering": True}}
    return inst


def gen_rotation_action(n: int, step: int, m: int) -> Instance:
    """A free rotation action on an n-cycle with the length-m arc cover.

    The group is the cyclic group generated by the rotation; arcs are
    rotation-invariant, so the cover is saturated for the action.
    """
    if n < 2 or not 1 <= m <= n:
        raise InputError("need n >= 2 and 1 <= m <= n")
    if step % n == 0:
        raise InputError("rotation step must move the cycle")
    space = cycle_space(n)
    pts = space.sorted_points
    order = n // _gcd(n, step)
    group = FiniteGroup.cyclic(order)
    perm = {g: {pts[i]: pts[(i + j * step) % n] for i in range(n)}
            for j, g in enumerate(group.elements)}
    from .actions import GroupAction
    action = GroupAction(group, space, perm)
    inst = Instance()
    inst.add_space("X", space)
    inst.add_group("G", group)
    inst.add_action("act", action, "G", "X")
    inst.add_cover("C", arcs_cover(space, m), "X")
    inst.manifest = {"name": f"rot_n{n}_s{step}_m{m}", "kind": "action",
                     "action": "act", "cover": "C",
                     "params": {"n": n, "step": step, "m": m}}
    return inst


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
