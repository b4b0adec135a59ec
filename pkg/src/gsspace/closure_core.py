"""Finite Fréchet (V) closure spaces.

A closure operator on a finite set is determined by its fixed points, so a
space is stored as an intersection-closed family of closed sets that contains
the empty set and the whole ground set.  Subsets are bitmasks over the indexed
ground set; ``closure(S)`` is the smallest closed superset of ``S``.

On top of that representation this module provides separation properties,
the tie relation (two points are tied when they are equal or the pair is not
closed) and its transitive closure, the class and closure-of-class transforms,
pullbacks, subspaces, continuity and homeomorphism search.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Mapping, Sequence

MAX_GROUND = 24


class ClosureSpaceError(ValueError):
    """Raised for families violating the closure axioms or malformed input."""


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


@dataclass(frozen=True, eq=False)
class FiniteClosureSpace:
    """Validated closure space. Build it with :func:`from_closed_family`."""

    ground: tuple
    closed_masks: frozenset
    _index: Mapping = field(repr=False, compare=False)
    _sorted_closed: tuple = field(repr=False, compare=False)

    @property
    def size(self) -> int:
        return len(self.ground)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.ground)) - 1

    def mask(self, subset: Iterable) -> int:
        m = 0
        for x in subset:
            try:
                m |= 1 << self._index[x]
            except KeyError:
                raise ClosureSpaceError(f"element {x!r} not in ground set") from None
        return m

    def labels(self, mask: int) -> frozenset:
        return frozenset(self.ground[i] for i in _bits(mask))

    def ordered(self, mask: int) -> tuple:
        return tuple(self.ground[i] for i in _bits(mask))

    def index(self, label) -> int:
        return self._index[label]

    @property
    def closed_family(self) -> frozenset:
        return frozenset(self.labels(m) for m in self.closed_masks)

    def closure_mask(self, mask: int) -> int:
        # closed sets sorted by size, so the first superset found is the smallest
        for c in self._sorted_closed:
            if c & mask == mask:
                return c
        raise AssertionError("ground set missing from family")

    def closure(self, subset: Iterable) -> frozenset:
        return self.labels(self.closure_mask(self.mask(subset)))

    def is_closed(self, subset: Iterable) -> bool:
        return self.mask(subset) in self.closed_masks

    def __eq__(self, other):
        if not isinstance(other, FiniteClosureSpace):
            return NotImplemented
        return set(self.ground) == set(other.ground) and self.closed_family == other.closed_family

    def __hash__(self):
        return hash((frozenset(self.ground), self.closed_family))


def _space_from_masks(ground: tuple, masks: Iterable[int]) -> FiniteClosureSpace:
    masks = frozenset(masks)
    index = {x: i for i, x in enumerate(ground)}
    ordered = tuple(sorted(masks, key=lambda m: (_popcount(m), m)))
    return FiniteClosureSpace(ground, masks, index, ordered)


def _check_ground(ground: Sequence) -> tuple:
    ground = tuple(ground)
    if len(set(ground)) != len(ground):
        raise ClosureSpaceError("ground set has repeated labels")
    if len(ground) > MAX_GROUND:
        raise ClosureSpaceError(f"ground sets above {MAX_GROUND} elements are not supported")
    return ground


def from_closed_family(ground: Iterable, family: Iterable[Iterable]) -> FiniteClosureSpace:
    """Validate ``family`` as the closed sets of a closure space on ``ground``.

    Raises :class:`ClosureSpaceError` naming the violated axiom: the empty set
    must be closed (axiom (i)), the ground set must be closed, and the family
    must be closed under pairwise intersection.
    """
    ground = _check_ground(ground)
    index = {x: i for i, x in enumerate(ground)}
    masks = set()
    for member in family:
        m = 0
        for x in member:
            if x not in index:
                raise ClosureSpaceError(f"family member contains {x!r} outside the ground set")
            m |= 1 << index[x]
        masks.add(m)
    full = (1 << len(ground)) - 1
    if 0 not in masks:
        raise ClosureSpaceError("axiom (i) violated: the empty set is not closed")
    if full not in masks:
        raise ClosureSpaceError("the ground set is not closed")
    for a, b in combinations(sorted(masks), 2):
        if a & b not in masks:
            la = [ground[i] for i in _bits(a)]
            lb = [ground[i] for i in _bits(b)]
            raise ClosureSpaceError(f"family not intersection-closed: {la} ∩ {lb} is missing")
    return _space_from_masks(ground, masks)


def from_operator(ground: Iterable, operator: Callable[[frozenset], Iterable]) -> FiniteClosureSpace:
    """Build a space from a closure operator given on label sets.

    Every subset is evaluated, so the axioms are checked exhaustively: the
    operator must be extensive, idempotent and monotone, and fix the empty set.
    """
    ground = _check_ground(ground)
    n = len(ground)
    index = {x: i for i, x in enumerate(ground)}
    image = []
    for mask in range(1 << n):
        out = 0
        for x in operator(frozenset(ground[i] for i in _bits(mask))):
            out |= 1 << index[x]
        image.append(out)
    problems = check_operator_axioms(image)
    if problems:
        raise ClosureSpaceError(problems[0])
    return _space_from_masks(ground, {m for m in range(1 << n) if image[m] == m})


def check_operator_axioms(image: Sequence[int]) -> list:
    """List violations of the closure axioms for an operator tabulated on all masks."""
    problems = []
    if image[0] != 0:
        problems.append("axiom (i) violated: closure of the empty set is not empty")
    for s, cs in enumerate(image):
        if cs & s != s:
            problems.append(f"not extensive at mask {s}")
        if image[cs] != cs:
            problems.append(f"not idempotent at mask {s}")
    size = len(image)
    for s in range(size):
        for i in _bits((size - 1) & ~s):
            t = s | (1 << i)
            if image[s] & image[t] != image[s]:
                problems.append(f"not monotone between masks {s} and {t}")
    return problems


def closure(space: FiniteClosureSpace, subset: Iterable) -> frozenset:
    return space.closure(subset)


def is_topologizable(space: FiniteClosureSpace) -> bool:
    """True iff the closed sets are closed under pairwise union."""
    fam = space.closed_masks
    return all(a | b in fam for a, b in combinations(fam, 2))


def separation_flags(space: FiniteClosureSpace) -> tuple:
    """Return ``(t0, t1)``."""
    fam = space.closed_masks
    n = space.size
    t1 = all((1 << i) in fam for i in range(n))
    t0 = True
    for i, j in combinations(range(n), 2):
        bi, bj = 1 << i, 1 << j
        if not any(bool(c & bi) != bool(c & bj) for c in fam):
            t0 = False
            break
    return t0, t1


def tie(space: FiniteClosureSpace, s, t) -> bool:
    """Points are tied when equal or when the pair ``{s, t}`` is not closed."""
    if s == t:
        return True
    return not space.is_closed((s, t))


def equivalence_structure(space: FiniteClosureSpace):
    """Return the tie relation (set of unordered pairs) and the classes of its transitive closure.

    Classes are tuples in ground order, themselves listed by first element.
    """
    n = space.size
    ties = set()
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in combinations(range(n), 2):
        if ((1 << i) | (1 << j)) not in space.closed_masks:
            ties.add(frozenset((space.ground[i], space.ground[j])))
            parent[find(i)] = find(j)
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    classes = sorted((tuple(space.ground[i] for i in g) for g in groups.values()),
                     key=lambda c: space.index(c[0]))
    return ties, classes


def chain_length(space: FiniteClosureSpace, s, t):
    """Fewest tie steps from ``s`` to ``t`` (``None`` when in different classes)."""
    if s == t:
        return 0
    frontier, seen, steps = {s}, {s}, 0
    while frontier:
        steps += 1
        nxt = set()
        for a in frontier:
            for b in space.ground:
                if b not in seen and tie(space, a, b):
                    if b == t:
                        return steps
                    nxt.add(b)
        seen |= nxt
        frontier = nxt
    return None


@dataclass(frozen=True)
class TransformResult:
    """Both transforms of a space, plus the surjection between them.

    ``delta`` sends each class (a ``g_space`` label) to its closure (a
    ``p_space`` label).  Labels are tuples of original labels in ground order.
    """

    g_space: FiniteClosureSpace
    p_space: FiniteClosureSpace
    delta: Mapping

    def delta_image(self, classes: Iterable) -> frozenset:
        return frozenset(self.delta[c] for c in classes)

    def delta_preimage(self, closures: Iterable) -> frozenset:
        closures = set(closures)
        return frozenset(c for c, d in self.delta.items() if d in closures)


def class_operators(space: FiniteClosureSpace):
    """The transform closure operators straight from their definitions.

    Returns ``(classes, delta, p_op, g_op)`` where ``p_op`` acts on sets of
    closures of classes and ``g_op`` on sets of classes.  Used to build
    :func:`transforms` and to cross-check it.
    """
    _, classes = equivalence_structure(space)
    class_mask = {c: space.mask(c) for c in classes}
    closure_of = {c: space.closure_mask(class_mask[c]) for c in classes}
    delta = {c: space.ordered(closure_of[c]) for c in classes}
    member_class = {x: c for c in classes for x in c}

    def p_op(targets: Iterable) -> frozenset:
        targets = set(targets)
        # union of the classes whose closure is in the argument, then its closure
        pool = 0
        for x in space.ground:
            if delta[member_class[x]] in targets:
                pool |= 1 << space.index(x)
        bound = space.closure_mask(pool)
        return frozenset(delta[c] for c in classes if closure_of[c] & bound == closure_of[c])

    def g_op(chosen: Iterable) -> frozenset:
        chosen = set(chosen)
        image = p_op({delta[c] for c in chosen})
        return frozenset(c for c in classes if delta[c] in image)

    return classes, delta, p_op, g_op


def transforms(space: FiniteClosureSpace) -> TransformResult:
    """Class space (``g_space``) and closure-of-class space (``p_space``).

    The empty space has empty transforms.
    """
    classes, delta, p_op, g_op = class_operators(space)
    p_ground = []
    for c in classes:
        if delta[c] not in p_ground:
            p_ground.append(delta[c])
    p_ground.sort(key=lambda lbl: [space.index(x) for x in lbl])
    p_space = from_operator(p_ground, p_op)
    g_space = from_operator(classes, g_op)
    return TransformResult(g_space, p_space, dict(delta))


def pullback_space(ground: Iterable, f: Mapping, target: FiniteClosureSpace) -> FiniteClosureSpace:
    """Coarsest structure on ``ground`` making ``f`` continuous: closed sets are preimages."""
    ground = _check_ground(ground)
    for x in ground:
        if x not in f:
            raise ClosureSpaceError(f"map undefined at {x!r}")
        if f[x] not in target._index:
            raise ClosureSpaceError(f"image of {x!r} outside the target ground set")
    family = []
    for c in target.closed_masks:
        members = target.labels(c)
        family.append([x for x in ground if f[x] in members])
    return from_closed_family(ground, family)


def pullback_operator(ground: Sequence, f: Mapping, target: FiniteClosureSpace):
    """``S ↦ f⁻¹(d(f(S)))`` as a callable on label sets."""
    def op(subset):
        image = target.closure({f[x] for x in subset})
        return frozenset(x for x in ground if f[x] in image)
    return op


def subspace(space: FiniteClosureSpace, a: Iterable) -> FiniteClosureSpace:
    """Relative structure on ``a``: closed sets are the traces ``C ∩ a``."""
    amask = space.mask(a)
    ground = space.ordered(amask)
    return from_closed_family(ground, [space.ordered(c & amask) for c in space.closed_masks])


@dataclass(frozen=True)
class SpaceMap:
    source: FiniteClosureSpace
    target: FiniteClosureSpace
    table: Mapping

    def __post_init__(self):
        for x in self.source.ground:
            if x not in self.table:
                raise ClosureSpaceError(f"map undefined at {x!r}")
            if self.table[x] not in self.target._index:
                raise ClosureSpaceError(f"image of {x!r} outside the target ground set")

    def __call__(self, x):
        return self.table[x]

    def image(self, subset: Iterable) -> frozenset:
        return frozenset(self.table[x] for x in subset)

    def preimage(self, subset: Iterable) -> frozenset:
        subset = set(subset)
        return frozenset(x for x in self.source.ground if self.table[x] in subset)

    def compose(self, after: "SpaceMap") -> "SpaceMap":
        """``after ∘ self``."""
        return SpaceMap(self.source, after.target, {x: after.table[self.table[x]] for x in self.source.ground})


def is_continuous(fmap: SpaceMap) -> bool:
    """Preimage of every closed set of the target is closed."""
    src = fmap.source
    for c in fmap.target.closed_masks:
        if src.mask(fmap.preimage(fmap.target.labels(c))) not in src.closed_masks:
            return False
    return True


def _is_bijection(fmap: SpaceMap) -> bool:
    return (fmap.source.size == fmap.target.size
            and len(set(fmap.table[x] for x in fmap.source.ground)) == fmap.source.size)


def _maps_family_onto(src: FiniteClosureSpace, dst: FiniteClosureSpace, table: Mapping) -> bool:
    for c in src.closed_masks:
        if dst.mask(table[x] for x in src.labels(c)) not in dst.closed_masks:
            return False
    return True


def _signature(space: FiniteClosureSpace, i: int):
    bit = 1 << i
    degree = sum(1 for c in space.closed_masks if c & bit)
    sizes = tuple(sorted(_popcount(c) for c in space.closed_masks if c & bit))
    return (bit in space.closed_masks, _popcount(space.closure_mask(bit)), degree, sizes)


def find_homeomorphism(src: FiniteClosureSpace, dst: FiniteClosureSpace,
                       check: SpaceMap | None = None) -> SpaceMap | None:
    """Search for a bijection carrying closed sets onto closed sets.

    With ``check`` only that map is verified.  Invariant signatures prune the
    backtracking search; closed sets are tested as soon as all their elements
    are assigned.
    """
    if src.size != dst.size or len(src.closed_masks) != len(dst.closed_masks):
        return None
    if check is not None:
        if _is_bijection(check) and _maps_family_onto(src, dst, check.table):
            return check
        return None
    n = src.size
    sig_src = [_signature(src, i) for i in range(n)]
    sig_dst = [_signature(dst, i) for i in range(n)]
    if Counter(sig_src) != Counter(sig_dst):
        return None
    # assign rarest signatures first
    freq = Counter(sig_src)
    order = sorted(range(n), key=lambda i: (freq[sig_src[i]], sig_src[i], i))
    position = {v: k for k, v in enumerate(order)}
    # closed sets grouped by the step at which they become fully assigned
    due: list = [[] for _ in range(n)]
    for c in src.closed_masks:
        if c:
            due[max(position[i] for i in _bits(c))].append(c)
    assign = [-1] * n
    used = [False] * n

    def extend(step: int) -> bool:
        if step == n:
            return True
        i = order[step]
        for j in range(n):
            if used[j] or sig_dst[j] != sig_src[i]:
                continue
            assign[i] = j
            ok = True
            for c in due[step]:
                img = 0
                for k in _bits(c):
                    img |= 1 << assign[k]
                if img not in dst.closed_masks:
                    ok = False
                    break
            if ok:
                used[j] = True
                if extend(step + 1):
                    return True
                used[j] = False
            assign[i] = -1
        return False

    if not extend(0):
        return None
    table = {src.ground[i]: dst.ground[assign[i]] for i in range(n)}
    return SpaceMap(src, dst, table)


def lift_homeomorphism(fmap: SpaceMap, src_t: TransformResult | None = None,
                       dst_t: TransformResult | None = None):
    """Induced homeomorphisms between the class spaces and the closure-of-class spaces.

    Returns ``(f_g, f_p)``; the square ``delta_dst ∘ f_g = f_p ∘ delta_src``
    holds by construction and is re-verified.
    """
    if find_homeomorphism(fmap.source, fmap.target, check=fmap) is None:
        raise ClosureSpaceError("map is not a homeomorphism")
    src_t = src_t or transforms(fmap.source)
    dst_t = dst_t or transforms(fmap.target)
    dst_class_of = {x: c for c in dst_t.g_space.ground for x in c}
    g_table = {c: dst_class_of[fmap.table[c[0]]] for c in src_t.g_space.ground}
    p_table = {}
    for c in src_t.g_space.ground:
        p_table[src_t.delta[c]] = dst_t.delta[g_table[c]]
    f_g = SpaceMap(src_t.g_space, dst_t.g_space, g_table)
    f_p = SpaceMap(src_t.p_space, dst_t.p_space, p_table)
    for c in src_t.g_space.ground:
        if dst_t.delta[f_g(c)] != f_p(src_t.delta[c]):
            raise AssertionError("lift square does not commute")
    if find_homeomorphism(f_g.source, f_g.target, check=f_g) is None:
        raise AssertionError("class-space lift is not a homeomorphism")
    if find_homeomorphism(f_p.source, f_p.target, check=f_p) is None:
        raise AssertionError("closure-space lift is not a homeomorphism")
    return f_g, f_p


# enumeration helpers -------------------------------------------------------

def all_closure_spaces(n: int, labels: Sequence | None = None):
    """Yield every closure space on ``n`` points (every intersection-closed family with ∅ and the ground set)."""
    ground = tuple(labels) if labels is not None else tuple(range(n))
    full = (1 << n) - 1
    middle = [m for m in range(1, full)]
    if n == 0:
        yield _space_from_masks(ground, {0})
        return
    for choice in range(1 << len(middle)):
        fam = {0, full}
        for k, m in enumerate(middle):
            if choice >> k & 1:
                fam.add(m)
        if all(a & b in fam for a, b in combinations(fam, 2)):
            yield _space_from_masks(ground, fam)


def random_closure_space(rng, n: int, labels: Sequence | None = None, density: float = 0.3):
    """Random space: intersection-closure of a random family of subsets."""
    ground = tuple(labels) if labels is not None else tuple(range(n))
    full = (1 << n) - 1
    fam = {0, full}
    for m in range(1, full):
        if rng.random() < density:
            fam.add(m)
    changed = True
    while changed:
        changed = False
        for a, b in combinations(list(fam), 2):
            if a & b not in fam:
                fam.add(a & b)
                changed = True
    return _space_from_masks(ground, fam)


def relabel(space: FiniteClosureSpace, table: Mapping, order: Sequence | None = None) -> FiniteClosureSpace:
    """Copy of ``space`` with labels replaced through a bijective ``table``."""
    ground = tuple(order) if order is not None else tuple(table[x] for x in space.ground)
    return from_closed_family(ground, [[table[x] for x in space.labels(c)] for c in space.closed_masks])


# file format ---------------------------------------------------------------

def _family_sort_key(space: FiniteClosureSpace):
    return lambda m: (_popcount(m), [i for i in _bits(m)])


def space_to_json(space: FiniteClosureSpace) -> str:
    closed = sorted(space.closed_masks, key=_family_sort_key(space))
    dump = lambda v: json.dumps(v, ensure_ascii=False)
    lines = ["{", f'  "ground": {dump(list(space.ground))},', '  "closed": [']
    rows = [f"    {dump(list(space.ordered(c)))}" for c in closed]
    lines.append(",\n".join(rows))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def _label_from_json(value):
    return tuple(_label_from_json(v) for v in value) if isinstance(value, list) else value


def space_from_json(text: str) -> FiniteClosureSpace:
    payload = json.loads(text)
    if not isinstance(payload, dict) or "ground" not in payload or "closed" not in payload:
        raise ClosureSpaceError('closure-space file needs "ground" and "closed" keys')
    ground = [_label_from_json(x) for x in payload["ground"]]
    family = [[_label_from_json(x) for x in c] for c in payload["closed"]]
    return from_closed_family(ground, family)


def map_to_json(fmap: SpaceMap) -> str:
    table = {str(x): fmap.table[x] for x in fmap.source.ground}
    return json.dumps({"table": table}, indent=2, ensure_ascii=False) + "\n"


def map_from_json(text: str, source: FiniteClosureSpace, target: FiniteClosureSpace) -> SpaceMap:
    """Keys are matched against ``str(label)`` of the source ground set."""
    payload = json.loads(text)
    raw = payload.get("table") if isinstance(payload, dict) else None
    if not isinstance(raw, dict):
        raise ClosureSpaceError('map file needs a "table" object')
    by_text = {str(x): x for x in source.ground}
    by_text_dst = {str(y): y for y in target.ground}
    table = {}
    for k, v in raw.items():
        if k not in by_text:
            raise ClosureSpaceError(f"map key {k!r} not in source ground set")
        v = _label_from_json(v)
        table[by_text[k]] = v if v in target._index else by_text_dst.get(str(v), v)
    return SpaceMap(source, target, table)
