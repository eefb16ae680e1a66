"""Finite Stone duality and spectral-space verification.

Birkhoff machinery: finite posets, their downset lattices, exhaustive prime
ideal enumeration, and the dual space with its compact-open base.  The
verifier checks the point-set predicates (T0, sobriety, base closure,
compactness, complete normality, root system) with witnesses.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .cones import BudgetError
from .reporting import Report


class PosetError(ValueError):
    pass


class FinPoset:
    """A finite strict partial order on elements 0..size-1."""

    def __init__(self, size: int, strict):
        self.size = size
        pairs = frozenset((int(i), int(j)) for i, j in strict)
        for i, j in pairs:
            if not (0 <= i < size and 0 <= j < size):
                raise PosetError(f"pair ({i},{j}) out of range")
            if i == j:
                raise PosetError(f"strict order is irreflexive, got ({i},{i})")
        for i, j in pairs:
            for k in range(size):
                if (j, k) in pairs and (i, k) not in pairs:
                    raise PosetError(f"not transitive: ({i},{j}),({j},{k}) but not ({i},{k})")
        self.strict = pairs

    @classmethod
    def antichain(cls, n: int) -> "FinPoset":
        return cls(n, ())

    @classmethod
    def chain(cls, n: int) -> "FinPoset":
        return cls(n, [(i, j) for i in range(n) for j in range(i + 1, n)])

    @classmethod
    def from_cover_pairs(cls, size: int, covers) -> "FinPoset":
        pairs = set(tuple(p) for p in covers)
        changed = True
        while changed:
            changed = False
            for (i, j), (k, l) in itertools.product(list(pairs), repeat=2):
                if j == k and (i, l) not in pairs:
                    pairs.add((i, l))
                    changed = True
        return cls(size, pairs)

    def lt(self, i: int, j: int) -> bool:
        return (i, j) in self.strict

    def leq(self, i: int, j: int) -> bool:
        return i == j or (i, j) in self.strict

    def elements(self):
        return range(self.size)

    def down(self, i: int) -> frozenset:
        return frozenset(j for j in range(self.size) if self.leq(j, i))

    def up(self, i: int) -> frozenset:
        return frozenset(j for j in range(self.size) if self.leq(i, j))

    def is_downset(self, s) -> bool:
        s = set(s)
        return all(self.down(i) <= s for i in s)

    def downsets(self) -> tuple:
        """All downsets, ordered by size then sorted contents."""
        down = [self.down(i) for i in range(self.size)]
        out = []
        for bits in range(1 << self.size):
            members = {i for i in range(self.size) if bits >> i & 1}
            if all(down[i] <= members for i in members):
                out.append(frozenset(members))
        return tuple(sorted(out, key=lambda s: (len(s), sorted(s))))

    def covers(self):
        out = []
        for i, j in self.strict:
            if not any(self.lt(i, k) and self.lt(k, j) for k in range(self.size)):
                out.append((i, j))
        return sorted(out)

    def __eq__(self, other):
        return (
            isinstance(other, FinPoset)
            and self.size == other.size
            and self.strict == other.strict
        )

    def __hash__(self):
        return hash((self.size, self.strict))

    def __repr__(self):
        return f"FinPoset(size={self.size}, strict={sorted(self.strict)})"

    def to_json(self):
        return {"size": self.size, "strict": sorted(map(list, self.strict))}

    @classmethod
    def from_json(cls, obj) -> "FinPoset":
        return cls(obj["size"], [tuple(p) for p in obj["strict"]])

    def to_dot(self, labels=None, name="poset") -> str:
        labels = labels or {i: str(i) for i in range(self.size)}
        lines = [f"digraph {name} {{", "  rankdir=BT;"]
        for i in range(self.size):
            lines.append(f'  n{i} [label="{labels[i]}"];')
        for i, j in self.covers():
            lines.append(f"  n{i} -> n{j};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def all_posets(n: int) -> list[FinPoset]:
    """Every labeled poset on n elements, by one-point extension."""
    layers: list[list[frozenset]] = [[frozenset()]]
    for m in range(1, n + 1):
        nxt = []
        for pairs in layers[m - 1]:
            base = FinPoset(m - 1, pairs)
            downsets = [set(s) for s in base.downsets()]
            upsets = [set(range(m - 1)) - set(s) for s in base.downsets()]
            new = m - 1
            for down in downsets:
                for upc in upsets:
                    if down & upc:
                        continue
                    if any(not base.lt(d, u) for d in down for u in upc):
                        continue
                    extended = set(pairs)
                    extended |= {(d, new) for d in down}
                    extended |= {(new, u) for u in upc}
                    nxt.append(frozenset(extended))
        layers.append(nxt)
    return [FinPoset(n, pairs) for pairs in layers[n]]


def canonical_poset_key(poset: FinPoset):
    """Minimum relabeling of the strict pairs; equal keys iff isomorphic."""
    best = None
    for perm in itertools.permutations(range(poset.size)):
        key = tuple(sorted((perm[i], perm[j]) for i, j in poset.strict))
        if best is None or key < best:
            best = key
    return (poset.size, best)


def poset_representatives(n: int) -> list[FinPoset]:
    """One labeled poset per isomorphism class, sizes exactly n."""
    seen = {}
    for p in all_posets(n):
        seen.setdefault(canonical_poset_key(p), p)
    return [seen[k] for k in sorted(seen)]


# ---------------------------------------------------------------------------
# Birkhoff lattices
# ---------------------------------------------------------------------------


class FinDistLattice:
    """The lattice of downsets of a base poset: meet is intersection,
    join is union, bottom the empty set, top the whole base."""

    def __init__(self, base: FinPoset):
        self.base = base
        self.elements = base.downsets()
        self._index = {s: i for i, s in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def index(self, x: frozenset) -> int:
        return self._index[x]

    @property
    def bottom(self) -> frozenset:
        return frozenset()

    @property
    def top(self) -> frozenset:
        return frozenset(range(self.base.size))

    def meet(self, x, y):
        return x & y

    def join(self, x, y):
        return x | y

    def leq(self, x, y) -> bool:
        return x <= y

    def lower_covers(self, x) -> list:
        below = [y for y in self.elements if y < x]
        return [y for y in below if not any(y < z < x for z in below)]

    def join_irreducibles(self) -> list:
        """Elements with exactly one lower cover."""
        return [x for x in self.elements if len(self.lower_covers(x)) == 1]

    def to_json(self):
        return {"base": self.base.to_json(), "elements": [sorted(s) for s in self.elements]}


DEFAULT_MAX_BASE = 12


def downset_lattice(base: FinPoset, max_base: int = DEFAULT_MAX_BASE) -> FinDistLattice:
    if base.size > max_base:
        raise BudgetError(f"base poset has {base.size} elements, budget is {max_base}")
    return FinDistLattice(base)


# ---------------------------------------------------------------------------
# Prime ideals and the dual space
# ---------------------------------------------------------------------------


@dataclass
class PrimeIdealSet:
    lattice: FinDistLattice
    ideals: tuple  # each a frozenset of element indices

    def to_json(self):
        return [sorted(i) for i in self.ideals]


def _ideal_sort_key(lattice, ideal):
    charvec = tuple(1 if i in ideal else 0 for i in range(len(lattice)))
    return (len(ideal), charvec)


def prime_ideals(lattice: FinDistLattice) -> PrimeIdealSet:
    """Exhaustive, deterministic enumeration of the proper prime ideals.

    Every ideal of a finite lattice is a principal downset (it contains its
    own finite join), so candidates are exactly the sets {x : x <= a}.
    """
    elems = lattice.elements
    ideals = []
    for a in elems:
        if a == lattice.top:
            continue  # proper ideals only
        prime = True
        outside = [x for x in elems if not lattice.leq(x, a)]
        for x in outside:
            for y in outside:
                if lattice.leq(lattice.meet(x, y), a):
                    prime = False
                    break
            if not prime:
                break
        if prime:
            ideals.append(
                frozenset(lattice.index(x) for x in elems if lattice.leq(x, a))
            )
    ideals.sort(key=lambda i: _ideal_sort_key(lattice, i))
    return PrimeIdealSet(lattice, tuple(ideals))


@dataclass
class FiniteSpace:
    """A finite point set with its specialisation order and a declared
    compact-open base.  Opens are downsets of the order: the points in the
    closure of x are exactly those above x."""

    poset: FinPoset
    base: tuple  # frozensets of point indices

    def to_json(self):
        return {
            "poset": self.poset.to_json(),
            "base": [sorted(u) for u in self.base],
        }

    @classmethod
    def from_json(cls, obj) -> "FiniteSpace":
        return cls(
            FinPoset.from_json(obj["poset"]),
            tuple(frozenset(u) for u in obj["base"]),
        )


@dataclass
class StoneSpace:
    """Dual space of a finite distributive lattice: points are the prime
    ideals ordered by inclusion, opens generated by the sets of primes
    omitting a given element."""

    lattice: FinDistLattice
    points: tuple  # prime ideals, as frozensets of element indices
    poset: FinPoset
    base_by_element: tuple  # aligned with lattice.elements

    def space(self) -> FiniteSpace:
        base = tuple(sorted(set(self.base_by_element), key=lambda u: (len(u), sorted(u))))
        return FiniteSpace(self.poset, base)

    def to_json(self):
        return {
            "points": [sorted(p) for p in self.points],
            "poset": self.poset.to_json(),
            "base_by_element": [sorted(u) for u in self.base_by_element],
        }


def stone_dual(lattice: FinDistLattice) -> StoneSpace:
    primes = prime_ideals(lattice).ideals
    strict = [
        (i, j)
        for i, j in itertools.product(range(len(primes)), repeat=2)
        if i != j and primes[i] < primes[j]
    ]
    poset = FinPoset(len(primes), strict)
    base_by_element = tuple(
        frozenset(i for i, ideal in enumerate(primes) if lattice.index(a) not in ideal)
        for a in lattice.elements
    )
    return StoneSpace(lattice, primes, poset, base_by_element)


# ---------------------------------------------------------------------------
# Spectral verification
# ---------------------------------------------------------------------------


def _topology_from_base(base, npts: int):
    opens = {frozenset()}
    frontier = [frozenset(u) for u in base]
    opens.update(frontier)
    changed = True
    while changed:
        changed = False
        for u in list(opens):
            for v in list(opens):
                w = u | v
                if w not in opens:
                    opens.add(w)
                    changed = True
    return opens


def verify_spectral(space: FiniteSpace, max_points: int = 10) -> Report:
    """Point-set checks for a finite candidate spectrum.

    The report carries one entry per predicate with a witness on failure,
    and summary verdicts: `generalised-spectral` (T0 + sober + base closed
    under intersection and covering), `spectral` (plus compact), and
    `completely-normal` / `root-system`, which a lattice-group spectrum
    must additionally satisfy.
    """
    n = space.poset.size
    if n > max_points:
        raise BudgetError(f"space has {n} points, budget is {max_points}")
    report = Report("spectral space verification")
    base = [frozenset(u) for u in space.base]
    for u in base:
        for p in u:
            if not (0 <= p < n):
                raise PosetError(f"base set mentions unknown point {p}")
    opens = _topology_from_base(base, n)
    points = frozenset(range(n))

    covered = frozenset().union(*base) if base else frozenset()
    report.add("base-covers", covered == points,
               sorted(points - covered) or None,
               note="a base must cover the space")

    ok, witness = True, None
    for u in base:
        for v in base:
            if u & v not in set(base):
                ok, witness = False, [sorted(u), sorted(v)]
                break
        if not ok:
            break
    report.add("base-intersection-closed", ok, witness)

    ok, witness = True, None
    for x, y in itertools.combinations(range(n), 2):
        if not any((x in u) != (y in u) for u in opens):
            ok, witness = False, [x, y]
            break
    report.add("t0", ok, witness)

    closed = sorted({points - u for u in opens}, key=lambda c: (len(c), sorted(c)))

    def closure(p):
        acc = points
        for c in closed:
            if p in c:
                acc &= c
        return acc

    closures = {p: closure(p) for p in range(n)}

    ok, witness = True, None
    for c in closed:
        if not c:
            continue
        rel = {c & a for a in closed}
        irreducible = not any(
            k1 | k2 == c for k1 in rel for k2 in rel if k1 != c and k2 != c
        )
        if irreducible:
            generic = [p for p in c if closures[p] == c]
            if len(generic) != 1:
                ok, witness = False, {"closed": sorted(c), "generic-points": generic}
                break
    report.add("sober", ok, witness)

    compact = points in opens
    report.add("compact", True, note="compact" if compact else "not covered by the declared base")
    report.summary["compact"] = compact

    ok, witness = True, None
    for z in range(n):
        cl = sorted(closures[z])
        for x in cl:
            for y in cl:
                if x not in closures[y] and y not in closures[x]:
                    ok, witness = False, {"z": z, "x": x, "y": y}
                    break
            if not ok:
                break
        if not ok:
            break
    report.add("completely-normal", ok, witness)

    ok, witness = True, None
    for z in range(n):
        ub = [x for x in range(n) if space.poset.leq(z, x)]
        for x in ub:
            for y in ub:
                if not (space.poset.leq(x, y) or space.poset.leq(y, x)):
                    ok, witness = False, {"element": z, "incomparable-upper-bounds": [x, y]}
                    break
            if not ok:
                break
        if not ok:
            break
    report.add("root-system", ok, witness)

    ok, witness = True, None
    for x in range(n):
        for y in range(n):
            derived = all(x in u for u in opens if y in u)
            if derived != space.poset.leq(x, y):
                ok, witness = False, [x, y]
                break
        if not ok:
            break
    report.add("specialisation-matches-order", ok, witness)

    by_name = {c.name: c.passed for c in report.checks}
    report.summary["generalised-spectral"] = (
        by_name["t0"]
        and by_name["sober"]
        and by_name["base-intersection-closed"]
        and by_name["base-covers"]
    )
    report.summary["spectral"] = report.summary["generalised-spectral"] and compact
    return report


def birkhoff_roundtrip_report(base: FinPoset, max_base: int = DEFAULT_MAX_BASE) -> Report:
    """Base poset -> downset lattice -> join-irreducibles and dual points -> base.

    Checks that the join-irreducibles are exactly the principal downsets,
    ordered like the base, and that the dual space of the lattice is
    order-isomorphic to the base via j |-> {downsets omitting j}.
    """
    report = Report("birkhoff round trip", scope=f"base poset with {base.size} elements")
    lattice = downset_lattice(base, max_base)
    ji = set(map(frozenset, lattice.join_irreducibles()))
    principal = {base.down(j) for j in base.elements()}
    report.add(
        "join-irreducibles-are-principal-downsets",
        ji == principal,
        None if ji == principal else {
            "extra": [sorted(s) for s in ji - principal],
            "missing": [sorted(s) for s in principal - ji],
        },
    )
    ok, witness = True, None
    for x in base.elements():
        for y in base.elements():
            if base.leq(x, y) != (base.down(x) <= base.down(y)):
                ok, witness = False, [x, y]
                break
        if not ok:
            break
    report.add("principal-downset-map-is-order-iso", ok, witness)

    dual = stone_dual(lattice)
    expected = {
        j: frozenset(
            lattice.index(s) for s in lattice.elements if j not in s
        )
        for j in base.elements()
    }
    bijective = set(expected.values()) == set(dual.points) and len(expected) == len(dual.points)
    report.add(
        "dual-points-are-element-primes",
        bijective,
        None if bijective else {"points": [sorted(p) for p in dual.points]},
    )
    if bijective:
        pos = {p: i for i, p in enumerate(dual.points)}
        ok, witness = True, None
        for x in base.elements():
            for y in base.elements():
                if base.leq(x, y) != dual.poset.leq(pos[expected[x]], pos[expected[y]]):
                    ok, witness = False, [x, y]
                    break
            if not ok:
                break
        report.add("dual-order-isomorphic-to-base", ok, witness)
    else:
        report.add("dual-order-isomorphic-to-base", False, note="bijection failed")
    return report


# ---------------------------------------------------------------------------
# Principal convex subgroup lattices of the finite-support family
# ---------------------------------------------------------------------------


@dataclass
class ConpTruncation:
    """Lattice of supports inside {0..level-1}: each element is the support
    of a principal convex subgroup of the finitely-supported function group,
    realized by its indicator function."""

    level: int
    lattice: FinDistLattice

    def support_of(self, element: frozenset) -> frozenset:
        return element

    def witness(self, element: frozenset):
        from .fnl import FinSuppFn

        return FinSuppFn.from_map({i: 1 for i in element})

    def to_json(self):
        return {"level": self.level, "lattice": self.lattice.to_json()}


def conp_lattice_of_fn_truncation(level: int, max_level: int = DEFAULT_MAX_BASE) -> ConpTruncation:
    if level > max_level:
        raise BudgetError(f"truncation level {level} exceeds budget {max_level}")
    if level < 0:
        raise PosetError("level must be >= 0")
    return ConpTruncation(level, FinDistLattice(FinPoset.antichain(level)))


def truncation_noncompactness_certificate(level: int, max_level: int = DEFAULT_MAX_BASE) -> Report:
    """The truncation family is directed without a top: for every element of
    the level-N lattice, the level-(N+1) dual has a point outside its open
    set, namely the prime at the fresh index N."""
    report = Report(
        "no-top certificate for the truncation family",
        scope=f"levels {level} and {level + 1}",
    )
    big = conp_lattice_of_fn_truncation(level + 1, max_level + 1)
    dual = stone_dual(big.lattice)
    fresh_prime = frozenset(
        big.lattice.index(s) for s in big.lattice.elements if level not in s
    )
    try:
        fresh_index = dual.points.index(fresh_prime)
    except ValueError:
        report.add("fresh-point-exists", False)
        return report
    report.add("fresh-point-exists", True)
    small = conp_lattice_of_fn_truncation(level, max_level)
    ok, witness = True, None
    for element in small.lattice.elements:
        lifted = big.lattice.index(element)  # same subset, one level up
        open_set = dual.base_by_element[lifted]
        if fresh_index in open_set:
            ok, witness = False, sorted(element)
            break
    report.add("every-candidate-top-misses-a-point", ok, witness)
    return report
