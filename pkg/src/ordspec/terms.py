"""Lattice-group terms over generators: parser, normal forms, evaluation.

A term acts on the quotient chain of a cone through the right regular
action: generators act by right multiplication, products compose, meet and
join pick the smaller/larger branch value at the queried point.  Membership
of a term in the prime subgroup attached to a cone is decided by whether
the action fixes the class of the identity.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

from .cones import CmpResult, Sign, cone_leq, word_key
from .groups import (
    FWORD,
    ZVEC,
    GroupElement,
    GroupError,
    PoGroup,
    format_word,
    invert_letters,
    reduce_letters,
    word_element,
    zvec_element,
)
from .reporting import Report


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class OutOfScopeError(RuntimeError):
    """An intermediate product left the ball of a bounded cone."""


@dataclass(frozen=True)
class Gen:
    index: int


@dataclass(frozen=True)
class Ident:
    pass


@dataclass(frozen=True)
class Mul:
    left: object
    right: object


@dataclass(frozen=True)
class Inv:
    child: object


@dataclass(frozen=True)
class Meet:
    left: object
    right: object


@dataclass(frozen=True)
class Join:
    left: object
    right: object


IDENT = Ident()


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<gen>g\d+)|(?P<ident>e)|(?P<inv>\^-1)"
    r"|(?P<mul>\*)|(?P<meet>/\\)|(?P<join>\\/)|(?P<lp>\()|(?P<rp>\))"
)


def _lex(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


def parse_term(text: str, rank: int | None = None):
    """Parse the term grammar.

    Atoms ``e`` and ``g<k>``; postfix ``^-1``; ``*`` for products;
    ``/\\`` and ``\\/`` at the same precedence with mandatory parentheses
    between the two; Inv > Mul > Meet = Join.
    """
    tokens = _lex(text)
    term, i = _parse_lattice(tokens, 0)
    kind, _, pos = tokens[i]
    if kind != "end":
        raise ParseError(f"trailing input {tokens[i][1]!r}", pos)
    if rank is not None:
        hi = max_generator(term)
        if hi > rank:
            raise ParseError(f"generator index g{hi} out of rank {rank}", 0)
    return term


def _parse_lattice(tokens, i):
    node, i = _parse_mul(tokens, i)
    kind = tokens[i][0]
    if kind not in ("meet", "join"):
        return node, i
    op = kind
    ctor = Meet if op == "meet" else Join
    while tokens[i][0] in ("meet", "join"):
        if tokens[i][0] != op:
            raise ParseError(
                "ambiguous mix of /\\ and \\/ without parentheses", tokens[i][2]
            )
        rhs, i = _parse_mul(tokens, i + 1)
        node = ctor(node, rhs)
    return node, i


def _parse_mul(tokens, i):
    node, i = _parse_unary(tokens, i)
    while tokens[i][0] == "mul":
        rhs, i = _parse_unary(tokens, i + 1)
        node = Mul(node, rhs)
    return node, i


def _parse_unary(tokens, i):
    node, i = _parse_atom(tokens, i)
    while tokens[i][0] == "inv":
        node = Inv(node)
        i += 1
    return node, i


def _parse_atom(tokens, i):
    kind, text, pos = tokens[i]
    if kind == "gen":
        idx = int(text[1:])
        if idx < 1:
            raise ParseError("generator index must be >= 1", pos)
        return Gen(idx), i + 1
    if kind == "ident":
        return IDENT, i + 1
    if kind == "lp":
        node, i = _parse_lattice(tokens, i + 1)
        if tokens[i][0] != "rp":
            raise ParseError("expected ')'", tokens[i][2])
        return node, i + 1
    raise ParseError(f"expected an atom, got {text!r}" if text else "unexpected end of input", pos)


def term_to_str(t) -> str:
    if isinstance(t, Gen):
        return f"g{t.index}"
    if isinstance(t, Ident):
        return "e"
    if isinstance(t, Inv):
        inner = term_to_str(t.child)
        if isinstance(t.child, (Gen, Ident, Inv)):
            return inner + "^-1"
        return f"({inner})^-1"
    if isinstance(t, Mul):
        left = term_to_str(t.left)
        if isinstance(t.left, (Meet, Join)):
            left = f"({left})"
        right = term_to_str(t.right)
        if isinstance(t.right, (Meet, Join, Mul)):
            right = f"({right})"
        return f"{left} * {right}"
    if isinstance(t, (Meet, Join)):
        op = "/\\" if isinstance(t, Meet) else "\\/"
        left = term_to_str(t.left)
        if isinstance(t.left, (Meet, Join)) and type(t.left) is not type(t):
            left = f"({left})"
        right = term_to_str(t.right)
        if isinstance(t.right, (Meet, Join)):
            right = f"({right})"
        return f"{left} {op} {right}"
    raise TypeError(f"not a term: {t!r}")


def max_generator(t) -> int:
    if isinstance(t, Gen):
        return t.index
    if isinstance(t, Ident):
        return 0
    if isinstance(t, Inv):
        return max_generator(t.child)
    return max(max_generator(t.left), max_generator(t.right))


def abs_term(t):
    """|t| = t v t^-1."""
    return Join(t, Inv(t))


def term_of_element(a: GroupElement, group: PoGroup):
    """The image of a group element in the term language."""
    group.check_element(a)
    if group.kind == ZVEC:
        letters = []
        for i, v in enumerate(a.data, start=1):
            letters.extend([i if v > 0 else -i] * abs(v))
    elif group.kind == FWORD:
        letters = list(a.data)
    else:
        raise GroupError("terms act on zvec and fword groups only")
    node = None
    for l in letters:
        factor = Gen(l) if l > 0 else Inv(Gen(-l))
        node = factor if node is None else Mul(node, factor)
    return node if node is not None else IDENT


# ---------------------------------------------------------------------------
# Normal form: meet of joins of group words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MeetJoinNF:
    """A term flattened to a meet of joins of freely reduced words.

    ``positive_form()`` adjoins the identity word to every row, which is the
    same element as ``term v e``: it equals the term itself whenever the
    term is positive under the cone at hand.
    """

    rows: tuple

    def to_term(self):
        rows = []
        for row in self.rows:
            node = None
            for w in row:
                wt = _word_term(w)
                node = wt if node is None else Join(node, wt)
            rows.append(node)
        node = None
        for r in rows:
            node = r if node is None else Meet(node, r)
        return node if node is not None else IDENT

    def positive_form(self) -> "MeetJoinNF":
        return MeetJoinNF(_canon_rows([list(row) + [()] for row in self.rows]))

    def to_json(self):
        return [[format_word(GroupElement(FWORD, w)) for w in row] for row in self.rows]


def _word_term(word):
    node = None
    for l in word:
        factor = Gen(l) if l > 0 else Inv(Gen(-l))
        node = factor if node is None else Mul(node, factor)
    return node if node is not None else IDENT


def _canon_rows(rows) -> tuple:
    canon = sorted(
        {tuple(sorted(set(map(tuple, row)), key=word_key)) for row in rows},
        key=lambda row: (len(row), tuple(map(word_key, row))),
    )
    return tuple(canon)


def _join_rows(a, b):
    return [ra + rb for ra in a for rb in b]


def _nf_rows(t):
    if isinstance(t, Gen):
        return [[(t.index,)]]
    if isinstance(t, Ident):
        return [[()]]
    if isinstance(t, Meet):
        return _nf_rows(t.left) + _nf_rows(t.right)
    if isinstance(t, Join):
        return _join_rows(_nf_rows(t.left), _nf_rows(t.right))
    if isinstance(t, Inv):
        inner = _nf_rows(t.child)
        # (meet_i join_j w_ij)^-1 = join_i meet_j w_ij^-1, re-distributed
        out = []
        for choice in itertools.product(*[range(len(row)) for row in inner]):
            out.append([invert_letters(inner[i][j]) for i, j in enumerate(choice)])
        return out
    if isinstance(t, Mul):
        left = _nf_rows(t.left)
        right = _nf_rows(t.right)
        rows = []
        for lrow in left:
            # join over w in lrow of (w . right), each a meet-of-joins
            parts = [
                [[reduce_letters(w + u) for u in rrow] for rrow in right]
                for w in lrow
            ]
            acc = parts[0]
            for p in parts[1:]:
                acc = _join_rows(acc, p)
            rows.extend(acc)
        return rows
    raise TypeError(f"not a term: {t!r}")


def normal_form(t) -> MeetJoinNF:
    """Flatten a term by distributing products and inverses over the lattice."""
    return MeetJoinNF(_canon_rows(_nf_rows(t)))


# ---------------------------------------------------------------------------
# Evaluation via the right regular action
# ---------------------------------------------------------------------------


def push_inv(t):
    """Rewrite so Inv wraps only generators, via the lattice-group dualities."""
    if isinstance(t, (Gen, Ident)):
        return t
    if isinstance(t, Mul):
        return Mul(push_inv(t.left), push_inv(t.right))
    if isinstance(t, Meet):
        return Meet(push_inv(t.left), push_inv(t.right))
    if isinstance(t, Join):
        return Join(push_inv(t.left), push_inv(t.right))
    c = t.child
    if isinstance(c, Gen):
        return t
    if isinstance(c, Ident):
        return IDENT
    if isinstance(c, Inv):
        return push_inv(c.child)
    if isinstance(c, Mul):
        return Mul(push_inv(Inv(c.right)), push_inv(Inv(c.left)))
    if isinstance(c, Meet):
        return Join(push_inv(Inv(c.left)), push_inv(Inv(c.right)))
    if isinstance(c, Join):
        return Meet(push_inv(Inv(c.left)), push_inv(Inv(c.right)))
    raise TypeError(f"not a term: {t!r}")


def eval_action(term, cone, base: GroupElement) -> GroupElement:
    """A representative of (action of term)(class of base).

    Generators multiply on the right, Mul composes (left factor acts
    first), Meet/Join compare the two branch values under the cone's
    pre-order and keep the smaller/larger one.  The result is well defined
    up to cone-equivalence; the concrete representative is whichever
    product the evaluation computed.
    """
    group = cone.group
    group.check_element(base)
    t = push_inv(term)
    return _eval(t, base, cone, group)


def _eval(t, point, cone, group):
    if isinstance(t, Ident):
        return point
    if isinstance(t, Gen):
        return group.mul(point, group.generator(t.index))
    if isinstance(t, Inv):  # Inv(Gen) only, after push_inv
        return group.mul(point, group.inv(group.generator(t.child.index)))
    if isinstance(t, Mul):
        return _eval(t.right, _eval(t.left, point, cone, group), cone, group)
    left = _eval(t.left, point, cone, group)
    right = _eval(t.right, point, cone, group)
    rel = cone.cmp(left, right)
    if rel == CmpResult.OUT_OF_SCOPE:
        raise OutOfScopeError(
            f"comparison left the radius-{cone.radius} ball during evaluation"
        )
    if isinstance(t, Meet):
        return left if rel in (CmpResult.LESS, CmpResult.EQUIV) else right
    return left if rel in (CmpResult.GREATER, CmpResult.EQUIV) else right


def stabilizer_contains(cone, term) -> bool:
    """Whether the term's action fixes the class of the identity.

    This is membership in the prime subgroup attached to the cone.
    """
    e = cone.group.identity()
    result = eval_action(term, cone, e)
    rel = cone.cmp(result, e)
    if rel == CmpResult.OUT_OF_SCOPE:
        raise OutOfScopeError("stabilizer test left the ball")
    return rel == CmpResult.EQUIV


@dataclass(frozen=True)
class PrimeOracle:
    """Membership oracle for the prime subgroup attached to a cone."""

    cone: object

    def contains_term(self, term) -> bool:
        return stabilizer_contains(self.cone, term)

    def induced_cone_contains(self, a: GroupElement) -> bool:
        """Membership of a group element in the cone this prime induces.

        Decided by whether the element's inverse, joined with the identity,
        acts trivially at the base point.
        """
        t = Join(Inv(term_of_element(a, self.cone.group)), IDENT)
        return self.contains_term(t)


def prime_of_cone(cone) -> PrimeOracle:
    return PrimeOracle(cone)


# ---------------------------------------------------------------------------
# Round-trip and separation reports
# ---------------------------------------------------------------------------


def _elt_json(group, a):
    return group.element_to_json(a)


def roundtrip_report(cone, elements, terms=(), cone_pairs=()) -> Report:
    """Consistency of the cone/prime dictionary on a finite test set.

    Checks, with witnesses on failure:
      * prime-induced membership agrees with cone membership on ``elements``;
      * the subbase identity: a is strictly positive iff the word of a,
        joined with the identity, escapes the prime;
      * monotonicity across ``cone_pairs`` (C, D) with C included in D:
        terms in the prime of C stay in the prime of D.
    """
    report = Report("cone/prime round trip")
    oracle = prime_of_cone(cone)
    group = cone.group
    ok, witness = True, None
    for a in elements:
        lhs = oracle.induced_cone_contains(a)
        rhs = cone.contains(a) in (Sign.POSITIVE, Sign.KERNEL)
        if lhs != rhs:
            ok, witness = False, _elt_json(group, a)
            break
    report.add("pi-kappa-identity", ok, witness)
    ok, witness = True, None
    for a in elements:
        strictly_positive = cone.contains(a) == Sign.POSITIVE
        escapes = not stabilizer_contains(
            cone, Join(term_of_element(a, group), IDENT)
        )
        if strictly_positive != escapes:
            ok, witness = False, _elt_json(group, a)
            break
    report.add("subbase-identity", ok, witness)
    ok, witness = True, None
    for c, d in cone_pairs:
        if not cone_leq(c, d):
            ok, witness = False, {"reason": "pair is not an inclusion"}
            break
        for t in terms:
            if stabilizer_contains(c, t) and not stabilizer_contains(d, t):
                ok, witness = False, {"term": term_to_str(t)}
                break
        if not ok:
            break
    report.add("kappa-monotone", ok, witness)
    return report


def seek_separating_cone(term, cones):
    """First cone whose action moves the identity class under the term.

    A witness certifies the term is not the identity of the free
    lattice-group; absence of a witness is inconclusive.
    """
    for cone in cones:
        if not stabilizer_contains(cone, term):
            return cone
    return None


# ---------------------------------------------------------------------------
# Seeded random terms (for sweeps)
# ---------------------------------------------------------------------------


def random_term(rng, rank: int, max_depth: int = 4):
    if max_depth <= 0 or rng.random() < 0.25:
        if rng.random() < 0.2:
            return IDENT
        return Gen(rng.randint(1, rank))
    kind = rng.choice(("mul", "inv", "meet", "join"))
    if kind == "inv":
        return Inv(random_term(rng, rank, max_depth - 1))
    left = random_term(rng, rank, max_depth - 1)
    right = random_term(rng, rank, max_depth - 1)
    return {"mul": Mul, "meet": Meet, "join": Join}[kind](left, right)
