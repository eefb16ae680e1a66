"""Batch command line: wires cones, terms, the Stone engine, and the
finitely-supported group to files and JSON reports.

Exit codes: 0 all checks passed, 1 a property check failed, 2 usage or
budget error.  Identical inputs and seed produce byte-identical reports.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field, replace

from . import cones, fnl, stone, terms
from .cones import BudgetError, ConeError, EnumConstraints, Sign
from .groups import GroupError, PoGroup, ZVEC

DEFAULT_BUDGETS = {
    "ball_radius": 3,
    "conjugator_budget": 1,
    "stone_max_j": 12,
    "stone_max_points": 10,
    "fnl_level": 4,
    "fnl_box": 2,
    "enum_max_words": 200,
}

ENV_OVERRIDE = "ORDSPEC_BUDGET_OVERRIDE"


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    budgets: dict = field(default_factory=lambda: dict(DEFAULT_BUDGETS))
    seed: int = 0
    fmt: str = "json"

    def budget(self, key: str) -> int:
        return int(self.budgets[key])


def parse_config_file(path: str) -> dict:
    """Dotted-key lines: ``budgets.stone_max_j = 8``; '#' starts a comment."""
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, _, val = line.partition("=")
            values[key.strip()] = val.strip()
    return values


def load_config(path: str | None, seed: int | None) -> RunConfig:
    config = RunConfig()
    if path:
        for key, val in parse_config_file(path).items():
            if key.startswith("budgets."):
                name = key[len("budgets."):]
                if name not in config.budgets:
                    raise UsageError(f"unknown budget key {name!r}")
                config.budgets[name] = int(val)
            elif key == "seed":
                config.seed = int(val)
            elif key == "output.format":
                config.fmt = val
            else:
                raise UsageError(f"unknown config key {key!r}")
    override = os.environ.get(ENV_OVERRIDE, "")
    if override:
        for item in override.split(","):
            item = item.strip()
            if not item:
                continue
            name, _, val = item.partition("=")
            name = name.strip()
            if name not in config.budgets:
                raise UsageError(f"{ENV_OVERRIDE}: unknown budget key {name!r}")
            config.budgets[name] = int(val)
    for key, val in config.budgets.items():
        if val < 1:
            raise UsageError(f"budget {key} must be positive")
    if seed is not None:
        config.seed = seed
    return config


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _load_cone(path: str):
    return cones.cone_from_json(_read_json(path))


def _emit(report: dict, args, config: RunConfig) -> None:
    report = dict(report)
    report["seed"] = config.seed
    text = json.dumps(report, sort_keys=True, indent=2) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_text(text: str, args) -> None:
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# term verbs
# ---------------------------------------------------------------------------


def _term_tree(t):
    if isinstance(t, terms.Gen):
        return {"node": "gen", "index": t.index}
    if isinstance(t, terms.Ident):
        return {"node": "ident"}
    if isinstance(t, terms.Inv):
        return {"node": "inv", "child": _term_tree(t.child)}
    name = {terms.Mul: "mul", terms.Meet: "meet", terms.Join: "join"}[type(t)]
    return {"node": name, "left": _term_tree(t.left), "right": _term_tree(t.right)}


def cmd_term(args, config: RunConfig) -> int:
    if args.verb == "parse":
        t = terms.parse_term(args.term)
        _emit({"term": terms.term_to_str(t), "tree": _term_tree(t)}, args, config)
        return 0
    if args.verb == "normalize":
        t = terms.parse_term(args.term)
        nf = terms.normal_form(t)
        _emit(
            {
                "term": terms.term_to_str(t),
                "meet-of-joins": nf.to_json(),
                "positive-shape": nf.positive_form().to_json(),
            },
            args,
            config,
        )
        return 0
    cone = _load_cone(args.cone)
    if args.verb == "eval":
        t = terms.parse_term(args.term, cone.rank)
        base = (
            cone.group.identity()
            if args.at in (None, "e")
            else cone.group.element_from_json(json.loads(args.at))
            if cone.group.kind == ZVEC
            else cone.group.element_from_json(args.at)
        )
        result = terms.eval_action(t, cone, base)
        _emit(
            {
                "term": terms.term_to_str(t),
                "at": cone.group.element_to_json(base),
                "representative": cone.group.element_to_json(result),
            },
            args,
            config,
        )
        return 0
    if args.verb == "kappa":
        suite = _read_json(args.terms)
        if not isinstance(suite, list):
            raise UsageError("term suite must be a JSON array of strings")
        results = []
        for text in suite:
            t = terms.parse_term(text, cone.rank)
            results.append({"term": text, "in-prime": terms.stabilizer_contains(cone, t)})
        _emit({"cone": cone.to_json(), "results": results}, args, config)
        return 0
    if args.verb == "separate":
        t = terms.parse_term(args.term)
        family = [cones.cone_from_json(obj) for obj in _read_json(args.cones)]
        witness = terms.seek_separating_cone(t, family)
        _emit(
            {
                "term": terms.term_to_str(t),
                "witness": witness.to_json() if witness is not None else None,
                "note": "absence of a witness is inconclusive",
            },
            args,
            config,
        )
        return 0
    raise UsageError(f"unknown term verb {args.verb!r}")


# ---------------------------------------------------------------------------
# cone verbs
# ---------------------------------------------------------------------------


def cmd_cone(args, config: RunConfig) -> int:
    if args.verb == "enumerate":
        constraints = (
            EnumConstraints.from_json(_read_json(args.constraints))
            if args.constraints
            else None
        )
        stream = cones.enumerate_ball_cones(
            args.rank,
            args.radius,
            constraints,
            max_words=config.budget("enum_max_words"),
        )
        out = []
        for cone in stream:
            out.append(cone.to_json())
            if args.limit and len(out) >= args.limit:
                break
        _emit({"count": len(out), "limited": bool(args.limit), "cones": out}, args, config)
        return 0
    cone = _load_cone(args.cone)
    if args.verb == "check":
        report = cones.check_axioms(cone, seed=config.seed)
        _emit(report.to_json(), args, config)
        return 0 if report.passed else 1
    if args.verb == "predicates":
        payload = {
            name: result.to_json()
            for name, result in (
                ("normal", cones.normality_report(cone)),
                ("representable", cones.representable_report(cone)),
                ("abelian", cones.abelian_report(cone)),
            )
        }
        _emit(payload, args, config)
        return 0
    if args.verb == "compare":
        other = _load_cone(args.other)
        forward, fw = cones.cone_leq_certificate(cone, other)
        backward, bw = cones.cone_leq_certificate(other, cone)
        _emit(
            {
                "left-in-right": forward,
                "right-in-left": backward,
                "left-witness": cone.group.element_to_json(fw) if fw else None,
                "right-witness": other.group.element_to_json(bw) if bw else None,
            },
            args,
            config,
        )
        return 0
    if args.verb == "beta":
        budget = args.budget if args.budget is not None else config.budget("conjugator_budget")
        result = cones.normal_interior(cone, budget)
        _emit(result.to_json(), args, config)
        return 0 if result.is_precone else 1
    if args.verb == "refine":
        order = _load_cone(args.order)
        refined = cones.refine_to_order(cone, order)
        _emit({"refined": refined.to_json(), "full-rank": refined.is_right_order}, args, config)
        return 0
    raise UsageError(f"unknown cone verb {args.verb!r}")


# ---------------------------------------------------------------------------
# stone verbs
# ---------------------------------------------------------------------------


def _poset_from_args(args) -> stone.FinPoset:
    if args.antichain is not None:
        return stone.FinPoset.antichain(args.antichain)
    if args.chain is not None:
        return stone.FinPoset.chain(args.chain)
    if args.poset:
        return stone.FinPoset.from_json(_read_json(args.poset))
    raise UsageError("provide --antichain N, --chain N, or --poset FILE")


def cmd_stone(args, config: RunConfig) -> int:
    if args.verb == "dual":
        if args.conp is not None:
            lattice = stone.conp_lattice_of_fn_truncation(
                args.conp, max_level=config.budget("stone_max_j")
            ).lattice
        else:
            base = _poset_from_args(args)
            lattice = stone.downset_lattice(base, max_base=config.budget("stone_max_j"))
        dual = stone.stone_dual(lattice)
        if args.dot:
            labels = {i: "{" + ",".join(map(str, sorted(p))) + "}" for i, p in enumerate(dual.points)}
            _emit_text(dual.poset.to_dot(labels, name="dual"), args)
            return 0
        _emit(dual.to_json(), args, config)
        return 0
    if args.verb == "verify":
        space = stone.FiniteSpace.from_json(_read_json(args.space))
        report = stone.verify_spectral(space, max_points=config.budget("stone_max_points"))
        if args.dot:
            _emit_text(space.poset.to_dot(name="space"), args)
            return 0 if report.passed else 1
        _emit(report.to_json(), args, config)
        return 0 if report.passed else 1
    if args.verb == "conp":
        trunc = stone.conp_lattice_of_fn_truncation(
            args.level, max_level=config.budget("stone_max_j")
        )
        payload = trunc.to_json()
        payload["no-top-certificate"] = stone.truncation_noncompactness_certificate(
            args.level, max_level=config.budget("stone_max_j")
        ).to_json()
        _emit(payload, args, config)
        return 0
    raise UsageError(f"unknown stone verb {args.verb!r}")


# ---------------------------------------------------------------------------
# fnl verbs
# ---------------------------------------------------------------------------


def _fn_from_arg(text: str) -> fnl.FinSuppFn:
    try:
        return fnl.FinSuppFn.from_json(json.loads(text))
    except (json.JSONDecodeError, ValueError) as exc:
        raise UsageError(f"bad function literal {text!r}: {exc}") from exc


def cmd_fnl(args, config: RunConfig) -> int:
    level = args.level if args.level is not None else config.budget("fnl_level")
    box = args.box if args.box is not None else config.budget("fnl_box")
    if args.verb == "laws":
        report = fnl.ell_law_report(level, box, seed=config.seed)
        _emit(report.to_json(), args, config)
        return 0 if report.passed else 1
    if args.verb == "polars":
        f, g = _fn_from_arg(args.f), _fn_from_arg(args.g)
        payload = {
            "orthogonal": fnl.orthogonal(f, g),
            "double-polar-f": fnl.double_polar(f).to_json(),
            "double-polar-g": fnl.double_polar(g).to_json(),
            "polar-f-at-level": fnl.polar_at_level(f, level).to_json(),
        }
        _emit(payload, args, config)
        return 0
    if args.verb == "minprimes":
        report = fnl.minimal_prime_check(args.index, level, box)
        _emit(report.to_json(), args, config)
        return 0 if report.passed else 1
    if args.verb == "t75":
        f = _fn_from_arg(args.f)
        witness, report = fnl.theorem_complement_witness(f, level, box)
        payload = report.to_json()
        payload["witness"] = witness.to_json()
        _emit(payload, args, config)
        return 0 if report.passed else 1
    if args.verb == "nostrongunit":
        u = _fn_from_arg(args.u)
        report = fnl.strong_unit_gap_report(u)
        _emit(report.to_json(), args, config)
        return 0 if report.passed else 1
    raise UsageError(f"unknown fnl verb {args.verb!r}")


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ordspec",
        description="Right pre-orders on groups, lattice-group term actions, "
        "and finite Stone duality, at desk scale.",
    )
    parser.add_argument("--config", help="path to an ordspec.toml-style key/value file")
    parser.add_argument("--seed", type=int, default=None, help="seed recorded in reports")
    parser.add_argument("--out", help="write the report to a file instead of stdout")
    sub = parser.add_subparsers(dest="command", required=True)

    term = sub.add_parser("term", help="parse, normalize, and evaluate terms")
    tsub = term.add_subparsers(dest="verb", required=True)
    p = tsub.add_parser("parse")
    p.add_argument("term")
    p = tsub.add_parser("normalize")
    p.add_argument("term")
    p = tsub.add_parser("eval")
    p.add_argument("term")
    p.add_argument("--cone", required=True)
    p.add_argument("--at", default="e", help="base point: 'e', a JSON vector, or a word")
    p = tsub.add_parser("kappa")
    p.add_argument("--cone", required=True)
    p.add_argument("--terms", required=True, help="JSON array of term strings")
    p = tsub.add_parser("separate")
    p.add_argument("term")
    p.add_argument("--cones", required=True, help="JSON array of cone descriptors")

    cone = sub.add_parser("cone", help="check and transform pre-cones")
    csub = cone.add_subparsers(dest="verb", required=True)
    p = csub.add_parser("check")
    p.add_argument("cone")
    p = csub.add_parser("predicates")
    p.add_argument("cone")
    p = csub.add_parser("compare")
    p.add_argument("cone")
    p.add_argument("other")
    p = csub.add_parser("beta")
    p.add_argument("cone")
    p.add_argument("--budget", type=int, default=None)
    p = csub.add_parser("refine")
    p.add_argument("cone")
    p.add_argument("order")
    p = csub.add_parser("enumerate")
    p.add_argument("--rank", type=int, required=True)
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--constraints", help="JSON constraints file")
    p.add_argument("--limit", type=int, default=0, help="stop after this many cones")

    st = sub.add_parser("stone", help="finite Stone duality")
    ssub = st.add_subparsers(dest="verb", required=True)
    p = ssub.add_parser("dual")
    p.add_argument("--poset", help="poset JSON file")
    p.add_argument("--antichain", type=int)
    p.add_argument("--chain", type=int)
    p.add_argument("--conp", type=int, help="dualize the level-N truncation lattice")
    p.add_argument("--dot", action="store_true")
    p = ssub.add_parser("verify")
    p.add_argument("space", help="space JSON file: {poset, base}")
    p.add_argument("--dot", action="store_true")
    p = ssub.add_parser("conp")
    p.add_argument("--level", type=int, required=True)

    fn = sub.add_parser("fnl", help="finitely supported function group")
    fsub = fn.add_subparsers(dest="verb", required=True)
    p = fsub.add_parser("laws")
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--box", type=int, default=None)
    p = fsub.add_parser("polars")
    p.add_argument("--f", required=True)
    p.add_argument("--g", required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--box", type=int, default=None)
    p = fsub.add_parser("minprimes")
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--box", type=int, default=None)
    p = fsub.add_parser("t75")
    p.add_argument("--f", required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--box", type=int, default=None)
    p = fsub.add_parser("nostrongunit")
    p.add_argument("--u", required=True)
    p.add_argument("--level", type=int, default=None)
    p.add_argument("--box", type=int, default=None)
    return parser


_HANDLERS = {"term": cmd_term, "cone": cmd_cone, "stone": cmd_stone, "fnl": cmd_fnl}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = load_config(args.config, args.seed)
        return _HANDLERS[args.command](args, config)
    except (UsageError, BudgetError, ConeError, GroupError, terms.ParseError,
            stone.PosetError, fnl.FnlError, ValueError) as exc:
        sys.stderr.write(f"ordspec: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
