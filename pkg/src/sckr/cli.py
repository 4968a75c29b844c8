"""Command-line interface.

Exit codes: 0 ok, 1 usage, 2 parse or validation error, 3 inconsistent
knowledge repository, 4 resource cap exceeded.
"""
from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

import click

from . import engine, oracle, reductions
from .corpus import random_sckr
from .frontend import CkrSyntaxError, CkrValidationError, SourceDocument, parse, parse_query
from .model import QueryAtom, validate_query
from .program import Sym, emit_text, format_atom, format_rule, format_weak, parse_program
from .report import answer_set_view, cas_model_view, models_report
from .translator import output_atom, translate

EXIT_OK, EXIT_USAGE, EXIT_PARSE, EXIT_INCONSISTENT, EXIT_CAP = 0, 1, 2, 3, 4


class Inconsistent(click.ClickException):
    exit_code = EXIT_INCONSISTENT


@dataclass
class RunConfig:
    max_models: int | None = None
    max_ground_atoms: int | None = None
    mode: str = "global"
    as_json: bool = False

    def __post_init__(self):
        for name in ("max_models", "max_ground_atoms"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise click.UsageError(f"--{name.replace('_', '-')} must be positive")


def _load(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse(SourceDocument(text, path))


def _query(k, text: str) -> QueryAtom:
    try:
        q = parse_query(text)
    except CkrSyntaxError as exc:
        raise click.UsageError(str(exc))
    diags = validate_query(k, q)
    if diags:
        raise click.UsageError("; ".join(diags))
    return q


def _emit(cfg: RunConfig, payload, human: str):
    click.echo(json.dumps(payload, indent=2, sort_keys=False) if cfg.as_json else human)


def _human_models(report: dict) -> str:
    lines = [f"{report['count']} model(s)"]
    for i, m in enumerate(report["models"], 1):
        cost = ", ".join(f"{lv}:{n}" for lv, n in m["cost"].items()) or "0"
        lines.append(f"model {i}  cost {{{cost}}}")
        for o in m["overridings"]:
            lines.append(f"  {o}")
        for c, facts in m["facts_by_context"].items():
            items = [f"{a}({x})" for a, xs in facts["concepts"].items() for x in xs]
            items += [f"{r}({x},{y})" for r, ps in facts["roles"].items() for x, y in ps]
            lines.append(f"  {c}: {' '.join(items)}")
    return "\n".join(lines)


def _engine_models(k, cfg: RunConfig, optimal: bool) -> list[dict]:
    g = engine.ground(translate(k), cfg.max_ground_atoms)
    found = (engine.optimal_answer_sets if optimal else engine.answer_sets)(g, cfg.max_models)
    return [answer_set_view(k, s) for s in found]


def _oracle_models(k, cfg: RunConfig, optimal: bool) -> list[dict]:
    justified = [m for _, m in oracle.enumerate_justified(k)]
    found = oracle.preferred(k, cfg.mode, justified) if optimal else justified
    return [cas_model_view(k, m) for m in found]


def _canon(views: list[dict]) -> list[str]:
    return sorted(json.dumps(v, sort_keys=True) for v in views)


common = [
    click.option("--max-models", type=int, default=None, help="Cap on enumerated models."),
    click.option("--max-ground-atoms", type=int, default=None, help="Cap on ground atoms."),
    click.option("--mode", type=click.Choice(["global", "induced"]), default="global",
                 help="Preference between models."),
    click.option("--json", "as_json", is_flag=True, help="Machine-readable output."),
]


def with_common(f):
    for opt in reversed(common):
        f = opt(f)
    return f


def _cfg(max_models, max_ground_atoms, mode, as_json) -> RunConfig:
    return RunConfig(max_models, max_ground_atoms, mode, as_json)


@click.group()
def cli():
    """Reason over contextualized knowledge repositories with justifiable exceptions."""


@cli.command("translate")
@click.argument("path")
@click.option("-o", "--output", type=click.Path(dir_okay=False), default=None)
@with_common
def cmd_translate(path, output, **kw):
    """Print the datalog program for PATH."""
    cfg = _cfg(**kw)
    prog = translate(_load(path))
    if cfg.as_json:
        text = json.dumps({"facts": [format_atom(f) + "." for f in prog.facts],
                           "rules": [format_rule(r) for r in prog.rules],
                           "weak": [format_weak(w) for w in prog.weak]}, indent=2) + "\n"
    else:
        text = emit_text(prog)
    if output:
        Path(output).write_text(text)
    else:
        click.echo(text, nl=False)


@cli.command("models")
@click.argument("path")
@click.option("--all", "all_models", is_flag=True, help="All answer sets, not only optimal ones.")
@with_common
def cmd_models(path, all_models, **kw):
    """Enumerate answer sets of the translated program."""
    cfg = _cfg(**kw)
    if cfg.mode == "induced":
        raise click.UsageError("induced preference is only available under 'oracle'")
    k = _load(path)
    report = models_report(_engine_models(k, cfg, not all_models))
    _emit(cfg, report, _human_models(report))
    if not report["count"]:
        raise Inconsistent("no model: the knowledge repository is inconsistent")


@cli.command("query")
@click.argument("path")
@click.argument("query")
@with_common
def cmd_query(path, query, **kw):
    """Decide whether QUERY (A(a)@c or R(a,b)@c) holds in every optimal model."""
    cfg = _cfg(**kw)
    if cfg.mode == "induced":
        raise click.UsageError("induced preference is only available under 'oracle'")
    k = _load(path)
    q = _query(k, query)
    g = engine.ground(translate(k), cfg.max_ground_atoms)
    try:
        verdict = "entailed" if engine.cautious_entails(g, output_atom(q), cfg.max_models) \
            else "not-entailed"
    except engine.InconsistentProgramError:
        verdict = "inconsistent"
    _emit(cfg, {"query": str(q), "verdict": verdict}, verdict)
    if verdict == "inconsistent":
        sys.exit(EXIT_INCONSISTENT)


@cli.group("oracle")
def cmd_oracle():
    """Brute-force model-theoretic counterparts of the commands above."""


def _corpus_paths(paths, random_n, seed):
    for p in paths:
        yield p, _load(p)
    rng = random.Random(seed)
    for i in range(random_n):
        yield f"random#{i}", random_sckr(rng)


@cmd_oracle.command("models")
@click.argument("paths", nargs=-1)
@click.option("--all", "all_models", is_flag=True)
@click.option("--compare", is_flag=True, help="Also run the translation and diff the results.")
@click.option("--random", "random_n", type=int, default=0,
              help="Add this many random knowledge repositories (with --compare).")
@click.option("--seed", type=int, default=0)
@with_common
def oracle_models(paths, all_models, compare, random_n, seed, **kw):
    """Justified (or preferred) CAS-models, in the 'models' schema."""
    cfg = _cfg(**kw)
    if not paths and not random_n:
        raise click.UsageError("give at least one input file")
    if not compare:
        if len(paths) != 1 or random_n:
            raise click.UsageError("several inputs only make sense with --compare")
        k = _load(paths[0])
        report = models_report(_oracle_models(k, cfg, not all_models))
        _emit(cfg, report, _human_models(report))
        if not report["count"]:
            raise Inconsistent("no model: the knowledge repository is inconsistent")
        return
    if cfg.mode == "induced":
        raise click.UsageError("--compare needs global preference")
    diffs = 0
    for name, k in _corpus_paths(paths, random_n, seed):
        a = _canon(_oracle_models(k, cfg, not all_models))
        b = _canon(_engine_models(k, cfg, not all_models))
        same = a == b
        diffs += not same
        line = {"instance": name, "oracle": len(a), "translation": len(b), "same": same}
        click.echo(json.dumps(line) if cfg.as_json else
                   f"{name}: oracle={len(a)} translation={len(b)} {'same' if same else 'DIFF'}")
    click.echo(json.dumps({"diffs": diffs}) if cfg.as_json else f"{diffs} difference(s)")
    if diffs:
        sys.exit(EXIT_USAGE)


@cmd_oracle.command("query")
@click.argument("path")
@click.argument("query")
@click.option("--compare", is_flag=True)
@with_common
def oracle_query(path, query, compare, **kw):
    """Entailment by enumeration of preferred CAS-models."""
    cfg = _cfg(**kw)
    k = _load(path)
    q = _query(k, query)
    verdict = oracle.verdict(k, q, cfg.mode)
    payload = {"query": str(q), "verdict": verdict}
    if compare:
        g = engine.ground(translate(k), cfg.max_ground_atoms)
        try:
            other = "entailed" if engine.cautious_entails(g, output_atom(q), cfg.max_models) \
                else "not-entailed"
        except engine.InconsistentProgramError:
            other = "inconsistent"
        payload["translation"] = other
    _emit(cfg, payload, verdict if not compare else f"{verdict} (translation: {payload['translation']})")
    if verdict == "inconsistent":
        sys.exit(EXIT_INCONSISTENT)


def _model_from_view(k, view: dict) -> oracle.CasModel:
    by_atom = {}
    for a in oracle.candidate_assumptions(k):
        by_atom[("ovr", Sym(oracle.OVR_TAG[a.axiom.kind]), *a.ovr_args(), a.home, a.at)] = a
    chi = set()
    for text in view.get("overridings", []):
        facts = parse_program(text.rstrip(".") + ".").facts
        if len(facts) != 1 or facts[0] not in by_atom:
            raise click.UsageError(f"not an overriding of this knowledge repository: {text}")
        chi.add(by_atom[facts[0]])
    facts = set()
    for c, d in view.get("facts_by_context", {}).items():
        for a, xs in d.get("concepts", {}).items():
            facts |= {("i", x, a, c) for x in xs}
        for r, ps in d.get("roles", {}).items():
            facts |= {("r", x, r, y, c) for x, y in ps}
    return oracle.CasModel(frozenset(chi), frozenset(facts))


@cmd_oracle.command("check")
@click.argument("path")
@click.argument("model_file")
@with_common
def oracle_check(path, model_file, **kw):
    """Check a model (one entry of the 'models' JSON, or a whole report) for CKR-modelhood."""
    cfg = _cfg(**kw)
    k = _load(path)
    data = json.loads(Path(model_file).read_text())
    views = data["models"] if "models" in data else [data]
    results = [oracle.check_model(k, _model_from_view(k, v)) for v in views]
    _emit(cfg, {"results": results}, "\n".join("true" if r else "false" for r in results))


@cmd_oracle.command("bcq")
@click.argument("path")
@click.argument("query")
@with_common
def oracle_bcq(path, query, **kw):
    """Boolean conjunctive query, e.g. 'A(?x)@c, R(?x,b)@c'."""
    cfg = _cfg(**kw)
    k = _load(path)
    atoms = []
    for part in _split_atoms(query):
        try:
            atoms.append(parse_query(part, allow_vars=True))
        except CkrSyntaxError as exc:
            raise click.UsageError(str(exc))
    try:
        verdict = "entailed" if oracle.entails_bcq(k, atoms, cfg.mode) else "not-entailed"
    except ValueError as exc:
        raise click.UsageError(str(exc))
    except oracle.InconsistentKnowledgeError:
        verdict = "inconsistent"
    _emit(cfg, {"query": query, "verdict": verdict}, verdict)
    if verdict == "inconsistent":
        sys.exit(EXIT_INCONSISTENT)


def _split_atoms(text: str) -> list[str]:
    parts, depth, cur = [], 0, ""
    for ch in text:
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
            continue
        depth += (ch == "(") - (ch == ")")
        cur += ch
    parts.append(cur)
    return [p.strip() for p in parts if p.strip()]


@cli.group("gen")
def cmd_gen():
    """Write generated hardness instances as .ckr plus a .query sidecar."""


def _write(gi, out, as_json):
    ckr, side = gi.write(out)
    click.echo(json.dumps({"ckr": str(ckr), "query": str(side)}) if as_json else f"{ckr}\n{side}")


@cmd_gen.command("lexmax")
@click.option("-n", type=int, default=3, help="Variables.")
@click.option("-m", type=int, default=3, help="Clauses.")
@click.option("--cnf", type=click.Path(exists=True, dir_okay=False), default=None,
              help="DIMACS file instead of a random formula.")
@click.option("--seed", type=int, default=0)
@click.option("-o", "--out", default="lexmax")
@click.option("--json", "as_json", is_flag=True)
def gen_lexmax(n, m, cnf, seed, out, as_json):
    if cnf:
        e = reductions.parse_dimacs(Path(cnf).read_text())
    else:
        if n < 1 or m < 1 or n > reductions.DEFAULT_MAX_VARS:
            raise click.UsageError("need 1 <= n <= 20 and m >= 1")
        e = reductions.random_monotone_cnf(random.Random(seed), n, m)
    _write(reductions.gen_lexmax_sat(e), out, as_json)


@cmd_gen.command("oddsat")
@click.option("-l", "count", type=click.Choice(["2", "4"]), default="2")
@click.option("--max-vars", type=int, default=3)
@click.option("--seed", type=int, default=0)
@click.option("-o", "--out", default="oddsat")
@click.option("--json", "as_json", is_flag=True)
def gen_oddsat(count, max_vars, seed, out, as_json):
    ins = reductions.random_odd_instances(random.Random(seed), int(count), max_vars)
    _write(reductions.gen_odd_sat(ins), out, as_json)


@cmd_gen.command("qbf")
@click.option("--max-x", type=int, default=2)
@click.option("--max-y", type=int, default=2)
@click.option("--seed", type=int, default=0)
@click.option("-o", "--out", default="qbf")
@click.option("--json", "as_json", is_flag=True)
def gen_qbf(max_x, max_y, seed, out, as_json):
    e, layout, mu = reductions.random_qbf(random.Random(seed), max_x, max_y)
    _write(reductions.gen_qbf(e, layout, mu), out, as_json)


def main(argv=None) -> int:
    """Entry point mapping failures onto the documented exit codes."""
    try:
        cli.main(args=argv, prog_name="sckr", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except Inconsistent as exc:
        exc.show()
        return EXIT_INCONSISTENT
    except click.UsageError as exc:
        exc.show()
        return EXIT_USAGE
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except (CkrSyntaxError, CkrValidationError, reductions.ReductionError) as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_PARSE
    except (engine.GroundingLimitError, engine.ModelLimitError,
            oracle.EnumerationLimitError) as exc:
        click.echo(f"resource cap: {exc}", err=True)
        return EXIT_CAP
    except FileNotFoundError as exc:
        click.echo(f"error: {exc}", err=True)
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    return EXIT_OK


def run():  # console script
    sys.exit(main())
