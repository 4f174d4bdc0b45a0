"""Command-line interface of the lambdamu workbench.

Exit codes: 0 on success, 1 on usage or input errors, 2 when a verdict or claim is
Unknown within the budget, 3 when a claim of the catalog suite fails.
"""

import asyncio
import functools
import json
import logging
import sys
from contextlib import contextmanager
from typing import Iterator, List, Optional

import click
from pydantic import ValidationError

from lambdamu.exceptions import BudgetExceededError, LambdaMuError
from lambdamu.models import CliConfig, TraceModel, VerdictKind
from lambdamu.modules.analysis import explore, sn_verdict, to_dot
from lambdamu.modules.reduction import (
    Strategy,
    normalize,
    redexes,
    step,
    trace_from_model,
    trace_to_model,
)
from lambdamu.modules.standardization import ClauseNode, is_standard, standardize
from lambdamu.modules.terms import canonical_key, cxty, parse, print_term
from lambdamu.modules.typecheck import check, infer, parse_context, parse_type, print_type
from lambdamu.utils import dump_model, ensure_recursion_limit, load_model
from lambdamu.workbench import Workbench

logger = logging.getLogger(__name__)

EXIT_ERROR = 1
EXIT_UNKNOWN = 2


@contextmanager
def _reported() -> Iterator[None]:
    """Turn library errors into a message on stderr and exit code 1."""
    try:
        yield
    except BudgetExceededError as e:
        click.echo(f"unknown: {e.message}", err=True)
        sys.exit(EXIT_UNKNOWN)
    except LambdaMuError as e:
        click.echo(f"error: {e.message}", err=True)
        sys.exit(EXIT_ERROR)
    except ValidationError as e:
        click.echo(f"error: invalid options: {e}", err=True)
        sys.exit(EXIT_ERROR)


def _budget_options(command):
    """Options shared by every subcommand."""
    options = [
        click.option("--seed", type=int, default=0, show_default=True, help="Seed of every random choice."),
        click.option("--max-steps", type=int, default=10_000, show_default=True, help="Step budget."),
        click.option("--max-nodes", type=int, default=1_000_000, show_default=True, help="Node budget."),
        click.option("--json", "json_output", is_flag=True, help="Print JSON."),
        click.option("--verbose", is_flag=True, help="Log progress to stderr."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _config(subcommand: str, terms: List[str], **options) -> CliConfig:
    config = CliConfig(subcommand=subcommand, terms=terms, **options)
    if config.verbose:
        logging.basicConfig(
            level=logging.INFO, format="%(asctime)s %(name)s %(levelname)s %(message)s"
        )
    return config


def _emit(config: CliConfig, payload: dict, text: str) -> None:
    if config.json_output:
        click.echo(json.dumps(payload, indent=2))
    else:
        click.echo(text)


@click.group()
@click.version_option(package_name="lambdamu-workbench")
def main():
    """Workbench for the symmetric λμ-calculus."""
    ensure_recursion_limit()


@main.command("parse")
@click.argument("term")
@_budget_options
def parse_command(term: str, **options):
    """Parse TERM and print it back."""
    with _reported():
        config = _config("parse", [term], **options)
        t = parse(term)
        printed = print_term(t)
        _emit(config, {"term": printed, "cxty": cxty(t), "key": canonical_key(t)}, printed)


@main.command("type")
@click.argument("term")
@click.argument("type_text", required=False)
@click.option("--ctx", default="", help='Context, e.g. "x:A->B, a:~A".')
@_budget_options
def type_command(term: str, type_text: Optional[str], ctx: str, **options):
    """Infer the type of TERM, or check it against TYPE_TEXT and print the derivation."""
    with _reported():
        config = _config("type", [term], ctx=ctx, **options)
        context = parse_context(config.ctx or "")
        t = parse(term)
        if type_text is None:
            printed = print_type(infer(context, t))
            _emit(config, {"type": printed}, printed)
            return
        d = check(context, t, parse_type(type_text))
        _emit(config, {"type": print_type(d.type), "derivation": d.render()}, "\n".join(d.render()))


@main.command("step")
@click.argument("term")
@click.option("--index", type=int, default=None, help="Fire the redex with this index.")
@_budget_options
def step_command(term: str, index: Optional[int], **options):
    """List the redexes of TERM with their reducts, or fire one."""
    with _reported():
        config = _config("step", [term], index=index, **options)
        t = parse(term)
        candidates = redexes(t)
        if config.index is None:
            rows = [(r.describe(), print_term(step(t, r))) for r in candidates]
            _emit(
                config,
                {"redexes": [{"redex": r, "reduct": u} for r, u in rows]},
                "\n".join(f"{i}: {r} -> {u}" for i, (r, u) in enumerate(rows)) or "normal",
            )
            return
        if not 0 <= config.index < len(candidates):
            raise LambdaMuError(f"No redex with index {config.index}; {len(candidates)} available")
        printed = print_term(step(t, candidates[config.index]))
        _emit(config, {"reduct": printed}, printed)


@main.command("normalize")
@click.argument("term")
@click.option(
    "--strategy",
    type=click.Choice([s.value for s in Strategy]),
    default=Strategy.LEFTMOST_OUTERMOST.value,
    show_default=True,
)
@click.option("--trace", "trace_path", type=click.Path(dir_okay=False), help="Write the trace here.")
@_budget_options
def normalize_command(term: str, strategy: str, trace_path: Optional[str], **options):
    """Reduce TERM to normal form with a strategy."""
    with _reported():
        config = _config("normalize", [term], strategy=strategy, trace=trace_path, **options)
        try:
            nf, tr = normalize(parse(term), Strategy(config.strategy), config.max_steps, config.seed)
        except BudgetExceededError as e:
            if config.trace and e.trace is not None:
                dump_model(config.trace, trace_to_model(e.trace))
            raise
        if config.trace:
            dump_model(config.trace, trace_to_model(tr))
        printed = print_term(nf)
        _emit(config, {"normal_form": printed, "steps": len(tr)}, f"{printed}  ({len(tr)} steps)")


@main.command("sn")
@click.argument("term")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), help="Write the explored graph as DOT.")
@_budget_options
def sn_command(term: str, dot_path: Optional[str], **options):
    """Decide strong normalization of TERM within the budget."""
    with _reported():
        config = _config("sn", [term], dot=dot_path, **options)
        verdict = sn_verdict(parse(term), max_nodes=config.max_nodes, seed=config.seed)
        summary = verdict.summary()
        text = verdict.describe()
        if verdict.witness is not None:
            text += "\n" + "\n".join(f"  {print_term(t)}" for t in verdict.witness.terms)
        _emit(config, summary.model_dump(mode="json"), text)
        if config.dot and verdict.graph is not None:
            with open(config.dot, "w", encoding="utf-8") as fh:
                fh.write(to_dot(verdict.graph))
        if verdict.kind == VerdictKind.UNKNOWN:
            sys.exit(EXIT_UNKNOWN)


@main.command("graph")
@click.argument("term")
@click.option("--dot", "dot_path", type=click.Path(dir_okay=False), help="Write DOT here instead of stdout.")
@_budget_options
def graph_command(term: str, dot_path: Optional[str], **options):
    """Export the reduction graph of TERM as DOT."""
    with _reported():
        config = _config("graph", [term], dot=dot_path, **options)
        g = explore(parse(term), max_nodes=config.max_nodes)
        if not g.complete:
            click.echo(f"warning: graph truncated ({g.truncated} budget)", err=True)
        source = to_dot(g)
        if config.dot:
            with open(config.dot, "w", encoding="utf-8") as fh:
                fh.write(source)
        else:
            click.echo(source)


def _render_certificate(node: ClauseNode, indent: int = 0) -> List[str]:
    where = ".".join(s.value for s in node.focus) or "root"
    split = f" split {node.split}" if node.split is not None else ""
    lines = [f"{'  ' * indent}{node.clause.value} {node.start}..{node.end} at {where}{split}"]
    for child in node.children:
        lines.extend(_render_certificate(child, indent + 1))
    return lines


@main.command("standardize")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--output", type=click.Path(dir_okay=False), help="Write the standard trace here.")
@_budget_options
def standardize_command(trace_path: str, output: Optional[str], **options):
    """Rearrange the reduction in a trace file into a standard one."""
    with _reported():
        config = _config("standardize", [], trace=trace_path, output=output, **options)
        tr = trace_from_model(load_model(config.trace, TraceModel))
        standard, cert = standardize(tr)
        if config.output:
            dump_model(config.output, trace_to_model(standard))
        _emit(
            config,
            cert.to_model().model_dump(mode="json"),
            "\n".join(print_term(t) for t in standard.terms),
        )


@main.command("check-standard")
@click.option("--trace", "trace_path", required=True, type=click.Path(exists=True, dir_okay=False))
@_budget_options
def check_standard_command(trace_path: str, **options):
    """Check whether the reduction in a trace file is standard."""
    with _reported():
        config = _config("check-standard", [], trace=trace_path, **options)
        cert = is_standard(trace_from_model(load_model(config.trace, TraceModel)))
        _emit(
            config,
            cert.to_model().model_dump(mode="json"),
            "\n".join(["standard"] + _render_certificate(cert.root, 1)),
        )


async def _run_suite(config: CliConfig):
    async with Workbench(max_nodes=config.max_nodes, seed=config.seed) as workbench:
        return await workbench.run_catalog_suite_async()


@main.command("catalog")
@_budget_options
def catalog_command(**options):
    """Run the claim suite on the catalog of counterexample terms."""
    with _reported():
        config = _config("catalog", [], **options)
        report = asyncio.run(_run_suite(config))
        _emit(config, report.model_dump(mode="json"), "\n".join(report.lines()))
        sys.exit(report.exit_code)


@main.command("repl")
@click.argument("term")
@_budget_options
def repl_command(term: str, **options):
    """Step through the reductions of TERM interactively.

    Enter a redex index to fire it, ``undo`` to go back or ``quit`` to leave.
    """
    with _reported():
        _config("repl", [term], **options)
        history = [parse(term)]
    prompt = functools.partial(click.prompt, default="quit", show_default=False)
    while True:
        current = history[-1]
        click.echo(print_term(current))
        candidates = redexes(current)
        for index, r in enumerate(candidates):
            click.echo(f"  {index}: {r.describe()}")
        if not candidates:
            click.echo("  (normal)")
        try:
            answer = prompt(">").strip()
        except click.Abort:
            return
        if answer == "quit":
            return
        if answer == "undo":
            if len(history) > 1:
                history.pop()
            else:
                click.echo("nothing to undo", err=True)
            continue
        try:
            chosen = candidates[int(answer)]
        except (ValueError, IndexError):
            click.echo(f"unknown command: {answer}", err=True)
            continue
        history.append(step(current, chosen))


if __name__ == "__main__":
    main()
