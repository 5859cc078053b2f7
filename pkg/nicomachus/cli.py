import functools
import json
import logging
from enum import Enum
from typing import Any, Callable, Dict, List, Optional

import click
import yaml
from rich.console import Console
from rich.table import Table

from nicomachus.base.primitives import (
    ArithmeticRangeError,
    DomainError,
    InvariantViolation,
    ResourceLimitError,
    Status,
)
from nicomachus.cubic_identity import (
    CubicInstance,
    classify,
    corollary_holds,
    has_nontrivial_t2,
    has_nontrivial_t3,
    has_nontrivial_t4,
    identity_sides,
    is_nontrivial_rep,
    n_shape,
    solve,
    to_representation,
    verify_identity,
)
from nicomachus.factorint import factor
from nicomachus.norm_forms import (
    count_all_representations,
    count_positive,
    enumerate_all,
    enumerate_positive,
)
from nicomachus.pigeonhole import (
    DEFAULT_MAX_TABLE,
    STRATEGIES,
    run_construction,
)
from nicomachus.scanner import (
    DEFAULT_CHUNK_SIZE,
    DEFAULT_PROGRESS_EVERY,
    MODES,
    save_report,
    scan_conjecture,
    scan_equivalence,
)

SCHEMA = "nicomachus/1"
SCAN_CONFIG_KEYS = {
    "min": "n_lo",
    "max": "n_hi",
    "jobs": "jobs",
    "mode": "mode",
    "enum_cap": "enum_cap",
    "chunk_size": "chunk_size",
    "progress_every": "progress_every",
    "output_folder": "output_folder",
}

console = Console(color_system=None, highlight=False)
err_console = Console(stderr=True, color_system=None, highlight=False)
logger = logging.getLogger(__name__)


def stringify(payload: Any) -> Any:
    """Integers become decimal strings; bools and None stay as they are."""
    if isinstance(payload, bool) or payload is None:
        return payload
    if isinstance(payload, int):
        return str(payload)
    if isinstance(payload, Enum):
        return payload.value
    if isinstance(payload, dict):
        return {str(k): stringify(v) for k, v in payload.items()}
    if isinstance(payload, (list, tuple)):
        return [stringify(v) for v in payload]
    return payload


def envelope(command: str, inputs: Dict[str, Any], result: Any,
             status: Status) -> Dict[str, Any]:
    return stringify({
        "schema": SCHEMA,
        "command": command,
        "inputs": inputs,
        "result": result,
        "status": status.value,
    })


def _inputs(ctx: click.Context) -> Dict[str, Any]:
    return {k: v for k, v in ctx.params.items() if k != "output_format"}


def finish(ctx: click.Context, result: Dict[str, Any], status: Status,
           render: Callable[[], None]) -> None:
    if ctx.params.get("output_format") == "json":
        click.echo(json.dumps(
            envelope(ctx.command.name, _inputs(ctx), result, status),
            indent=2))
    else:
        render()
    ctx.exit(status.exit_code)


def _fail(ctx: click.Context, error: Exception, exit_code: int) -> None:
    if ctx.params.get("output_format") == "json":
        click.echo(json.dumps(envelope(
            ctx.command.name, _inputs(ctx),
            {"error": str(error), "type": type(error).__name__},
            Status.ERROR), indent=2))
    else:
        err_console.print(f"Error: {error}", soft_wrap=True)
    ctx.exit(exit_code)


def guarded(func: Callable) -> Callable:
    """Map package errors to the exit-code contract."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return func(*args, **kwargs)
        except (ArithmeticRangeError, DomainError, ResourceLimitError) as e:
            _fail(ctx, e, exit_code=2)
        except click.UsageError as e:
            if ctx.params.get("output_format") != "json":
                raise
            _fail(ctx, e, exit_code=2)
        except InvariantViolation as e:
            logger.error(f"invariant violated: {e}")
            _fail(ctx, e, exit_code=1)
    return wrapper


def format_option(func: Callable) -> Callable:
    return click.option(
        '--format', 'output_format', type=click.Choice(['text', 'json']),
        default='text', show_default=True,
        help='Human-readable text or the versioned JSON envelope.')(func)


def _pairs_table(title: str, pairs: List[List[int]]) -> Table:
    table = Table(title=title)
    table.add_column("a", justify="right")
    table.add_column("b", justify="right")
    for a, b in pairs:
        table.add_row(str(a), str(b))
    return table


@click.group()
@click.option('--verbose', is_flag=True, help='Log at INFO level.')
@click.option('--debug', is_flag=True, help='Log at DEBUG level.')
def cli(verbose: bool, debug: bool) -> None:
    """Nontrivial solutions of the modified Nicomachus identity and the
    norm form a^2 + ab + b^2 = n^2 + n + 1."""
    level = logging.WARNING
    if verbose:
        level = logging.INFO
    if debug:
        level = logging.DEBUG
    logging.basicConfig(
        level=level, format="%(asctime)s %(name)s %(levelname)s %(message)s")


@cli.command()
@click.argument('value', metavar='N', type=int)
@click.option('--all', 'which', flag_value='all',
              help='Every integer pair, signs included.')
@click.option('--positive', 'which', flag_value='positive', default=True,
              help='Only pairs with a, b > 0 (default).')
@format_option
@guarded
def reps(value: int, which: str, output_format: str) -> None:
    """Representations of N as a^2 + ab + b^2 with both counts."""
    ctx = click.get_current_context()
    if which == "all":
        pairs = [list(r.pair) for r in sorted(enumerate_all(value))]
        formula: Optional[int] = count_all_representations(value)
    else:
        pairs = [list(r.pair) for r in enumerate_positive(value)]
        try:
            formula = count_positive(value)
        except DomainError:
            # perfect square: no closed form for the positive count
            formula = None
    agree = None if formula is None else formula == len(pairs)
    result = {
        "N": value, "mode": which, "pairs": pairs,
        "count_formula": formula, "count_enumerated": len(pairs),
        "agree": agree,
    }
    status = Status.COUNTEREXAMPLE if agree is False else Status.OK

    def render():
        console.print(_pairs_table(f"{which} representations of {value}",
                                   pairs))
        label = "m" if which == "positive" else "count"
        shown = "n/a" if formula is None else formula
        console.print(f"{label} = {shown} (formula), {len(pairs)} "
                      f"(enumeration), agree: {agree}")

    finish(ctx, result, status, render)


@cli.command(name="solve")
@click.argument('n', type=int)
@format_option
@guarded
def solve_cmd(n: int, output_format: str) -> None:
    """Nontrivial solutions (k, x) for this n."""
    ctx = click.get_current_context()
    rows = []
    for solution in solve(n=n):
        rep = to_representation(solution)
        rows.append({
            "k": solution.k, "x": solution.x, "a": rep.a, "b": rep.b,
            "verified": verify_identity(k=solution.k, x=solution.x, n=n),
        })
    result = {"n": n, "N": CubicInstance(n=n).N, "solutions": rows,
              "count": len(rows)}
    ok = all(row["verified"] for row in rows)
    status = Status.OK if ok else Status.COUNTEREXAMPLE

    def render():
        table = Table(title=f"nontrivial solutions for n = {n}, "
                      f"N = {result['N']}")
        for column in ("k", "x", "a", "b", "verified"):
            table.add_column(column, justify="right")
        for row in rows:
            table.add_row(*(str(row[c]) for c in
                            ("k", "x", "a", "b", "verified")))
        console.print(table)
        if not rows:
            console.print("no nontrivial solution")

    finish(ctx, result, status, render)


@cli.command()
@click.argument('k', type=int)
@click.argument('x', type=int)
@click.argument('n', type=int)
@format_option
@guarded
def verify(k: int, x: int, n: int, output_format: str) -> None:
    """Evaluate both sides of the identity for (k, x, n)."""
    ctx = click.get_current_context()
    lhs, rhs = identity_sides(k=k, x=x, n=n)
    equal = lhs == rhs
    kind = classify(k=k, x=x, n=n) if equal else None
    result = {"k": k, "x": x, "n": n, "lhs": lhs, "rhs": rhs,
              "equal": equal, "kind": kind}

    def render():
        relation = "=" if equal else "!="
        console.print(f"{lhs} {relation} {rhs}")
        console.print("equal" if equal else "unequal")
        if kind is not None:
            console.print(f"kind: {kind.value}")

    finish(ctx, result, Status.OK if equal else Status.COUNTEREXAMPLE,
           render)


@cli.command()
@click.argument('n', type=int)
@format_option
@guarded
def characterize(n: int, output_format: str) -> None:
    """Factorization of N and the characterization verdicts."""
    ctx = click.get_current_context()
    value = CubicInstance(n=n).N
    factor_map = factor(value)
    t2, t3, t4 = (has_nontrivial_t2(n=n), has_nontrivial_t3(n=n),
                  has_nontrivial_t4(n=n))
    shape = n_shape(n=n)
    corollary = corollary_holds(n=n)
    agree = t2 == t3 == t4
    if t2:
        verdict = "nontrivial exists"
    elif shape == "three_times_prime":
        verdict = "no nontrivial (3·prime)"
    else:
        verdict = "no nontrivial (prime)"
    result = {
        "n": n, "N": value,
        "factorization": [list(pair) for pair in factor_map],
        "factorization_text": factor_map.format(),
        "split_multiplicity": factor_map.split_multiplicity(),
        "m": count_positive(value),
        "shape": shape,
        "t2": t2, "t3": t3, "t4": t4, "agree": agree,
        "corollary": corollary,
        "verdict": verdict,
    }
    ok = agree and corollary
    status = Status.OK if ok else Status.COUNTEREXAMPLE

    def render():
        console.print(f"N = {value} = {factor_map.format()}")
        console.print(f"split prime factors (with multiplicity): "
                      f"{result['split_multiplicity']}")
        console.print(f"m = {result['m']}")
        console.print(f"shape of N: {shape}")
        console.print(f"t2 = {t2}, t3 = {t3}, t4 = {t4}, agree: {agree}")
        console.print(f"corollary holds: {corollary}")
        console.print(f"verdict: {verdict}")

    finish(ctx, result, status, render)


@cli.command()
@click.argument('n', type=int)
@click.option('--s', 's', type=int, default=None,
              help='Override the modulus s (a divisor of N coprime to 3).')
@click.option('--strategy', type=click.Choice(list(STRATEGIES)),
              default='hash', show_default=True,
              help='Collision finder: hash table or numpy sort.')
@click.option('--max_table', '--max-table', 'max_table', type=int,
              default=DEFAULT_MAX_TABLE, show_default=True,
              help='Cap on the number of stored keys.')
@format_option
@guarded
def pigeonhole(n: int, s: Optional[int], strategy: str, max_table: int,
               output_format: str) -> None:
    """Build a nontrivial representation from a residue collision."""
    ctx = click.get_current_context()
    trace = run_construction(n=n, s=s, max_table=max_table,
                             strategy=strategy)
    rep, params, collision = trace.representation, trace.params, \
        trace.collision
    result = {
        "n": n, "N": params.N, "s": params.s, "t": params.t,
        "collision": {
            "later": list(collision.later),
            "earlier": list(collision.earlier),
            "key": list(collision.key),
            "insertions": collision.insertions,
        },
        "a": rep.a, "b": rep.b,
        "cubic_nontrivial": is_nontrivial_rep(a=rep.a, b=rep.b, n=n),
        "checks": [{"name": name, "passed": passed}
                   for name, passed in trace.checks],
    }

    def render():
        console.print(f"N = {params.N}, s = {params.s}, t = {params.t}")
        console.print(f"collision: {collision.later} ~ {collision.earlier} "
                      f"on key {tuple(collision.key)} after "
                      f"{collision.insertions} insertions")
        table = Table(title="checks")
        table.add_column("check", justify="left")
        table.add_column("passed", justify="right")
        for name, passed in trace.checks:
            table.add_row(name, str(passed))
        console.print(table)
        console.print(f"(a, b) = ({rep.a}, {rep.b})")

    finish(ctx, result, Status.OK, render)


def _apply_config(config: Optional[str], options: Dict[str, Any]
                  ) -> Dict[str, Any]:
    if not config:
        return options
    with open(config, 'r') as f:
        config_data = yaml.safe_load(f) or {}
    unknown = set(config_data) - set(SCAN_CONFIG_KEYS)
    if unknown:
        raise click.UsageError(
            f"unknown keys in {config}: {', '.join(sorted(unknown))}")
    for key, value in config_data.items():
        options[SCAN_CONFIG_KEYS[key]] = value
    return options


@cli.command()
@click.option('--min', 'n_lo', type=int, default=2, show_default=True,
              help='First n of the range.')
@click.option('--max', 'n_hi', type=int, default=None,
              help='Last n of the range (inclusive).')
@click.option('--jobs', type=int, default=1, envvar='NICOMACHUS_JOBS',
              show_default=True, help='Number of worker processes.')
@click.option('--mode', type=click.Choice(list(MODES)),
              default='conjecture', show_default=True)
@click.option('--enum_cap', '--enum-cap', 'enum_cap', type=int,
              default=2000, show_default=True,
              help='Also run the solver for n up to this value.')
@click.option('--chunk_size', '--chunk-size', 'chunk_size', type=int,
              default=DEFAULT_CHUNK_SIZE, show_default=True)
@click.option('--progress_every', '--progress-every', 'progress_every',
              type=int, default=DEFAULT_PROGRESS_EVERY, show_default=True,
              help='Progress line every this many values (0 disables).')
@click.option('--config', type=click.Path(exists=True), default=None,
              help='Path to the config file (YAML).')
@click.option('--output_folder', '--output-folder', 'output_folder',
              type=str, default=None,
              help='Folder where the JSON report is stored.')
@click.option('--no_timing', '--no-timing', 'no_timing', is_flag=True,
              help='Leave timing fields out of the report.')
@format_option
@guarded
def scan(n_lo: int, n_hi: Optional[int], jobs: int, mode: str,
         enum_cap: int, chunk_size: int, progress_every: int,
         config: Optional[str], output_folder: Optional[str],
         no_timing: bool, output_format: str) -> None:
    """Scan a range of n for the conjecture or the predicate agreement."""
    ctx = click.get_current_context()
    options = _apply_config(config, {
        "n_lo": n_lo, "n_hi": n_hi, "jobs": jobs, "mode": mode,
        "enum_cap": enum_cap, "chunk_size": chunk_size,
        "progress_every": progress_every, "output_folder": output_folder,
    })
    if options["n_hi"] is None:
        raise click.UsageError("--max is required (option or config)")
    if options["mode"] not in MODES:
        raise click.UsageError(f"unknown mode {options['mode']!r}")
    ctx.params.update(options)
    common = dict(
        n_lo=int(options["n_lo"]), n_hi=int(options["n_hi"]),
        workers=int(options["jobs"]), chunk_size=int(options["chunk_size"]),
        progress_every=int(options["progress_every"]))
    if options["mode"] == "conjecture":
        report = scan_conjecture(**common)
    else:
        report = scan_equivalence(enum_cap=int(options["enum_cap"]),
                                  **common)
    include_timing = not no_timing
    if options["output_folder"]:
        path = save_report(report, options["output_folder"],
                           include_timing=include_timing)
        logger.info(f"report stored in {path}")
    result = report.to_dict(include_timing=include_timing)
    status = Status.COUNTEREXAMPLE if report.counterexamples else Status.OK

    def render():
        table = Table(title=f"{report.mode} scan of "
                      f"[{report.n_lo}, {report.n_hi}]")
        table.add_column("field", justify="left")
        table.add_column("value", justify="right")
        for key, value in result.items():
            if key != "counterexamples":
                table.add_row(key, str(value))
        table.add_row("counterexamples", str(len(report.counterexamples)))
        console.print(table)
        for c in report.counterexamples:
            prime = "" if c.prime is None else f" (p = {c.prime})"
            console.print(f"n = {c.n}: {c.reason}{prime}")

    finish(ctx, result, status, render)


def main() -> None:
    cli(prog_name="nicomachus")


if __name__ == "__main__":
    main()
