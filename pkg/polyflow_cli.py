#!/usr/bin/env python3
"""
Command-line interface for polyflow.
"""

import sys
import logging
from typing import Any, Callable, Dict, List, Optional

import click
import yaml
from rich.console import Console
from rich.table import Table
from rich.panel import Panel

from polyflow import __version__
from polyflow.config import Config, VALID_FORMATS, VALID_SCHEMES
from polyflow.flows import parse_vector
from polyflow.records import dumps_csv, dumps_json, write_output
from polyflow.runner import ExperimentRunner, RunConfig, RunResult

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_GATE = 3


def _fail(message: str, code: int) -> None:
    console.print(f"[red]Error: {message}[/red]")
    sys.exit(code)


def _load_observables(text: Optional[str]) -> Optional[List[Any]]:
    if text is None:
        return None
    data = yaml.safe_load(text)
    return data if isinstance(data, list) else [data]


def _flow_spec(flow: Optional[str], gamma: Optional[str], alpha: Optional[str],
               beta: Optional[str], zeta: Optional[str]) -> Optional[Dict[str, Any]]:
    kind = flow or ('heisenberg' if alpha is not None or beta is not None else 'torus' if gamma else None)
    if kind is None:
        return None
    if kind == 'torus':
        if gamma is None:
            raise click.UsageError("--flow torus needs --gamma")
        return {'type': 'torus', 'gamma': gamma}
    spec: Dict[str, Any] = {'type': 'heisenberg'}
    for key, value in (('alpha', alpha), ('beta', beta), ('zeta', zeta)):
        if value is not None:
            spec[key] = value
    return spec


def shared_options(f: Callable[..., Any]) -> Callable[..., Any]:
    """Options accepted by every subcommand."""
    options = [
        click.option('--family', help='Polynomial family, e.g. "t, 2t, t^2"'),
        click.option('--flow', type=click.Choice(['torus', 'heisenberg']), help='Flow type'),
        click.option('--gamma', help='Torus flow direction, e.g. "sqrt2" or "1, 1"; entries within 1e-12 of a '
                     'fraction with denominator at most 10^4 are treated as rational'),
        click.option('--alpha', help='Heisenberg alpha'),
        click.option('--beta', help='Heisenberg beta'),
        click.option('--zeta', help='Heisenberg zeta'),
        click.option('--observables', help='YAML list of observables, e.g. "[{trig: {\'1\': 1}}]"'),
        click.option('--x', 'point', help='Evaluation point, e.g. "0.3" or "0.1, 0.2"'),
        click.option('--R', 'R', help='Upper limit of every parameter axis (or one per axis)'),
        click.option('--scheme', type=click.Choice(VALID_SCHEMES), help='Sampling scheme'),
        click.option('--samples', type=int, help='Number of samples'),
        click.option('--seed', type=int, help='Random seed'),
        click.option('--slack', type=float, help='Finite-R allowance for inequality checks'),
        click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Output file (default stdout)'),
        click.option('--format', 'output_format', type=click.Choice(VALID_FORMATS), help='Output format'),
        click.option('--strict', is_flag=True, help='Exit with code 3 when a hypothesis gate fails'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def density_options(f: Callable[..., Any]) -> Callable[..., Any]:
    options = [
        click.option('--intervals', type=click.Path(exists=True, dir_okay=False), help='Interval-set file'),
        click.option('--period', help='Period of the interval set'),
        click.option('--delta', help='Thickening radius'),
        click.option('--epsilon', type=float, help='Threshold allowance'),
        click.option('--smax', help='Scan window [0, smax]'),
        click.option('--step', help='Scan grid step'),
        click.option('--window', help='Window length L for density estimates'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _execute(ctx: click.Context, command: str, family: Optional[str], flow: Optional[str],
             gamma: Optional[str], alpha: Optional[str], beta: Optional[str], zeta: Optional[str],
             observables: Optional[str], point: Optional[str], R: Optional[str], scheme: Optional[str],
             samples: Optional[int], seed: Optional[int], slack: Optional[float], out_path: Optional[str],
             output_format: Optional[str], strict: bool, **extra: Any) -> None:
    """Build the RunConfig, run it and emit the record."""
    try:
        config = Config(ctx.obj.get('config_path'))
        runner = ExperimentRunner(config)
        R_value: Any = None
        if R is not None:
            limits = parse_vector(R)
            R_value = limits[0] if len(limits) == 1 else list(limits)
        sections = {name: extra.pop(name, {}) for name in ('analysis', 'seminorm', 'kronecker', 'density')}
        run = runner.run_config(
            command,
            family=family,
            flow=_flow_spec(flow, gamma, alpha, beta, zeta),
            observables=_load_observables(observables),
            x=list(parse_vector(point)) if point is not None else None,
            plan={'R': R_value, 'scheme': scheme, 'samples': samples, 'seed': seed},
            output={'format': output_format, 'path': out_path},
            slack=slack,
            strict=strict,
            **sections,
            **extra,
        )
        result = runner.run(run)
    except click.UsageError:
        raise
    except (ValueError, FileNotFoundError, yaml.YAMLError) as e:
        logger.debug("Input error", exc_info=True)
        _fail(str(e), EXIT_USAGE)
        return
    except Exception as e:
        logger.exception("Internal error")
        _fail(f"internal error: {e}", EXIT_INTERNAL)
        return

    _emit(run, result)
    if result.failures and run.strict:
        console.print(f"[yellow]{len(result.failures)} hypothesis gate(s) failed[/yellow]")
        sys.exit(EXIT_GATE)


def _emit(run: RunConfig, result: RunResult) -> None:
    if run.output.get('format', 'json') == 'csv':
        text = dumps_csv(result.record['config'], result.rows)
    else:
        text = dumps_json(result.record)
    write_output(text, run.output.get('path'))

    table = Table(title=f"polyflow {run.command}")
    table.add_column("Quantity", style="cyan")
    table.add_column("Value", style="green")
    for label, value in result.summary:
        table.add_row(label, value)
    console.print(table)
    if result.failures:
        console.print(Panel("\n".join(result.failures), title="Hypothesis gates", border_style="yellow"))


@click.group()
@click.version_option(__version__, prog_name='polyflow')
@click.option('--config', '-c', 'config_path', type=click.Path(dir_okay=False), help='Path to configuration file')
@click.option('--verbose', '-v', is_flag=True, help='Enable verbose logging')
@click.pass_context
def main(ctx: click.Context, config_path: Optional[str], verbose: bool) -> None:
    """Complexity bounds and flow-average experiments for polynomial families."""
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    ctx.ensure_object(dict)
    ctx.obj['config_path'] = config_path


@main.command()
@shared_options
@click.option('--budget', type=int, help='Candidate columns tried before the arrangement refinement')
@click.option('--max-flats', type=int, help='Cap on arrangement flats per family')
@click.option('--no-exact-search', is_flag=True, help='Skip the arrangement refinement')
@click.pass_context
def analyze(ctx: click.Context, budget: Optional[int], max_flats: Optional[int], no_exact_search: bool,
            **options: Any) -> None:
    """Complexity report and certificates for a family."""
    analysis = {'budget': budget, 'max_flats': max_flats, 'exact_search': False if no_exact_search else None}
    _execute(ctx, 'analyze', analysis=analysis, **options)


@main.command()
@shared_options
@click.option('--l2', is_flag=True, help='Also report the L2 deviation over an x-grid')
@click.pass_context
def simulate(ctx: click.Context, l2: bool, **options: Any) -> None:
    """Estimate the multiparameter average at a point."""
    _execute(ctx, 'simulate', l2=l2, **options)


@main.command()
@shared_options
@click.option('--resolution', type=int, help='Quadrature points per torus axis')
@click.pass_context
def kronecker(ctx: click.Context, resolution: Optional[int], **options: Any) -> None:
    """Limit of a linearized average (closed form and quadrature)."""
    _execute(ctx, 'kronecker', kronecker={'resolution': resolution}, **options)


@main.command()
@shared_options
@click.option('--scales', help='Real multipliers of the path coordinates, e.g. "sqrt2, sqrt3"')
@click.pass_context
def equidist(ctx: click.Context, scales: Optional[str], **options: Any) -> None:
    """Box-count discrepancy of a polynomial path (torus or Heisenberg)."""
    _execute(ctx, 'equidist', scales=[s.strip() for s in scales.split(',')] if scales else None, **options)


@main.command()
@shared_options
@click.option('--k', 'order', type=int, help='Seminorm order')
@click.option('--N', 'N', type=int, help='Cesaro length of the recursion estimate')
@click.option('--levels', type=int, help='Recursion steps evaluated numerically')
@click.option('--cases', type=int, help='Seeded random observable batches for the bound check')
@click.pass_context
def seminorm(ctx: click.Context, order: Optional[int], N: Optional[int], levels: Optional[int],
             cases: Optional[int], **options: Any) -> None:
    """Seminorms of observables and the average-norm bound."""
    _execute(ctx, 'seminorm', seminorm={'k': order, 'N': N, 'levels': levels}, cases=cases, **options)


@main.command()
@shared_options
@click.option('--psi', type=float, help='Side of the shift box [0, psi]^d')
@click.option('--cases', type=int, help='Seeded random observable batches')
@click.pass_context
def vdc(ctx: click.Context, psi: Optional[float], cases: Optional[int], **options: Any) -> None:
    """Finite-R van der Corput inequality check."""
    _execute(ctx, 'vdc', psi=psi, cases=cases, **options)


@main.command()
@shared_options
@density_options
@click.pass_context
def returns(ctx: click.Context, intervals: Optional[str], period: Optional[str], delta: Optional[str],
            epsilon: Optional[float], smax: Optional[str], step: Optional[str], window: Optional[str],
            **options: Any) -> None:
    """Syndeticity scan of multiple return times of a thickened set."""
    density = {'intervals': intervals, 'period': period, 'delta': delta, 'epsilon': epsilon,
               'smax': smax, 'step': step, 'window': window}
    _execute(ctx, 'returns', density=density, **options)


@main.command()
@shared_options
@density_options
@click.pass_context
def recurrence(ctx: click.Context, intervals: Optional[str], period: Optional[str], delta: Optional[str],
               epsilon: Optional[float], smax: Optional[str], step: Optional[str], window: Optional[str],
               **options: Any) -> None:
    """Recurrence scan for a union of arcs under a circle rotation."""
    density = {'intervals': intervals, 'period': period, 'epsilon': epsilon, 'smax': smax, 'step': step}
    _execute(ctx, 'recurrence', density=density, **options)


if __name__ == "__main__":
    main()
