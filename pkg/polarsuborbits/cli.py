import json
import logging
from contextlib import contextmanager

import click
import pandas as pd

from . import __version__
from .config import load_config
from .errors import CapExceededError, PolarSuborbitsError
from .reports import SUITES, ConsoleReportHandler, FileReportHandler, VerificationRunner, applicable_suites


@contextmanager
def user_errors():
    """Bad parameters and exceeded caps become usage errors (exit 2)."""
    try:
        yield
    except CapExceededError as e:
        raise click.UsageError(f"{e} (required: {e.required})")
    except (PolarSuborbitsError, ValueError) as e:
        raise click.UsageError(str(e))


def common_options(func):
    options = [
        click.option('--q', 'q', type=int, default=3, show_default=True, help='Field order (odd prime power)'),
        click.option('--nu', type=int, default=2, show_default=True, help='Witt index nu'),
        click.option('--threads', type=int, default=None, help='Worker threads [env POLAR_SUBORBITS_THREADS]'),
        click.option('--vertex-cap', type=int, default=None, help='Largest vertex table to build'),
        click.option('--pair-cap', type=int, default=None, help='Largest pair set to scan exhaustively'),
        click.option('--group-cap', type=int, default=None, help='Largest group to enumerate'),
        click.option('--seed', type=int, default=None, help='Seed for sampled cross-checks'),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _dump(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=True)


@click.group()
@click.version_option(version=__version__)
@click.option('--verbose', is_flag=True, help='Log progress')
@click.option('--debug', is_flag=True, help='Log every step')
def main(verbose, debug):
    """Suborbits, QSRG parameters and the association scheme of the last subconstituent of
    orthogonal dual polar graphs."""
    if debug:
        logging.basicConfig(level=logging.DEBUG, format='%(levelname)s %(name)s: %(message)s')
    elif verbose:
        logging.basicConfig(level=logging.INFO, format='%(levelname)s %(name)s: %(message)s')


@main.command()
@click.option('--q', 'q', type=int, default=None, help='Also describe F_q and its constants')
@click.option('--nu', type=int, default=2, show_default=True, help='Witt index for the rank')
def info(q, nu):
    """Show project information."""
    click.echo(f'polarsuborbits {__version__}')
    click.echo('Suborbit classification and verification for orthogonal dual polar graphs')
    if q is None:
        return
    from .gf import field_new
    from .lambda_graph import vertex_count
    from .suborbits import rank_g0

    with user_errors():
        spec = field_new(q)
    click.echo(f'📊 F_{q}: p={spec.p}, e={spec.e}' + (f', modulus {spec.modulus}' if spec.modulus else ''))
    click.echo(f'   z = {spec.z}, Omega = {list(spec.omega)}')
    click.echo(f'   nu={nu}: |Lambda| = {vertex_count(q, nu)}, rank = {rank_g0(q, nu)}')


@main.command()
@common_options
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv', 'table']), default='table', show_default=True)
@click.option('--printed', is_flag=True, help='Add the lengths as originally displayed')
def suborbits(q, nu, threads, vertex_cap, pair_cap, group_cap, seed, fmt, printed):
    """List every suborbit label with its length."""
    from .suborbits import all_labels, printed_suborbit_size, rank_g0, suborbit_size

    with user_errors():
        load_config(q=q, nu=nu, threads=threads)
        labels = all_labels(q, nu)
        df = pd.DataFrame({
            'label': [str(L) for L in labels],
            'size': [suborbit_size(q, nu, L) for L in labels],
        })
        if printed:
            df['printed'] = [str(printed_suborbit_size(q, nu, L)) for L in labels]
    df['cumulative'] = df['size'].cumsum()
    rank = rank_g0(q, nu)

    if fmt == 'json':
        click.echo(_dump({'q': q, 'nu': nu, 'rank': rank, 'total': int(df['size'].sum()),
                          'rows': json.loads(df.to_json(orient='records'))}))
    elif fmt == 'csv':
        click.echo(df.to_csv(index=False), nl=False)
    else:
        click.echo(f'📊 Suborbits of G01 on Lambda for q={q}, nu={nu} (rank {rank})')
        click.echo(df.to_string(index=False))
        click.echo(f'Total: {int(df["size"].sum())}')


@main.command()
@common_options
@click.option('--suite', type=click.Choice(list(SUITES) + ['all']), default='all', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None, help='Write the JSON report here')
@click.option('--json', 'as_json', is_flag=True, help='Print the JSON report instead of the summary')
def verify(q, nu, threads, vertex_cap, pair_cap, group_cap, seed, suite, out, as_json):
    """Run verification suites; exit 1 if any check fails."""
    with user_errors():
        config = load_config(q=q, nu=nu, threads=threads, vertex_cap=vertex_cap, pair_cap=pair_cap,
                             group_cap=group_cap, seed=seed)
        suites = applicable_suites(nu) if suite == 'all' else [suite]
        if suite != 'all' and not applicable_suites(nu, suites):
            raise click.BadParameter(f'suite {suite!r} does not apply at nu={nu}', param_hint='--suite')
        runner = VerificationRunner(config)
        if not as_json:
            click.echo(f'🔍 Running {", ".join(suites)} for q={q}, nu={nu}...')
            runner.add_handler(ConsoleReportHandler())
        if out:
            runner.add_handler(FileReportHandler(out))
        report = runner.run(suites)
    if as_json:
        click.echo(report.to_json())
    if not report.passed:
        raise SystemExit(1)


@main.command()
@common_options
@click.option('--format', 'fmt', type=click.Choice(['edgelist', 'dimacs', 'json']), default='edgelist',
              show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), required=True, help='Output file')
def graph(q, nu, threads, vertex_cap, pair_cap, group_cap, seed, fmt, out):
    """Export Lambda as an edge list, DIMACS or JSON graph."""
    from .geometry import space_new
    from .lambda_graph import export_graph

    with user_errors():
        config = load_config(q=q, nu=nu, threads=threads, vertex_cap=vertex_cap)
        space = space_new(q, nu)
        summary = export_graph(space, fmt, out, cap=config.vertex_cap)
    click.echo(f'✅ {summary["vertices"]} vertices, {summary["edges"]} edges written to {out}')


@main.command()
@common_options
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json', show_default=True)
@click.option('--out', type=click.Path(dir_okay=False), default=None,
              help='JSON file, or CSV prefix (one matrix per relation)')
def scheme(q, nu, threads, vertex_cap, pair_cap, group_cap, seed, fmt, out):
    """Build the nu = 2 association scheme and print its intersection numbers."""
    from .geometry import space_new
    from .lambda_graph import VertexTable
    from .scheme import build_scheme

    if nu != 2:
        raise click.BadParameter('the association scheme exists only for nu = 2', param_hint='--nu')
    with user_errors():
        config = load_config(q=q, nu=nu, threads=threads, vertex_cap=vertex_cap, seed=seed)
        space = space_new(q, 2)
        table = build_scheme(space, VertexTable(space, cap=config.vertex_cap), samples=config.samples,
                             seed=config.seed, threads=config.threads)

    if fmt == 'csv':
        paths = table.write_csv(out or f'scheme_q{q}')
        click.echo(f'📊 class {table.class_count}: wrote {len(paths)} CSV matrices')
        for path in paths:
            click.echo(f'   {path}')
        return
    payload = _dump(table.to_json())
    if out:
        with open(out, 'w', encoding='utf-8') as fh:
            fh.write(payload + '\n')
        click.echo(f'✅ class {table.class_count} scheme written to {out}')
    else:
        click.echo(payload)


@main.command()
@common_options
@click.option('--vertex', 'vertex_json', required=True, help='Vertex as JSON: {"X": [...nu*nu], "Z": [...2nu]}')
@click.option('--format', 'fmt', type=click.Choice(['text', 'json']), default='text', show_default=True)
def classify(q, nu, threads, vertex_cap, pair_cap, group_cap, seed, vertex_json, fmt):
    """Classify one vertex and print its suborbit label and witness."""
    from .geometry import space_new
    from .lambda_graph import Vertex
    from .suborbits import classify as classify_vertex

    with user_errors():
        space = space_new(q, nu)
        v = Vertex.from_json(space, vertex_json)
        label, witness = classify_vertex(space, v)
    if fmt == 'json':
        click.echo(_dump({'label': str(label), 'vertex': v.to_json(), 'witness': witness.to_json()}))
    else:
        click.echo(str(label))


if __name__ == '__main__':
    main()
