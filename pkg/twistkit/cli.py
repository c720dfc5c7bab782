"""
twistkit - CLI Interface

Subcommands for every check. Results go to stdout (plain text, or a single
JSON report with ``--json``); logs and errors go to stderr.

Exit codes: 0 on success, 1 on a failed check or stage, 2 on usage or parse errors.
"""

import json
import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from . import __version__, config
from .checks import CheckRequest, orbit_trajectory, run
from .errors import IntegrationError, ReductionError, StageFailure, TwistkitError
from .models import Report

# Initialize CLI app and consoles
app = typer.Typer(help="twistkit - twisted Poisson and Vlasov bracket checks", no_args_is_help=True)
console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)

logger = logging.getLogger(__name__)

N_OPTION = typer.Option(3, "--n", min=1, help="Base dimension n (phase space has 2n coordinates)")
B_OPTION = typer.Option("0", "--B", help="Magnetic 2-form in the x-coordinates, e.g. 'x3*dx1^dx2'")
JSON_OPTION = typer.Option(False, "--json", help="Print a single JSON report")


@app.callback()
def main(
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log computation details to stderr"),
) -> None:
    """Exact checks of twisted Poisson structures from magnetic fields."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else config.LOG_LEVEL,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


@contextmanager
def _exit_codes() -> Iterator[None]:
    try:
        yield
    except (TwistkitError, ValidationError) as e:
        err_console.print(f"Error: {e}", markup=False, style="bold red")
        raise typer.Exit(2)
    except (IntegrationError, ReductionError, StageFailure) as e:
        err_console.print(f"Failed: {e}", markup=False, style="bold red")
        raise typer.Exit(1)


def _emit(report: Report, as_json: bool) -> None:
    if as_json:
        typer.echo(report.to_json())
    elif report.rhs == "" and report.passed:
        # computations: the result is the whole output
        typer.echo(report.lhs)
    else:
        typer.echo(f"{report.check}: {'pass' if report.passed else 'FAIL'}")
        typer.echo(f"lhs: {report.lhs}")
        typer.echo(f"rhs: {report.rhs}")
    if not report.passed:
        raise typer.Exit(1)


def _run(check: str, as_json: bool, **fields) -> Report:
    with _exit_codes():
        request = CheckRequest(**{key: value for key, value in fields.items() if value is not None})
        report = run(check, request)
    _emit(report, as_json)
    return report


@app.command()
def d(
    form: str = typer.Argument(..., help="Differential form, e.g. 'x1*p2*dx1'"),
    n: int = N_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Exterior derivative of a form on the 2n-dimensional chart."""
    _run("d", as_json, n=n, form=form)


@app.command()
def schouten(n: int = N_OPTION, B: str = B_OPTION, as_json: bool = JSON_OPTION) -> None:
    """Schouten square [pi_B, pi_B] of the magnetic Poisson bivector."""
    _run("schouten", as_json, n=n, B=B)


@app.command()
def invert(
    n: int = N_OPTION,
    B: str = B_OPTION,
    form: Optional[str] = typer.Option(None, "--form", help="2-form to invert instead of omega_B"),
    as_json: bool = JSON_OPTION,
) -> None:
    """Inverse bivector of a nondegenerate 2-form (omega_B by default)."""
    _run("invert", as_json, n=n, B=B, form=form)


@app.command()
def bracket(
    f: str = typer.Option(..., "--f", help="First function"),
    g: str = typer.Option(..., "--g", help="Second function"),
    n: int = N_OPTION,
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Bracket {f, g} of the magnetic bivector."""
    _run("bracket", as_json, n=n, B=B, f=f, g=g)


@app.command()
def hamiltonian(
    f: str = typer.Option(..., "--f", help="Hamiltonian function"),
    n: int = N_OPTION,
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Hamiltonian vector field H_f."""
    _run("hamiltonian", as_json, n=n, B=B, f=f)


@app.command()
def jacobiator(
    f: str = typer.Option(..., "--f"),
    g: str = typer.Option(..., "--g"),
    h: str = typer.Option(..., "--h"),
    n: int = N_OPTION,
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Jacobi defect of (f, g, h) against phi(H_f, H_g, H_h)."""
    _run("jacobiator", as_json, n=n, B=B, f=f, g=g, h=h)


@app.command()
def brackets(
    f: str = typer.Option(..., "--f"),
    g: str = typer.Option(..., "--g"),
    n: int = N_OPTION,
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Commutator [H_f, H_g] against H_{f,g} plus the phi correction."""
    _run("brackets", as_json, n=n, B=B, f=f, g=g)


@app.command("check-twisted")
def check_twisted(n: int = N_OPTION, B: str = B_OPTION, as_json: bool = JSON_OPTION) -> None:
    """Twisted condition [pi, pi] = 2 wedge^3 sharp(phi)."""
    _run("check-twisted", as_json, n=n, B=B)


@app.command()
def liouville(
    f: str = typer.Option(..., "--f", help="Hamiltonian function"),
    n: int = N_OPTION,
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Lie derivative of the Liouville volume along H_f (zero means preserved)."""
    _run("liouville", as_json, n=n, B=B, f=f)


def _load_json(source: Optional[str], option: str) -> Optional[dict]:
    """JSON from a file path or from the option text itself."""
    if source is None:
        return None
    path = Path(source)
    text = path.read_text(encoding="utf-8") if path.is_file() else source
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise TwistkitError(f"{option} is neither a readable file nor valid JSON: {e}") from e


@app.command("lie-poisson")
def lie_poisson(
    algebra: Optional[str] = typer.Option(
        None, "--algebra", help='Structure constants as a JSON file or string {"d": n, "c": [[k,i,j,v],...]}; so(3) if omitted'
    ),
    as_json: bool = JSON_OPTION,
) -> None:
    """Lie-Poisson bivector, its Schouten square and the Jacobi defects of the algebra."""
    with _exit_codes():
        table = _load_json(algebra, "--algebra")
    report = _run("lie-poisson", as_json, algebra=table)
    if not as_json:
        defects = report.meta["jacobi_defects"]
        typer.echo("Lie algebra" if not defects else f"not a Lie algebra: {'; '.join(defects)}")


@app.command("vlasov-jacobiator")
def vlasov_jacobiator(
    f: str = typer.Option(..., "--f", help="Kernel a"),
    g: str = typer.Option(..., "--g", help="Kernel b"),
    h: str = typer.Option(..., "--h", help="Kernel c"),
    density: str = typer.Option("1", "--density", help="Density on the box"),
    half_width: Optional[str] = typer.Option(None, "--half-width", help="Box half width (rational)"),
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Lifted jacobiator of linear functionals against the div B formula (n = 3)."""
    _run("vlasov-jacobiator", as_json, n=3, B=B, f=f, g=g, h=h, density=density, half_width=half_width)


@app.command("orbit-integral")
def orbit_integral(
    g: str = typer.Option(..., "--g", help="Function integrated over the orbit"),
    f: str = typer.Option(..., "--f", help="Hamiltonian whose flow gives the orbit"),
    start: Optional[str] = typer.Option(None, "--start", help="Start state, e.g. 1,0,0,0,0,0"),
    step: Optional[float] = typer.Option(None, "--step", help="RK4 step (default TWISTKIT_STEP)"),
    csv: Optional[Path] = typer.Option(None, "--csv", help="Write the sampled orbit to this CSV file"),
    n: int = N_OPTION,
    B: str = B_OPTION,
    as_json: bool = JSON_OPTION,
) -> None:
    """Line integral of g over one period of the closed orbit of H_f."""
    fields = dict(n=n, B=B, f=f, g=g, start=start, step=step)
    report = _run("orbit-integral", as_json, **fields)
    if csv is not None:
        with _exit_codes():
            request = CheckRequest(**{key: value for key, value in fields.items() if value is not None})
            trajectory = orbit_trajectory(request, report.meta["period"], report.meta["step"])
            trajectory.write_csv(csv)
        err_console.print(f"Wrote {len(trajectory.times)} samples to {csv}", markup=False)


@app.command("reproduce-paper")
def reproduce_paper(
    B: Optional[str] = typer.Option(None, "--B", help="Run the chain on this field instead of the worked example"),
    anchors: Optional[str] = typer.Option(None, "--anchors", help="Stage anchors as a JSON file or string"),
    step: Optional[float] = typer.Option(None, "--step", help="RK4 step for the orbit integral"),
    as_json: bool = JSON_OPTION,
) -> None:
    """Run the monopole counterexample chain stage by stage."""
    with _exit_codes():
        expected = _load_json(anchors, "--anchors")
        request = CheckRequest(**{k: v for k, v in dict(B=B, anchors=expected, step=step).items() if v is not None})
        report = run("reproduce-paper", request)
    if as_json:
        _emit(report, as_json=True)
        return

    if "failed_stage" in report.meta:
        err_console.print(f"❌ Stage '{report.meta['failed_stage']}' failed: {report.meta['detail']}",
                          markup=False, style="bold red")
        raise typer.Exit(1)

    table = Table(title=f"Counterexample chain for B = {report.meta['magnetic_form']}")
    table.add_column("Stage", style="cyan")
    table.add_column("Result")
    table.add_column("Anchor", justify="center")
    for stage in report.meta["stages"]:
        marker = "✅" if stage["pass"] else "❌"
        table.add_row(stage["stage"], stage["actual"], marker if stage["applicable"] else "-")
    console.print(table)
    orbit = report.meta["orbit"]
    console.print(f"orbit integral {orbit['value']!r} over period {orbit['period']!r} "
                  f"(error estimate {orbit['error_estimate']:.3g})", markup=False)
    console.print(f"signs: {report.meta['signs']}", markup=False)
    console.print(f"\n✅ {report.lhs}", style="bold green", markup=False)


@app.command()
def schema() -> None:
    """Print the JSON schema of the report object."""
    typer.echo(json.dumps(Report.model_json_schema(by_alias=True), indent=2))


@app.command()
def version() -> None:
    """Print the twistkit version."""
    typer.echo(__version__)


if __name__ == "__main__":
    app()
