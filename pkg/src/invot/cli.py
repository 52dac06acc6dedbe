"""
Command-line front end.

Each run command layers its flags over the config file and environment,
hands the result to InvotPipeline and prints the run summary as JSON on
stdout. Errors become a single JSON line on stderr and exit code 1 (bad
input) or 2 (numerical failure).
"""

import json
from pathlib import Path
from typing import Annotated, Any, Dict, List, Optional

import typer

from .core.config import ConfigurationManager
from .core.pipeline import InvotPipeline
from .exceptions import InvotError
from .utils.file_saver import to_builtin
from .utils.logging import setup_logging
from .utils.validation import ConfigValidator

app = typer.Typer(
    name="invot",
    help="Inverse optimal transport: forward solvers, cost recovery and identifiability checks.",
    add_completion=False,
    no_args_is_help=True,
)

ConfigOpt = Annotated[Optional[Path], typer.Option("--config", "-c", help="YAML or JSON run config.")]
OutOpt = Annotated[Optional[str], typer.Option("--out", help="Output directory (INVOT_OUT wins).")]
CostOpt = Annotated[
    Optional[List[str]],
    typer.Option("--cost", help="power:p, concave:p, inline JSON or a .json file; repeatable."),
]
MuOpt = Annotated[Optional[str], typer.Option("--mu", help="Source measure, e.g. normal:0,1 or uniform:0,1.")]
NuOpt = Annotated[Optional[str], typer.Option("--nu", help="Target measure.")]
FamilyOpt = Annotated[Optional[str], typer.Option("--family", help="Generator of the location-scale family.")]
GridOpt = Annotated[Optional[int], typer.Option("--grid-n", help="Points per measure grid.")]
LpOpt = Annotated[Optional[int], typer.Option("--lp-n", help="Atoms per marginal in LP solves.")]
TolOpt = Annotated[Optional[float], typer.Option("--tol", help="Value-gap tolerance.")]
JobsOpt = Annotated[Optional[int], typer.Option("--jobs", help="Threads for lattice sweeps.")]
SeedOpt = Annotated[Optional[int], typer.Option("--seed", help="Seed for sampled instances.")]
LogOpt = Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING or ERROR.")]
ObservationsOpt = Annotated[
    Optional[str], typer.Option("--observations", help="CSV with columns x, T, fprime.")
]


def _fail(error: InvotError) -> None:
    typer.echo(error.to_json_line(), err=True)
    raise typer.Exit(code=error.exit_code)


def _execute(command: str, config_path: Optional[Path], overrides: Dict[str, Any]) -> None:
    overrides = {
        k: list(v) if isinstance(v, (list, tuple)) else v
        for k, v in overrides.items()
        if v is not None and not (isinstance(v, (list, tuple)) and not v)
    }
    overrides["command"] = command
    try:
        config = ConfigurationManager.load_config(config_path, overrides)
        # the writer checks the output directory before the log file lands in it
        pipeline = InvotPipeline(config)
        setup_logging(config.log_level, Path(config.out) / "run.log")
        summary = pipeline.run()
    except InvotError as e:
        _fail(e)
        return
    typer.echo(json.dumps(summary, sort_keys=True, default=to_builtin))


@app.command()
def forward(
    cost: CostOpt = None,
    mu: MuOpt = None,
    nu: NuOpt = None,
    grid_n: GridOpt = None,
    lp_n: LpOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """OT value, potentials, monotone map and an LP plan for one cost."""
    _execute(
        "forward",
        config,
        {"costs": cost, "mu": mu, "nu": nu, "grid_n": grid_n, "lp_n": lp_n, "out": out, "log_level": log_level},
    )


@app.command()
def potentials(
    cost: CostOpt = None,
    mu: MuOpt = None,
    nu: NuOpt = None,
    grid_n: GridOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """Kantorovich potentials with feasibility and duality-gap certificates."""
    _execute(
        "potentials",
        config,
        {"costs": cost, "mu": mu, "nu": nu, "grid_n": grid_n, "out": out, "log_level": log_level},
    )


@app.command("recover-map")
def recover_map(
    observations: ObservationsOpt = None,
    cost: CostOpt = None,
    mu: MuOpt = None,
    nu: NuOpt = None,
    alpha: Annotated[Optional[float], typer.Option("--alpha", help="Observed OT value of (mu, nu).")] = None,
    grid_n: GridOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """Convex cost from an observed map and potential gradient."""
    _execute(
        "recover-map",
        config,
        {
            "observations": observations,
            "costs": cost,
            "mu": mu,
            "nu": nu,
            "alpha": alpha,
            "grid_n": grid_n,
            "out": out,
            "log_level": log_level,
        },
    )


@app.command("recover-values")
def recover_values(
    surface: Annotated[Optional[str], typer.Option("--surface", help="CSV with columns a, b, alpha.")] = None,
    family: FamilyOpt = None,
    method: Annotated[Optional[str], typer.Option("--method", help="fourier or post.")] = None,
    cost: CostOpt = None,
    reg_eps: Annotated[Optional[float], typer.Option("--reg-eps", help="Relative spectral cutoff.")] = None,
    post_order: Annotated[Optional[int], typer.Option("--post-order", help="Post derivative order.")] = None,
    poly_degree: Annotated[
        Optional[int], typer.Option("--poly-degree", help="Polynomial re-fit degree for fourier.")
    ] = None,
    grid_n: GridOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """Cost (or cost difference) from an OT-value surface; --cost alone generates the surface."""
    _execute(
        "recover-values",
        config,
        {
            "surface": surface,
            "family": family,
            "method": method,
            "costs": cost,
            "reg_eps": reg_eps,
            "post_order": post_order,
            "poly_degree": poly_degree,
            "grid_n": grid_n,
            "out": out,
            "log_level": log_level,
        },
    )


@app.command("recover-concave")
def recover_concave(
    observations: ObservationsOpt = None,
    cost: CostOpt = None,
    mu: MuOpt = None,
    nu: NuOpt = None,
    lp_n: LpOpt = None,
    grid_n: GridOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """Concave cost of the distance from an observed plan."""
    _execute(
        "recover-concave",
        config,
        {
            "observations": observations,
            "costs": cost,
            "mu": mu,
            "nu": nu,
            "lp_n": lp_n,
            "grid_n": grid_n,
            "out": out,
            "log_level": log_level,
        },
    )


@app.command()
def identify(
    cost: CostOpt = None,
    family: FamilyOpt = None,
    mu: MuOpt = None,
    nu: NuOpt = None,
    tol: TolOpt = None,
    jobs: JobsOpt = None,
    lp_n: LpOpt = None,
    grid_n: GridOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """Search for a value witness between costs; with --mu/--nu also compare plans."""
    _execute(
        "identify",
        config,
        {
            "costs": cost,
            "family": family,
            "mu": mu,
            "nu": nu,
            "tol": tol,
            "jobs": jobs,
            "lp_n": lp_n,
            "grid_n": grid_n,
            "out": out,
            "log_level": log_level,
        },
    )


@app.command()
def demo(
    name: Annotated[str, typer.Argument(help="Demo name, e.g. plans-nonidentifiability.")],
    seed: SeedOpt = None,
    out: OutOpt = None,
    config: ConfigOpt = None,
    log_level: LogOpt = None,
):
    """Run a named demonstration."""
    _execute("demo", config, {"demo": name, "seed": seed, "out": out, "log_level": log_level})


@app.command()
def run(
    config: Annotated[Path, typer.Argument(help="YAML or JSON run config naming its command.")],
    out: OutOpt = None,
):
    """Run the command stored in a config file."""
    try:
        command = ConfigurationManager.load_config(config).command
    except InvotError as e:
        _fail(e)
        return
    _execute(command, config, {"out": out})


@app.command()
def validate(config: Annotated[Path, typer.Argument(help="YAML or JSON run config.")]):
    """List every problem in a config without running it; exit 1 when there are any."""
    try:
        diagnostics = ConfigValidator.validate_file(config)
    except InvotError as e:
        _fail(e)
        return
    typer.echo(json.dumps({"diagnostics": diagnostics}, sort_keys=True))
    if diagnostics:
        raise typer.Exit(code=1)


def main() -> None:
    app()


if __name__ == "__main__":
    main()
