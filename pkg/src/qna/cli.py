"""Command-line interface for qna.

Usage::

    # Wall diagrams
    qna scatter --preset pentagon --order 8
    qna scatter --in walls.yaml --order 4 --out diagram.json

    # Norms and seminorms
    qna norm --in series.json --radius 0,1/2
    qna spectrum --grid -2,2,10 --shift -2,-1,0,1,2
    qna gl2norm --in request.json --summary

JSON goes to stdout (or ``--out``); logs and summaries go to stderr.
Exit codes: 2 for malformed input, 3 for inadmissible data, 1 for
internal convergence failures.
"""

from __future__ import annotations

import json
import time
from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any

import click
import numpy as np
import yaml
from gmpy2 import mpq
from pydantic import BaseModel, ValidationError

from . import __version__
from .exceptions import ConvergenceError, InadmissibleError, QnaError
from .logging_config import command_logger, log_failure, setup_logging, timed
from .models import (
    DiagramModel,
    DiagramResponse,
    FieldKind,
    GL2NormRequest,
    GL2NormResponse,
    LineModel,
    NormResponse,
    RunConfig,
    ScalarModel,
    SeriesRequest,
    SpectrumResponse,
    WallModel,
    build_field,
    read_scalar,
)
from .nascalar import LogNorm, PadicField, Scalar, to_rational
from .presets import BUILTIN_PRESETS, list_presets, load_preset
from .qgl2 import QuantumGL2, gl2_sup_norm
from .qtorus import PolyRadius, TwistData, gauss_norm
from .rich_display import (
    display_diagram_summary,
    display_error,
    display_gl2_summary,
    display_norm_summary,
    display_preset_list,
    display_spectrum_summary,
)
from .scattering import Line, Region, build_scattering_tree, dilog_coefficients
from .singmodel import rational_grid, sample_spectrum

# -- shared plumbing ------------------------------------------------------------


def _load_document(path: Path | None, inline: str | None) -> Any:
    """Read a JSON or YAML document (by file suffix) or inline JSON."""
    if inline is not None:
        return json.loads(inline)
    assert path is not None
    content = path.read_text("utf-8")
    if path.suffix.lower() in {".yaml", ".yml"}:
        return yaml.safe_load(content)
    return json.loads(content)


def _emit(document: BaseModel, output: Path | None) -> dict[str, Any]:
    data = document.model_dump(mode="json")
    text = json.dumps(data, indent=2) + "\n"
    if output is not None:
        output.parent.mkdir(parents=True, exist_ok=True)
        output.write_text(text, encoding="utf-8")
    else:
        click.echo(text, nl=False)
    return data  # type: ignore[no-any-return]


@contextmanager
def _handle_errors(command: str) -> Iterator[None]:
    """Map failures to the exit-code contract."""
    log = command_logger(command)
    try:
        yield
    except ValidationError as e:
        details = "\n".join(
            f"• {' -> '.join(str(p) for p in err['loc']) or 'document'}: {err['msg']}"
            for err in e.errors()
        )
        log_failure(log, e, 2)
        display_error(f"Invalid input for '{command}'", details)
        raise SystemExit(2) from e
    except InadmissibleError as e:
        log_failure(log, e, 3)
        display_error("Inadmissible data", str(e))
        raise SystemExit(3) from e
    except ConvergenceError as e:
        log_failure(log, e, 1)
        display_error("Computation did not converge", str(e))
        raise SystemExit(1) from e
    except (QnaError, ValueError, OSError, yaml.YAMLError) as e:
        log_failure(log, e, 2)
        display_error(f"Malformed input for '{command}'", str(e))
        raise SystemExit(2) from e


_in_option = click.option(
    "--in",
    "input_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Input document (JSON, or YAML by .yaml/.yml suffix).",
)
_json_option = click.option(
    "--json", "inline_json", help="Input document given inline as JSON."
)
_out_option = click.option(
    "--out",
    "output",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Write the JSON result here instead of stdout.",
)
_summary_option = click.option(
    "--summary", is_flag=True, help="Print a rich summary table to stderr."
)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option(
    "--verbose",
    "-v",
    is_flag=True,
    help="Enable verbose logging with detailed debug information.",
)
@click.option(
    "--log-file",
    type=click.Path(dir_okay=False, path_type=Path),
    help="Also write DEBUG logs to this file (rotated).",
)
@click.pass_context
def main(ctx: click.Context, verbose: bool = False, log_file: Path | None = None) -> None:
    """Exact computations on quantum tori, scattering diagrams and quantum GL2."""
    setup_logging(verbose=verbose, log_file=log_file)
    logger = command_logger("qna")

    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose

    logger.info("Starting qna CLI", verbose=verbose)


# -- scatter --------------------------------------------------------------------------


def _line_coefficients(
    model: LineModel, wall: WallModel, twist: TwistData, order: int
) -> dict[int, Scalar]:
    line_order = to_rational(model.order)
    steps = int(mpq(order) / line_order)
    if wall.type == "dilog":
        coefficients = dilog_coefficients(twist, steps, wall.power) if wall.power else []
        return {k: coefficients[k] for k in range(1, len(coefficients))}
    a, b = model.covector
    out = {}
    for e1, e2, value in wall.coeffs:
        k = -e1 // a if a else -e2 // b
        out[k] = read_scalar(value, twist.field)
    return out


def _diagram_lines(diagram: DiagramModel, twist: TwistData, order: int) -> list[Line]:
    lines = []
    for model in diagram.lines:
        wall = model.factor or diagram.walls
        assert wall is not None and model.ident is not None
        lines.append(
            Line(
                ident=model.ident,
                twist=twist,
                base=model.base,
                covector=model.covector,
                coefficients=_line_coefficients(model, wall, twist, order),
                kind=model.kind,
                order=model.order,
                parents=model.parents,
            )
        )
    return lines


def _line_model(line: Line, source: LineModel | None, default: WallModel | None) -> LineModel:
    if line.kind == "initial":
        factor = (source.factor if source else None) or default
    else:
        a, b = line.covector
        factor = WallModel(
            type="coeffs",
            coeffs=[
                (-k * a, -k * b, ScalarModel.from_scalar(c))
                for k, c in line.coefficients.items()
            ],
        )
    return LineModel(
        ident=line.ident,
        base=(str(line.base[0]), str(line.base[1])),
        covector=line.covector,
        kind=line.kind,  # type: ignore[arg-type]
        order=str(line.order),
        parents=line.parents,
        factor=factor,
    )


def _diagram_q(diagram: DiagramModel, config: RunConfig) -> Scalar:
    if config.q is not None:
        return config.q_scalar()
    q = read_scalar(diagram.q, config.scalar_field())
    if q.log_norm() != LogNorm(0):
        raise ValueError(f"q must satisfy |q| = 1, got log|q| = {q.log_norm()}")
    return q


@main.command()
@click.option(
    "--preset",
    type=click.Choice(sorted(BUILTIN_PRESETS)),
    help="Use a built-in wall diagram.",
)
@_in_option
@_json_option
@click.option("--order", type=int, help="Filtration order N (overrides the document).")
@click.option("--precision", type=int, help="Laurent precision P (overrides the document).")
@click.option("--q", "q_text", help="q specification, e.g. '1+t' (overrides the document).")
@_out_option
@_summary_option
@click.option("--list-presets", "show_presets", is_flag=True, help="List built-in diagrams and exit.")
def scatter(
    preset: str | None = None,
    input_path: Path | None = None,
    inline_json: str | None = None,
    order: int | None = None,
    precision: int | None = None,
    q_text: str | None = None,
    output: Path | None = None,
    summary: bool = False,
    show_presets: bool = False,
) -> None:
    """Complete a wall diagram by factorizing every collision up to order N."""
    if show_presets:
        display_preset_list(list_presets())
        return
    logger = command_logger("scatter")
    with _handle_errors("scatter"):
        sources = [preset is not None, input_path is not None, inline_json is not None]
        if sum(sources) != 1:
            raise ValueError("give exactly one of --preset, --in or --json")
        diagram = (
            load_preset(preset)
            if preset is not None
            else DiagramModel.model_validate(_load_document(input_path, inline_json))
        )
        options: dict[str, Any] = {
            "command": "scatter",
            "input_path": input_path,
            "preset": preset,
            "output": output,
            "field_kind": diagram.field,
            "prime": diagram.p,
            "precision": precision if precision is not None else diagram.precision,
            "order": order if order is not None else diagram.order,
        }
        if q_text is not None:
            options["q"] = q_text
        config = RunConfig(**options)
        q = _diagram_q(diagram, config)
        n = config.order
        assert n is not None
        logger.info("Scattering", preset=preset, order=n, lines=len(diagram.lines))

        twist = TwistData.two_variable(q)
        lines = _diagram_lines(diagram, twist, n)
        region = Region(*diagram.region) if diagram.region else None
        start = time.perf_counter()
        with timed(logger, "build_scattering_tree", order=n) as record:
            result = build_scattering_tree(lines, n, region)
            record["lines"] = len(result)
        elapsed = time.perf_counter() - start

        sources_by_ident = {m.ident: m for m in diagram.lines}
        response = DiagramResponse(
            q=ScalarModel.from_scalar(q),
            order=n,
            count=len(result),
            lines=[
                _line_model(ln, sources_by_ident.get(ln.ident), diagram.walls)
                for ln in result
            ],
        )
        document = _emit(response, config.output)
    if summary:
        display_diagram_summary(document, elapsed)


# -- norm --------------------------------------------------------------------------------


@main.command()
@_in_option
@_json_option
@click.option("--radius", help="Log-radii 'u,v,...' (overrides the document).")
@_out_option
@_summary_option
def norm(
    input_path: Path | None = None,
    inline_json: str | None = None,
    radius: str | None = None,
    output: Path | None = None,
    summary: bool = False,
) -> None:
    """Gauss norm max_I (log|a_I| + <I, log r>) of a quantum-torus series."""
    logger = command_logger("norm")
    with _handle_errors("norm"):
        if (input_path is None) == (inline_json is None):
            raise ValueError("give exactly one of --in or --json")
        data = _load_document(input_path, inline_json)
        if radius is not None:
            data = {**data, "radius": radius}
        request = SeriesRequest.model_validate(data)
        config = RunConfig(
            command="norm",
            input_path=input_path,
            output=output,
            field_kind=request.field,
            precision=request.precision,
            prime=request.p,
        )
        series = request.to_series()
        log_radii = request.radius or ["0"] * series.twist.n
        value = gauss_norm(series, PolyRadius(tuple(log_radii)))
        logger.info("Gauss norm evaluated", terms=len(series), log_norm=str(value))
        response = NormResponse(log_norm=value.to_json(), radius=log_radii, terms=len(series))
        document = _emit(response, config.output)
    if summary:
        display_norm_summary(document)


# -- spectrum --------------------------------------------------------------------------


def _parse_grid(text: str) -> tuple[Any, Any, int]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 3:
        raise ValueError(f"grid must be 'lo,hi,n', got {text!r}")
    return to_rational(parts[0]), to_rational(parts[1]), int(parts[2])


def _random_points(count: int, seed: int) -> list[tuple[Any, Any]]:
    """``count`` random rational points in ``[-4, 4]^2`` with denominators up to 6."""
    rng = np.random.default_rng(seed)
    points = []
    for _ in range(count):
        den = rng.integers(1, 7, size=2)
        num = [rng.integers(-4 * int(d), 4 * int(d) + 1) for d in den]
        points.append((mpq(int(num[0]), int(den[0])), mpq(int(num[1]), int(den[1]))))
    return points


@main.command()
@click.option("--q", "q_text", default="1+t", show_default=True, help="q specification.")
@click.option("--precision", default=32, show_default=True, type=int, help="Laurent precision P.")
@click.option(
    "--grid",
    default="-2,2,10",
    show_default=True,
    help="Gauss-seminorm grid 'lo,hi,n' in both log|beta| and log|gamma|.",
)
@click.option("--random", "random_count", type=int, default=0, help="Add K random points.")
@click.option("--seed", default=42, show_default=True, type=int, help="Seed for --random.")
@click.option("--shift", help="Log-radii of shift representations, e.g. '-2,-1,0,1,2'.")
@click.option(
    "--window", default=32, show_default=True, type=int, help="Shift window M (T^-M..T^M)."
)
@_out_option
@_summary_option
def spectrum(
    q_text: str = "1+t",
    precision: int = 32,
    grid: str = "-2,2,10",
    random_count: int = 0,
    seed: int = 42,
    shift: str | None = None,
    window: int = 32,
    output: Path | None = None,
    summary: bool = False,
) -> None:
    """Sample seminorms on A_q(S) and test f against the image of j."""
    logger = command_logger("spectrum")
    with _handle_errors("spectrum"):
        config = RunConfig(
            command="spectrum",
            q=q_text,
            precision=precision,
            seed=seed,
            output=output,
            field_kind=FieldKind.LAURENT,
        )
        q = config.q_scalar()
        lo, hi, n = _parse_grid(grid)
        axis = rational_grid(lo, hi, n)
        points = [(u, v) for u in axis for v in axis]
        if random_count:
            points.extend(_random_points(random_count, config.seed))
        radii = [to_rational(r) for r in shift.split(",") if r.strip()] if shift else []
        rows = sample_spectrum(q, points, radii, window)
        failures = sum(not r.in_image for r in rows)
        logger.info("Spectrum sampled", rows=len(rows), failures=failures)
        response = SpectrumResponse.model_validate(
            {
                "q": q.to_json(),
                "rows": [r.to_json() for r in rows],
                "failures": failures,
            }
        )
        document = _emit(response, config.output)
    if summary:
        display_spectrum_summary(document)


# -- gl2norm -------------------------------------------------------------------------


@main.command()
@_in_option
@_json_option
@click.option("--prime", type=int, help="Prime p (overrides the document).")
@click.option("--q", "q_text", help="q as a rational (overrides the document).")
@click.option("--window", type=int, help="Window size M (overrides the document).")
@click.option("--workers", default=1, show_default=True, type=int, help="Worker processes.")
@_out_option
@_summary_option
def gl2norm(
    input_path: Path | None = None,
    inline_json: str | None = None,
    prime: int | None = None,
    q_text: str | None = None,
    window: int | None = None,
    workers: int = 1,
    output: Path | None = None,
    summary: bool = False,
) -> None:
    """Sup over admissible leaves of the operator norm of a quantum GL2 element."""
    logger = command_logger("gl2norm")
    with _handle_errors("gl2norm"):
        if (input_path is None) == (inline_json is None):
            raise ValueError("give exactly one of --in or --json")
        data = dict(_load_document(input_path, inline_json))
        for key, value in (("p", prime), ("q", q_text), ("window", window)):
            if value is not None:
                data[key] = value
        request = GL2NormRequest.model_validate(data)
        config = RunConfig(
            command="gl2norm",
            input_path=input_path,
            output=output,
            field_kind=FieldKind.PADIC,
            prime=request.p,
            q=request.q,
        )
        field = build_field(FieldKind.PADIC, prime=request.p)
        assert isinstance(field, PadicField)
        algebra = QuantumGL2(field.coerce(request.q))
        element = algebra.element([((a, b, c, d), coef) for a, b, c, d, coef in request.element])
        samples = (
            [(s.c, s.t) for s in request.samples] if request.samples is not None else None
        )
        with timed(logger, "gl2_sup_norm", window=request.window, workers=workers) as record:
            result = gl2_sup_norm(element, samples, request.window, request.split, workers)
            record["leaves"] = len(result.per_sample)
        response = GL2NormResponse.model_validate(result.to_json())
        document = _emit(response, config.output)
    if summary:
        display_gl2_summary(document)


@main.command()
def version() -> None:
    """Print the qna version."""
    click.echo(f"qna {__version__}")


if __name__ == "__main__":  # pragma: no cover
    main()
