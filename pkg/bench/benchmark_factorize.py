#!/usr/bin/env python3
"""
Benchmark script for wall-crossing factorization and GL2 sup-norms.

Measures how the exact factorization scales with the filtration order and
the merge schedule, and how the GL2 sup-norm scales with the window size
and the number of worker processes.
"""

import sys
import time
from dataclasses import dataclass
from pathlib import Path

import click
import pandas as pd
from rich.console import Console
from rich.progress import Progress, SpinnerColumn, TimeElapsedColumn
from rich.table import Table

# Add parent directory to path to import qna
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from qna.nascalar import LaurentField, PadicField
from qna.qgl2 import QuantumGL2, gl2_sup_norm
from qna.scattering import (
    SCHEDULES,
    ScatteringFrame,
    dilog_wall,
    factorize,
    five_term_check,
)


@dataclass
class BenchmarkResult:
    """Container for benchmark results."""

    task: str
    size: int
    variant: str
    time_elapsed: float
    outputs: int
    passed: bool


class FactorizationBenchmark:
    """Benchmark suite for the exact algorithms."""

    def __init__(self, console: Console, precision: int = 32):
        self.console = console
        self.field = LaurentField(precision)
        self.results: list[BenchmarkResult] = []

    def run_factorize(self, order: int, schedule: str, power: int = 1) -> BenchmarkResult:
        """Factorize the product of two dilogarithm walls."""
        frame = ScatteringFrame.standard(self.field.default_q(), order)
        g_0 = dilog_wall(frame, (1, 1), (1, 0), power=power)
        g_inf = dilog_wall(frame, (1, 1), (0, 1), power=power)

        start_time = time.time()
        factors = factorize(g_inf, g_0, schedule=schedule)
        time_elapsed = time.time() - start_time

        return BenchmarkResult(
            task="factorize",
            size=order,
            variant=f"{schedule}/power={power}",
            time_elapsed=time_elapsed,
            outputs=len(factors),
            passed=True,
        )

    def run_five_term(self, order: int) -> BenchmarkResult:
        start_time = time.time()
        report = five_term_check(self.field.default_q(), order)
        time_elapsed = time.time() - start_time
        return BenchmarkResult(
            task="five-term",
            size=order,
            variant="1+t",
            time_elapsed=time_elapsed,
            outputs=len(report.slopes),
            passed=report.passed,
        )

    def run_gl2(self, window: int, workers: int, p: int = 5, q: int = 6) -> BenchmarkResult:
        """Sup-norm of t11 over the default leaf family."""
        algebra = QuantumGL2(PadicField(p).coerce(q))
        element = algebra.generator("t11")

        start_time = time.time()
        result = gl2_sup_norm(element, window=window, workers=workers)
        time_elapsed = time.time() - start_time

        return BenchmarkResult(
            task="gl2norm",
            size=window,
            variant=f"workers={workers}",
            time_elapsed=time_elapsed,
            outputs=len(result.per_sample),
            passed=result.log_norm == -1,
        )

    def run_all(
        self,
        orders: list[int],
        schedules: list[str],
        windows: list[int],
        workers: list[int],
    ) -> None:
        jobs = (
            [("factorize", o, s) for o in orders for s in schedules]
            + [("five-term", o, None) for o in orders]
            + [("gl2norm", w, n) for w in windows for n in workers]
        )

        with Progress(
            SpinnerColumn(),
            *Progress.get_default_columns(),
            TimeElapsedColumn(),
            console=self.console,
        ) as progress:
            task = progress.add_task("Running benchmarks...", total=len(jobs))

            for kind, size, variant in jobs:
                try:
                    if kind == "factorize":
                        result = self.run_factorize(size, variant)
                    elif kind == "five-term":
                        result = self.run_five_term(size)
                    else:
                        result = self.run_gl2(size, variant)
                    self.results.append(result)
                    self.console.print(
                        f"[green]✓[/green] {result.task} | size={result.size} | "
                        f"{result.variant} | {result.time_elapsed:.2f}s"
                    )
                except Exception as e:
                    self.console.print(f"[red]✗ {kind} size={size}: {e}[/red]")

                progress.advance(task)

    def display_results(self) -> None:
        """Display benchmark results in a table."""
        if not self.results:
            self.console.print("[yellow]No results to display[/yellow]")
            return

        table = Table(title="Exact Algorithm Benchmarks")
        table.add_column("Task")
        table.add_column("Size", justify="right")
        table.add_column("Variant")
        table.add_column("Time (s)", justify="right")
        table.add_column("Outputs", justify="right")
        table.add_column("Check", justify="center")

        for result in sorted(self.results, key=lambda r: (r.task, r.size, r.variant)):
            table.add_row(
                result.task,
                str(result.size),
                result.variant,
                f"{result.time_elapsed:.3f}",
                str(result.outputs),
                "[green]✓[/green]" if result.passed else "[red]✗[/red]",
            )

        self.console.print(table)

    def save_results(self, output_file: str) -> None:
        """Save benchmark results to a CSV file."""
        if not self.results:
            return

        df = pd.DataFrame(
            [
                {
                    "task": r.task,
                    "size": r.size,
                    "variant": r.variant,
                    "time_seconds": r.time_elapsed,
                    "outputs": r.outputs,
                    "passed": r.passed,
                }
                for r in self.results
            ]
        )

        df.to_csv(output_file, index=False)
        self.console.print(f"\n[green]Results saved to {output_file}[/green]")


@click.command()
@click.option(
    "--orders",
    "-n",
    multiple=True,
    type=int,
    default=[4, 6, 8, 10],
    help="Filtration orders to test (can specify multiple)",
)
@click.option(
    "--schedules",
    "-s",
    multiple=True,
    type=click.Choice(list(SCHEDULES)),
    default=list(SCHEDULES),
    help="Merge schedules to compare",
)
@click.option(
    "--windows",
    "-w",
    multiple=True,
    type=int,
    default=[32, 64],
    help="GL2 window sizes to test",
)
@click.option(
    "--workers",
    "-j",
    multiple=True,
    type=int,
    default=[1, 4],
    help="Worker process counts for the GL2 sup-norm",
)
@click.option("--precision", type=int, default=32, help="Laurent precision P")
@click.option(
    "--output",
    "-o",
    type=click.Path(),
    default="factorize_results.csv",
    help="Output CSV file for results",
)
@click.option("--quick", is_flag=True, help="Run a quick benchmark with small orders")
def main(orders, schedules, windows, workers, precision, output, quick):
    """Benchmark qna factorization and GL2 norm performance."""
    console = Console()

    console.print("[bold blue]qna Exact Algorithm Benchmark[/bold blue]\n")

    if quick:
        orders = [4, 6]
        schedules = ["batch"]
        windows = [16]
        workers = [1]

    bench = FactorizationBenchmark(console, precision)
    bench.run_all(list(orders), list(schedules), list(windows), list(workers))
    bench.display_results()
    bench.save_results(output)


if __name__ == "__main__":
    main()
