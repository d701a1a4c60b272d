"""Rich terminal summaries for CLI results.

Everything prints to stderr; stdout is reserved for JSON documents.
"""

from typing import Any

from rich.console import Console
from rich.panel import Panel
from rich.table import Table


def _console() -> Console:
    return Console(stderr=True)


def display_error(message: str, details: str = "") -> None:
    """Display error message with rich formatting.

    Args:
        message: Main error message
        details: Additional details
    """
    error_text = f"[bold red]✗[/bold red] {message}"
    if details:
        error_text += f"\n[dim]{details}[/dim]"

    _console().print(
        Panel(error_text, border_style="red", title="[bold red]Error[/bold red]")
    )


def display_preset_list(presets: dict[str, dict[str, Any]]) -> None:
    """Display the built-in wall diagrams.

    Args:
        presets: Dictionary of preset_id -> preset metadata
    """
    console = _console()
    for preset_id, info in presets.items():
        content = f"[dim]{info['description']}[/dim]"
        if info.get("expected_lines") is not None:
            content += f"\nExpected lines: [cyan]{info['expected_lines']}[/cyan]"
        console.print(
            Panel(
                content,
                title=f"[bold]{preset_id}[/bold] - {info['name']}",
                border_style="green",
                width=80,
            )
        )


def display_diagram_summary(document: dict[str, Any], elapsed: float) -> None:
    """Display the lines of a completed wall diagram.

    Args:
        document: Diagram response as emitted on stdout
        elapsed: Wall-clock seconds spent scattering
    """
    table = Table(title=f"Wall diagram (order {document['order']})")
    table.add_column("Line", style="cyan")
    table.add_column("Kind")
    table.add_column("Base")
    table.add_column("Covector", style="green")
    table.add_column("Order", justify="right")
    table.add_column("Terms", justify="right")
    for line in document["lines"]:
        factor = line.get("factor") or {}
        terms = len(factor.get("coeffs", [])) if factor.get("type") == "coeffs" else "-"
        table.add_row(
            line["ident"],
            line["kind"],
            f"({line['base'][0]}, {line['base'][1]})",
            f"({line['covector'][0]}, {line['covector'][1]})",
            line["order"],
            str(terms),
        )
    console = _console()
    console.print(table)
    console.print(f"[dim]{document['count']} lines in {elapsed:.2f}s[/dim]")


def display_norm_summary(document: dict[str, Any]) -> None:
    radius = ", ".join(document["radius"])
    _console().print(
        Panel(
            f"log-norm [bold cyan]{document['log_norm']}[/bold cyan] "
            f"at log r = ({radius}) over {document['terms']} terms",
            border_style="green",
            title="[bold green]Gauss norm[/bold green]",
        )
    )


def display_spectrum_summary(document: dict[str, Any]) -> None:
    """Display spectrum rows grouped by case.

    Args:
        document: Spectrum response as emitted on stdout
    """
    counts: dict[str, int] = {}
    for row in document["rows"]:
        key = row["case"] or "none"
        counts[key] = counts.get(key, 0) + 1
    table = Table(title="Seminorm samples by case")
    table.add_column("Case", style="cyan")
    table.add_column("Rows", justify="right")
    for case in ("S-", "S0", "S+", "none"):
        if case in counts:
            table.add_row(case, str(counts[case]))
    console = _console()
    console.print(table)
    style = "green" if document["failures"] == 0 else "red"
    console.print(
        f"[{style}]{document['failures']} of {len(document['rows'])} rows "
        f"outside the image of j[/{style}]"
    )


def display_gl2_summary(document: dict[str, Any]) -> None:
    """Display per-leaf operator norms.

    Args:
        document: GL2 norm response as emitted on stdout
    """
    table = Table(title=f"sup log-norm {document['log_norm']}")
    table.add_column("c", style="cyan")
    table.add_column("t")
    table.add_column("log-norm", justify="right", style="green")
    table.add_column("Stable")
    for sample in document["per_sample"]:
        table.add_row(
            sample["c"],
            sample["t"],
            sample["log_norm"],
            "✓" if sample["stable"] else "[yellow]✗[/yellow]",
        )
    _console().print(table)
