"""Command-line front end: ``atomicity <command> SPEC [options]``.

Exit status is 0 when every check passed, 1 on a failed check, 2 on a spec
parse error and 3 when a size cap was exceeded.
"""

import logging
import sys
from pathlib import Path
from typing import Any, Callable, Dict, Optional

import click

from kernel_atomicity import __version__
from kernel_atomicity.config import AtomicityConfig, load_config
from kernel_atomicity.report import FORMATS, TEXT_FORMAT, TOOL_NAME, combined_exit_code, emit, emit_bundle
from kernel_atomicity.utils.errors import ConfigurationError
from kernel_atomicity.verify import COMMAND_KINDS, verify_many, verify_path

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class ColoredFormatter(logging.Formatter):
    """Formatter with level colours when writing to a terminal."""

    COLORS = {
        "DEBUG": "\033[94m",  # Blue
        "INFO": "\033[92m",  # Green
        "WARNING": "\033[93m",  # Yellow
        "ERROR": "\033[91m",  # Red
        "CRITICAL": "\033[91m\033[1m",  # Bold Red
        "RESET": "\033[0m",
    }

    def __init__(self, fmt: str, use_color: bool = True):
        super().__init__(fmt)
        self.use_color = use_color

    def format(self, record: logging.LogRecord) -> str:
        log_message = super().format(record)
        if self.use_color and record.levelname in self.COLORS:
            return f"{self.COLORS[record.levelname]}{log_message}{self.COLORS['RESET']}"
        return log_message


def setup_logging(level: str) -> None:
    """Point the package logger at the current stderr; logs never reach stdout."""
    logger = logging.getLogger("kernel_atomicity")
    for handler in list(logger.handlers):
        if getattr(handler, "_atomicity_cli", False):
            logger.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(
        ColoredFormatter(
            "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
            use_color=hasattr(sys.stderr, "isatty") and sys.stderr.isatty(),
        )
    )
    handler._atomicity_cli = True  # type: ignore[attr-defined]
    logger.addHandler(handler)
    logger.setLevel(level)


def _common_options(command: Callable) -> Callable:
    options = [
        click.option("--max-order", type=click.IntRange(min=1), default=None, help="Cap on enumerated group order."),
        click.option(
            "--max-validate", type=click.IntRange(min=1), default=None, help="Cap on |G| for exhaustive pair checks."
        ),
        click.option(
            "--format", "fmt", type=click.Choice(FORMATS), default=TEXT_FORMAT, show_default=True, help="Report format."
        ),
        click.option("--seed", type=int, default=None, help="Seed for sampled associativity and family samples."),
        click.option(
            "--allow-sampled", is_flag=True, default=False, help="Run theorem checks on groups with sampled axioms."
        ),
        click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None),
        click.option(
            "--output",
            type=click.Path(dir_okay=False, writable=True, path_type=Path),
            default=None,
            help="Write the report to this file instead of stdout.",
        ),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _configure(ctx: click.Context, options: Dict[str, Any]) -> AtomicityConfig:
    try:
        config = load_config()
    except ConfigurationError as e:
        click.echo(f"error: {e.message}", err=True)
        ctx.exit(2)
    config = config.with_overrides(
        max_order=options.get("max_order"),
        max_validate=options.get("max_validate"),
        seed=options.get("seed"),
        allow_sampled=True if options.get("allow_sampled") else None,
        log_level=options["log_level"].upper() if options.get("log_level") else None,
    )
    setup_logging(config.log_level)
    return config


def _write(document: str, output: Optional[Path]) -> None:
    if output is None:
        click.echo(document, nl=False)
    else:
        output.write_text(document, encoding="utf-8")


def _run_single(
    ctx: click.Context, command: str, spec_path: str, fmt: str, output: Optional[Path], options: Dict[str, Any]
) -> None:
    config = _configure(ctx, options)
    report = verify_path(spec_path, config, COMMAND_KINDS[command])
    _write(emit(report, fmt), output)
    ctx.exit(report.exit_code)


@click.group()
@click.version_option(__version__, prog_name=TOOL_NAME)
def cli() -> None:
    """Verify that homomorphisms, actions and linear maps split their domains into equal atoms."""


@cli.command("verify-group")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@_common_options
@click.pass_context
def verify_group(ctx: click.Context, spec_path: str, fmt: str, output: Optional[Path], **options: Any) -> None:
    """Check the group axioms of a cayley, perm or catalog spec."""
    _run_single(ctx, "verify-group", spec_path, fmt, output, options)


@cli.command("verify-hom")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@_common_options
@click.pass_context
def verify_hom(ctx: click.Context, spec_path: str, fmt: str, output: Optional[Path], **options: Any) -> None:
    """Check kernel, fibers, atomicity, first isomorphism and injectivity of a hom or hom-gen spec."""
    _run_single(ctx, "verify-hom", spec_path, fmt, output, options)


@cli.command("verify-action")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@_common_options
@click.pass_context
def verify_action(ctx: click.Context, spec_path: str, fmt: str, output: Optional[Path], **options: Any) -> None:
    """Check orbit-stabilizer and fiber cosets of an action or natural-action spec."""
    _run_single(ctx, "verify-action", spec_path, fmt, output, options)


@cli.command("solve")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@_common_options
@click.pass_context
def solve(ctx: click.Context, spec_path: str, fmt: str, output: Optional[Path], **options: Any) -> None:
    """Solve a linear-system spec exactly and verify its translation family."""
    _run_single(ctx, "solve", spec_path, fmt, output, options)


@cli.command("verify-quotient")
@click.argument("spec_path", type=click.Path(dir_okay=False))
@_common_options
@click.pass_context
def verify_quotient(ctx: click.Context, spec_path: str, fmt: str, output: Optional[Path], **options: Any) -> None:
    """Build G/K for a quotient spec and check the fibers of the projection."""
    _run_single(ctx, "verify-quotient", spec_path, fmt, output, options)


@cli.command("report")
@click.argument("spec_paths", nargs=-1, required=True, type=click.Path(dir_okay=False))
@_common_options
@click.pass_context
def report(ctx: click.Context, spec_paths: tuple, fmt: str, output: Optional[Path], **options: Any) -> None:
    """Verify several spec files of any kind into one document, in input order."""
    config = _configure(ctx, options)
    reports = verify_many(spec_paths, config)
    _write(emit_bundle(reports, fmt), output)
    ctx.exit(combined_exit_code(reports))


def main() -> None:
    """Console entry point."""
    cli(prog_name="atomicity")
