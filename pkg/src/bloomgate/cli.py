"""Batch analysis CLI: analyze files, summarize report corpora, check lexicons.

Exit codes: 0 success, 1 I/O problems, 2 provider failure without a --mock
fallback, 3 invalid configuration or lexicon.
"""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import click

from . import __version__
from .analytics import histogram
from .bloom import VerbLexicon
from .config import load_config
from .errors import BloomgateError, ConfigError, LexiconFormatError, ProviderUnavailable
from .ingest import SourceFormat
from .pipeline import analyze_bytes, build_context
from .providers import ScriptedChatProvider

EXIT_IO = 1
EXIT_PROVIDER = 2
EXIT_CONFIG = 3

_FORMAT_EXT = {"json": "report.json", "md": "report.md", "csv": "report.csv"}


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(content, encoding="utf-8", newline="\n")
    os.replace(tmp, path)


def _render(report, fmt: str) -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "md":
        return report.to_markdown()
    return report.to_csv()


@click.group()
@click.version_option(version=__version__, prog_name="bloomgate")
def main():
    """Predict the AI-solvability of assessment questions and suggest redesigns."""


@main.command()
@click.argument("files", nargs=-1, required=True, type=click.Path(path_type=Path))
@click.option("--format", "fmt", type=click.Choice(["json", "md", "csv"]), default="json",
              help="Report output format.")
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path),
              default=Path("."), help="Directory for report files.")
@click.option("--mock", is_flag=True,
              help="Use offline providers (scripted judge from a sidecar "
                   "<input>.mock.json when present).")
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None,
              help="Path to a key=value config file.")
@click.option("--fixed-time", default=None, metavar="ISO8601", hidden=True,
              help="Pin report timestamps for reproducible output.")
def analyze(files, fmt, out_dir, mock, config_path, fixed_time):
    """Analyze assessment files and write one report per input."""
    try:
        cfg = load_config(config_path)
    except ConfigError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    for path in files:
        if not path.is_file() or not os.access(path, os.R_OK):
            click.echo(f"error: cannot read input file: {path}", err=True)
            sys.exit(EXIT_IO)

    fixed = None
    if fixed_time:
        try:
            fixed = datetime.fromisoformat(fixed_time)
            if fixed.tzinfo is None:
                fixed = fixed.replace(tzinfo=timezone.utc)
        except ValueError:
            click.echo(f"error: --fixed-time is not an ISO timestamp: {fixed_time}", err=True)
            sys.exit(EXIT_CONFIG)

    if not mock and not cfg.chat_base_url:
        click.echo(
            "error: no chat provider configured; set providers.chat.base_url or pass --mock",
            err=True,
        )
        sys.exit(EXIT_CONFIG)

    try:
        ctx = build_context(cfg, mock=mock, fixed_time=fixed)
    except (ConfigError, BloomgateError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)

    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        click.echo(f"error: cannot create output directory: {exc}", err=True)
        sys.exit(EXIT_IO)

    def run_one(path: Path):
        source_format = SourceFormat.from_suffix(path.suffix)
        data = path.read_bytes()
        chat_override = None
        if mock:
            sidecar = path.with_suffix(".mock.json")
            if sidecar.is_file():
                chat_override = ScriptedChatProvider.from_file(sidecar)
        outcome = analyze_bytes(
            ctx, data, source_format, title=path.stem, chat_override=chat_override
        )
        out_path = out_dir / f"{path.stem}.{_FORMAT_EXT[fmt]}"
        _atomic_write(out_path, _render(outcome.report, fmt))
        return path, outcome, out_path

    max_workers = min(len(files), os.cpu_count() or 1, cfg.provider_parallelism)
    results = []
    provider_down = False
    try:
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                results = list(pool.map(run_one, files))
        else:
            results = [run_one(p) for p in files]
    except ProviderUnavailable as exc:
        click.echo(f"error: provider unavailable: {exc}", err=True)
        sys.exit(EXIT_PROVIDER)
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)
    except BloomgateError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_IO)

    for path, outcome, out_path in results:
        report = outcome.report
        click.echo(
            f"{path}\tscore={report.assignment_score:.1f}\tband={report.assignment_band.label}"
            f"\t{out_path}"
        )
        if not mock and all("judge-unavailable" in q.flags for q in report.questions):
            provider_down = True
            click.echo(f"warning: judge unavailable for every question in {path}", err=True)

    click.echo(f"analyzed {len(results)} file(s)")
    if provider_down:
        sys.exit(EXIT_PROVIDER)


@main.command(name="histogram")
@click.argument("reports_dir", type=click.Path(exists=True, file_okay=False, path_type=Path))
@click.option("--csv", "as_csv", is_flag=True, help="Emit band,count CSV rows.")
def histogram_cmd(reports_dir: Path, as_csv: bool):
    """Band histogram over the assignment scores in a directory of reports."""
    scores = []
    for path in sorted(reports_dir.glob("*.json")):
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            score = data["assignment"]["score"]
            scores.append(float(score))
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            click.echo(f"warning: skipping {path.name}: {exc}", err=True)
    hist = histogram(scores)
    if as_csv:
        click.echo(hist.to_csv(), nl=False)
    else:
        click.echo(" / ".join(f"{label},{count}" for label, count in hist.to_rows()))


@main.group()
def lexicon():
    """Verb lexicon utilities."""


@lexicon.command(name="check")
@click.argument("file", type=click.Path(path_type=Path))
def lexicon_check(file: Path):
    """Validate a lexicon file; exit 3 on format violations."""
    if not file.is_file():
        click.echo(f"error: no such file: {file}", err=True)
        sys.exit(EXIT_IO)
    try:
        lex = VerbLexicon.from_file(file)
    except LexiconFormatError as exc:
        where = f" (line {exc.line_no})" if exc.line_no else ""
        click.echo(f"error: invalid lexicon{where}: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"ok: {len(lex.entries)} entries, version {lex.version}")


@main.command()
@click.option("--config", "config_path", type=click.Path(path_type=Path), default=None)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=None, type=int, help="Override server.port from config.")
@click.option("--mock", is_flag=True, help="Serve with offline mock providers.")
def serve(config_path, host, port, mock):
    """Run the HTTP analysis service."""
    import uvicorn

    from .pipeline import build_context as _build
    from .service import create_app

    try:
        cfg = load_config(config_path)
        ctx = _build(cfg, mock=mock)
        app = create_app(cfg, ctx=ctx)
    except (ConfigError, BloomgateError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    uvicorn.run(app, host=host, port=port or cfg.server_port, log_level="warning")


if __name__ == "__main__":
    main()
