from pathlib import Path
from typing import Optional
import logging

import click
from rich.console import Console
from rich.table import Table

from jumpwass.models.analysis import AnalysisResult
from jumpwass.schemas.report import ConvergenceStatus
from jumpwass.services.analysis_service import AnalysisService
from jumpwass.storage.config_store import load_config
from jumpwass.storage.trace_store import emit_csv
from jumpwass.utils.rng import MAX_SEED

logger = logging.getLogger(__name__)

_STATUS_STYLE = {
    ConvergenceStatus.CONVERGED: "green",
    ConvergenceStatus.DIVERGING: "red",
    ConvergenceStatus.INCONCLUSIVE: "yellow",
}


def render_summary(result: AnalysisResult, console: Optional[Console] = None) -> None:
    console = console or Console()
    verdict = result.verdict
    table = Table(title="Wasserstein robustness analysis", show_header=True)
    table.add_column("item")
    table.add_column("value", justify="right")
    table.add_row("verdict", f"[{_STATUS_STYLE[verdict.status]}]{verdict.status.value}[/]")
    table.add_row("epsilon / window", f"{verdict.epsilon:g} / {verdict.window}")
    table.add_row(
        "first k below epsilon",
        str(verdict.first_k_below_epsilon) if verdict.first_k_below_epsilon is not None else "-",
    )
    table.add_row("W_hat(0)", f"{result.table.entries[0].w_hat:.6g}")
    table.add_row(f"W_hat({result.table.horizon})", f"{verdict.final_w:.6g}")
    for name, trace in sorted(result.traces.items()):
        if name != "split_merge":
            table.add_row(f"{name} W({trace.horizon})", f"{trace.entries[-1].w_hat:.6g}")
    if result.mc_report is not None:
        report = result.mc_report
        status = "[green]pass[/]" if report.passed else "[red]FAIL[/]"
        table.add_row(f"monte carlo vs {result.mc_reference}", f"{status} ({len(report.failures)} failing steps)")
    console.print(table)


@click.command("analyze")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Analysis config (JSON)")
@click.option("--out", required=True, type=click.Path(dir_okay=False, writable=True, path_type=Path),
              help="Trace CSV to write")
@click.option("--summary", "summary_path", type=click.Path(dir_okay=False, writable=True, path_type=Path),
              help="Optional plain-text summary file")
@click.option("--seed", type=click.IntRange(0, MAX_SEED), help="Override the Monte Carlo seed")
@click.option("--workers", type=click.IntRange(min=1), help="Monte Carlo worker threads")
def analyze(config_path: Path, out: Path, summary_path: Optional[Path], seed: Optional[int], workers: Optional[int]):
    """Run the configured engines and write the per-step trace table"""
    for param, path in (("out", out), ("summary", summary_path)):
        if path is not None and not path.parent.is_dir():
            raise click.BadParameter(f"directory {path.parent} does not exist", param_hint=f"--{param}")

    cfg = load_config(config_path)
    if seed is not None:
        if cfg.mc is None:
            logger.warning("--seed given but the config has no mc section; ignoring it")
        cfg = cfg.with_seed(seed)

    result = AnalysisService.run_analysis(cfg, workers=workers)
    emit_csv(result.table, out)

    if summary_path is not None:
        summary_path.write_text("\n".join(AnalysisService.summary_lines(result)) + "\n", encoding="utf-8")
        logger.info(f"Wrote summary to {summary_path}")

    render_summary(result)
