from pathlib import Path
from typing import Optional

import click

from jumpwass.models.system import LawMode
from jumpwass.services.analysis_service import AnalysisService
from jumpwass.storage.config_store import load_config


@click.command("compare")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Analysis config (JSON)")
@click.option("--oracle-horizon", required=True, type=click.IntRange(min=1),
              help="Last step enumerated by the oracle")
@click.option("--law-mode", type=click.Choice([m.value for m in LawMode]), default=None,
              help="Path law for the oracle (defaults to the config's oracle_law_mode)")
def compare(config_path: Path, oracle_horizon: int, law_mode: Optional[str]):
    """Print the max deviation between the analytic trace and the enumeration oracle"""
    cfg = load_config(config_path)
    comparison = AnalysisService.compare_with_oracle(
        cfg, oracle_horizon=oracle_horizon, law_mode=LawMode(law_mode) if law_mode else None
    )
    click.echo(
        f"max |W_hat - W_oracle| over k=0..{comparison.oracle_horizon} "
        f"({comparison.law_mode}): {comparison.max_abs_deviation:.3e} "
        f"(relative {comparison.max_rel_deviation:.3e})"
    )
