from pathlib import Path

import click

from jumpwass.storage.config_store import load_config


@click.command("validate")
@click.option("--config", "config_path", required=True, type=click.Path(dir_okay=False, path_type=Path),
              help="Analysis config (JSON)")
def validate(config_path: Path):
    """Parse the config and check every invariant without running engines"""
    cfg = load_config(config_path)
    engines = ", ".join(e.value for e in cfg.effective_engines)
    click.echo(
        f"{config_path}: ok (m={cfg.system.num_modes}, n={cfg.system.dim}, "
        f"{cfg.switching.kind} law, horizon {cfg.horizon}, engines: {engines})"
    )
