"""
Command-line entry point: `jumpwass analyze | validate | compare`.

Exit codes: 0 success, 1 usage or config error, 2 runtime error.
"""
from typing import List, Optional
import logging
import sys

import click

from jumpwass.api.commands.analyze import analyze
from jumpwass.api.commands.compare import compare
from jumpwass.api.commands.validate import validate
from jumpwass.core.config import LOG_FORMAT, LOG_LEVEL
from jumpwass.core.errors import ConfigError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_RUNTIME = 2

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


@click.group()
@click.option("--log-level", default=LOG_LEVEL if LOG_LEVEL in LOG_LEVELS else "INFO",
              type=click.Choice(LOG_LEVELS, case_sensitive=False), help="Logging verbosity (stderr)")
def cli(log_level: str):
    """Wasserstein robustness analysis of stochastic jump linear systems"""
    # Setup logging
    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT, stream=sys.stderr, force=True)


cli.add_command(analyze)
cli.add_command(validate)
cli.add_command(compare)


def cli_main(argv: Optional[List[str]] = None) -> int:
    try:
        cli.main(args=argv, prog_name="jumpwass", standalone_mode=False)
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return EXIT_RUNTIME
    except click.ClickException as e:
        e.show()
        return EXIT_INVALID
    except ConfigError as e:
        logger.error(f"Invalid config: {str(e)}")
        click.echo(f"Error: {e}", err=True)
        return EXIT_INVALID
    except Exception as e:
        logger.error(f"Analysis failed: {str(e)}")
        click.echo(f"Error: {e}", err=True)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(cli_main())
