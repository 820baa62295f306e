"""
Root entry point so the CLI runs from a checkout without installing
"""
import sys

from jumpwass.main import cli_main

if __name__ == "__main__":
    sys.exit(cli_main())
