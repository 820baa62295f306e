import sys

from jumpwass.main import cli_main

sys.exit(cli_main())
