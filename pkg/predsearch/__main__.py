import sys

from predsearch.cli import main

sys.exit(main())
