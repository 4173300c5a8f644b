import sys

from ehaoi.harness.cli import main

sys.exit(main())
