import sys

from fuzzyalc.cli import main

sys.exit(main())
