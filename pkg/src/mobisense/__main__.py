import sys

from mobisense.cli import main

sys.exit(main())
