import sys

from eulerboundary.cli import main

sys.exit(main())
