import sys

from revmap.cli import main

sys.exit(main())
