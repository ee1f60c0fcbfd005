import sys

from curatekit.cli import main

sys.exit(main())
