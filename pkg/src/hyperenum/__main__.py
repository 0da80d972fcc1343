import sys

from hyperenum.cli import main

sys.exit(main())
