import sys

from propenc.cli import main

sys.exit(main())
