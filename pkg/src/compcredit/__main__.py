import sys

from compcredit.cli import main

sys.exit(main())
