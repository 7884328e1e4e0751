import sys

from gradinterleave.cli import main

sys.exit(main())
