import sys

from blocktutor.cli import main

sys.exit(main())
