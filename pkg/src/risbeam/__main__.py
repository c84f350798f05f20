import sys

from risbeam.cli import main

sys.exit(main())
