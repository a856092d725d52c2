import sys

from occupant_dbn.cli import main

sys.exit(main())
