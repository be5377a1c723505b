import sys

from pnorm_voting.cli import main

sys.exit(main())
