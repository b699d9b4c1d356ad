import sys

from composite_pulses.cli import main

sys.exit(main())
