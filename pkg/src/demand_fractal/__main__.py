import sys

from demand_fractal.cli import main

sys.exit(main())
