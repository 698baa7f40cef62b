import sys

from osdlat.cli import main

sys.exit(main())
