import sys

from pafm.main import main

sys.exit(main())
