#! /usr/bin/env python3

from rh.commands import Verify

if __name__ == "__main__":
    import sys
    import rh.config
    cmd = rh.config.object_from_argparser(Verify, description="Run the structural verification suites of the rod hierarchy")
    sys.exit(cmd.run())
