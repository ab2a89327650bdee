#! /usr/bin/env python3

from rh.commands import Simulate

if __name__ == "__main__":
    import sys
    import rh.config
    cmd = rh.config.object_from_argparser(Simulate, description="Integrate a rod model of the hierarchy and record its invariant ledger")
    sys.exit(cmd.run())
