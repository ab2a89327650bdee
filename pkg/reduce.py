#! /usr/bin/env python3

from rh.commands import Reduce

if __name__ == "__main__":
    import sys
    import rh.config
    cmd = rh.config.object_from_argparser(Reduce, description="Convert a magnetic rod state to canonical variables and integrate the reduced equations")
    sys.exit(cmd.run())
