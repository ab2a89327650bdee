#! /usr/bin/env python3

from rh.commands import Poincare

if __name__ == "__main__":
    import sys
    import rh.config
    cmd = rh.config.object_from_argparser(Poincare, description="Compute Poincare sections of the reduced magnetic rod on a level set of its invariants")
    sys.exit(cmd.run())
