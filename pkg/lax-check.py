#! /usr/bin/env python3

from rh.commands import LaxCheck

if __name__ == "__main__":
    import sys
    import rh.config
    cmd = rh.config.object_from_argparser(LaxCheck, description="Check the Lax formulation of the rod hierarchy against the equations of motion")
    sys.exit(cmd.run())
