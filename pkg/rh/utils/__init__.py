#! /usr/bin/env python3

import numpy as np

from .lazy import *
from .output import *

# wrap an angle (or an array of angles) into [-pi, pi)
def wrap_angle(angle):
    return (np.asarray(angle) + np.pi) % (2 * np.pi) - np.pi
