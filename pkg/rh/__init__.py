#! /usr/bin/env python3

__author__ = "The rod-hierarchy developers"
__version__ = "0.1"
