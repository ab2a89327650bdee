#! /usr/bin/env python3

from setuptools import setup, find_packages

import rh

setup(
    name = "rod-hierarchy",
    version = rh.__version__,
    author = rh.__author__,
    packages = find_packages(exclude=["tests", "tests.*"]),
    install_requires = [
        "numpy",
        "scipy",
        "ConfigArgParse",
        "configfile",
    ],
)
