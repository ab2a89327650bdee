#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# rod-hierarchy documentation build configuration file.
#
# This file is execfile()d with the current directory set to its
# containing dir.

import sys
import os

# the package lives in the parent directory
sys.path.insert(0, os.path.abspath('..'))

# Import the module we are documenting (to e.g. get its version).
import rh

# -- General configuration ------------------------------------------------

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.coverage',
    'sphinx.ext.intersphinx',
    'sphinx.ext.mathjax',
]

autoclass_content = "both"
autodoc_member_order = "bysource"
autodoc_default_flags = [
    "members",
    "undoc-members",
]

# exclude some special members
def autodoc_skip_member(app, what, name, obj, skip, options):
    exclusions = {'__weakref__', '__doc__', '__module__', '__dict__', '__init__'}
    exclude = name in exclusions
    return skip or exclude

def setup(app):
    app.connect('autodoc-skip-member', autodoc_skip_member)

# When the second item is None, the inventory is loaded from <url>/objects.inv
intersphinx_mapping = {
    'python': ('https://docs.python.org/3', None),
    'numpy': ('https://numpy.org/doc/stable/', None),
    'scipy': ('https://docs.scipy.org/doc/scipy/', None),
}

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

# General information about the project.
project = 'rod-hierarchy'
copyright = '2026, The rod-hierarchy developers'

version = rh.__version__
release = rh.__version__

exclude_patterns = ['_build']
pygments_style = 'sphinx'

# -- Options for HTML output ----------------------------------------------

html_theme = 'alabaster'
html_theme_options = {
    # wide layout
    "page_width": "95%",
    # use standard font families
    "font_family": "serif",
    "code_font_family": "monospace",
}
htmlhelp_basename = 'rhdoc'

# -- Options for LaTeX output ---------------------------------------------

latex_elements = {
}
latex_documents = [
  ('index', 'rod-hierarchy.tex', 'rod-hierarchy Documentation',
   'lahwaacz', 'manual'),
]

# -- Options for manual page output ---------------------------------------

man_pages = [
    ('index', 'rod-hierarchy', 'rod-hierarchy Documentation',
     ['lahwaacz'], 1)
]
