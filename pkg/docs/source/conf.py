# -*- coding: utf-8 -*-
#
# shellflow documentation build configuration file
#
# This file is execfile()d with the current directory set to its containing dir.

import sys, os

sys.path.insert(0, os.path.abspath(os.path.join('..', '..')))

# -- General configuration -----------------------------------------------------

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest', 'sphinx.ext.mathjax']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'shellflow'
copyright = u'2026, shellflow developers'

# The short X.Y version.
from shellflow import __version__ as version
# The full version, including alpha/beta/rc tags.
release = version

exclude_patterns = []
pygments_style = 'sphinx'

autodoc_member_order = 'bysource'

# -- Options for HTML output ---------------------------------------------------

html_theme = 'default'
html_static_path = []
htmlhelp_basename = 'shellflowdoc'

# -- Options for LaTeX output --------------------------------------------------

latex_documents = [
  ('index', 'shellflow.tex', u'shellflow Documentation',
   u'shellflow developers', 'manual'),
]

# -- Options for manual page output --------------------------------------------

man_pages = [
    ('index', 'shellflow', u'shellflow Documentation',
     [u'shellflow developers'], 1)
]
