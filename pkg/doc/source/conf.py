# -*- coding: utf-8 -*-
#
# beltrack documentation build configuration file.

import sys, os

sys.path.insert(0, os.path.abspath('../..'))

extensions = ['sphinx.ext.autodoc', 'sphinx.ext.doctest']

templates_path = ['_templates']
source_suffix = '.rst'
master_doc = 'index'

project = u'beltrack'
copyright = u'2026, beltrack contributors'

version = '0.1.0'
release = '0.1.0'

exclude_patterns = []
pygments_style = 'sphinx'

html_theme = 'default'
html_static_path = ['_static']
htmlhelp_basename = 'beltrackdoc'

man_pages = [
    ('index', 'beltrack', u'beltrack Documentation',
     [u'beltrack contributors'], 1)
]
