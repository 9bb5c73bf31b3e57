#!/usr/bin/env python3
# -*- coding: utf-8 -*-
#
# stegogan documentation build configuration file
#
import os
import sys
sys.path.insert(0, os.path.abspath('..'))

try:
    with open('../stegogan/__version__.py') as f:
        release = f.readlines()[-1].strip().split("'")[1].strip().lstrip('v')
except (OSError, IndexError):
    release = '0.0.0'
version = '.'.join(release.split('.')[:2])

extensions = ['sphinx.ext.autodoc',
              'sphinx.ext.mathjax',
              'sphinx.ext.viewcode',
              'sphinx.ext.napoleon',
              'sphinx.ext.autosummary',
              'nbsphinx', ]
autosummary_generate = True
autosummary_imported_members = True
# the API renders without the numerical stack installed
autodoc_mock_imports = ['torch', 'torchvision', 'scipy', 'PIL', 'tqdm']
autodoc_typehints = 'description'
autoclass_content = 'both'
autodoc_default_options = {
    'members': True,
    'undoc-members': False,
    'imported-members': False,
    'private-members': False,
}
napoleon_google_docstring = True
napoleon_numpy_docstring = False

source_suffix = {
    '.rst': 'restructuredtext',
    '.md': 'markdown',
}
master_doc = 'index'

project = 'stegogan'
copyright = '2024, The stegogan developers'
author = 'The stegogan developers'
language = 'en'

exclude_patterns = ['_build', 'Thumbs.db', '.DS_Store', '**.ipynb_checkpoints']

html_theme = 'sphinx_rtd_theme'
html_title = 'stegogan {}'.format(release)
html_static_path = []

nbsphinx_execute = 'never'
