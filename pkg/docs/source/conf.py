# beamspec documentation build configuration file

import sys
import os

sys.path.insert(0, os.path.abspath('../../beamspec'))
sys.path.insert(0, os.path.abspath('../..'))

extensions = [
    'sphinx.ext.autodoc',
    'sphinx.ext.mathjax',
    'sphinx.ext.viewcode',
]

source_suffix = '.rst'
master_doc = 'index'
exclude_patterns = ['_build']

project = 'beamspec'
copyright = '2026, beamspec developers'
author = 'beamspec developers'
version = '0.3'
release = '0.3.1'

pygments_style = 'sphinx'
html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'beamspecdoc'

latex_documents = [
    (master_doc, 'beamspec.tex', 'beamspec Documentation', author, 'manual'),
]
