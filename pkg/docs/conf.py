#!/usr/bin/env python
# -*- coding: utf-8 -*-
#
# Sphinx configuration for ising-qca. Run from docs/, so the package is
# imported from the parent directory and its version is the one documented.

import os
import sys

sys.path.insert(0, os.path.dirname(os.getcwd()))

import ising_qca  # noqa: E402

extensions = ["sphinx.ext.napoleon", "sphinx.ext.autodoc", "sphinx.ext.viewcode"]
templates_path = ["_templates"]
source_suffix = ".rst"
master_doc = "index"

project = "ising-qca"
copyright = "2026, the ising-qca developers"
version = ising_qca.__version__
release = ising_qca.__version__

exclude_patterns = ["_build"]
pygments_style = "sphinx"

html_theme = "sphinx_rtd_theme"
htmlhelp_basename = "ising_qcadoc"

latex_documents = [
    (
        "index",
        "ising_qca.tex",
        "ising-qca Documentation",
        "The ising-qca developers",
        "manual",
    ),
]
man_pages = [
    ("index", "ising-qca", "ising-qca Documentation", ["The ising-qca developers"], 1)
]
