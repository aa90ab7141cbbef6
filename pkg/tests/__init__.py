# -*- coding: utf-8 -*-

"""Unit test package for ising_qca."""
