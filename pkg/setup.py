#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""ising_qca
Dissipative Ising quantum cellular automata simulated with matrix product states.
"""
from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

with open('requirements.txt') as fd:
    requirements = fd.read()

setup(
    name='ising-qca',
    description=__doc__.splitlines()[1],
    long_description=readme + '\n\n' + history,
    long_description_content_type='text/x-rst',
    version='2026.10.18',
    license="BSD-3-Clause",

    # Which Python importable modules should be included when your package is
    # installed, handled automatically by setuptools.
    packages=find_packages(include=['ising_qca']),

    include_package_data=True,

    python_requires='>=3.11',

    # Required packages, pulls from pip if needed; do not use for Conda
    # deployment
    install_requires=requirements,

    test_suite='tests',

    platforms=['Linux',
               'Mac OS-X',
               'Unix',
               'Windows'],

    zip_safe=True,

    keywords=[
        'quantum cellular automata',
        'matrix product states',
        'open quantum systems',
        'Lindblad',
        'mean field',
    ],
    classifiers=[
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: BSD License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3 :: Only',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ],
    entry_points={
        'console_scripts': [
            'ising-qca=ising_qca.__main__:run',
        ],
    }
)
