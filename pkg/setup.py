#!/usr/bin/env python3

from setuptools import setup

setup(
    name='beltrack',
    version='0.1.0',
    packages=['beltrack'],
    package_dir={'beltrack': 'beltrack'},
    scripts=['scripts/beltrack'],
    package_data={'beltrack': ['resources/templates/*.em']},
    python_requires='>=3.8',
    install_requires=['numpy', 'scipy', 'PyYAML', 'EmPy<4'],
    extras_require={'test': ['pytest', 'hypothesis']},
    keywords=['tracking', 'inspection'],
    classifiers=[
        'Programming Language :: Python',
        'License :: OSI Approved :: BSD License'],
    description='Conveyor-belt inspection tracking and track-level voting',
    long_description='''\
Tracks detector output on conveyor-belt videos with two-stage (BYTE)
association, votes per-frame quality predictions per track and scores
videos by defect ratio and temporal label stability. Ships a seeded
conveyor-scene simulator used as an evaluation oracle.
''',
    license='BSD'
)
