#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_packages

with open("README.rst") as readme_file:
    readme = readme_file.read()

with open("HISTORY.rst") as history_file:
    history = history_file.read()

with open("requirements.txt") as f:
    requirements = f.read().splitlines()

long_description = readme + "\n\n" + history

test_requirements = [
    "pytest>=3",
]

setup(
    author="ontopred developers",
    python_requires=">=3.10",
    classifiers=[
        "Development Status :: 2 - Pre-Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Natural Language :: English",
        "Programming Language :: Python :: 3.10",
        "Topic :: Scientific/Engineering :: Bio-Informatics",
    ],
    description="Gene Ontology term prediction with a graph convolutional network "
    "over the ontology and protein sequence embeddings.",
    install_requires=requirements,
    license="MIT license",
    long_description=long_description,
    include_package_data=True,
    keywords="ontopred gene-ontology protein-function gcn",
    name="ontopred",
    packages=find_packages(include=["ontopred", "ontopred.*"]),
    entry_points={"console_scripts": ["ontopred = ontopred.cli:main"]},
    test_suite="tests",
    tests_require=test_requirements,
    version="0.1.0",
    zip_safe=False,
)
