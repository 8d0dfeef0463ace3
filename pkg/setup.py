#!/usr/bin/env python

from pathlib import Path

from setuptools import setup


requires = open("requirements.txt").read().strip().split("\n")

setup(
    name="witt-windows",
    description="Frames, windows and crystalline lifting over truncated Witt vectors",
    use_scm_version={
        "write_to": "witt_windows/_version.py",
        "write_to_template": '__version__ = "{version}"',
        "tag_regex": r"^(?P<prefix>v)?(?P<version>[^\+]+)(?P<suffix>.*)?$",
    },
    setup_requires=["setuptools_scm", "setuptools_scm_git_archive"],
    license="BSD",
    packages=["witt_windows"],
    entry_points={
        "console_scripts": [
            "witt-windows = witt_windows.cli:main",
        ],
    },
    install_requires=requires,
    extras_require={"test": ["pytest", "pytest-cov", "hypothesis"]},
    long_description=Path("README.md").read_text(),
    long_description_content_type='text/markdown',
    zip_safe=False,
)
