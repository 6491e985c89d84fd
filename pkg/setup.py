from __future__ import print_function

import os
import io
import re

from setuptools import setup, find_packages

NAME = 'dreamsched'
HERE = os.path.abspath(os.path.dirname(__file__))
DESC = "Layer-wise partial synchronization scheduling for local SGD."
LONG_DESC = "See README.md"
CLASSIFIERS = """\
Development Status :: 3 - Alpha
Intended Audience :: Science/Research
Intended Audience :: Developers
License :: OSI Approved :: MIT License
Natural Language :: English
Operating System :: MacOS :: MacOS X
Operating System :: POSIX :: Linux
Programming Language :: Python :: 3
Topic :: Scientific/Engineering
Topic :: System :: Distributed Computing
"""

def read_version():
    with io.open(os.path.join(HERE,NAME,'__init__.py'),encoding='utf-8') as f:
        match = re.search(r"^__version__\s*=\s*['\"]([^'\"]+)['\"]",f.read(),re.M)
    if not match:
        raise RuntimeError("Unable to find __version__")
    return match.group(1)

VERSION = read_version()

setup(
    name=NAME,
    version=VERSION,
    author='dreamsched developers',
    scripts = [],
    entry_points={
        'console_scripts': ['dreamsched = dreamsched.cli:main'],
    },
    install_requires=[
        'numpy >= 1.17.0',
        'scipy >= 1.2.0',
        'pyyaml >= 3.10',
    ],
    extras_require={
        'test': ['pytest >= 3.9'],
    },
    packages=find_packages(exclude=['tests']),
    package_data={
        'dreamsched': ['config/*.yaml','data/*.profile'],
    },
    description=DESC,
    long_description=LONG_DESC,
    platforms='any',
    python_requires='>=3.8',
    classifiers = [_f for _f in CLASSIFIERS.split('\n') if _f]
)
