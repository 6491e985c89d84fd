#!/usr/bin/env python
import os
import errno

# Tools for working with the shell

def mkdir(path):
    # https://stackoverflow.com/a/600612/4075339
    try:
        os.makedirs(path)
    except OSError as exc:
        if exc.errno == errno.EEXIST and os.path.isdir(path):
            pass
        else:
            raise
    return path

def mkdirs_for(filename):
    """Create the parent directory of an output file, if any."""
    dirname = os.path.dirname(filename)
    if dirname: mkdir(dirname)
    return filename

def get_data_file(basename):
    """Path to a file shipped in dreamsched/data."""
    here = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    return os.path.join(here,'data',basename)
