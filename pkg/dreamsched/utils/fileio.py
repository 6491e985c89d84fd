#!/usr/bin/env python
"""
Reading and writing tables and text artifacts.
"""
import os
import io

import numpy as np

from dreamsched.utils.logger import logger
from dreamsched.utils.shell import mkdirs_for

def write(filename,data,**kwargs):
    """ Write a structured array to a specific format.
    Accepted file formats: [.csv,.npy,.txt,.dat]

    Parameters:
    filename : output file name
    data     : structured (named-column) array
    kwargs   : keyword arguments for the writer
    Returns:
    ret      : writer return (usually None)
    """
    base,ext = os.path.splitext(filename)
    mkdirs_for(filename)
    if ext in ('.npy',):
        return np.save(filename,data,**kwargs)
    elif ext in ('.csv',):
        kwargs.setdefault('delimiter',',')
        return write_table(filename,data,**kwargs)
    elif ext in ('.txt','.dat','.tsv'):
        kwargs.setdefault('delimiter','\t')
        return write_table(filename,data,**kwargs)

    msg = "Unrecognized file type: %s"%filename
    raise ValueError(msg)

def _format(dtype):
    if np.issubdtype(dtype,np.integer): return '%d'
    if np.issubdtype(dtype,np.floating): return '%.17g'
    return '%s'

def write_table(filename,data,delimiter=',',fmt=None):
    """ Write a structured array as delimited text with a header row.

    Parameters:
    filename  : output file name, or an open text stream
    data      : structured array
    delimiter : column separator
    fmt       : per-column printf formats (default: %d for integer,
                %.17g for float and %s for other columns)
    Returns:
    None
    """
    names = data.dtype.names
    if fmt is None:
        fmt = [_format(data.dtype[n]) for n in names]
    header = delimiter.join(names)
    if isinstance(filename, io.IOBase) or hasattr(filename,'write'):
        np.savetxt(filename,data,fmt=fmt,delimiter=delimiter,
                   header=header,comments='')
        return
    logger.info("Writing %s..."%filename)
    np.savetxt(filename,data,fmt=fmt,delimiter=delimiter,
               header=header,comments='')

def write_text(filename, text):
    """ Write a text artifact, creating the parent directory. """
    mkdirs_for(filename)
    logger.info("Writing %s..."%filename)
    with io.open(filename,'w',encoding='utf-8',newline='\n') as f:
        f.write(text)

def read_lines(filename):
    """ Read a UTF-8 text artifact as a list of lines (newlines stripped). """
    with io.open(filename,'r',encoding='utf-8') as f:
        return f.read().splitlines()
