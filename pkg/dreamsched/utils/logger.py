#!/usr/bin/env python
"""
Interface to python logging. For more info see:
http://docs.python.org/3/howto/logging.html

Messages go to stderr; stdout is left to command output.
"""
import os
import sys
import logging

class SpecialFormatter(logging.Formatter):
    """
    Class for overloading log formatting based on level.
    """
    FORMATS = {'DEFAULT'       : "%(message)s",
               logging.WARNING : "WARNING: %(message)s",
               logging.ERROR   : "ERROR: %(message)s"}

    def format(self, record):
        fmt = self.FORMATS.get(record.levelno, self.FORMATS['DEFAULT'])
        self._style._fmt = self._fmt = fmt
        return logging.Formatter.format(self, record)

logger = logging.getLogger('dreamsched')
handler = logging.StreamHandler()
handler.setFormatter(SpecialFormatter())
if not len(logger.handlers):
    logger.addHandler(handler)

logger.DEBUG    = logging.DEBUG
logger.INFO     = logging.INFO
logger.WARNING  = logging.WARNING
logger.ERROR    = logging.ERROR

logger.setLevel(logger.INFO)

def set_stream(stream=None):
    """Point the package handler at a (new) stream; default sys.stderr."""
    handler.setStream(sys.stderr if stream is None else stream)

def file_found(filename,force):
    """Check if an output file already exists"""
    if os.path.exists(filename) and not force:
        logger.info("Found %s; skipping..."%filename)
        return True
    return False

logger.set_stream = set_stream
logger.file_found = file_found
