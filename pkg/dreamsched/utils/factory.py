#!/usr/bin/env python
"""
Factory for generating instances of classes by (case-insensitive) name.
"""
import sys
import inspect
from collections import OrderedDict as odict

def members(module, base=None):
    """
    Classes defined in a module, keyed by lowercase class name.

    Parameters:
    -----------
    module : module name
    base   : only keep subclasses of this class (excluding itself)

    Returns:
    --------
    classes : ordered dict of name -> class
    """
    def accept(member):
        if not inspect.isclass(member): return False
        if member.__module__ != module: return False
        if base is not None:
            return issubclass(member,base) and member is not base
        return True
    classes = inspect.getmembers(sys.modules[module], accept)
    return odict([(k.lower(),v) for k,v in classes])

def factory(type, module=None, base=None, **kwargs):
    """
    Factory for creating objects. Arguments are passed directly to the
    constructor of the chosen class.
    """
    if module is None: module = __name__
    classes = members(module, base)
    lower = type.lower()
    if lower not in classes:
        msg = "Unrecognized class: %s.%s (choices: %s)"%(module,type,
                                                       ', '.join(classes))
        raise KeyError(msg)
    return classes[lower](**kwargs)
