#!/usr/bin/env python
"""
Argument parsing shared by the command-line verbs.
"""
import sys
import argparse

from dreamsched.utils.logger import logger

class ParserError(ValueError):
    """Unknown verb, unknown flag or malformed flag value."""
    pass

class Parser(argparse.ArgumentParser):
    def __init__(self,*args,**kwargs):
        kwargs.setdefault('formatter_class',
                          argparse.ArgumentDefaultsHelpFormatter)

        super(Parser,self).__init__(*args,**kwargs)

    def error(self, message):
        # Usage errors are validation errors; the caller owns the exit code.
        self.print_usage(sys.stderr)
        raise ParserError("%s: %s"%(self.prog,message))

    def add_verbose(self,**kwargs):
        self.add_argument('-v','--verbose',action='store_true',
                          help='Output verbosity.',**kwargs)

    def add_force(self,**kwargs):
        self.add_argument('-f','--force',action='store_true',
                          help='Force the overwrite of files',**kwargs)

    def add_seed(self,**kwargs):
        kwargs.setdefault('default',0)
        self.add_argument('--seed',type=int,
                          help='Random seed.',**kwargs)

    def add_ncores(self,**kwargs):
        self.add_argument('--ncores',default=None,type=int,
                          help="Number of cores to use.",**kwargs)

    def add_version(self,**kwargs):
        from dreamsched import __version__
        self.add_argument('-V','--version',action='version',
                          version='dreamsched '+__version__,
                          help='Print version.',**kwargs)

    def add_profile(self,**kwargs):
        kwargs.setdefault('required',True)
        self.add_argument('--profile',metavar='P',
                          help='Layer profile (dreamsched-profile v1).',**kwargs)

    def add_period(self,**kwargs):
        kwargs.setdefault('required',True)
        self.add_argument('--H',dest='H',type=int,metavar='H',
                          help='Synchronization period.',**kwargs)

    def add_iters(self,**kwargs):
        kwargs.setdefault('required',True)
        self.add_argument('--iters',type=int,metavar='R',
                          help='Number of training iterations.',**kwargs)

    def add_out(self,**kwargs):
        kwargs.setdefault('default',None)
        self.add_argument('--out',metavar='FILE',
                          help='Output file.',**kwargs)

    def add_config(self,**kwargs):
        kwargs.setdefault('required',True)
        self.add_argument('--config',metavar='config.yaml',
                          help='Configuration file (yaml key-value).',**kwargs)

    def _parse_verbose(self,opts):
        if vars(opts).get('verbose'):
            logger.setLevel(logger.DEBUG)

    def parse_args(self,*args,**kwargs):
        opts = super(Parser,self).parse_args(*args,**kwargs)
        self._parse_verbose(opts)
        return opts
