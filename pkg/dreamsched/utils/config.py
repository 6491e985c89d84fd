"""
Class for storing and updating config dictionaries.
"""
import os
import copy
import pprint

import yaml

from dreamsched.utils.logger import logger

class ConfigError(ValueError):
    """Missing or invalid configuration."""
    pass

class Config(dict):
    """
    Configuration object.

    Subclasses list the keys they require in `_required` and extend
    `_validate` with their own checks.
    """
    _required = []

    def __init__(self, config, default=None):
        """
        Initialize a configuration object from a filename or a dictionary.
        Provides functionality to merge with a default configuration.

        Parameters:
          config:   filename, dict, or Config object (deep copied)
          default:  default configuration to merge

        Returns:
          config
        """
        self.update(self._load(default))
        self.filename = None
        self.update(self._load(config))

        # Run some basic validation
        self._validate()

    def __str__(self):
        return yaml.safe_dump(dict(self),default_flow_style=False)

    def _load(self, config):
        """ Load this config from an existing config

        Parameters:
        -----------
        config : filename, config object, or dict to load

        Returns:
        --------
        params : configuration parameters
        """
        if isinstance(config, str):
            self.filename = config
            logger.debug("Reading %s..."%config)
            with open(config) as f:
                params = yaml.safe_load(f)
            if params is None: params = {}
            if not isinstance(params, dict):
                msg = "Config is not a key-value mapping: %s"%config
                raise ConfigError(msg)
        elif isinstance(config, Config):
            # This is the copy constructor...
            self.filename = config.filename
            params = copy.deepcopy(dict(config))
        elif isinstance(config, dict):
            params = copy.deepcopy(config)
        elif config is None:
            params = {}
        else:
            msg = 'Unrecognized input: %s'%type(config).__name__
            raise ConfigError(msg)

        return params

    def _validate(self):
        """ Enforce some structure to the config file """
        missing = [k for k in self._required if k not in self]
        if missing:
            msg = 'Missing keys: '+', '.join(missing)
            raise ConfigError(msg)

    def write(self, filename):
        """
        Write a copy of this config object.

        Parameters:
        -----------
        filename : output filename (.yaml or .py)

        Returns:
        --------
        None
        """
        ext = os.path.splitext(filename)[1]
        if ext == '.py':
            text = pprint.pformat(dict(self))
        elif ext in ('.yaml','.yml'):
            text = str(self)
        else:
            raise ConfigError('Unrecognized config format: %s'%ext)
        with open(filename, 'w') as writer:
            writer.write(text)
