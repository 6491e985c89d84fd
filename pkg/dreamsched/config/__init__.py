"""
Default configuration files shipped with the package.
"""
import os

TRAIN_CONFIG = os.path.join(os.path.dirname(os.path.abspath(__file__)),'train.yaml')
