"""
Per-layer timing and size data.

Layer 1 is the input-side layer and layer L the output-side layer; the
backward pass visits layers in descending index order. All times are
float64 seconds in memory and integer microseconds on disk.
"""
import os
from collections import namedtuple, OrderedDict as odict

import numpy as np

from dreamsched.utils.logger import logger
from dreamsched.utils import fileio

HEADER = 'dreamsched-profile v1'

class ProfileError(ValueError):
    """Invalid or unparsable profile."""
    pass

LayerProfile = namedtuple('LayerProfile',['index','name','param_bytes',
                                          't_fp','t_bp','t_comm_override'])
LayerProfile.__new__.__defaults__ = (None,)

LinkModel = namedtuple('LinkModel',['bandwidth','latency'])
LinkModel.__new__.__defaults__ = (0.0,)

def comm_time(layer, link):
    """
    Communication time of one layer.

    Parameters:
    -----------
    layer : LayerProfile
    link  : LinkModel

    Returns:
    --------
    seconds : the per-layer override if present, otherwise
              latency + param_bytes / bandwidth
    """
    if layer.t_comm_override is not None:
        return float(layer.t_comm_override)
    if layer.param_bytes is None:
        msg = "Undefined communication time for layer %s"%layer.index
        raise ProfileError(msg)
    return link.latency + layer.param_bytes/float(link.bandwidth)

class ModelProfile(object):
    """
    Ordered per-layer profile of a model plus the link it synchronizes over.
    Immutable once built.
    """

    def __init__(self, layers, link, label=''):
        layers = sorted(layers, key=lambda l: l.index)
        self._layers = tuple(layers)
        self._link = LinkModel(float(link.bandwidth),float(link.latency))
        self._label = label
        self._validate()

        self._t_fp = self._freeze([l.t_fp for l in self._layers])
        self._t_bp = self._freeze([l.t_bp for l in self._layers])
        self._t_comm = self._freeze([comm_time(l,self._link)
                                     for l in self._layers])

    @staticmethod
    def _freeze(values):
        array = np.array(values,dtype=float)
        array.flags.writeable = False
        return array

    def _validate(self):
        if not len(self._layers):
            raise ProfileError("Profile has no layers")
        if not self._link.bandwidth > 0:
            msg = "Link bandwidth must be positive: %s"%self._link.bandwidth
            raise ProfileError(msg)
        if self._link.latency < 0:
            msg = "Link latency must be non-negative: %s"%self._link.latency
            raise ProfileError(msg)

        seen = set()
        for layer in self._layers:
            if layer.index in seen:
                msg = "Duplicate layer index %s"%layer.index
                raise ProfileError(msg)
            seen.add(layer.index)
            for field in ('t_fp','t_bp','param_bytes','t_comm_override'):
                value = getattr(layer,field)
                if value is not None and value < 0:
                    msg = "Negative %s in layer %s"%(field,layer.index)
                    raise ProfileError(msg)
            if layer.param_bytes is None and layer.t_comm_override is None:
                msg = "Undefined communication time for layer %s"%layer.index
                raise ProfileError(msg)

        expected = set(range(1,len(self._layers)+1))
        if seen != expected:
            missing = sorted(expected - seen)
            extra = sorted(seen - expected)
            bad = missing[0] if missing else extra[0]
            msg = "Layer indexes must be 1..%i; offending layer %s"%(
                len(self._layers),bad)
            raise ProfileError(msg)

    def __eq__(self, other):
        if not isinstance(other, ModelProfile): return NotImplemented
        # The label is descriptive metadata
        return self._layers == other._layers and self._link == other._link

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __repr__(self):
        return "%s(label=%r, L=%i)"%(self.__class__.__name__,self.label,self.nlayers)

    @property
    def layers(self): return self._layers

    @property
    def link(self): return self._link

    @property
    def label(self): return self._label

    @property
    def nlayers(self): return len(self._layers)

    # Arrays indexed by (layer - 1)
    @property
    def t_fp(self): return self._t_fp

    @property
    def t_bp(self): return self._t_bp

    @property
    def t_comm(self): return self._t_comm

    def layer(self, index):
        return self._layers[index-1]

    def totals(self):
        """ Total (t_fp, t_bp, t_comm) over all layers. """
        return (float(np.sum(self._t_fp)),float(np.sum(self._t_bp)),
                float(np.sum(self._t_comm)))

    def with_link(self, link, keep_overrides=False):
        """
        Copy of this profile re-timed over a different link.

        Parameters:
        -----------
        link           : new LinkModel
        keep_overrides : keep per-layer comm overrides (default drops them so
                         the link model applies)

        Returns:
        --------
        profile : ModelProfile
        """
        layers = self._layers
        if not keep_overrides:
            layers = [l._replace(t_comm_override=None) for l in layers]
        return ModelProfile(layers,link,self._label)

    def scale_comm(self, factor):
        """ Copy with every layer's comm time multiplied by `factor`. """
        layers = [l._replace(t_comm_override=float(t)*factor)
                  for l,t in zip(self._layers,self._t_comm)]
        return ModelProfile(layers,self._link,self._label)

############################################################
# Text format

def _seconds(us):
    return int(us)/1e6

def _microseconds(seconds):
    return int(round(seconds*1e6))

def _parse_int(token, lineno, field):
    try:
        value = int(token)
    except ValueError:
        msg = "Line %i: %s is not an integer: %r"%(lineno,field,token)
        raise ProfileError(msg)
    return value

def parse_profile(lines, label=''):
    """
    Parse the lines of a profile file.

    Parameters:
    -----------
    lines : iterable of text lines
    label : profile label

    Returns:
    --------
    profile : ModelProfile
    """
    layers = []
    link = None
    header = False
    for lineno,line in enumerate(lines,start=1):
        line = line.rstrip('\r\n')
        if not line.strip() or line.startswith('#'): continue
        if not header:
            if line.strip() != HEADER:
                msg = "Line %i: expected header %r"%(lineno,HEADER)
                raise ProfileError(msg)
            header = True
            continue
        fields = line.split('\t')
        if fields[0] == 'link':
            if len(fields) != 3:
                msg = "Line %i: link footer needs 2 fields"%lineno
                raise ProfileError(msg)
            try:
                bandwidth = float(fields[1])
            except ValueError:
                msg = "Line %i: bad bandwidth %r"%(lineno,fields[1])
                raise ProfileError(msg)
            latency = _parse_int(fields[2],lineno,'latency_us')
            if latency < 0:
                msg = "Line %i: negative latency"%lineno
                raise ProfileError(msg)
            link = LinkModel(bandwidth,_seconds(latency))
            continue
        if link is not None:
            msg = "Line %i: layer line after link footer"%lineno
            raise ProfileError(msg)
        if len(fields) != 6:
            msg = "Line %i: expected 6 tab-separated fields, found %i"%(
                lineno,len(fields))
            raise ProfileError(msg)
        index = _parse_int(fields[0],lineno,'index')
        param_bytes = _parse_int(fields[2],lineno,'param_bytes')
        t_fp = _parse_int(fields[3],lineno,'t_fp_us')
        t_bp = _parse_int(fields[4],lineno,'t_bp_us')
        comm = None
        if fields[5] != '-':
            comm = _parse_int(fields[5],lineno,'t_comm_us')
        for field,value in (('param_bytes',param_bytes),('t_fp',t_fp),
                            ('t_bp',t_bp),('t_comm',comm)):
            if value is not None and value < 0:
                msg = "Negative %s in layer %s"%(field,index)
                raise ProfileError(msg)
        layers.append(LayerProfile(index,fields[1],param_bytes,_seconds(t_fp),
                                   _seconds(t_bp),
                                   None if comm is None else _seconds(comm)))
    if not header:
        raise ProfileError("Missing header %r"%HEADER)
    if link is None:
        raise ProfileError("Missing link footer")
    return ModelProfile(layers,link,label)

def format_profile(profile):
    """ Render a profile in the text format. """
    out = [HEADER]
    for l in profile.layers:
        comm = '-' if l.t_comm_override is None else \
            str(_microseconds(l.t_comm_override))
        out.append('\t'.join([str(l.index),l.name,str(int(l.param_bytes or 0)),
                              str(_microseconds(l.t_fp)),
                              str(_microseconds(l.t_bp)),comm]))
    bandwidth = profile.link.bandwidth
    if float(bandwidth).is_integer(): bandwidth = int(bandwidth)
    else: bandwidth = repr(float(bandwidth))
    out.append('\t'.join(['link',str(bandwidth),
                          str(_microseconds(profile.link.latency))]))
    return '\n'.join(out)+'\n'

def load_profile(path):
    """
    Load and validate a profile file.

    Parameters:
    -----------
    path : profile filename

    Returns:
    --------
    profile : ModelProfile
    """
    logger.debug("Reading %s..."%path)
    lines = fileio.read_lines(path)
    label = os.path.splitext(os.path.basename(path))[0]
    try:
        return parse_profile(lines,label)
    except ProfileError as e:
        raise ProfileError("%s: %s"%(path,e))

def save_profile(profile, path):
    """ Write a profile in the text format. """
    fileio.write_text(path,format_profile(profile))

############################################################
# Synthesis

# BP time range (microseconds) and total-comm / total-BP target per regime
REGIMES = odict([
    ('comm-heavy',    dict(bp_range=(500,2000),  ratio=3.0)),
    ('compute-heavy', dict(bp_range=(2000,8000), ratio=0.25)),
    ('balanced',      dict(bp_range=(1000,4000), ratio=1.0)),
])

SYNTH_BANDWIDTH = 1e9 # B/s

def synth_profile(l_count, seed, regime='balanced'):
    """
    Reproducible random profile.

    Parameters:
    -----------
    l_count : number of layers (>= 1)
    seed    : random seed
    regime  : 'comm-heavy', 'compute-heavy' or 'balanced'

    Returns:
    --------
    profile : ModelProfile with integer-microsecond times
    """
    if int(l_count) < 1:
        msg = "Layer count must be >= 1: %s"%l_count
        raise ValueError(msg)
    if regime not in REGIMES:
        msg = "Unrecognized regime: %s (choices: %s)"%(regime,', '.join(REGIMES))
        raise ValueError(msg)
    l_count = int(l_count)
    params = REGIMES[regime]
    rng = np.random.default_rng(seed)

    lo,hi = params['bp_range']
    bp_us = rng.integers(lo,hi,size=l_count,endpoint=True)
    fp_us = np.rint(bp_us*rng.uniform(0.3,0.6,size=l_count)).astype(int)
    weights = rng.uniform(0.5,1.5,size=l_count)
    comm_us = np.rint(weights/weights.sum()*params['ratio']*bp_us.sum())
    comm_us = np.maximum(comm_us,1).astype(int)

    layers = []
    for i in range(l_count):
        comm = _seconds(comm_us[i])
        layers.append(LayerProfile(i+1,'layer%03i'%(i+1),
                                   int(round(comm*SYNTH_BANDWIDTH)),
                                   _seconds(fp_us[i]),_seconds(bp_us[i]),comm))
    label = 'synth-%s-L%i-s%s'%(regime,l_count,seed)
    return ModelProfile(layers,LinkModel(SYNTH_BANDWIDTH,0.0),label)
