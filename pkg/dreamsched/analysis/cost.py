"""
Closed-form time accounting for full, local and partially synchronized SGD.

Within an iteration, time 0 is the start of the backward pass (BP of layer
L begins) and layer l finishes its BP at the cumulative BP time of layers
L down to l. A set of layers is communicated over one FIFO link, each
transfer starting at the later of its own BP completion and the link
becoming free.
"""
from collections import namedtuple

import numpy as np

from dreamsched.utils.logger import logger

class ScheduleError(ValueError):
    """Invalid schedule or schedule/profile mismatch."""
    pass

def _fmt(layers):
    return '{'+','.join(str(l) for l in layers)+'}'

class Schedule(object):
    """
    Assignment of the layers of an L-layer model to the H iterations of a
    synchronization period.

    `sets[h-1]` holds the layers synchronized at iteration h, and
    `supplemental[h-1]` the extra (bubble-fill) layers synchronized at the
    same iteration. Layers are stored in descending index order.
    """

    def __init__(self, sets, supplemental=None):
        if not len(sets):
            raise ScheduleError("Schedule period must be >= 1")
        self._sets = tuple(self._normalize(s) for s in sets)
        if supplemental is None:
            supplemental = [()]*len(self._sets)
        if len(supplemental) != len(self._sets):
            msg = "Expected %i supplemental sets, found %i"%(
                len(self._sets),len(supplemental))
            raise ScheduleError(msg)
        self._supplemental = tuple(self._normalize(s) for s in supplemental)
        self._nlayers = sum(len(s) for s in self._sets)
        self._validate()

    @staticmethod
    def _normalize(layers):
        layers = [int(l) for l in layers]
        if len(set(layers)) != len(layers):
            msg = "Repeated layer in set %s"%_fmt(sorted(layers,reverse=True))
            raise ScheduleError(msg)
        return tuple(sorted(layers,reverse=True))

    def _validate(self):
        L = self._nlayers
        if L < 1:
            raise ScheduleError("Schedule assigns no layers")

        order = [l for s in self._sets for l in s]
        if order != list(range(L,0,-1)):
            msg = "Sets must split layers %i..1 into contiguous blocks: %s"%(L,self)
            raise ScheduleError(msg)

        sizes = [len(s) for s in self._sets]
        if 0 in sizes and any(sizes[sizes.index(0):]):
            msg = "Empty sets may only trail: %s"%self
            raise ScheduleError(msg)

        for h,(members,fill) in enumerate(zip(self._sets,self._supplemental),1):
            if not fill: continue
            if list(fill) != list(range(L,L-len(fill),-1)):
                msg = "Fill set of iteration %i is not a prefix %i..l: %s"%(
                    h,L,_fmt(fill))
                raise ScheduleError(msg)
            if set(fill) & set(members):
                msg = "Fill set of iteration %i overlaps its layers"%h
                raise ScheduleError(msg)

    def __eq__(self, other):
        if not isinstance(other, Schedule): return NotImplemented
        return (self._sets == other._sets and
                self._supplemental == other._supplemental)

    def __ne__(self, other):
        eq = self.__eq__(other)
        return eq if eq is NotImplemented else not eq

    def __hash__(self):
        return hash((self._sets,self._supplemental))

    def __str__(self):
        text = '|'.join(_fmt(s) for s in self._sets)
        if any(self._supplemental):
            text += ' fill '+'|'.join(_fmt(s) for s in self._supplemental)
        return text

    def __repr__(self):
        return "%s(%s)"%(self.__class__.__name__,self)

    @property
    def period(self): return len(self._sets)

    @property
    def nlayers(self): return self._nlayers

    @property
    def sets(self): return self._sets

    @property
    def supplemental(self): return self._supplemental

    def members(self, h):
        """ Layers communicated at iteration h (L_h and F_h), descending. """
        return tuple(sorted(self._sets[h-1]+self._supplemental[h-1],reverse=True))

    def index(self, layer):
        """ Iteration h whose set holds `layer`. """
        for h,s in enumerate(self._sets,1):
            if layer in s: return h
        msg = "Layer %s not in schedule"%layer
        raise ScheduleError(msg)

    def with_supplemental(self, supplemental):
        return self.__class__(self._sets,supplemental)

    def without_supplemental(self):
        return self.__class__(self._sets)

    def check(self, nlayers):
        """ Raise unless this schedule covers exactly `nlayers` layers. """
        if self._nlayers != nlayers:
            msg = "Schedule covers %i layers but the profile has %i"%(
                self._nlayers,nlayers)
            raise ScheduleError(msg)

    @classmethod
    def from_sizes(cls, sizes):
        """ Contiguous split of L..1 into sets of the given sizes. """
        L = sum(sizes)
        sets, top = [], L
        for n in sizes:
            sets.append(range(top,top-n,-1))
            top -= n
        return cls(sets)

    @classmethod
    def enp(cls, nlayers, period):
        """
        Equal-number partition: contiguous sets whose sizes differ by at
        most one, the larger sets first.
        """
        if not 1 <= period <= nlayers:
            msg = "Equal-number partition needs 1 <= H <= L (H=%s, L=%s)"%(
                period,nlayers)
            raise ScheduleError(msg)
        base,extra = divmod(nlayers,period)
        return cls.from_sizes([base+1]*extra+[base]*(period-extra))

    @classmethod
    def single(cls, nlayers, period=1):
        """ Every layer in L_1; later iterations communicate nothing. """
        return cls.from_sizes([nlayers]+[0]*(period-1))

CommSpan = namedtuple('CommSpan',['span','finish'])

IterationCost = namedtuple('IterationCost',['bp_before','bp_first',
                                            'overlap_window','comm_span','term'])

class PeriodCost(object):
    """ Per-iteration breakdown of one synchronization period. """

    def __init__(self, per_iteration, t_fp):
        self.per_iteration = list(per_iteration)
        self.objective = sum(c.term for c in self.per_iteration)
        self.total_with_fp = len(self.per_iteration)*t_fp + self.objective

    @property
    def terms(self):
        return [c.term for c in self.per_iteration]

    def __repr__(self):
        return "%s(objective=%r, total_with_fp=%r)"%(
            self.__class__.__name__,self.objective,self.total_with_fp)

class CostModel(object):
    """
    Timing tables of one profile, shared by every cost evaluation.
    """

    def __init__(self, profile):
        self.profile = profile
        self.nlayers = profile.nlayers
        completion = np.cumsum(profile.t_bp[::-1])[::-1]
        # Python floats keep the inner loops cheap
        self.completion = [float(c) for c in completion]
        self.t_bp = [float(t) for t in profile.t_bp]
        self.t_comm = [float(t) for t in profile.t_comm]
        self.total_fp = float(np.sum(profile.t_fp))
        self.total_bp = self.completion[0]

    def bp_done(self, layer):
        """ BP completion time of `layer` within an iteration. """
        return self.completion[layer-1]

    def bp_above(self, layer):
        """ BP time of the layers above `layer` (those BP'd before it). """
        return self.completion[layer] if layer < self.nlayers else 0.0

    def finish(self, layers, start=0.0):
        """ Link drain time after communicating `layers` (descending). """
        finish = start
        completion, comm = self.completion, self.t_comm
        for l in layers:
            finish = max(completion[l-1],finish) + comm[l-1]
        return finish

    def span(self, layers):
        layers = sorted(layers,reverse=True)
        if not layers: return CommSpan(0.0,0.0)
        finish = self.finish(layers)
        return CommSpan(finish - self.bp_done(layers[0]),finish)

    def window(self, h0):
        """ BP time remaining after layer h0 finishes its BP. """
        return self.total_bp - self.bp_done(h0)

    def iteration(self, layers):
        """ Cost of one iteration that communicates `layers` (descending). """
        if not layers:
            return IterationCost(0.0,0.0,self.total_bp,0.0,self.total_bp)
        h0 = layers[0]
        start = self.bp_done(h0)
        finish = self.finish(layers)
        return IterationCost(self.bp_above(h0),self.t_bp[h0-1],
                             self.total_bp - start,finish - start,
                             max(self.total_bp,finish))

    def term(self, layers):
        if not layers: return self.total_bp
        return max(self.total_bp,self.finish(layers))

    def period(self, schedule):
        schedule.check(self.nlayers)
        costs = [self.iteration(schedule.members(h))
                 for h in range(1,schedule.period+1)]
        return PeriodCost(costs,self.total_fp)

    def objective(self, schedule):
        return sum(self.term(schedule.members(h))
                   for h in range(1,schedule.period+1))

def effective_comm_span(layers, profile):
    """
    Pipelined span of communicating a set of layers.

    Parameters:
    -----------
    layers  : iterable of layer indexes
    profile : ModelProfile

    Returns:
    --------
    CommSpan(span, finish) : finish is the link drain time from the start of
        the BP pass; span is measured from the BP completion of the largest
        index in the set. An empty set gives (0, 0).
    """
    return CostModel(profile).span(layers)

def period_objective(schedule, profile):
    """
    Cost of one synchronization period under a schedule.

    Parameters:
    -----------
    schedule : Schedule
    profile  : ModelProfile

    Returns:
    --------
    PeriodCost : per-iteration breakdown, objective and total with FP
    """
    return CostModel(profile).period(schedule)

def t_ssgd_total(profile, R):
    """ Synchronous SGD: R * (t_fp + t_bp + t_comm). """
    fp,bp,comm = profile.totals()
    return R*(fp+bp+comm)

def t_lsgd_total(profile, R, H):
    """
    Local SGD with full synchronization every H iterations.
    A trailing partial period still pays one communication round.
    """
    if H < 1:
        msg = "Period must be >= 1: %s"%H
        raise ValueError(msg)
    fp,bp,comm = profile.totals()
    rounds = -(-R//H)
    return R*(fp+bp) + rounds*comm

def t_wfbp_total(profile, R):
    """ Synchronous SGD with every layer's comm overlapped with the BP. """
    model = CostModel(profile)
    layers = list(range(model.nlayers,0,-1))
    return R*(model.total_fp + model.term(layers))

def t_plsgd_total(schedule, profile, R):
    """
    Partially synchronized local SGD over R iterations: full periods plus
    the leading iterations of a trailing partial period.
    """
    model = CostModel(profile)
    cost = model.period(schedule)
    full,rest = divmod(R,schedule.period)
    partial = sum(model.total_fp + c.term for c in cost.per_iteration[:rest])
    return full*cost.total_with_fp + partial

def saved_ratio(profile, H):
    """ Fraction of S-SGD time saved by synchronizing every H iterations. """
    if H < 1:
        msg = "Period must be >= 1: %s"%H
        raise ValueError(msg)
    fp,bp,comm = profile.totals()
    return (1 - 1.0/H)*comm/(fp+bp+comm)

def format_cost_report(cost):
    """ Key-value text rendering of a PeriodCost. """
    lines = []
    for h,c in enumerate(cost.per_iteration,1):
        fields = ' '.join('%s=%r'%(k,float(v)) for k,v in zip(c._fields,c))
        lines.append('iteration %i: %s'%(h,fields))
    lines.append('objective=%r'%float(cost.objective))
    lines.append('total_with_fp=%r'%float(cost.total_with_fp))
    return '\n'.join(lines)+'\n'
