"""
Discrete-event replay of training iterations on one compute lane and one
FIFO communication link.

Each iteration runs the forward pass of layers 1..L and the backward pass
of layers L..1 back to back on the compute lane. Layer transfers are
queued on the link either as each layer's BP completes (overlapped modes)
or after the whole BP (serial modes). The next iteration starts once the
compute lane is idle and the link has drained.
"""
import heapq
import itertools
from collections import namedtuple, deque

from dreamsched.utils.logger import logger

FP = 'FP'
BP = 'BP'
COMM = 'COMM'
SYNC_BARRIER = 'SYNC_BARRIER'

ALL = 'ALL'

COMPUTE = 'compute'
LINK = 'link'

MODES = ['ssgd','wfbp','flsgd','plsgd']

Event = namedtuple('Event',['kind','layer','iteration','start','end','lane'])

class Timeline(object):
    """
    Time-ordered events of one simulated run.
    """

    def __init__(self, events, mode, period=1, iterations=0):
        lanes = {COMPUTE:0, LINK:1}
        self.events = sorted(events, key=lambda e: (e.start,e.end,lanes[e.lane]))
        self.mode = mode
        self.period = period
        self.iterations = iterations
        self.makespan = max([e.end for e in self.events]) if self.events else 0.0

    def __len__(self):
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def lane(self, name):
        return [e for e in self.events if e.lane == name]

    def select(self, kind=None, layer=None, iteration=None):
        return [e for e in self.events
                if (kind is None or e.kind == kind)
                and (layer is None or e.layer == layer)
                and (iteration is None or e.iteration == iteration)]

    @property
    def avg_iteration(self):
        if not self.iterations: return 0.0
        return self.makespan/self.iterations

    def __repr__(self):
        return "%s(mode=%r, events=%i, makespan=%r)"%(
            self.__class__.__name__,self.mode,len(self.events),self.makespan)

class EventQueue(object):
    """ Heap of pending actions ordered by (time, insertion order). """

    def __init__(self):
        self._queue = []
        self._counter = itertools.count()
        self.now = 0.0

    def post(self, time, action, *args):
        heapq.heappush(self._queue,(time,next(self._counter),action,args))

    def run(self):
        while self._queue:
            time,_,action,args = heapq.heappop(self._queue)
            self.now = time
            action(*args)

    def __len__(self):
        return len(self._queue)

Task = namedtuple('Task',['kind','layer','iteration','duration','callback'])

class Lane(object):
    """ Non-preemptive FIFO resource. """

    def __init__(self, name, queue, record):
        self.name = name
        self.queue = queue
        self.record = record
        self.busy = False
        self.pending = deque()

    def submit(self, task):
        self.pending.append(task)
        self._dispatch()

    def _dispatch(self):
        if self.busy or not self.pending: return
        task = self.pending.popleft()
        self.busy = True
        start = self.queue.now
        self.queue.post(start + task.duration,self._complete,task,start)

    def _complete(self, task, start):
        self.busy = False
        self.record(Event(task.kind,task.layer,task.iteration,start,
                          self.queue.now,self.name))
        if task.callback is not None: task.callback()
        self._dispatch()

class Simulator(object):
    """
    Base class for the training modes.

    Subclasses decide which layers are communicated in each iteration
    (`comm_layers`) and whether transfers start at each layer's BP
    completion (`overlap = True`) or after the whole BP.
    """
    overlap = True

    def __init__(self, profile, schedule=None, period=1):
        self.profile = profile
        self.schedule = schedule
        self.period = int(period)
        if self.period < 1:
            msg = "Period must be >= 1: %s"%period
            raise ValueError(msg)
        self.nlayers = profile.nlayers
        self._t_fp = [float(t) for t in profile.t_fp]
        self._t_bp = [float(t) for t in profile.t_bp]
        self._t_comm = [float(t) for t in profile.t_comm]

    @property
    def mode(self):
        return self.__class__.__name__.lower()

    def comm_layers(self, iteration):
        """ Layers (descending) synchronized in a 1-based iteration. """
        raise NotImplementedError()

    def run(self, iterations):
        """
        Simulate a number of iterations.

        Parameters:
        -----------
        iterations : number of iterations R (>= 0)

        Returns:
        --------
        Timeline
        """
        iterations = int(iterations)
        if iterations < 0:
            msg = "Iterations must be >= 0: %s"%iterations
            raise ValueError(msg)
        self.iterations = iterations
        self.queue = EventQueue()
        self.events = []
        self.compute = Lane(COMPUTE,self.queue,self.events.append)
        self.link = Lane(LINK,self.queue,self.events.append)
        self.iteration = 0

        logger.debug("Simulating %i iterations of %s..."%(iterations,self.mode))
        self._next_iteration()
        self.queue.run()
        return Timeline(self.events,self.mode,self.period,iterations)

    def _next_iteration(self):
        if self.iteration >= self.iterations: return
        self.iteration += 1
        r = self.iteration
        self._layers = self.comm_layers(r)
        self._members = set(self._layers)
        self._outstanding = 0
        self._computing = True
        for l in range(1,self.nlayers+1):
            self.compute.submit(Task(FP,l,r,self._t_fp[l-1],None))
        for l in range(self.nlayers,0,-1):
            self.compute.submit(Task(BP,l,r,self._t_bp[l-1],
                                     self._bp_callback(l)))

    def _bp_callback(self, layer):
        return lambda: self._bp_done(layer)

    def _send(self, layer):
        self._outstanding += 1
        self.link.submit(Task(COMM,layer,self.iteration,
                              self._t_comm[layer-1],self._comm_done))

    def _bp_done(self, layer):
        if self.overlap and layer in self._members:
            self._send(layer)
        if layer == 1:
            self._computing = False
            if not self.overlap:
                for l in self._layers: self._send(l)
            self._barrier()

    def _comm_done(self):
        self._outstanding -= 1
        self._barrier()

    def _barrier(self):
        if self._computing or self._outstanding: return
        now = self.queue.now
        self.events.append(Event(SYNC_BARRIER,ALL,self.iteration,now,now,COMPUTE))
        self._next_iteration()

class SSGD(Simulator):
    """ Synchronous SGD: all layers communicated serially after the BP. """
    overlap = False

    def comm_layers(self, iteration):
        return list(range(self.nlayers,0,-1))

class WFBP(Simulator):
    """ Synchronous SGD with every layer sent as soon as its BP finishes. """
    overlap = True

    def comm_layers(self, iteration):
        return list(range(self.nlayers,0,-1))

class FLSGD(Simulator):
    """
    Local SGD with full synchronization: the whole model is sent after the
    BP of every H-th iteration and of the final iteration.
    """
    overlap = False

    def comm_layers(self, iteration):
        if iteration % self.period == 0 or iteration == self.iterations:
            return list(range(self.nlayers,0,-1))
        return []

class PLSGD(Simulator):
    """
    Partially synchronized local SGD: iteration h of each period sends the
    layers of L_h and F_h as their BP completes.
    """
    overlap = True

    def __init__(self, profile, schedule=None, period=None):
        if schedule is None:
            msg = "plsgd mode requires a schedule"
            raise ValueError(msg)
        schedule.check(profile.nlayers)
        super(PLSGD,self).__init__(profile,schedule,schedule.period)

    def comm_layers(self, iteration):
        h = (iteration-1) % self.period + 1
        return list(self.schedule.members(h))

def factory(name, **kwargs):
    from dreamsched.utils.factory import factory
    return factory(name, module=__name__, base=Simulator, **kwargs)

def simulate_run(profile, mode, schedule=None, R=1, H=None):
    """
    Simulate R iterations of a training mode.

    Parameters:
    -----------
    profile  : ModelProfile
    mode     : 'ssgd', 'wfbp', 'flsgd' or 'plsgd'
    schedule : Schedule (required for plsgd)
    R        : number of iterations
    H        : synchronization period for flsgd (default: the schedule's
               period, else 1)

    Returns:
    --------
    Timeline
    """
    if int(R) < 1:
        msg = "Iterations must be >= 1: %s"%R
        raise ValueError(msg)
    if H is None:
        H = schedule.period if schedule is not None else 1
    kwargs = dict(profile=profile,schedule=schedule,period=H)
    simulator = factory(mode,**kwargs)
    return simulator.run(R)
