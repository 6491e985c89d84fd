"""
Search for the layer-to-iteration assignment that minimizes the cost of a
synchronization period.

Three searches are provided: the pruned depth-first search driven by the
assignment rules, an exhaustive oracle over every contiguous partition,
and the bubble-filling pass that adds extra top-layer synchronizations to
idle link time.
"""
import re
from math import comb
from collections import namedtuple

from dreamsched.utils.logger import logger
from dreamsched.utils import fileio
from dreamsched.utils.stats import relative_gap
from dreamsched.analysis.cost import CostModel, Schedule, ScheduleError

HEADER = 'dreamsched-schedule v1'

# Default refusal threshold for exhaustive enumeration
BRUTE_FORCE_LIMIT = 10**7

CH = 'CH'
CO = 'CO'

ALO = 'ALO'
OPTIMAL_HIDING = 'OptimalHiding'
DELAYED_CO = 'DelayedCO'
BRANCH = 'DFS-branch'

class BudgetError(ValueError):
    """Exhaustive enumeration larger than the allowed budget."""
    pass

Decision = namedtuple('Decision',['layer','iteration','rule'])

class AssignmentState(namedtuple('AssignmentState',
                                 ['sets','layer','iteration','finish'])):
    """
    Partial assignment: layers L..layer+1 are placed in `sets`, `layer` is
    the next layer to place and `iteration` the set currently being filled.
    `finish` is the link drain time of the current set.
    """
    __slots__ = ()

    @classmethod
    def initial(cls, nlayers, period):
        return cls(((),)*period,nlayers,1,0.0)

    @classmethod
    def from_sets(cls, sets, period, model):
        """ State after placing the given (leading) sets; the last one is current. """
        sets = [tuple(sorted(s,reverse=True)) for s in sets]
        placed = [l for s in sets for l in s]
        layer = min(placed)-1 if placed else model.nlayers
        current = sets[-1] if sets else ()
        finish = model.finish(current) if current else 0.0
        padded = tuple(sets)+((),)*(period-len(sets))
        return cls(padded,layer,max(len(sets),1),finish)

    @property
    def period(self): return len(self.sets)

    @property
    def current(self): return self.sets[self.iteration-1]

    def assign(self, model):
        """ Place `layer` into the current set. """
        l, h = self.layer, self.iteration
        sets = list(self.sets)
        sets[h-1] = sets[h-1] + (l,)
        finish = max(model.bp_done(l),self.finish) + model.t_comm[l-1]
        return self._replace(sets=tuple(sets),layer=l-1,finish=finish)

    def delay(self):
        """ Close the current set and move to the next iteration. """
        return self._replace(iteration=self.iteration+1,finish=0.0)

    def fill_last(self):
        """ Place every remaining layer into the last set. """
        sets = list(self.sets)
        sets[-1] = sets[-1] + tuple(range(self.layer,0,-1))
        return self._replace(sets=tuple(sets),layer=0)

    def overflowed(self, model):
        """ True when the current set's comm already exceeds its window. """
        current = self.current
        if not current: return False
        h0 = current[0]
        return model.window(h0) < self.finish - model.bp_done(h0)

    def schedule(self):
        return Schedule(self.sets)

def _model(profile):
    return profile if isinstance(profile, CostModel) else CostModel(profile)

def classify_assignment(state, layer, profile):
    """
    Classify adding `layer` to the current set of `state`.

    Parameters:
    -----------
    state   : AssignmentState
    layer   : unassigned layer index
    profile : ModelProfile (or a CostModel built from one)

    Returns:
    --------
    'CH' if the augmented set's communication fits inside the BP window
    that opens after its first layer's BP, 'CO' otherwise.
    """
    model = _model(profile)
    current = state.current
    h0 = current[0] if current else layer
    finish = state.finish if current else 0.0
    finish = max(model.bp_done(layer),finish) + model.t_comm[layer-1]
    span = finish - model.bp_done(h0)
    return CH if model.window(h0) >= span else CO

def search_bound(nlayers, period):
    """ Solution-set bound of the pruned search, 2^min(L-H, H). """
    return 2**min(nlayers-period,period)

def count_candidates(nlayers, period):
    """
    Number of contiguous descending partitions of L layers into H ordered
    sets with only trailing sets empty.
    """
    return sum(comb(nlayers-1,k-1) for k in range(1,min(period,nlayers)+1))

class SearchReport(object):
    """
    Result of a schedule search.

    Attributes:
    -----------
    best                : Schedule with the lowest period objective
    best_cost           : its objective (s)
    solutions_explored  : number of complete schedules evaluated
    oracle_cost         : exhaustive optimum, when known
    classification_log  : list of Decision(layer, iteration, rule)
    solutions           : list of (Schedule, objective) in discovery order
    """

    def __init__(self, best, best_cost, solutions_explored, solutions=None,
                 classification_log=None, oracle_cost=None):
        self.best = best
        self.best_cost = best_cost
        self.solutions_explored = solutions_explored
        self.solutions = solutions if solutions is not None else []
        self.classification_log = classification_log or []
        self.oracle_cost = oracle_cost

    @property
    def gap(self):
        """ Relative excess of best_cost over the oracle cost. """
        if self.oracle_cost is None: return None
        return relative_gap(self.best_cost,self.oracle_cost)

    def format_log(self):
        return '\n'.join('layer=%i iteration=%i rule=%s'%d
                         for d in self.classification_log)+'\n'

    def __repr__(self):
        return "%s(best=%s, best_cost=%r, solutions_explored=%i)"%(
            self.__class__.__name__,self.best,self.best_cost,
            self.solutions_explored)

class DepthFirstSearch(object):
    """
    Pruned depth-first search over layer assignments.

    Per (layer, iteration) the rules are tried in order: an empty current
    set takes the layer (ALO); a layer whose communication stays hidden is
    assigned (OptimalHiding); a layer arriving at an already overflowed set
    is delayed (DelayedCO); otherwise both assign and delay are explored,
    assign first. The last iteration takes every remaining layer.

    Both children of a branch reach the next iteration before branching
    again, so a period of H iterations records at most 2^(H-1) solutions.
    """

    def __init__(self, profile, period):
        self.model = _model(profile)
        self.period = period
        L = self.model.nlayers
        if not 1 <= period <= L:
            msg = "Period must satisfy 1 <= H <= L (H=%s, L=%s)"%(period,L)
            raise ScheduleError(msg)
        self.solutions = []
        self.log = []
        self.best = None
        self.best_cost = None

    def record(self, state):
        schedule = state.schedule()
        cost = self.model.objective(schedule)
        self.solutions.append((schedule,cost))
        logger.debug("Solution %s: %r"%(schedule,cost))
        if self.best_cost is None or cost < self.best_cost:
            self.best, self.best_cost = schedule, cost

    def solve(self, state):
        l, h = state.layer, state.iteration
        if l == 0:
            return self.record(state)
        if h == self.period:
            return self.record(state.fill_last())

        model = self.model
        if not state.current:
            self.log.append(Decision(l,h,ALO))
            return self.solve(state.assign(model))
        if classify_assignment(state,l,model) == CH:
            self.log.append(Decision(l,h,OPTIMAL_HIDING))
            return self.solve(state.assign(model))
        if state.overflowed(model):
            self.log.append(Decision(l,h,DELAYED_CO))
            return self.solve(state.delay())

        self.log.append(Decision(l,h,BRANCH))
        self.solve(state.assign(model))
        self.solve(state.delay())

    def run(self):
        state = AssignmentState.initial(self.model.nlayers,self.period)
        self.solve(state)
        return SearchReport(self.best,self.best_cost,len(self.solutions),
                            self.solutions,self.log)

def schedule_dfs(profile, H):
    """
    Pruned depth-first schedule search.

    Parameters:
    -----------
    profile : ModelProfile
    H       : synchronization period, 1 <= H <= L

    Returns:
    --------
    SearchReport over every schedule the rules leave open
    """
    search = DepthFirstSearch(profile,H)
    report = search.run()
    bound = search_bound(search.model.nlayers,H)
    msg = "DFS explored %i solutions (2^min(L-H,H) = %i)"%(
        report.solutions_explored,bound)
    if report.solutions_explored > bound: logger.info(msg)
    else: logger.debug(msg)
    return report

def _compositions(remaining, slots):
    # Sizes of leading non-empty sets, largest first set first
    if remaining == 0:
        yield (0,)*slots
        return
    if slots == 1:
        yield (remaining,)
        return
    for n in range(remaining,0,-1):
        for rest in _compositions(remaining-n,slots-1):
            yield (n,)+rest

def schedule_brute_force(profile, H, limit=BRUTE_FORCE_LIMIT):
    """
    Exhaustive search over every contiguous partition.

    Parameters:
    -----------
    profile : ModelProfile
    H       : synchronization period (>= 1)
    limit   : refuse when the candidate count exceeds this (None: no limit)

    Returns:
    --------
    SearchReport with oracle_cost set to the optimum
    """
    if H < 1:
        msg = "Period must be >= 1: %s"%H
        raise ScheduleError(msg)
    model = _model(profile)
    L = model.nlayers
    count = count_candidates(L,H)
    if limit is not None and count > limit:
        msg = "Brute force needs %i candidates (budget %i)"%(count,limit)
        raise BudgetError(msg)
    logger.debug("Enumerating %i candidates..."%count)

    best, best_cost = None, None
    for sizes in _compositions(L,H):
        cost, top = 0.0, L
        for n in sizes:
            cost += model.term(tuple(range(top,top-n,-1)))
            top -= n
        if best_cost is None or cost < best_cost:
            best, best_cost = sizes, cost

    schedule = Schedule.from_sizes(best)
    return SearchReport(schedule,best_cost,count,oracle_cost=best_cost)

def bubble_fill(schedule, profile):
    """
    Add the longest top-layer prefix to each iteration's synchronization
    that does not lengthen the iteration.

    Parameters:
    -----------
    schedule : Schedule (existing fill sets are recomputed)
    profile  : ModelProfile

    Returns:
    --------
    Schedule with the same sets and new supplemental sets
    """
    model = _model(profile)
    schedule.check(model.nlayers)
    L = model.nlayers
    fills = []
    for members in schedule.sets:
        target = model.term(members)
        lowest = members[0]+1 if members else 1
        fill = ()
        for l in range(L,lowest-1,-1):
            prefix = tuple(range(L,l-1,-1))
            if model.term(prefix+members) > target: break
            fill = prefix
        fills.append(fill)
    filled = schedule.with_supplemental(fills)
    logger.debug("Bubble fill: %s"%filled)
    return filled

############################################################
# Text format

_SIZE = re.compile(r'^H=(\d+) L=(\d+)$')
_LINE = re.compile(r'^h=(\d+): sync=\[([0-9,]*)\] fill=\[([0-9,]*)\]$')

def _join(layers):
    return ','.join(str(l) for l in layers)

def _split(text):
    return [int(t) for t in text.split(',')] if text else []

def format_schedule(schedule):
    """ Render a schedule in the text format. """
    lines = [HEADER,'H=%i L=%i'%(schedule.period,schedule.nlayers)]
    for h,(members,fill) in enumerate(zip(schedule.sets,schedule.supplemental),1):
        lines.append('h=%i: sync=[%s] fill=[%s]'%(h,_join(members),_join(fill)))
    return '\n'.join(lines)+'\n'

def parse_schedule(lines):
    """ Parse the lines of a schedule file into a Schedule. """
    lines = [l.rstrip('\r\n') for l in lines if l.strip()]
    if not lines or lines[0] != HEADER:
        msg = "Missing header %r"%HEADER
        raise ScheduleError(msg)
    match = _SIZE.match(lines[1]) if len(lines) > 1 else None
    if match is None:
        raise ScheduleError("Line 2: expected 'H=<int> L=<int>'")
    H, L = int(match.group(1)), int(match.group(2))
    if len(lines) != H+2:
        msg = "Expected %i iteration lines, found %i"%(H,len(lines)-2)
        raise ScheduleError(msg)
    sets, fills = [], []
    for h,line in enumerate(lines[2:],1):
        match = _LINE.match(line)
        if match is None or int(match.group(1)) != h:
            msg = "Line %i: expected 'h=%i: sync=[...] fill=[...]'"%(h+2,h)
            raise ScheduleError(msg)
        sets.append(_split(match.group(2)))
        fills.append(_split(match.group(3)))
    schedule = Schedule(sets,fills)
    schedule.check(L)
    return schedule

def load_schedule(path):
    """ Load and validate a schedule file. """
    logger.debug("Reading %s..."%path)
    lines = fileio.read_lines(path)
    try:
        return parse_schedule(lines)
    except ScheduleError as e:
        raise ScheduleError("%s: %s"%(path,e))

def save_schedule(schedule, path):
    """ Write a schedule in the text format. """
    fileio.write_text(path,format_schedule(schedule))
