"""
Side-by-side simulation of the four training modes.
"""
from collections import OrderedDict as odict

from dreamsched.utils.logger import logger
from dreamsched.analysis.scheduler import schedule_dfs, bubble_fill
from dreamsched.simulation.simulator import simulate_run, MODES

class ModeComparison(object):
    """
    Makespans of every mode on one profile.

    Attributes:
    -----------
    timelines : ordered dict of mode -> Timeline
    schedule  : the filled schedule used for plsgd
    """

    def __init__(self, timelines, schedule):
        self.timelines = timelines
        self.schedule = schedule

    def makespan(self, mode):
        return self.timelines[mode].makespan

    def avg_iteration(self, mode):
        return self.timelines[mode].avg_iteration

    @property
    def S1(self):
        """ Speedup of plsgd over wfbp. """
        return self.makespan('wfbp')/self.makespan('plsgd')

    @property
    def S2(self):
        """ Speedup of plsgd over flsgd. """
        return self.makespan('flsgd')/self.makespan('plsgd')

    def ordered(self, rtol=1e-9):
        """ plsgd <= flsgd <= ssgd and plsgd <= wfbp, up to rtol. """
        m = dict((k,v.makespan) for k,v in self.timelines.items())
        le = lambda a,b: m[a] <= m[b]*(1+rtol)
        return le('plsgd','flsgd') and le('flsgd','ssgd') and le('plsgd','wfbp')

    def __str__(self):
        return format_comparison(self)

def compare_modes(profile, H, R):
    """
    Simulate ssgd, wfbp, flsgd and plsgd on the same profile.

    Parameters:
    -----------
    profile : ModelProfile
    H       : synchronization period (flsgd and the plsgd schedule)
    R       : number of iterations

    Returns:
    --------
    ModeComparison
    """
    report = schedule_dfs(profile,H)
    schedule = bubble_fill(report.best,profile)
    logger.debug("plsgd schedule: %s"%schedule)

    timelines = odict()
    for mode in MODES:
        kwargs = dict(schedule=schedule) if mode == 'plsgd' else dict(H=H)
        timelines[mode] = simulate_run(profile,mode,R=R,**kwargs)

    comparison = ModeComparison(timelines,schedule)
    if not comparison.ordered():
        msg = "Unexpected mode ordering on %s (H=%s, R=%s): "%(profile.label,H,R)
        msg += ', '.join('%s=%r'%(k,v.makespan) for k,v in timelines.items())
        logger.warning(msg)
    return comparison

def format_comparison(comparison):
    """ Tab-separated mode table followed by the speedup lines. """
    lines = ['mode\tmakespan_s\tavg_iter_s']
    for mode,timeline in comparison.timelines.items():
        lines.append('%s\t%r\t%r'%(mode,float(timeline.makespan),
                                   float(timeline.avg_iteration)))
    lines.append('S1=%r'%float(comparison.S1))
    lines.append('S2=%r'%float(comparison.S2))
    return '\n'.join(lines)+'\n'
