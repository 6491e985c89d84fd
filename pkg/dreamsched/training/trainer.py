"""
Simulated multi-worker local SGD with layer-wise partial synchronization.

Every worker takes a local SGD step on the full model each iteration. In
`partial` mode the layer blocks of L_h (plus the fill set F_h) are then
replaced on every worker by their across-worker mean at iteration phase h;
`full` mode averages the whole model every H iterations and `ssgd` averages
gradients every iteration.
"""
import os
from collections import OrderedDict as odict

import numpy as np

from dreamsched.utils.logger import logger
from dreamsched.utils.config import Config, ConfigError
from dreamsched.utils import fileio
from dreamsched.config import TRAIN_CONFIG
from dreamsched.analysis.cost import Schedule, ScheduleError
from dreamsched.analysis.scheduler import load_schedule
from dreamsched.training.problem import stochastic_gradient

MODES = ('partial','full','ssgd')
LEARNING_RATES = ('decaying','constant')

class TrainerConfig(Config):
    """
    Configuration of a convergence run, merged over the packaged defaults.
    """
    _required = ['K','H','R','lr','seed','mode','schedule','dim','layers',
                 'mu','beta','sigma','log_stride']

    def __init__(self, config=None, default=TRAIN_CONFIG):
        super(TrainerConfig,self).__init__(config,default)

    def _validate(self):
        super(TrainerConfig,self)._validate()
        try:
            for key in ('K','H','R','dim','layers','log_stride','seed'):
                self[key] = int(self[key])
            for key in ('mu','beta','sigma'):
                self[key] = float(self[key])
        except (TypeError,ValueError) as e:
            msg = "Invalid %s: %s"%(key,self[key])
            raise ConfigError(msg)

        checks = [
            (self['K'] >= 1, "K must be >= 1"),
            (self['H'] >= 1, "H must be >= 1"),
            (self['R'] >= 0, "R must be >= 0"),
            (self['log_stride'] >= 1, "log_stride must be >= 1"),
            (1 <= self['layers'] <= self['dim'], "Need 1 <= layers <= dim"),
            (0 < self['mu'] <= self['beta'], "Need 0 < mu <= beta"),
            (self['sigma'] >= 0, "sigma must be >= 0"),
            (self['mode'] in MODES, "mode must be one of %s"%', '.join(MODES)),
            (self['lr'] in LEARNING_RATES,
             "lr must be one of %s"%', '.join(LEARNING_RATES)),
        ]
        for ok,msg in checks:
            if not ok: raise ConfigError(msg)

        if self['lr'] == 'constant' and not float(self.get('eta') or 0) > 0:
            raise ConfigError("Constant lr needs eta > 0")
        if self['lr'] == 'decaying' and self.get('a') is not None:
            floor = max(16*self.kappa,self['H'])
            if not float(self['a']) > floor:
                msg = "Shift a=%s must exceed max(16 kappa, H) = %s"%(self['a'],floor)
                raise ConfigError(msg)

    @property
    def kappa(self):
        return self['beta']/self['mu']

    @property
    def shift(self):
        """ Step-size shift a; max(16 kappa, H) + 1 unless configured. """
        if self.get('a') is not None: return float(self['a'])
        return max(16*self.kappa,self['H']) + 1.0

    def eta(self, r):
        """ Step size of 0-based iteration r. """
        if self['lr'] == 'constant': return float(self['eta'])
        return 4.0/(self['mu']*(self.shift + r))

def prefix_fill(schedule):
    """
    Attach to every iteration the longest prefix {L..l} disjoint from its
    set; what bubble_fill returns when communication is free.
    """
    L = schedule.nlayers
    fills = []
    for layers in schedule.sets:
        top = max(layers) if layers else 0
        fills.append(range(L,top,-1))
    return schedule.with_supplemental(fills)

def resolve_schedule(config, problem):
    """
    Schedule named by the `schedule` key: 'enp', 'enp+fill' or a schedule
    file. Returns None unless the mode is 'partial'.
    """
    if config['mode'] != 'partial': return None
    name = config['schedule']
    if isinstance(name, Schedule):
        schedule = name
    elif name == 'enp':
        schedule = Schedule.enp(problem.nlayers,config['H'])
    elif name == 'enp+fill':
        schedule = prefix_fill(Schedule.enp(problem.nlayers,config['H']))
    elif os.path.exists(str(name)):
        schedule = load_schedule(name)
    else:
        msg = "Unrecognized schedule: %s"%name
        raise ConfigError(msg)
    check_schedule(schedule,config,problem)
    return schedule

def check_schedule(schedule, config, problem):
    schedule.check(problem.nlayers)
    if schedule.period != config['H']:
        msg = "Schedule period %i differs from H=%i"%(schedule.period,config['H'])
        raise ScheduleError(msg)

def phase_masks(schedule, problem):
    """ Boolean coordinate mask of the blocks synchronized at each phase. """
    masks = []
    for h in range(1,schedule.period+1):
        mask = np.zeros(problem.dim,dtype=bool)
        for l in schedule.members(h):
            mask[problem.blocks[l-1]] = True
        masks.append(mask)
    return masks

class WorkerState(object):
    """ Model replica and noise stream of one worker. """

    def __init__(self, index, w, rng):
        self.index = index
        self.w = np.array(w,dtype=float)
        self.rng = rng
        self.grad_norm = 0.0

    def __repr__(self):
        return "%s(index=%i)"%(self.__class__.__name__,self.index)

    @classmethod
    def spawn(cls, K, w0, seed, identical=False):
        """
        K workers starting at w0.

        Independent streams are spawned from the seed; `identical` gives
        every worker the same stream.
        """
        if identical:
            rngs = [np.random.default_rng(np.random.SeedSequence(seed))
                    for k in range(K)]
        else:
            rngs = [np.random.default_rng(s)
                    for s in np.random.SeedSequence(seed).spawn(K)]
        return [cls(k,w0,rng) for k,rng in enumerate(rngs)]

def block_divergence(W, problem):
    """
    Per-block model divergence (1/K) sum_k ||w_bar - w_k||^2 of a (K, d)
    stack of worker models.
    """
    # Pairwise form: exactly zero when the workers agree on a block
    K = len(W)
    diffs = W[:,np.newaxis,:] - W[np.newaxis,:,:]
    return problem.block_sq_norms(diffs).sum(axis=(0,1))/(2.0*K**2)

def _average(workers, mask=None):
    # Mean over workers in index order; the same array is written to every
    # worker so synchronized coordinates are bit-identical.
    mean = np.mean(np.stack([w.w for w in workers]),axis=0)
    for w in workers:
        if mask is None: w.w = mean.copy()
        else: w.w[mask] = mean[mask]

def plsgd_step(workers, r, config, problem, schedule=None, masks=None):
    """
    One iteration of local SGD with layer-wise synchronization.

    Parameters:
    -----------
    workers  : list of WorkerState (updated in place)
    r        : 0-based iteration
    config   : TrainerConfig
    problem  : Problem
    schedule : Schedule for 'partial' mode
    masks    : precomputed phase_masks(schedule, problem)

    Returns:
    --------
    workers
    """
    eta = config.eta(r)
    mode = config['mode']
    grads = []
    for w in workers:
        g = stochastic_gradient(problem,w.w,w.rng)
        w.grad_norm = float(np.linalg.norm(g))
        grads.append(g)

    if mode == 'ssgd':
        step = eta*np.mean(np.stack(grads),axis=0)
        for w in workers: w.w = w.w - step
        return workers

    for w,g in zip(workers,grads):
        w.w = w.w - eta*g

    H = config['H']
    if mode == 'full':
        if (r+1) % H == 0: _average(workers)
        return workers

    if masks is None:
        if schedule is None:
            raise ScheduleError("Partial synchronization needs a schedule")
        check_schedule(schedule,config,problem)
        masks = phase_masks(schedule,problem)
    mask = masks[r % H]
    if mask.all(): _average(workers)
    elif mask.any(): _average(workers,mask)
    return workers

class DivergenceTrace(object):
    """
    Logged iterations of a run: model divergence per layer block, the
    divergence bound from the measured gradient norm, and suboptimality of
    the weighted average model.
    """

    def __init__(self, nlayers, period):
        self.nlayers = nlayers
        self.period = period
        self._rows = []
        self.G_meas = 0.0
        self.w_hat = None
        self.info = odict()

    def append(self, r, gamma_l, bound, subopt, eta, loss):
        self._rows.append((int(r),np.asarray(gamma_l,dtype=float),float(bound),
                           float(subopt),float(eta),float(loss)))

    def __len__(self):
        return len(self._rows)

    def _column(self, i):
        return np.array([row[i] for row in self._rows])

    @property
    def r(self): return self._column(0).astype(int)

    @property
    def gamma_l(self):
        return np.array([row[1] for row in self._rows]).reshape(-1,self.nlayers)

    @property
    def gamma(self): return self.gamma_l.sum(axis=1)

    @property
    def lemma2_bound(self): return self._column(2)

    @property
    def subopt(self): return self._column(3)

    @property
    def eta(self): return self._column(4)

    @property
    def loss(self):
        """ f(mean model) - f* at each logged iteration. """
        return self._column(5)

    @property
    def final_subopt(self):
        return self._rows[-1][3] if self._rows else np.nan

    def violations(self, slack=1.0):
        """ Logged iterations whose divergence exceeds slack x bound. """
        return self.r[self.gamma > slack*self.lemma2_bound]

    def to_array(self):
        names = ['r','gamma']+['gamma_l_%i'%l for l in range(1,self.nlayers+1)]
        names += ['lemma2_bound','subopt','eta']
        dtype = [('r',int)]+[(n,float) for n in names[1:]]
        data = np.zeros(len(self),dtype=dtype)
        data['r'] = self.r
        data['gamma'] = self.gamma
        for l in range(1,self.nlayers+1):
            data['gamma_l_%i'%l] = self.gamma_l[:,l-1]
        data['lemma2_bound'] = self.lemma2_bound
        data['subopt'] = self.subopt
        data['eta'] = self.eta
        return data

    def write(self, filename):
        fileio.write(filename,self.to_array())

    def summary(self):
        out = odict(self.info)
        out['iterations'] = int(self.r[-1]) if len(self) else 0
        out['mean_gamma'] = float(np.mean(self.gamma)) if len(self) else 0.0
        out['final_gamma'] = float(self.gamma[-1]) if len(self) else 0.0
        out['G_meas'] = self.G_meas
        out['lemma2_violations'] = int(len(self.violations()))
        out['subopt'] = self.final_subopt
        return out

    def format_summary(self):
        return ''.join('%s=%s\n'%(k,v) for k,v in self.summary().items())

def run_training(config, problem, schedule=None):
    """
    Run R iterations and trace the model divergence.

    Parameters:
    -----------
    config   : TrainerConfig (or anything it accepts)
    problem  : Problem
    schedule : Schedule overriding the config's `schedule` key

    Returns:
    --------
    DivergenceTrace
    """
    if not isinstance(config, TrainerConfig):
        config = TrainerConfig(config)
    if schedule is None:
        schedule = resolve_schedule(config,problem)
    elif config['mode'] == 'partial':
        check_schedule(schedule,config,problem)
    masks = phase_masks(schedule,problem) if schedule is not None else None

    K,H,R = config['K'],config['H'],config['R']
    stride = config['log_stride']
    a = config.shift
    workers = WorkerState.spawn(K,problem.w0,config['seed'],
                                config.get('identical_workers',False))
    trace = DivergenceTrace(problem.nlayers,H)
    trace.info['mode'] = config['mode']
    trace.info['schedule'] = str(schedule) if schedule is not None else '-'
    trace.info['K'],trace.info['H'],trace.info['R'] = K,H,R

    logger.info("Training %s: K=%i H=%i R=%i schedule %s"%(
        config['mode'],K,H,R,trace.info['schedule']))

    acc = np.zeros(problem.dim)
    weight = 0.0
    G = 0.0

    def record(r, eta):
        W = np.stack([w.w for w in workers])
        mean = W.mean(axis=0)
        gamma_l = block_divergence(W,problem)
        bound = 4*H**2*eta**2*G**2
        w_hat = acc/weight if weight > 0 else mean
        trace.append(r,gamma_l,bound,problem.loss(w_hat),eta,problem.loss(mean))

    record(0,config.eta(0))
    for r in range(R):
        p = (a + r)**2
        acc += p*np.mean(np.stack([w.w for w in workers]),axis=0)
        weight += p
        plsgd_step(workers,r,config,problem,schedule,masks)
        G = max(G,max(w.grad_norm for w in workers))
        if (r+1) % stride == 0 or r+1 == R:
            record(r+1,config.eta(r))

    trace.G_meas = G
    trace.w_hat = acc/weight if weight > 0 else problem.w0.copy()
    trace.info['theory_bound'] = theory_bound(problem,config,G)['total']
    logger.debug("Finished: subopt=%g G_meas=%g"%(trace.final_subopt,G))
    return trace

def theory_bound(problem, config, G):
    """
    Upper bound on E f(w_hat_R) - f* for decaying step sizes.

    Parameters:
    -----------
    problem : Problem
    config  : TrainerConfig
    G       : bound on the stochastic gradient norm

    Returns:
    --------
    terms : ordered dict with 'init', 'variance', 'divergence' and 'total'
    """
    R = config['R']
    if R < 1:
        return odict([('init',np.nan),('variance',np.nan),
                      ('divergence',np.nan),('total',np.nan)])
    a,H,K = config.shift,config['H'],config['K']
    mu,beta,sigma = problem.mu,problem.beta,problem.sigma
    S = float(np.sum((a + np.arange(R))**2))
    dist2 = float(np.sum((problem.w0 - problem.optimum)**2))
    terms = odict()
    terms['init'] = mu*a**3/(2*S)*dist2
    terms['variance'] = 4*R*(R + 2*a)/(mu*K*S)*sigma**2
    terms['divergence'] = 256*R/(mu**2*S)*G**2*H**2*beta
    terms['total'] = terms['init'] + terms['variance'] + terms['divergence']
    return terms
