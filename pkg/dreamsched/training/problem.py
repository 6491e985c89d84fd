"""
Synthetic strongly convex problems for the convergence experiments.

The objective is the diagonal quadratic

    f(w) = 1/2 sum_i lambda_i (w_i - w*_i)^2,   f* = 0,

with eigenvalues lambda_i spread evenly over [mu, beta]. The coordinates are
split into L contiguous blocks standing in for model layers (block 1 is
layer 1).
"""
import numpy as np

from dreamsched.utils.logger import logger

class Problem(object):
    """
    Diagonal quadratic with additive Gaussian gradient noise.

    Parameters:
    -----------
    curvature   : per-coordinate eigenvalues lambda_i
    optimum     : minimizer w*
    block_sizes : sizes of the L contiguous layer blocks
    sigma       : gradient-noise standard deviation (total over coordinates)
    w0          : common starting point (default w*)
    """

    def __init__(self, curvature, optimum, block_sizes, sigma=0.0, w0=None):
        self.curvature = np.asarray(curvature,dtype=float)
        self.optimum = np.asarray(optimum,dtype=float)
        self.block_sizes = [int(n) for n in block_sizes]
        self.sigma = float(sigma)
        self.w0 = self.optimum.copy() if w0 is None else np.asarray(w0,dtype=float)
        self._validate()

        edges = np.cumsum([0]+self.block_sizes)
        self.blocks = [slice(lo,hi) for lo,hi in zip(edges[:-1],edges[1:])]
        self._starts = edges[:-1]

    def _validate(self):
        d = self.dim
        if self.optimum.shape != (d,) or self.w0.shape != (d,):
            msg = "Dimension mismatch: curvature %s, optimum %s, w0 %s"%(
                self.curvature.shape,self.optimum.shape,self.w0.shape)
            raise ValueError(msg)
        if not np.all(self.curvature > 0):
            msg = "Curvature must be positive"
            raise ValueError(msg)
        if min(self.block_sizes) < 1 or sum(self.block_sizes) != d:
            msg = "Block sizes %s must be positive and sum to %i"%(
                self.block_sizes,d)
            raise ValueError(msg)
        if self.sigma < 0:
            msg = "Noise sigma must be >= 0: %s"%self.sigma
            raise ValueError(msg)

    @property
    def dim(self): return len(self.curvature)

    @property
    def nlayers(self): return len(self.block_sizes)

    @property
    def mu(self): return float(self.curvature.min())

    @property
    def beta(self): return float(self.curvature.max())

    @property
    def kappa(self): return self.beta/self.mu

    def loss(self, w):
        """ Suboptimality f(w) - f*. """
        delta = np.asarray(w) - self.optimum
        return 0.5*float(np.dot(self.curvature*delta,delta))

    def gradient(self, w):
        return self.curvature*(np.asarray(w) - self.optimum)

    def block_sq_norms(self, x):
        """ Squared norm of x restricted to each layer block. """
        return np.add.reduceat(np.square(x),self._starts,axis=-1)

    def __repr__(self):
        return "%s(dim=%i, L=%i, mu=%r, beta=%r, sigma=%r)"%(
            self.__class__.__name__,self.dim,self.nlayers,self.mu,self.beta,
            self.sigma)

    @classmethod
    def quadratic(cls, dim, layers, mu=1.0, beta=1.0, sigma=0.0, seed=0,
                  init_distance=1.0):
        """
        Random diagonal quadratic.

        Parameters:
        -----------
        dim           : number of coordinates d
        layers        : number of layer blocks L (<= d), sizes differ by <= 1
        mu, beta      : eigenvalue range, 0 < mu <= beta
        sigma         : gradient-noise standard deviation
        seed          : seed for w* and the starting direction
        init_distance : ||w0 - w*||

        Returns:
        --------
        problem : Problem
        """
        dim,layers = int(dim),int(layers)
        if not 1 <= layers <= dim:
            msg = "Need 1 <= layers <= dim (layers=%s, dim=%s)"%(layers,dim)
            raise ValueError(msg)
        if not 0 < mu <= beta:
            msg = "Need 0 < mu <= beta (mu=%s, beta=%s)"%(mu,beta)
            raise ValueError(msg)
        rng = np.random.default_rng(seed)
        curvature = np.linspace(mu,beta,dim)
        optimum = rng.normal(size=dim)
        direction = rng.normal(size=dim)
        direction /= np.linalg.norm(direction)
        w0 = optimum + init_distance*direction
        sizes = [len(b) for b in np.array_split(np.arange(dim),layers)]
        logger.debug("Quadratic problem: d=%i, L=%i, kappa=%g"%(dim,layers,beta/mu))
        return cls(curvature,optimum,sizes,sigma,w0)

    @classmethod
    def from_config(cls, config):
        return cls.quadratic(config['dim'],config['layers'],config['mu'],
                             config['beta'],config['sigma'],
                             config.get('problem_seed',0),
                             config.get('init_distance',1.0))

def stochastic_gradient(problem, w, rng):
    """
    Exact gradient plus zero-mean Gaussian noise of total variance sigma^2.

    Parameters:
    -----------
    problem : Problem
    w       : point in R^d
    rng     : numpy Generator (advanced in place)

    Returns:
    --------
    g : gradient sample
    """
    w = np.asarray(w,dtype=float)
    if w.shape != (problem.dim,):
        msg = "Point has shape %s; expected (%i,)"%(w.shape,problem.dim)
        raise ValueError(msg)
    grad = problem.gradient(w)
    if problem.sigma > 0:
        grad = grad + rng.normal(0.0,problem.sigma/np.sqrt(problem.dim),
                                 size=problem.dim)
    return grad
