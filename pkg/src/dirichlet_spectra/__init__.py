"""Spectral and potential theory of Dirichlet forms on weighted graphs.

Submodules
----------
graphs         weighted graphs, form matrices, Dirichlet restriction, JSON I/O
kernels        discretized jump kernels, lattices, confining potentials
potential      equilibrium potentials, capacity, hitting quantities, Kato constants
spectral       eigenvalues, semigroup norm bounds, Persson sweeps
stochastic     jump-process simulation and Monte Carlo estimators
perturbations  Schrodinger perturbations with a Kato-gated negative part
cli            the ``dspec`` command-line tool
"""

from .errors import *  # noqa: F401,F403
from .graphs import *  # noqa: F401,F403
from .kernels import *  # noqa: F401,F403
from .potential import *  # noqa: F401,F403
from .spectral import *  # noqa: F401,F403
from .stochastic import *  # noqa: F401,F403
from .perturbations import *  # noqa: F401,F403

__version__ = "0.1.0"
