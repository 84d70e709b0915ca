"""Finite-element lab for -eps u'' + u' = f and its 2D analogue.

Modules: ``mesh`` (meshes, quadrature, data functions), ``bubbles``,
``norms``, ``discretize`` (SL, SPLS and UPG in 1D), ``oracles``
(closed-form references) and ``upg2d``.  The ``cli`` subpackage runs
experiments from JSON configs.
"""

from .mesh import Mesh1D, NodalField1D, ScalarFn, make_mesh, interpolate
from .bubbles import make_exponential, make_quadratic, make_scaled_quadratic
from .discretize import ProblemSpec1D, SingularSystemError, solve
from .upg2d import assemble_2d, solve_2d_fast, solve_reduced_2d

__version__ = "0.1.0"
