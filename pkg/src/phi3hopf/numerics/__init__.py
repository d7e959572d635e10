"""Numeric evaluation of integrand DAGs and cutoff quadrature.

Hot kernels live in :mod:`phi3hopf.numerics.kernels` as numba-compiled tape
interpreters with a pure-numpy fallback; the backend is selected once per
process by the ``PHI3HOPF_BACKEND`` environment variable (``numba`` by
default, ``numpy`` to force the fallback).
"""

from .tape import Tape, compile_node
from .kernels import active_backend, evaluate_tape
from .quadrature import (
    RegulatorConfig,
    ball_mc_nodes,
    evaluate_integrand,
    integrate,
    product_grid,
    shell_mc_nodes,
    sphere_product_nodes,
)
from .fits import linear_log_fit, loglog_slope

__all__0 = None  # keep module namespace flat; no re-export policy needed
