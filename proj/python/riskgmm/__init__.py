"""Risk-averse generalized momentum methods.

Thin re-export of the compiled ``_riskgmm`` extension. Parameters are
``GmmParams(alpha, beta, gamma)``; structured results come back as dicts.
"""

from ._riskgmm import *  # noqa: F401,F403
from ._riskgmm import InfeasibleError, GmmParams, __doc__  # noqa: F401
