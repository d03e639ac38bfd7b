"""Standard sieve panels shared by the sieve tests and the acceptance suite."""
from functools import lru_cache

from qfeuclid.sieve import build_panel
from qfeuclid.survey import CContext

PANEL_X = 60
PANEL_Q = 50

# (d, C spec, n)
REAL_PANELS = [(2, "unit", 1), (10, "gen", 1), (10, "gen", 2)]
IMAG_PANELS = [(-5, "gen", 1), (-5, "gen", 2), (-15, "gen", 1), (-15, "gen", 2)]
STANDARD_PANELS = REAL_PANELS + IMAG_PANELS


@lru_cache(maxsize=None)
def panel(d, spec, n, X=PANEL_X, Q=PANEL_Q):
    ctx = CContext(d, spec)
    return build_panel(ctx.C, n, X, Q, ctx.G)
