"""
Truncated Laurent series in ep and the expansion of ep-dependent factors
"""
from .eps_series import EpsSeries
from .gamma import (
    expand_den, expand_expr, expand_gamma_neg, expand_gamma_pos, expand_ms_bar_gamma,
    expand_pow_eps, expand_term, has_eps_content, normalize_gamma, peel_for_expansion,
)
