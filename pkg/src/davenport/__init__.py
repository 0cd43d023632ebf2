"""Zero-sum invariants of finite abelian groups: exact search, closed-form
bounds, and products of smooth integers that are perfect powers."""

from .bounds import (A3_PROVEN, BoundReport, alon_dubiner_c, corollary_bound, d_star,
                     derive_a3, log_upper_bound, main_bound, verify_a3_derivation)
from .group import (GroupDescriptor, InvalidInput, ReachState, canonicalize, find_zero_sum,
                    parse_group)
from .search import (Budget, BudgetExhausted, InvariantResult, exact_davenport, exact_dm,
                     exact_eta, exact_s, has_m_disjoint_zero_sums)
from .smooth import FactorBase, NotSmooth, factor_over_base, find_power_product, guarantee_length

__all__ = [
    "A3_PROVEN", "BoundReport", "Budget", "BudgetExhausted", "FactorBase", "GroupDescriptor",
    "InvalidInput", "InvariantResult", "NotSmooth", "ReachState", "alon_dubiner_c",
    "canonicalize", "corollary_bound", "d_star", "derive_a3", "exact_davenport", "exact_dm",
    "exact_eta", "exact_s", "factor_over_base", "find_power_product", "find_zero_sum",
    "guarantee_length", "has_m_disjoint_zero_sums", "log_upper_bound", "main_bound",
    "parse_group", "verify_a3_derivation",
]
