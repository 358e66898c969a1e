"""Hard resource budgets shared by every enumeration and contraction path.

All modules guard against runaway requests with the same constants so that a
budget error means the same thing everywhere.
"""
from __future__ import annotations

# Direct cube enumeration: at most this many (x, h_1, ..., h_s) tuples.
DIRECT_ENUMERATION_BUDGET = 10**9

# Raw exhaustive +-1 searches: at most 2**EXHAUSTIVE_SIGN_BITS assignments.
EXHAUSTIVE_SIGN_BITS = 24

# Sign vectors enumerated by the exact rank-one reduction at arity 2.
COLLAPSE_SIGN_BITS = 20

# Largest tensor (entry count) a lift or contraction may materialize.
TENSOR_ENTRY_BUDGET = 10**8

# Largest (x, h) tuple table the weak-norm machinery may build.
TUPLE_TABLE_BUDGET = 4 * 10**6

# Recursive U^m guard: |Z|**(m-2) Fourier base calls at most.
RECURSIVE_LEVEL_BUDGET = 4 * 10**6
