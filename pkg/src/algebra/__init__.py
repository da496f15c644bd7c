"""
S-sum algebra: quasi-shuffle products, S/Z conversion, synchronization, MZVs
"""
from .mzv import MZVTable, default_table, reduce_infinity
from .ssum import (
    basis_s, conv_s_to_z, conv_z_to_s, convert_sums, evaluate_at_integer,
    shuffle_product, synchronize_offset,
)
