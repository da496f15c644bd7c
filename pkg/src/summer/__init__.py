"""
Summation of nested sums into S-sums: algorithms A to D and the driver
"""
from .driver import SumSpec, Summer, alg_a, alg_b, alg_c, alg_d, do_sum, sum_pos_pow
from .polysums import power_sum
from .toolkit import flip_index, set_argument_simplifier, split_den
