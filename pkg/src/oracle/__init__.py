"""
Numeric ground truth: exact and high-precision evaluation, direct summation
"""
from .evaluate import Assignment, Evaluator, direct_sum, eval_numeric, eval_with_bound
