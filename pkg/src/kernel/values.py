"""
Exact values of nested sums at integer boundaries
"""
from typing import Sequence

import sympy


def nested_sum_value(upper: int, weights: Sequence[int], args: Sequence[sympy.Expr],
                     strict: bool = False) -> sympy.Expr:
    """
    S(upper; weights; args), or Z(...) when strict, by direct expansion.

    Depth 0 gives 1 for upper >= 1 (S) or upper >= 0 (Z), otherwise 0.
    """
    upper = int(upper)
    if not weights:
        lowest = 0 if strict else 1
        return sympy.Integer(1 if upper >= lowest else 0)
    if upper <= 0:
        return sympy.Integer(0)

    # inner[i] holds the value of the remaining inner sums at boundary i
    inner = [sympy.Integer(1)] * (upper + 1)
    for m, x in zip(reversed(weights), reversed(args)):
        x = sympy.sympify(x)
        level = [sympy.Integer(0)] * (upper + 1)
        running = sympy.Integer(0)
        for i in range(1, upper + 1):
            below = inner[i - 1] if strict else inner[i]
            running += x ** i * below / sympy.Integer(i) ** m
            level[i] = running
        inner = level
    return sympy.expand(inner[upper])
