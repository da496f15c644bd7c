"""
Nested-sum engine: S-sums, summation algorithms and epsilon expansions
"""
__version__ = "1.0.0"
