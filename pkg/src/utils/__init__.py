"""
Shared utilities: structured run logging
"""
