"""
Test suite for the nested-sum engine
"""
