"""
Services built on the summation engine
"""
