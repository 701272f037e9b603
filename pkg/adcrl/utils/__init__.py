"""
Utilities package.
"""
