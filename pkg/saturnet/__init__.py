"""
Construct shallow sigmoid networks that classify margin-separable data without errors.
"""


__version__ = '0.1.0'
