"""
Test `saturnet` package.
"""
