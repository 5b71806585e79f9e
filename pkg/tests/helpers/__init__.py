"""
Test Helpers Package
"""

