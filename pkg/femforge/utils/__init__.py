"""
Utility functions for femforge.
"""
