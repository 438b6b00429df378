"""
femforge: symbolic-numeric finite element assembly on a simulated GPU.
"""
__version__ = "0.1.0"
