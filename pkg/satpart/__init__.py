"""
satpart - SAT partitioning, Monte Carlo runtime prediction and partitioned solving.
"""

__version__ = "1.0.0"
__author__ = "satpart developers"
