"""
Minimum-Norm Adversarial Attacks on kNN
"""

__version__ = "1.0.0"
