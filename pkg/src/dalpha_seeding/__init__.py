"""
dalpha-seeding: D^alpha seeding for k-means.

Centers are sampled with probability proportional to the alpha-th power of
the distance to the nearest chosen center; alpha = 2 is k-means++.
"""

__version__ = "0.1.0"
