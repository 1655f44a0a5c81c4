"""Orientations of supersingular curves and quaternion order embeddings.

The quaternion side (orders in B_{p,oo}, HNF profiles, the Cornacchia-based
embedding search and its rerandomized driver) works up to cryptographic-size
primes.  The curve side (isogeny walks, oriented tree search, decision
oracles) is exact but desk-scale: it refuses p > 2^12 by default.
"""

__version__ = "0.1.0"
