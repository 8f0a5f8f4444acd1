"""Finite rings, bimultiplications, crossed bimodules and strict 2-rings.

The package is organised bottom-up: exact linear algebra (ablin), finite
ring tables (rings), bimultiplications (bimult), translation structures
between rings (crossed), the associated strict 2-ring (anncat), sections
and the reduction to cocycle data (transport), the low-degree cohomology
fragment (cohomology), and singular extensions classified by it
(extensions).  On top sit the built-in instance set (corpus), plain-text
table formats (fileio) and the command line front end (cli).
"""

__version__ = "0.1.0"
