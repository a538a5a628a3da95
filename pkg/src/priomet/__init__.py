"""priomet: prioritized metric data structures and embeddings.

Given a priority ranking of the points of a finite metric (or the vertices
of a weighted graph), the structures here trade worst-case guarantees for
per-rank ones: pairs containing a rank-j point get stretch/distortion and
label size/dimension bounds that depend on j instead of n.
"""

__version__ = "0.1.0"
