"""Exact arithmetic of quadratic orders.

Subpackages cover integer utilities (`intarith`), discriminant bookkeeping
(`orders`), continued fractions and fundamental units (`cfrac`), binary
quadratic form class groups (`forms`), genus theory and parity predicates
(`genus`), cross-order relations (`relations`), and the scan harness
(`search`).  The ``ugo`` command line tool lives in `cli`.
"""

__version__ = "0.1.0"
