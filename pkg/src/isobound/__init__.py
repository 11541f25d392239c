"""Effective bounds for singular-modulus units in isogeny classes.

Subpackages are flat modules; import what you need:

    from isobound.halfplane import HPoint, reduce
    from isobound.modular import j_eval
"""

__version__ = "0.1.0"
