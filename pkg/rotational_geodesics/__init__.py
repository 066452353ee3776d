"""Rotational Geodesics - Geometry of rotational surfaces in E_2^4

Curvature of the hyperbolic and elliptic surfaces of rotation S14, S23 and
S56, geodesics of the 3-submanifolds they sweep, and the Clairaut-type
constants and energy relations along them.
"""

__version__ = "0.1.0"
