"""Physical constants (SI units)."""

import math

C0 = 299792458.0
"""Vacuum speed of light, m/s."""

EPS0 = 8.854187817e-12
"""Vacuum permittivity, F/m."""

MU0 = 4.0e-7 * math.pi
"""Vacuum permeability, H/m."""

ETA0 = math.sqrt(MU0 / EPS0)
"""Vacuum wave impedance, ohms."""

SQRT3 = math.sqrt(3.0)
