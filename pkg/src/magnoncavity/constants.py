"""Physical constants (CODATA 2018), SI units."""

HBAR = 1.054571817e-34  # reduced Planck constant [J s]
H_PLANCK = 6.62607015e-34  # Planck constant [J s], exact
MU0 = 1.25663706212e-6  # vacuum permeability [N A^-2]
C_LIGHT = 299792458.0  # speed of light in vacuum [m s^-1], exact
