"""Physical constants (SI, CODATA 2018)."""

C_LIGHT = 299792458.0          # vacuum speed of light, m/s
HBAR = 1.054571817e-34         # reduced Planck constant, J s
EPSILON_0 = 8.8541878128e-12   # vacuum permittivity, F/m
