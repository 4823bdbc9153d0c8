"""Physical constants in Gaussian (CGS) units."""

C_LIGHT = 2.99792458e10  # cm / s
HBAR = 1.054571817e-27  # erg s
K_B = 1.380649e-16  # erg / K
ALPHA = 1.0 / 137.035999084  # fine-structure constant, e^2 / (hbar c)

# 1 (Ohm cm)^-1 expressed as a Gaussian conductivity in s^-1.
SIGMA_SI_TO_CGS = 8.987551787e11
