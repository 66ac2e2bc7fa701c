"""Physical constants (CODATA 2018, SI units)."""

ELEMENTARY_CHARGE = 1.602176634e-19     # C
ELECTRON_MASS = 9.1093837015e-31        # kg
VACUUM_PERMITTIVITY = 8.8541878128e-12  # C^2 / (N m^2)
HBAR = 1.054571817e-34                  # J s
BOLTZMANN = 1.380649e-23                # J / K

EV = ELEMENTARY_CHARGE                  # 1 eV in J
