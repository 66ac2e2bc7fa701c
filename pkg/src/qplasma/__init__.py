"""1D electrostatic quantum-plasma toolkit: parameter calculus, linear
dispersion theory, and kinetic / wavefunction / fluid solvers on periodic
boxes in normalized units."""

__version__ = "0.1.0"
