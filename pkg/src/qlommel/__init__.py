"""q-Lommel polynomials and the Nevanlinna parametrization of their moment problem."""

__version__ = "0.1.0"
