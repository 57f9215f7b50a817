"""Linear dependencies in Weyl-Heisenberg orbits of Zauner-eigenspace vectors."""

__version__ = "0.1.0"
