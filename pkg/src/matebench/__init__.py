"""matebench: a workbench for matings of the basilica with quadratics
inside the rational family a/(z^2 + 2z)."""

__version__ = "0.1.0"
