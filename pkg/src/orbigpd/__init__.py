"""Finite orbifold translation groupoids, Hilsum-Skandalis maps and Bredon cohomology."""
from importlib import resources

from .errors import InputError, MathFailure, OrbiError

__version__ = "0.1.0"


def fixture_path(name: str):
    """Path of a bundled scenario, e.g. ``fixture_path("d2_circle.json")``."""
    return resources.files(__package__).joinpath("fixtures", name)


__all__ = ["InputError", "MathFailure", "OrbiError", "fixture_path", "__version__"]
