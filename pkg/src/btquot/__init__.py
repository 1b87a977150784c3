"""Quaternionic groups acting on the Bruhat-Tits tree: quotients, harmonic cocycles,
overconvergent lifts, rigid analytic forms and equations of Shimura curves."""

__version__ = "0.1.0"

from .fundom import compute_fundamental_domain, genus_ogg  # noqa: E402
from .harmonic import HarmonicSpace, dim_formula  # noqa: E402
from .overconvergent import lift, plan  # noqa: E402
from .quatalg import bundled_fixture, load_order  # noqa: E402

__all__ = [
    "__version__",
    "bundled_fixture",
    "compute_fundamental_domain",
    "dim_formula",
    "genus_ogg",
    "HarmonicSpace",
    "lift",
    "load_order",
    "plan",
]
