"""driftplan: mission planning for multi-debris collection in LEO.

Selects which debris to deorbit and in which order, connecting them with
drift-orbit transfers that trade mission time for propellant, under a
global mission-duration limit.  The combinatorial search runs on a
successively re-linearized mixed-binary model solved by branch and
bound on top of a bounded-variable simplex.
"""

__version__ = "0.1.0"

from .orbital import Constants, OrbitalElements  # noqa: F401
from .transfer import DriftSide, TransferSolution  # noqa: F401
