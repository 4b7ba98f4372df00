"""Resonant tunnelling through double barriers with complex potentials."""

from .delta import DeltaDoubleBarrier
from .errors import (DBarrierError, Divergence, DomainError, NotFoundError,
                     SingularInputError, SingularKinematicsError, SolverError)
from .physics import H2M0, EffectiveMass, h2m, kinematics
from .rect import RectDoubleBarrier

__version__ = "0.1.0"
