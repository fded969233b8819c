"""
sdwbound
Hartree-Fock upper bounds on spin-density-wave energies of the homogeneous electron gas
"""

__version__ = '1.0.0'

from .params import Deformation, constants, deformation
from .solver import solve
from .optimizer import optimize_epsilon, total_energy

__all__ = [
    'Deformation',
    'constants',
    'deformation',
    'solve',
    'optimize_epsilon',
    'total_energy',
]
