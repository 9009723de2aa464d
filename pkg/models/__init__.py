# Models package: geometry of the curved spaces and the equilibrium criterion
from models.equilibria import EquilibriumRecord, MassVector
from models.geometry import PolarConfiguration, SpaceSpec

__all__ = ['EquilibriumRecord', 'MassVector', 'PolarConfiguration', 'SpaceSpec']
