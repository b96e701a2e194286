"""
Registry of reference-system builders and command handlers.
Provides registration and lookup by name for the CLI and the HTTP service.
"""
from typing import Any, Callable, Dict, List, Optional
import logging

from ofke.config import SystemSpec, default_grid_spec
from ofke.grid import Grid
from ofke.systems import (
    ReferenceSystem,
    box_fermions_1d,
    gaussian_3d,
    harmonic_fermions_1d,
    hydrogenic,
)

logger = logging.getLogger(__name__)

SystemBuilder = Callable[[SystemSpec, Grid], ReferenceSystem]


class Registry:
    """
    Registry for reference systems and commands.

    A system builder takes a SystemSpec and the grid to sample on and
    returns a ReferenceSystem. A command handler takes a RunConfig and returns
    a list of report records.
    """

    def __init__(self):
        """Initialize empty registry."""
        self._systems: Dict[str, SystemBuilder] = {}
        self._commands: Dict[str, Callable[..., Any]] = {}
        logger.info("Initialized Registry")

    def register_system(self, name: str, builder: SystemBuilder) -> None:
        """
        Register a reference-system builder.

        Args:
            name: Unique system name, as used by --system
            builder: Callable taking (SystemSpec, Grid)

        Raises:
            ValueError: If the system name is already registered
        """
        if name in self._systems:
            raise ValueError(f"System '{name}' is already registered")

        self._systems[name] = builder
        logger.info(f"Registered system: {name}")

    def get_system(self, name: str) -> SystemBuilder:
        """
        Retrieve a registered system builder.

        Raises:
            KeyError: If the system is not registered
        """
        if name not in self._systems:
            raise KeyError(f"System '{name}' not found in registry")

        return self._systems[name]

    def register_command(self, name: str, handler: Callable[..., Any]) -> None:
        """
        Register a command handler.

        Raises:
            ValueError: If the command name is already registered
        """
        if name in self._commands:
            raise ValueError(f"Command '{name}' is already registered")

        self._commands[name] = handler
        logger.info(f"Registered command: {name}")

    def get_command(self, name: str) -> Callable[..., Any]:
        """
        Retrieve a registered command handler.

        Raises:
            KeyError: If the command is not registered
        """
        if name not in self._commands:
            raise KeyError(f"Command '{name}' not found in registry")

        return self._commands[name]

    def build_system(
        self,
        spec: SystemSpec,
        grid: Optional[Grid] = None,
        grid_n: Optional[int] = None,
        grid_rmax: Optional[float] = None,
    ) -> ReferenceSystem:
        """
        Build ``spec`` on ``grid``, or on its default grid when none is given.
        """
        builder = self.get_system(spec.name)
        if grid is None:
            grid = default_grid_spec(spec, grid_n, grid_rmax).build()
        return builder(spec, grid)

    def list_systems(self) -> List[str]:
        return list(self._systems.keys())

    def list_commands(self) -> List[str]:
        return list(self._commands.keys())

    def has_system(self, name: str) -> bool:
        return name in self._systems

    def has_command(self, name: str) -> bool:
        return name in self._commands


def register_builtin_systems(registry: Registry) -> Registry:
    """Register hydrogen, gauss3d, box1d and harm1d."""
    registry.register_system("hydrogen", lambda spec, g: hydrogenic(spec.Z, g))
    registry.register_system("gauss3d", lambda spec, g: gaussian_3d(spec.omega, g))
    registry.register_system("box1d", lambda spec, g: box_fermions_1d(spec.N, spec.L, g))
    registry.register_system("harm1d", lambda spec, g: harmonic_fermions_1d(spec.N, g, spec.omega))
    return registry
