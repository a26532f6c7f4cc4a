"""
Órdenes de la línea de comandos.

Este paquete contiene una clase por subcomando:
- TopologyCommand: genera y guarda topologías (gen-topo)
- RouteCommand: encamina una carga y muestra su traza (route)
- SweepCommand: ejecuta el barrido de experimentos (sweep)
- CompareCommand: compara la predicción con la última observación (compare)
"""

from .topology_command import TopologyCommand
from .route_command import RouteCommand
from .sweep_command import SweepCommand
from .compare_command import CompareCommand

__all__ = ['TopologyCommand', 'RouteCommand', 'SweepCommand', 'CompareCommand']
