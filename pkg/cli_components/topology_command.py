import sys
import logging

from config import DEFAULT_EXPERIMENT_CONFIG
from network_model import generate_topology
from topology_io import dump_topology, save_topology

logger = logging.getLogger(__name__)


class TopologyCommand:
    """Subcomando gen-topo: genera una topología aleatoria de disco unitario"""

    name = "gen-topo"

    def register(self, subparsers) -> None:
        """Declara el subcomando y sus opciones"""
        parser = subparsers.add_parser(self.name, help="Genera una topología aleatoria")
        parser.add_argument("--nodes", type=int, required=True, help="Número de nodos (>= 2)")
        parser.add_argument("--area", type=float, nargs=2, metavar=("ANCHO", "ALTO"),
                            default=DEFAULT_EXPERIMENT_CONFIG['area'], help="Área en metros")
        parser.add_argument("--radius", type=float, default=DEFAULT_EXPERIMENT_CONFIG['radio_radius'],
                            help="Alcance de radio en metros")
        parser.add_argument("--seed", type=int, required=True, help="Semilla aleatoria")
        parser.add_argument("--out", help="Archivo de salida (por defecto stdout)")

    def run(self, args) -> int:
        """Genera la topología y la escribe en --out o en stdout"""
        topology = generate_topology(args.nodes, tuple(args.area), args.radius, args.seed)
        logger.info(f"Topología con {topology.size} nodos y {len(topology.links())} enlaces")

        if args.out:
            save_topology(topology, args.out)
        else:
            sys.stdout.write(dump_topology(topology))
        return 0
