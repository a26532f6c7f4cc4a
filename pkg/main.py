import sys
import logging
import argparse
from typing import List, Optional

from config import setup_logging
from errors import SimulationError
from cli_components import CompareCommand, RouteCommand, SweepCommand, TopologyCommand

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass

logger = logging.getLogger(__name__)

# Subcomandos disponibles, en el orden en que aparecen en la ayuda
COMMANDS = [TopologyCommand(), RouteCommand(), SweepCommand(), CompareCommand()]


def build_parser() -> argparse.ArgumentParser:
    """Construye el parser con un subparser por orden"""
    parser = argparse.ArgumentParser(
        prog="meshsim",
        description="Simulador de reenvío voraz con predicción de ancho de banda en redes mesh inalámbricas",
    )
    parser.add_argument("--log-level", default=None,
                        help="Nivel de logging (por defecto MESHSIM_LOG_LEVEL o INFO)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Punto de entrada de la línea de comandos.

    Returns:
        int: 0 si todo fue bien, 1 si la ruta no se entregó, 2 ante errores de uso o configuración.
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse ya escribió el diagnóstico en stderr
        return 0 if e.code in (0, None) else 2

    setup_logging(args.log_level)

    # Diccionario que mapea cada subcomando con su manejador
    handlers = {command.name: command.run for command in COMMANDS}
    try:
        return handlers[args.command](args)
    except SimulationError as e:
        logger.error(f"❌ {e}")
        return 2


# Punto de entrada del programa
if __name__ == "__main__":
    sys.exit(main())
