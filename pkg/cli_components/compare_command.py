import sys
import logging

from experiment import prediction_advantage
from forwarding import RouterKind
from cli_components.sweep_command import load_experiment_config

logger = logging.getLogger(__name__)


class CompareCommand:
    """Subcomando compare: mide cuántas veces cada algoritmo voraz elige el mejor enlace real"""

    name = "compare"

    def register(self, subparsers) -> None:
        """Declara el subcomando y sus opciones"""
        parser = subparsers.add_parser(self.name, help="Compara predicción y última observación")
        parser.add_argument("--config", default="defaults",
                            help="Archivo YAML de configuración o 'defaults'")
        parser.add_argument("--nodes", type=int, default=100, help="Número de nodos por ensayo")
        parser.add_argument("--trials", type=int, default=100, help="Número de ensayos")

    def run(self, args) -> int:
        config = load_experiment_config(args.config)
        report = prediction_advantage(config, args.nodes, args.trials)

        # Una línea CSV por algoritmo
        sys.stdout.write("router,decisions,hits,hit_rate,delivered,mean_delay_ms\n")
        for router in (RouterKind.ML_FORWARDING, RouterKind.LAST_OBSERVED_GREEDY):
            a = report.results[router]
            hit_rate = "" if a.hit_rate is None else f"{a.hit_rate:.6g}"
            mean_delay = "" if a.mean_delay is None else f"{a.mean_delay:.6g}"
            sys.stdout.write(f"{router.value},{a.decisions},{a.hits},{hit_rate},{a.delivered},{mean_delay}\n")
        return 0
