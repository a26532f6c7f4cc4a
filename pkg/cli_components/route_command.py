import sys
import json
import logging
from dataclasses import replace

from config import DEFAULT_EXPERIMENT_CONFIG, DEFAULT_ROUTE_OPTIONS, WARMUP_DWELLS
from experiment import trial_seeds
from forwarding import Outcome, RouteResult, RouterKind, route, write_trace
from network_model import DriftMode, LinkProcessConfig, advance_to, generate_topology, init_links
from topology_io import load_topology

logger = logging.getLogger(__name__)


class RouteCommand:
    """Subcomando route: encamina una carga entre dos nodos y muestra el resultado

    Salida (stdout):
        - Con --trace: un registro JSON por salto.
        - Con --explain: un registro JSON por decisión con todos los candidatos.
        - Sin ninguna de las dos: un registro JSON con el resumen de la ruta.

    Código de salida:
        0 si se entrega, 1 si termina en NoRoute o HopLimit.
    """

    name = "route"

    def register(self, subparsers) -> None:
        """Declara el subcomando y sus opciones"""
        parser = subparsers.add_parser(self.name, help="Encamina una carga entre dos nodos")
        source = parser.add_mutually_exclusive_group()
        source.add_argument("--topo", help="Archivo de topología")
        source.add_argument("--nodes", type=int, help="Generar una topología con este número de nodos")
        parser.add_argument("--seed", type=int, default=DEFAULT_ROUTE_OPTIONS['seed'],
                            help="Semilla de la topología generada y de los enlaces")
        parser.add_argument("--area", type=float, nargs=2, metavar=("ANCHO", "ALTO"),
                            default=DEFAULT_EXPERIMENT_CONFIG['area'])
        parser.add_argument("--radius", type=float, default=DEFAULT_EXPERIMENT_CONFIG['radio_radius'])
        parser.add_argument("--src", type=int, required=True, help="Nodo origen")
        parser.add_argument("--dst", type=int, required=True, help="Nodo destino")
        parser.add_argument("--router", choices=[r.value for r in RouterKind],
                            default=DEFAULT_ROUTE_OPTIONS['router'])
        parser.add_argument("--payload", type=float, default=DEFAULT_ROUTE_OPTIONS['payload'],
                            help="Carga útil en MB")
        parser.add_argument("--warmup", type=float, default=DEFAULT_ROUTE_OPTIONS['warmup'],
                            help="Calentamiento en ms (por defecto 50 x mean_dwell)")
        parser.add_argument("--link-mode", choices=[m.value for m in DriftMode],
                            default=LinkProcessConfig().drift_mode.value)
        parser.add_argument("--recompute-region", action="store_true",
                            default=DEFAULT_ROUTE_OPTIONS['recompute_region'],
                            help="Recalcular la región de reenvío en cada relevo")
        parser.add_argument("--max-hops", type=int, help="Límite de saltos (por defecto, número de nodos)")
        parser.add_argument("--trace", action="store_true", help="Escribir la traza salto a salto")
        parser.add_argument("--explain", action="store_true",
                            help="Escribir los candidatos evaluados en cada decisión")

    def _build_state(self, args):
        """Carga o genera la topología e inicializa y calienta los enlaces"""
        if args.topo:
            topology = load_topology(args.topo)
        else:
            n = args.nodes if args.nodes is not None else DEFAULT_ROUTE_OPTIONS['nodes']
            topology = generate_topology(n, tuple(args.area), args.radius, args.seed)

        link_config = replace(LinkProcessConfig(), drift_mode=DriftMode(args.link_mode)).validate()
        _, link_seed = trial_seeds(args.seed, topology.size, 0)
        state = init_links(topology, link_config, link_seed)

        warmup = args.warmup if args.warmup is not None else WARMUP_DWELLS * link_config.mean_dwell
        advance_to(state, warmup)
        return state

    def run(self, args) -> int:
        """Ejecuta la ruta y escribe la traza o la explicación"""
        state = self._build_state(args)
        result = route(
            state, args.src, args.dst, RouterKind(args.router), args.payload,
            max_hops=args.max_hops,
            recompute_region=args.recompute_region,
            explain=args.explain,
        )

        if args.explain:
            self._write_explain(result)
        if args.trace:
            write_trace(result, sys.stdout)
        if not (args.explain or args.trace):
            sys.stdout.write(json.dumps(self._summary(result)) + "\n")

        logger.info(
            f"Ruta {args.router} {args.src} -> {args.dst}: {result.outcome.value}, "
            f"{len(result.hops)} saltos, retardo {result.total_delay:.6g} ms"
        )
        return 0 if result.outcome is Outcome.DELIVERED else 1

    def _summary(self, result: RouteResult) -> dict:
        return {
            'source': result.source,
            'destination': result.destination,
            'outcome': result.outcome.value,
            'hops': len(result.hops),
            'total_delay_ms': result.total_delay,
            'path': result.path,
        }

    def _write_explain(self, result: RouteResult) -> None:
        """Un registro por decisión con (nodo, en región, última observación, predicción) por candidato"""
        for index, decision in enumerate(result.decisions):
            candidates = []
            for c in decision.candidates:
                coef = c.coefficients
                candidates.append({
                    'node': c.node,
                    'in_region': c.in_region,
                    'visited': c.visited,
                    'last_observed': c.last_observed,
                    'predicted': c.predicted,
                    'alpha0': coef.alpha0 if coef else None,
                    'alpha1': coef.alpha1 if coef else None,
                    'alpha2': coef.alpha2 if coef else None,
                })
            record = {
                'decision': index,
                'at': decision.at_node,
                'decided_at': decision.decided_at,
                'chosen': decision.chosen,
                'candidates': candidates,
            }
            sys.stdout.write(json.dumps(record) + "\n")
