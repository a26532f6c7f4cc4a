"""
Reenvío salto a salto.

- MlForwarding: dentro de la región de reenvío elige el vecino con mayor ancho de
  banda predicho (polinomio de Newton sobre las tres últimas muestras).
- LastObservedGreedy: igual, pero puntúa con la última muestra observada.
- MinHop: camino más corto en saltos (BFS) sobre la adyacencia actual.

La región se calcula una vez en el origen y la reutilizan todos los relevos,
salvo que se pida recalcularla en cada salto.
"""
import json
import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Set, TextIO

import networkx as nx

from errors import InvalidEndpointsError, InvalidParameterError, UnknownNodeError
from geometry import ForwardingRegion, forwarding_region, in_region
from network_model import (
    NetworkState,
    NodeId,
    actual_bandwidth,
    advance_to,
    check_node,
    link_state,
    neighbors,
)
from predictor import Coefficients, divided_coefficients, predict_bandwidth

logger = logging.getLogger(__name__)


class RouterKind(str, Enum):
    ML_FORWARDING = "ml-forwarding"
    LAST_OBSERVED_GREEDY = "last-observed-greedy"
    MIN_HOP = "min-hop"


class Scorer(str, Enum):
    PREDICTED = "predicted"
    LAST_OBSERVED = "last-observed"


class Outcome(str, Enum):
    DELIVERED = "Delivered"
    NO_ROUTE = "NoRoute"
    HOP_LIMIT = "HopLimit"


SCORER_BY_ROUTER = {
    RouterKind.ML_FORWARDING: Scorer.PREDICTED,
    RouterKind.LAST_OBSERVED_GREEDY: Scorer.LAST_OBSERVED,
}


@dataclass(frozen=True)
class HopRecord:
    """Registro de auditoría de un salto"""
    from_node: NodeId
    to_node: NodeId
    decided_at: float
    predicted_bw: float
    actual_bw: float
    hop_delay: float
    best_actual_bw: Optional[float] = None  # Mejor ancho de banda real entre los candidatos

    @property
    def hit(self) -> Optional[bool]:
        """True si el enlace elegido era el mejor candidato real en el momento de decidir"""
        if self.best_actual_bw is None:
            return None
        return self.actual_bw >= self.best_actual_bw


@dataclass(frozen=True)
class CandidateScore:
    """Lo que el nodo actual sabe de uno de sus vecinos al decidir"""
    node: NodeId
    in_region: bool
    visited: bool
    current_bw: float
    last_observed: float
    predicted: float
    coefficients: Optional[Coefficients] = None

    @property
    def eligible(self) -> bool:
        # Un enlace con ancho de banda 0 está caído
        return self.in_region and not self.visited and self.current_bw > 0

    def score(self, scorer: Scorer) -> float:
        return self.predicted if scorer is Scorer.PREDICTED else self.last_observed


@dataclass(frozen=True)
class Decision:
    """Una decisión voraz: candidatos evaluados y vecino elegido"""
    at_node: NodeId
    decided_at: float
    candidates: List[CandidateScore]
    chosen: Optional[NodeId]


@dataclass
class RouteResult:
    source: NodeId
    destination: NodeId
    hops: List[HopRecord] = field(default_factory=list)
    outcome: Outcome = Outcome.NO_ROUTE
    decisions: List[Decision] = field(default_factory=list)

    @property
    def total_delay(self) -> float:
        return sum(hop.hop_delay for hop in self.hops)

    @property
    def path(self) -> List[NodeId]:
        if not self.hops:
            return [self.source]
        return [self.hops[0].from_node] + [hop.to_node for hop in self.hops]


def score_candidates(state: NetworkState, current: NodeId, region: ForwardingRegion,
                     visited: Set[NodeId]) -> List[CandidateScore]:
    """Evalúa todos los vecinos de current, ordenados por identificador"""
    topology = state.topology
    scores = []
    for node in sorted(neighbors(topology, current)):
        link = link_state(state, current, node)
        scores.append(CandidateScore(
            node=node,
            in_region=in_region(region, topology.position(node)),
            visited=node in visited,
            current_bw=link.current_bandwidth,
            last_observed=link.history.newest.b,
            predicted=predict_bandwidth(link.history, state.clock),
            coefficients=divided_coefficients(link.history),
        ))
    return scores


def best_candidate(candidates: Iterable[CandidateScore], scorer: Scorer) -> Optional[CandidateScore]:
    """Candidato elegible de mayor puntuación; empates por menor identificador"""
    eligible = [c for c in candidates if c.eligible]
    if not eligible:
        return None
    return min(eligible, key=lambda c: (-c.score(scorer), c.node))


def select_next_hop(state: NetworkState, current: NodeId, region: ForwardingRegion,
                    visited: Set[NodeId], scorer: Scorer) -> Optional[NodeId]:
    """
    Elige el siguiente salto entre los vecinos en la región y no visitados.

    Returns:
        Optional[NodeId]: Vecino de mayor puntuación o None si no hay candidatos.
    """
    best = best_candidate(score_candidates(state, current, region, visited), Scorer(scorer))
    return best.node if best else None


def _take_hop(state: NetworkState, u: NodeId, v: NodeId, payload: float,
              best_actual_bw: Optional[float] = None) -> HopRecord:
    """Transmite la carga por (u, v) y avanza el reloj el retardo del salto"""
    link = link_state(state, u, v)
    decided_at = state.clock
    actual = actual_bandwidth(state, u, v)
    hop = HopRecord(
        from_node=u,
        to_node=v,
        decided_at=decided_at,
        predicted_bw=predict_bandwidth(link.history, decided_at),
        actual_bw=actual,
        hop_delay=payload / actual,
        best_actual_bw=best_actual_bw,
    )
    advance_to(state, decided_at + hop.hop_delay)
    logger.debug(
        f"Salto {u} -> {v} en t={decided_at:.3f} ms: predicho {hop.predicted_bw:.4f}, "
        f"real {actual:.4f} MB/ms, retardo {hop.hop_delay:.4f} ms"
    )
    return hop


def _validate_endpoints(state: NetworkState, s: NodeId, d: NodeId, payload: float) -> None:
    try:
        check_node(state.topology, s)
        check_node(state.topology, d)
    except UnknownNodeError as e:
        raise InvalidEndpointsError(str(e))
    if s == d:
        raise InvalidEndpointsError(f"Origen y destino son el mismo nodo ({s})")
    if not payload > 0:
        raise InvalidParameterError(f"La carga útil debe ser positiva, se recibió: {payload!r}")


def route(state: NetworkState, s: NodeId, d: NodeId, kind: RouterKind, payload: float,
          max_hops: Optional[int] = None, recompute_region: bool = False,
          explain: bool = False) -> RouteResult:
    """
    Encamina una carga de s a d mutando el reloj del estado.

    Args:
        state (NetworkState): Estado de red (la ruta es su única dueña mientras dura).
        s, d (NodeId): Origen y destino.
        kind (RouterKind): Algoritmo de encaminamiento.
        payload (float): Carga útil en MB.
        max_hops (int): Límite de saltos; por defecto el número de nodos.
        recompute_region (bool): Recalcular la región desde cada relevo.
        explain (bool): Guardar cada decisión con todos sus candidatos.

    Returns:
        RouteResult: Saltos y resultado final (Delivered, NoRoute o HopLimit).

    Raises:
        InvalidEndpointsError: Si s == d o algún nodo no existe.
    """
    _validate_endpoints(state, s, d, payload)
    kind = RouterKind(kind)
    limit = state.topology.size if max_hops is None else int(max_hops)

    if kind is RouterKind.MIN_HOP:
        result = _route_min_hop(state, s, d, payload, limit)
    else:
        result = _route_greedy(state, s, d, SCORER_BY_ROUTER[kind], payload, limit,
                               recompute_region, explain)

    logger.debug(f"Ruta {kind.value} {s} -> {d}: {result.outcome.value}, {len(result.hops)} saltos")
    return result


def _route_greedy(state: NetworkState, s: NodeId, d: NodeId, scorer: Scorer, payload: float,
                  limit: int, recompute_region: bool, explain: bool) -> RouteResult:
    topology = state.topology
    result = RouteResult(source=s, destination=d)
    region: Optional[ForwardingRegion] = None
    visited: Set[NodeId] = set()
    current = s

    while True:
        if len(result.hops) >= limit:
            result.outcome = Outcome.HOP_LIMIT
            return result
        visited.add(current)

        # Entrega directa si el destino es vecino y su enlace está activo
        if d in neighbors(topology, current) and actual_bandwidth(state, current, d) > 0:
            result.hops.append(_take_hop(state, current, d, payload))
            result.outcome = Outcome.DELIVERED
            return result

        if region is None or recompute_region:
            region = forwarding_region(topology.position(current), topology.position(d))

        candidates = score_candidates(state, current, region, visited)
        best = best_candidate(candidates, scorer)
        if explain:
            result.decisions.append(Decision(current, state.clock, candidates,
                                             best.node if best else None))
        if best is None:
            result.outcome = Outcome.NO_ROUTE
            return result

        best_actual = max(c.current_bw for c in candidates if c.eligible)
        result.hops.append(_take_hop(state, current, best.node, payload, best_actual))
        current = best.node


def _route_min_hop(state: NetworkState, s: NodeId, d: NodeId, payload: float,
                   limit: int) -> RouteResult:
    result = RouteResult(source=s, destination=d)

    # BFS sobre los enlaces activos al comenzar la ruta
    active = nx.Graph()
    active.add_nodes_from(range(state.topology.size))
    active.add_edges_from(key for key, link in state.links.items() if link.current_bandwidth > 0)
    try:
        path = nx.shortest_path(active, s, d)
    except nx.NetworkXNoPath:
        result.outcome = Outcome.NO_ROUTE
        return result

    for u, v in zip(path, path[1:]):
        if len(result.hops) >= limit:
            result.outcome = Outcome.HOP_LIMIT
            return result
        if actual_bandwidth(state, u, v) <= 0:
            logger.warning(f"Enlace {u}-{v} caído durante la ruta de mínimo número de saltos")
            result.outcome = Outcome.NO_ROUTE
            return result
        result.hops.append(_take_hop(state, u, v, payload))

    result.outcome = Outcome.DELIVERED
    return result


# --- Traza de la ruta ---

TRACE_FIELDS = ('from', 'to', 'decided_at', 'predicted_bw', 'actual_bw', 'hop_delay')


def trace_records(result: RouteResult) -> List[Dict[str, Any]]:
    """Un diccionario por salto con los campos de la traza"""
    records = []
    for hop in result.hops:
        data = asdict(hop)
        records.append({
            'from': data['from_node'],
            'to': data['to_node'],
            'decided_at': data['decided_at'],
            'predicted_bw': data['predicted_bw'],
            'actual_bw': data['actual_bw'],
            'hop_delay': data['hop_delay'],
        })
    return records


def write_trace(result: RouteResult, sink: TextIO) -> None:
    """Escribe la traza en formato JSON por líneas"""
    for record in trace_records(result):
        sink.write(json.dumps(record) + "\n")
