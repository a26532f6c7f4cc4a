"""
Modelo de red: topología de disco unitario, procesos de ancho de banda por
enlace e historiales de las tres últimas muestras.

El ancho de banda de cada enlace es constante a trozos: cambia en instantes
separados por tiempos de permanencia exponenciales. Los enlaces son no
dirigidos y ambos extremos ven el mismo historial.
"""
import copy
import heapq
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

import networkx as nx
import numpy as np

from config import DEFAULT_LINK_CONFIG, require_non_negative, require_positive
from errors import (
    DuplicateTimestampError,
    InvalidParameterError,
    NoSuchLinkError,
    TimeRegressionError,
    UnknownNodeError,
)

logger = logging.getLogger(__name__)

NodeId = int
LinkKey = Tuple[NodeId, NodeId]

HISTORY_SIZE = 3


@dataclass(frozen=True)
class Point:
    """Posición de un nodo en metros"""
    x: float
    y: float

    def distance_to(self, other: "Point") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Topology:
    """
    Nodos con su posición, alcance de radio y área de despliegue.

    La adyacencia se calcula una sola vez al construir la topología:
    existe enlace (i, j) si y solo si i != j y la distancia euclídea es <= radio_radius.
    """
    nodes: Tuple[Tuple[NodeId, Point], ...]
    radio_radius: float
    area: Tuple[float, float]
    adjacency: Dict[NodeId, FrozenSet[NodeId]] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        require_positive("radio_radius", self.radio_radius)
        require_positive("ancho del área", self.area[0])
        require_positive("alto del área", self.area[1])

        ids = [node_id for node_id, _ in self.nodes]
        if ids != list(range(len(ids))):
            raise InvalidParameterError("Los identificadores de nodo deben ser 0..n-1 en orden")
        for node_id, p in self.nodes:
            if not (math.isfinite(p.x) and math.isfinite(p.y)):
                raise InvalidParameterError(f"Coordenadas no finitas para el nodo {node_id}")

        object.__setattr__(self, "adjacency", self._build_adjacency())

    def _build_adjacency(self) -> Dict[NodeId, FrozenSet[NodeId]]:
        """Calcula la relación de vecindad por distancias entre todos los pares"""
        n = len(self.nodes)
        if n == 0:
            return {}
        coords = np.array([[p.x, p.y] for _, p in self.nodes], dtype=float)
        dist = np.hypot(coords[:, None, 0] - coords[None, :, 0],
                        coords[:, None, 1] - coords[None, :, 1])
        within = dist <= self.radio_radius
        np.fill_diagonal(within, False)
        return {i: frozenset(np.flatnonzero(within[i]).tolist()) for i in range(n)}

    @property
    def size(self) -> int:
        return len(self.nodes)

    def position(self, u: NodeId) -> Point:
        """Devuelve la posición del nodo u"""
        check_node(self, u)
        return self.nodes[u][1]

    def links(self) -> List[LinkKey]:
        """Lista ordenada de enlaces no dirigidos (i < j)"""
        return [(i, j) for i in range(self.size) for j in sorted(self.adjacency[i]) if i < j]


@dataclass(frozen=True)
class BandwidthSample:
    """Observación de ancho de banda: instante (ms) y valor (MB/ms)"""
    t: float
    b: float


@dataclass
class History3:
    """Las últimas (como mucho tres) muestras de un enlace, en orden temporal estricto"""
    samples: List[BandwidthSample] = field(default_factory=list)

    def append(self, sample: BandwidthSample) -> None:
        """Añade una muestra, descartando la más antigua si ya había tres"""
        if not (math.isfinite(sample.t) and math.isfinite(sample.b)) or sample.t < 0 or sample.b < 0:
            raise InvalidParameterError(f"Muestra inválida: {sample}")
        if self.samples and sample.t <= self.samples[-1].t:
            raise DuplicateTimestampError(
                f"Instante {sample.t} no posterior a la última muestra ({self.samples[-1].t})"
            )
        self.samples.append(sample)
        if len(self.samples) > HISTORY_SIZE:
            del self.samples[0]

    @property
    def newest(self) -> Optional[BandwidthSample]:
        return self.samples[-1] if self.samples else None

    def __len__(self) -> int:
        return len(self.samples)

    @classmethod
    def from_pairs(cls, pairs: Sequence[Tuple[float, float]]) -> "History3":
        """Construye un historial a partir de pares (t, b)"""
        history = cls()
        for t, b in pairs:
            history.append(BandwidthSample(float(t), float(b)))
        return history


class DriftMode(str, Enum):
    RESAMPLE_UNIFORM = "resample-uniform"
    LINEAR_DRIFT = "linear-drift"
    STATIC = "static"


@dataclass(frozen=True)
class LinkProcessConfig:
    """Parámetros del proceso de ancho de banda de los enlaces"""
    b_min: float = DEFAULT_LINK_CONFIG['b_min']
    b_max: float = DEFAULT_LINK_CONFIG['b_max']
    mean_dwell: float = DEFAULT_LINK_CONFIG['mean_dwell']
    drift_mode: DriftMode = DriftMode(DEFAULT_LINK_CONFIG['drift_mode'])
    drift_step: float = DEFAULT_LINK_CONFIG['drift_step']

    def validate(self) -> "LinkProcessConfig":
        """
        Comprueba 0 <= b_min < b_max, mean_dwell > 0 y drift_step > 0.

        Raises:
            InvalidParameterError: Si algún parámetro está fuera de rango.
        """
        require_non_negative("b_min", self.b_min)
        require_positive("b_max", self.b_max)
        if not self.b_min < self.b_max:
            raise InvalidParameterError(
                f"Se requiere b_min < b_max (b_min={self.b_min}, b_max={self.b_max})"
            )
        require_positive("mean_dwell", self.mean_dwell)
        require_positive("drift_step", self.drift_step)
        if not isinstance(self.drift_mode, DriftMode):
            raise InvalidParameterError(f"drift_mode desconocido: {self.drift_mode!r}")
        return self

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LinkProcessConfig":
        """Crea la configuración desde un diccionario (p. ej. la sección link_config del YAML)"""
        merged = {**DEFAULT_LINK_CONFIG, **data}
        try:
            mode = DriftMode(merged['drift_mode'])
        except ValueError:
            raise InvalidParameterError(f"drift_mode desconocido: {merged['drift_mode']!r}")
        return cls(
            b_min=float(merged['b_min']),
            b_max=float(merged['b_max']),
            mean_dwell=float(merged['mean_dwell']),
            drift_mode=mode,
            drift_step=float(merged['drift_step']),
        ).validate()

    def to_dict(self) -> Dict[str, Any]:
        return {
            'b_min': self.b_min,
            'b_max': self.b_max,
            'mean_dwell': self.mean_dwell,
            'drift_mode': self.drift_mode.value,
            'drift_step': self.drift_step,
        }


@dataclass
class LinkState:
    """Estado dinámico de un enlace no dirigido"""
    current_bandwidth: float
    next_change_at: float
    history: History3
    drift_increment: float = 0.0  # Incremento con signo por cambio (solo linear-drift)


@dataclass
class NetworkState:
    """
    Topología más el estado de todos los enlaces y el reloj de simulación.

    Tiene un único dueño: se muta desde un solo hilo. Cada ensayo usa su propio estado.
    """
    topology: Topology
    config: LinkProcessConfig
    links: Dict[LinkKey, LinkState]
    clock: float
    rng: np.random.Generator
    events: List[Tuple[float, NodeId, NodeId]] = field(default_factory=list, repr=False)

    def clone(self) -> "NetworkState":
        """Copia independiente, incluido el generador aleatorio"""
        return copy.deepcopy(self)

    def snapshot(self) -> Dict[str, Any]:
        """Valor comparable con todo el estado observable"""
        return {
            'topology': self.topology,
            'config': self.config,
            'links': sorted(
                (key, link.current_bandwidth, link.next_change_at, tuple(link.history.samples),
                 link.drift_increment)
                for key, link in self.links.items()
            ),
            'clock': self.clock,
            'rng': self.rng.bit_generator.state,
        }


# --- Topología ---

def check_node(topology: Topology, u: NodeId) -> None:
    """Lanza UnknownNodeError si u no pertenece a la topología"""
    if not isinstance(u, (int, np.integer)) or isinstance(u, bool) or not 0 <= u < topology.size:
        raise UnknownNodeError(f"Nodo desconocido: {u!r}")


def link_key(u: NodeId, v: NodeId) -> LinkKey:
    """Clave canónica de un enlace no dirigido"""
    return (u, v) if u < v else (v, u)


def generate_topology(n: int, area: Tuple[float, float], radio_radius: float, seed: int) -> Topology:
    """
    Coloca n nodos uniformemente al azar en el área.

    Args:
        n (int): Número de nodos (>= 2).
        area (Tuple[float, float]): Ancho y alto en metros.
        radio_radius (float): Alcance de radio en metros.
        seed (int): Semilla; la misma semilla produce la misma topología.

    Returns:
        Topology: Topología generada.

    Raises:
        InvalidParameterError: Si n < 2 o alguna dimensión no es positiva.
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool) or n < 2:
        raise InvalidParameterError(f"Se necesitan al menos 2 nodos, se recibió: {n!r}")
    w = require_positive("ancho del área", area[0])
    h = require_positive("alto del área", area[1])
    require_positive("radio_radius", radio_radius)

    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, w, size=int(n))
    ys = rng.uniform(0.0, h, size=int(n))
    nodes = tuple((i, Point(float(xs[i]), float(ys[i]))) for i in range(int(n)))
    topology = Topology(nodes=nodes, radio_radius=float(radio_radius), area=(w, h))

    logger.debug(f"Topología generada: {n} nodos, {len(topology.links())} enlaces (semilla {seed})")
    return topology


def neighbors(topology: Topology, u: NodeId) -> Set[NodeId]:
    """Nodos dentro del alcance de radio de u, sin incluir a u"""
    check_node(topology, u)
    return set(topology.adjacency[u])


def graph(topology: Topology) -> nx.Graph:
    """Grafo de disco unitario como networkx.Graph (atributo 'pos' en cada nodo)"""
    g = nx.Graph()
    for node_id, p in topology.nodes:
        g.add_node(node_id, pos=(p.x, p.y))
    g.add_edges_from(topology.links())
    return g


# --- Procesos de enlace ---

def _next_change(rng: np.random.Generator, now: float, mean_dwell: float) -> float:
    """Siguiente instante de cambio, estrictamente posterior a now"""
    nxt = now + float(rng.exponential(mean_dwell))
    if nxt <= now:
        nxt = float(np.nextafter(now, math.inf))
    return nxt


def init_links(topology: Topology, config: LinkProcessConfig, seed: int) -> NetworkState:
    """
    Inicializa todos los enlaces de la topología.

    Cada enlace recibe un ancho de banda uniforme en [b_min, b_max], una primera
    muestra en t=0 y un primer cambio a un tiempo exponencial de media mean_dwell.
    En modo static los enlaces nunca cambian.

    Raises:
        InvalidParameterError: Si la configuración no es válida.
    """
    config.validate()
    rng = np.random.default_rng(seed)
    links: Dict[LinkKey, LinkState] = {}
    events: List[Tuple[float, NodeId, NodeId]] = []

    for u, v in topology.links():
        b = float(rng.uniform(config.b_min, config.b_max))
        history = History3()
        history.append(BandwidthSample(0.0, b))

        drift = 0.0
        if config.drift_mode is DriftMode.LINEAR_DRIFT:
            # Magnitud en (0, drift_step]
            magnitude = config.drift_step - float(rng.uniform(0.0, config.drift_step))
            drift = magnitude if rng.random() < 0.5 else -magnitude

        if config.drift_mode is DriftMode.STATIC:
            next_change = math.inf
        else:
            next_change = _next_change(rng, 0.0, config.mean_dwell)
            events.append((next_change, u, v))

        links[(u, v)] = LinkState(b, next_change, history, drift)

    heapq.heapify(events)
    logger.debug(f"Enlaces inicializados: {len(links)} ({config.drift_mode.value})")
    return NetworkState(topology, config, links, 0.0, rng, events)


def _new_bandwidth(state: NetworkState, link: LinkState) -> float:
    """Aplica la regla de cambio configurada a un enlace"""
    cfg = state.config
    if cfg.drift_mode is DriftMode.RESAMPLE_UNIFORM:
        return float(state.rng.uniform(cfg.b_min, cfg.b_max))

    b = link.current_bandwidth + link.drift_increment
    # Al tocar un límite se recorta y el enlace invierte su deriva
    if b >= cfg.b_max:
        b = cfg.b_max
        link.drift_increment = -abs(link.drift_increment)
    elif b <= cfg.b_min:
        b = cfg.b_min
        link.drift_increment = abs(link.drift_increment)
    return b


def advance_to(state: NetworkState, t: float) -> None:
    """
    Avanza el reloj hasta t procesando en orden temporal todos los cambios pendientes.

    Raises:
        TimeRegressionError: Si t es anterior al reloj actual.
    """
    if not math.isfinite(t) or t < state.clock:
        raise TimeRegressionError(f"No se puede avanzar a {t}: el reloj ya está en {state.clock}")

    processed = 0
    while state.events and state.events[0][0] <= t:
        when, u, v = heapq.heappop(state.events)
        link = state.links[(u, v)]
        if link.next_change_at != when:
            continue  # evento obsoleto de un enlace fijado con pin_link

        b = _new_bandwidth(state, link)
        link.history.append(BandwidthSample(when, b))
        link.current_bandwidth = b
        link.next_change_at = _next_change(state.rng, when, state.config.mean_dwell)
        heapq.heappush(state.events, (link.next_change_at, u, v))
        processed += 1

    state.clock = float(t)
    if processed:
        logger.debug(f"Reloj en {state.clock:.3f} ms tras {processed} cambios de enlace")


def link_state(state: NetworkState, u: NodeId, v: NodeId) -> LinkState:
    """
    Estado del enlace (u, v).

    Raises:
        UnknownNodeError: Si algún nodo no existe.
        NoSuchLinkError: Si los nodos no son vecinos.
    """
    check_node(state.topology, u)
    check_node(state.topology, v)
    link = state.links.get(link_key(u, v))
    if link is None:
        raise NoSuchLinkError(f"No existe enlace entre {u} y {v}")
    return link


def actual_bandwidth(state: NetworkState, u: NodeId, v: NodeId) -> float:
    """Ancho de banda real del enlace (u, v) en el reloj actual"""
    return link_state(state, u, v).current_bandwidth


def pin_link(state: NetworkState, u: NodeId, v: NodeId, samples: Sequence[Tuple[float, float]]) -> None:
    """
    Sustituye el historial de un enlace por muestras dadas y lo deja fijo.

    Se usa para escenarios guionizados: el ancho de banda actual pasa a ser el de
    la última muestra y el enlace ya no cambia.

    Raises:
        InvalidParameterError: Si no hay muestras, hay más de tres o alguna es posterior al reloj.
    """
    link = link_state(state, u, v)
    if not 1 <= len(samples) <= HISTORY_SIZE:
        raise InvalidParameterError(f"Se esperaban entre 1 y {HISTORY_SIZE} muestras, hay {len(samples)}")
    history = History3.from_pairs(samples)
    if history.newest.t > state.clock:
        raise InvalidParameterError(
            f"La última muestra ({history.newest.t}) es posterior al reloj ({state.clock})"
        )
    link.history = history
    link.current_bandwidth = history.newest.b
    link.next_change_at = math.inf
    link.drift_increment = 0.0
