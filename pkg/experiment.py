"""
Barrido de experimentos: para cada número de nodos y repetición genera una
topología, calienta los enlaces, elige origen y destino y encamina con cada
algoritmo sobre copias idénticas del estado.
"""
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import partial
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd

from config import (
    DEFAULT_EXPERIMENT_CONFIG,
    WARMUP_DWELLS,
    as_whole_number,
    env_int,
    load_config_file,
    merge_with_defaults,
    require_non_negative,
    require_positive,
)
from errors import ConfigError, EmitError, InvalidParameterError
from forwarding import Outcome, RouteResult, RouterKind, route
from network_model import (
    LinkProcessConfig,
    NetworkState,
    NodeId,
    Topology,
    advance_to,
    generate_topology,
    graph,
    init_links,
)

logger = logging.getLogger(__name__)

ROW_COLUMNS = ['router', 'n', 'rep', 'outcome', 'hops', 'delay_ms', 'speed_mb_per_ms']
SUMMARY_COLUMNS = ['router', 'n', 'mean_delay_ms', 'mean_speed_mb_per_ms', 'delivery_ratio']
FORMATS = ('csv', 'json-lines')


@dataclass(frozen=True)
class ExperimentConfig:
    node_counts: Tuple[int, ...] = tuple(DEFAULT_EXPERIMENT_CONFIG['node_counts'])
    area: Tuple[float, float] = tuple(DEFAULT_EXPERIMENT_CONFIG['area'])
    radio_radius: float = DEFAULT_EXPERIMENT_CONFIG['radio_radius']
    repetitions: int = DEFAULT_EXPERIMENT_CONFIG['repetitions']
    payload: float = DEFAULT_EXPERIMENT_CONFIG['payload']
    link_config: LinkProcessConfig = field(default_factory=LinkProcessConfig)
    warmup: Optional[float] = DEFAULT_EXPERIMENT_CONFIG['warmup']
    base_seed: int = DEFAULT_EXPERIMENT_CONFIG['base_seed']
    routers: Tuple[RouterKind, ...] = tuple(RouterKind(r) for r in DEFAULT_EXPERIMENT_CONFIG['routers'])

    @property
    def effective_warmup(self) -> float:
        """Calentamiento en ms; por defecto 50 veces el tiempo medio de permanencia"""
        if self.warmup is None:
            return WARMUP_DWELLS * self.link_config.mean_dwell
        return float(self.warmup)

    def validate(self) -> "ExperimentConfig":
        """
        Valida la configuración del barrido.

        Raises:
            InvalidParameterError: Si algún campo está fuera de rango.
        """
        if not self.node_counts:
            raise InvalidParameterError("node_counts no puede estar vacío")
        if any(not isinstance(n, int) or n < 2 for n in self.node_counts):
            raise InvalidParameterError(f"Cada número de nodos debe ser un entero >= 2: {self.node_counts}")
        if list(self.node_counts) != sorted(set(self.node_counts)):
            raise InvalidParameterError(f"node_counts debe ser estrictamente ascendente: {self.node_counts}")
        if len(self.area) != 2:
            raise InvalidParameterError(f"area debe tener dos dimensiones: {self.area}")
        require_positive("ancho del área", self.area[0])
        require_positive("alto del área", self.area[1])
        require_positive("radio_radius", self.radio_radius)
        if not isinstance(self.repetitions, int) or self.repetitions < 1:
            raise InvalidParameterError(f"repetitions debe ser >= 1: {self.repetitions!r}")
        require_positive("payload", self.payload)
        if self.warmup is not None:
            require_non_negative("warmup", self.warmup)
        if not isinstance(self.base_seed, int) or self.base_seed < 0:
            raise InvalidParameterError(f"base_seed debe ser un entero no negativo: {self.base_seed!r}")
        if not self.routers:
            raise InvalidParameterError("Se necesita al menos un algoritmo en routers")
        self.link_config.validate()
        return self

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        """
        Crea la configuración a partir de un diccionario con las claves del YAML.

        Raises:
            ConfigError: Si hay claves desconocidas o valores con tipo incorrecto.
        """
        defaults = {**DEFAULT_EXPERIMENT_CONFIG, 'base_seed': env_int("MESHSIM_BASE_SEED",
                                                                      DEFAULT_EXPERIMENT_CONFIG['base_seed'])}
        merged = merge_with_defaults(data, defaults, "experimento")
        link_data = merged['link_config'] or {}
        if not isinstance(link_data, dict):
            raise ConfigError("link_config debe ser un mapeo")
        merge_with_defaults(link_data, DEFAULT_EXPERIMENT_CONFIG['link_config'], "link_config")
        try:
            config = cls(
                node_counts=tuple(as_whole_number('node_counts', n) for n in merged['node_counts']),
                area=(float(merged['area'][0]), float(merged['area'][1])),
                radio_radius=float(merged['radio_radius']),
                repetitions=as_whole_number('repetitions', merged['repetitions']),
                payload=float(merged['payload']),
                link_config=LinkProcessConfig.from_dict(link_data),
                warmup=None if merged['warmup'] is None else float(merged['warmup']),
                base_seed=as_whole_number('base_seed', merged['base_seed']),
                routers=tuple(RouterKind(r) for r in merged['routers']),
            )
        except (TypeError, ValueError, IndexError) as e:
            if isinstance(e, InvalidParameterError):
                raise
            raise ConfigError(f"Configuración de experimento inválida: {e}")
        return config.validate()

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        """Carga la configuración desde un archivo YAML"""
        return cls.from_dict(load_config_file(path))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'node_counts': list(self.node_counts),
            'area': list(self.area),
            'radio_radius': self.radio_radius,
            'repetitions': self.repetitions,
            'payload': self.payload,
            'link_config': self.link_config.to_dict(),
            'warmup': self.warmup,
            'base_seed': self.base_seed,
            'routers': [r.value for r in self.routers],
        }


def default_config() -> ExperimentConfig:
    """Configuración por defecto (rejilla completa), con MESHSIM_BASE_SEED si está definida"""
    return ExperimentConfig.from_dict({})


@dataclass(frozen=True)
class TrialMetrics:
    router: RouterKind
    n: int
    rep: int
    delay: Optional[float]
    speed: Optional[float]
    hops: int
    outcome: Outcome

    @property
    def sort_key(self) -> Tuple[str, int, int]:
        return (self.router.value, self.n, self.rep)


@dataclass
class ExperimentTable:
    rows: List[TrialMetrics]
    aggregates: pd.DataFrame

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExperimentTable):
            return NotImplemented
        return self.rows == other.rows and self.aggregates.equals(other.aggregates)


@dataclass(frozen=True)
class TrialSetup:
    """Estado calentado y extremos elegidos para un (n, rep)"""
    state: NetworkState
    source: NodeId
    destination: NodeId


# --- Semillas y extremos ---

def trial_seeds(base_seed: int, n: int, rep: int) -> Tuple[int, int]:
    """Semillas de topología y de enlaces derivadas de (base_seed, n, rep)"""
    children = np.random.SeedSequence([base_seed, n, rep]).spawn(2)
    return tuple(int(child.generate_state(1, dtype=np.uint64)[0]) for child in children)


def _farthest_pair(topology: Topology, nodes: Sequence[NodeId]) -> Tuple[NodeId, NodeId]:
    """Par de nodos más alejado entre sí (primer máximo en orden de identificador)"""
    ordered = sorted(nodes)
    coords = np.array([[topology.position(u).x, topology.position(u).y] for u in ordered])
    dist = np.hypot(coords[:, None, 0] - coords[None, :, 0], coords[:, None, 1] - coords[None, :, 1])
    i, j = np.unravel_index(int(np.argmax(np.triu(dist, k=1))), dist.shape)
    if i == j:
        # Todas las posiciones coinciden
        return ordered[0], ordered[1]
    return ordered[int(i)], ordered[int(j)]


def select_endpoints(topology: Topology) -> Tuple[NodeId, NodeId]:
    """
    Elige origen y destino como el par conectado más alejado.

    Si la topología no es conexa se usa el par más alejado de la mayor componente conexa.
    """
    g = graph(topology)
    if nx.is_connected(g):
        return _farthest_pair(topology, list(g.nodes))

    largest = max(nx.connected_components(g), key=lambda c: (len(c), -min(c)))
    if len(largest) < 2:
        logger.warning("⚠️ Topología sin enlaces: se usa el par más alejado aunque no esté conectado")
        return _farthest_pair(topology, list(g.nodes))

    logger.info(
        f"Topología no conexa: se usa la mayor componente ({len(largest)} de {topology.size} nodos)"
    )
    return _farthest_pair(topology, list(largest))


# --- Ensayos ---

def prepare_trial(config: ExperimentConfig, n: int, rep: int) -> TrialSetup:
    """Genera la topología, inicializa y calienta los enlaces y elige los extremos"""
    if n < 2:
        raise InvalidParameterError(f"Se necesitan al menos 2 nodos, se recibió: {n}")
    topo_seed, link_seed = trial_seeds(config.base_seed, n, rep)
    topology = generate_topology(n, config.area, config.radio_radius, topo_seed)
    state = init_links(topology, config.link_config, link_seed)
    advance_to(state, config.effective_warmup)
    s, d = select_endpoints(topology)
    return TrialSetup(state, s, d)


def run_trial_routes(config: ExperimentConfig, n: int, rep: int) -> Dict[RouterKind, RouteResult]:
    """Encamina con cada algoritmo sobre una copia del mismo estado calentado"""
    setup = prepare_trial(config, n, rep)
    return {
        router: route(setup.state.clone(), setup.source, setup.destination, router, config.payload)
        for router in config.routers
    }


def metrics_from_route(router: RouterKind, n: int, rep: int, result: RouteResult,
                       payload: float) -> TrialMetrics:
    """Convierte una ruta en la fila de métricas del ensayo"""
    delay = speed = None
    if result.outcome is Outcome.DELIVERED:
        delay = result.total_delay
        speed = payload / delay
    return TrialMetrics(router, n, rep, delay, speed, len(result.hops), result.outcome)


def run_trial(config: ExperimentConfig, n: int, rep: int) -> List[TrialMetrics]:
    """
    Ejecuta un ensayo y devuelve una fila por algoritmo.

    Args:
        config (ExperimentConfig): Configuración del barrido.
        n (int): Número de nodos.
        rep (int): Índice de repetición.

    Returns:
        List[TrialMetrics]: Métricas en el orden de config.routers.
    """
    routes = run_trial_routes(config, n, rep)
    rows = [metrics_from_route(router, n, rep, result, config.payload) for router, result in routes.items()]
    logger.debug(f"Ensayo n={n} rep={rep}: " + ", ".join(f"{r.router.value}={r.outcome.value}" for r in rows))
    return rows


def _run_trial_task(config: ExperimentConfig, task: Tuple[int, int]) -> List[TrialMetrics]:
    n, rep = task
    return run_trial(config, n, rep)


def run_sweep(config: ExperimentConfig, workers: int = 1) -> ExperimentTable:
    """
    Recorre todos los pares (n, rep) y agrega los resultados.

    El resultado no depende del orden de ejecución: las filas se ordenan por
    (router, n, rep) antes de agregar.

    Args:
        config (ExperimentConfig): Configuración validada.
        workers (int): Procesos en paralelo (1 = secuencial).
    """
    config.validate()
    tasks = [(n, rep) for n in config.node_counts for rep in range(config.repetitions)]
    logger.info(f"🚀 Iniciando barrido: {len(tasks)} ensayos x {len(config.routers)} algoritmos")

    task_fn = partial(_run_trial_task, config)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(task_fn, tasks))
    else:
        batches = [task_fn(task) for task in tasks]

    rows = sorted((row for batch in batches for row in batch), key=lambda r: r.sort_key)
    table = ExperimentTable(rows=rows, aggregates=aggregate(rows))
    delivered = sum(1 for r in rows if r.outcome is Outcome.DELIVERED)
    logger.info(f"✅ Barrido completado: {len(rows)} filas, {delivered} entregas")
    return table


# --- Tablas ---

def rows_to_frame(rows: Sequence[TrialMetrics]) -> pd.DataFrame:
    """Filas de métricas como DataFrame ordenado por (router, n, rep)"""
    records = [{
        'router': r.router.value,
        'n': r.n,
        'rep': r.rep,
        'outcome': r.outcome.value,
        'hops': r.hops,
        'delay_ms': np.nan if r.delay is None else r.delay,
        'speed_mb_per_ms': np.nan if r.speed is None else r.speed,
    } for r in sorted(rows, key=lambda r: r.sort_key)]
    df = pd.DataFrame(records, columns=ROW_COLUMNS)
    return df.astype({'n': 'int64', 'rep': 'int64', 'hops': 'int64',
                      'delay_ms': 'float64', 'speed_mb_per_ms': 'float64'})


def aggregate(rows: Sequence[TrialMetrics]) -> pd.DataFrame:
    """
    Medias por (router, n) sobre los ensayos entregados, con la tasa de entrega.

    Los ensayos fallidos no cuentan para las medias de retardo y velocidad.
    """
    df = rows_to_frame(rows)
    if df.empty:
        return pd.DataFrame(columns=SUMMARY_COLUMNS)
    df['delivered'] = (df['outcome'] == Outcome.DELIVERED.value).astype(float)
    summary = (
        df.groupby(['router', 'n'], sort=True)
        .agg(mean_delay_ms=('delay_ms', 'mean'),
             mean_speed_mb_per_ms=('speed_mb_per_ms', 'mean'),
             delivery_ratio=('delivered', 'mean'))
        .reset_index()
    )
    return summary[SUMMARY_COLUMNS]


def _sig6(value: Any) -> Any:
    """Redondea floats a 6 cifras significativas; NaN pasa a None"""
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return None
        return float(f"{value:.6g}")
    if isinstance(value, np.integer):
        return int(value)
    return value


def _write_frame(df: pd.DataFrame, fmt: str, sink: TextIO) -> None:
    if fmt == 'csv':
        df.to_csv(sink, index=False, float_format='%.6g', lineterminator='\n')
    else:
        for record in df.to_dict(orient='records'):
            sink.write(json.dumps({k: _sig6(v) for k, v in record.items()}) + "\n")


def summary_path(path: Union[str, Path]) -> Path:
    """Ruta hermana para el resumen: resultados.csv -> resultados_summary.csv"""
    path = Path(path)
    return path.with_name(f"{path.stem}_summary{path.suffix}")


def emit_table(table: ExperimentTable, fmt: str, sink: Union[str, Path, TextIO],
               summary_sink: Optional[Union[str, Path, TextIO]] = None) -> None:
    """
    Escribe las filas y el resumen de la tabla.

    Args:
        table (ExperimentTable): Tabla a escribir.
        fmt (str): 'csv' o 'json-lines'.
        sink: Ruta o flujo de texto para las filas.
        summary_sink: Destino del resumen. Si sink es una ruta y no se indica,
            el resumen va a la ruta hermana `*_summary`.

    Raises:
        InvalidParameterError: Si el formato no es válido.
        EmitError: Si falla la escritura.
    """
    if fmt not in FORMATS:
        raise InvalidParameterError(f"Formato desconocido: {fmt!r} (válidos: {', '.join(FORMATS)})")

    if summary_sink is None and isinstance(sink, (str, Path)):
        summary_sink = summary_path(sink)

    outputs = [(rows_to_frame(table.rows), sink)]
    if summary_sink is not None:
        outputs.append((table.aggregates, summary_sink))

    try:
        for df, target in outputs:
            if isinstance(target, (str, Path)):
                with open(target, "w", encoding="utf-8", newline="") as f:
                    _write_frame(df, fmt, f)
                logger.info(f"📄 Resultados escritos en {target}")
            else:
                _write_frame(df, fmt, target)
    except OSError as e:
        raise EmitError(f"Error al escribir resultados: {e}")


def _row_from_record(record: Dict[str, Any]) -> TrialMetrics:
    def optional(value):
        return None if value is None or (isinstance(value, float) and math.isnan(value)) else float(value)

    return TrialMetrics(
        router=RouterKind(record['router']),
        n=int(record['n']),
        rep=int(record['rep']),
        delay=optional(record['delay_ms']),
        speed=optional(record['speed_mb_per_ms']),
        hops=int(record['hops']),
        outcome=Outcome(record['outcome']),
    )


def read_table(source: Union[str, Path, TextIO], fmt: str = 'csv') -> ExperimentTable:
    """Lee las filas escritas por emit_table y recalcula los agregados"""
    if fmt == 'csv':
        records = pd.read_csv(source).to_dict(orient='records')
    elif fmt == 'json-lines':
        if isinstance(source, (str, Path)):
            with open(source, "r", encoding="utf-8") as f:
                lines = f.read().splitlines()
        else:
            lines = source.read().splitlines()
        records = [json.loads(line) for line in lines if line.strip()]
    else:
        raise InvalidParameterError(f"Formato desconocido: {fmt!r}")
    rows = sorted((_row_from_record(r) for r in records), key=lambda r: r.sort_key)
    return ExperimentTable(rows=rows, aggregates=aggregate(rows))


# --- Ventaja de la predicción ---

@dataclass(frozen=True)
class RouterAdvantage:
    router: RouterKind
    decisions: int           # Saltos voraces (sin contar entregas directas)
    hits: int                # Saltos en los que se eligió el mejor enlace real
    delivered: int
    mean_delay: Optional[float]

    @property
    def hit_rate(self) -> Optional[float]:
        return self.hits / self.decisions if self.decisions else None


@dataclass(frozen=True)
class AdvantageReport:
    n: int
    trials: int
    results: Dict[RouterKind, RouterAdvantage]


def prediction_advantage(config: ExperimentConfig, n: int, trials: int) -> AdvantageReport:
    """
    Compara MlForwarding y LastObservedGreedy sobre ensayos con semilla.

    Para cada salto voraz se comprueba si el enlace elegido era el de mayor
    ancho de banda real entre los candidatos, y se promedia el retardo de las
    rutas entregadas.
    """
    greedy = (RouterKind.ML_FORWARDING, RouterKind.LAST_OBSERVED_GREEDY)
    config = replace(config, routers=greedy).validate()
    if trials < 1:
        raise InvalidParameterError(f"Se necesita al menos un ensayo: {trials}")

    hops = {r: [] for r in greedy}
    delays = {r: [] for r in greedy}
    for rep in range(trials):
        for router, result in run_trial_routes(config, n, rep).items():
            hops[router].extend(h for h in result.hops if h.hit is not None)
            if result.outcome is Outcome.DELIVERED:
                delays[router].append(result.total_delay)

    results = {
        r: RouterAdvantage(
            router=r,
            decisions=len(hops[r]),
            hits=sum(1 for h in hops[r] if h.hit),
            delivered=len(delays[r]),
            mean_delay=float(np.mean(delays[r])) if delays[r] else None,
        )
        for r in greedy
    }
    logger.info(
        "📊 Ventaja de la predicción: " + ", ".join(
            f"{r.value} aciertos={a.hit_rate} retardo medio={a.mean_delay}" for r, a in results.items()
        )
    )
    return AdvantageReport(n=n, trials=trials, results=results)
