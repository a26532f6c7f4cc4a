"""
Lectura y escritura de archivos de topología.

Formato (YAML, también acepta JSON):

    area: [100.0, 100.0]
    radio_radius: 15.0
    nodes:
    - [0, 12.5, 40.1]
    - [1, 80.0, 3.2]
"""
import logging
import math
from pathlib import Path
from typing import Any, Dict, Tuple, Union

import yaml

from config import as_whole_number
from errors import EmitError, InvalidParameterError, TopologyFormatError
from network_model import Point, Topology

logger = logging.getLogger(__name__)


def topology_to_dict(topology: Topology) -> Dict[str, Any]:
    return {
        'area': [float(topology.area[0]), float(topology.area[1])],
        'radio_radius': float(topology.radio_radius),
        'nodes': [[node_id, float(p.x), float(p.y)] for node_id, p in topology.nodes],
    }


def dump_topology(topology: Topology) -> str:
    """Serializa la topología; la misma topología produce siempre los mismos bytes"""
    return yaml.safe_dump(topology_to_dict(topology), sort_keys=False, default_flow_style=None)


def save_topology(topology: Topology, path: Union[str, Path]) -> None:
    """
    Guarda la topología en un archivo.

    Raises:
        EmitError: Si el archivo no se puede escribir.
    """
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(dump_topology(topology))
    except OSError as e:
        raise EmitError(f"No se pudo guardar la topología en {path}: {e}")
    logger.info(f"💾 Topología guardada en {path} ({topology.size} nodos)")


def _node_entry(entry: Any) -> Tuple[int, float, float]:
    if not isinstance(entry, (list, tuple)) or len(entry) != 3:
        raise ValueError(f"cada nodo debe ser [id, x, y], se recibió: {entry!r}")
    return as_whole_number("El identificador de nodo", entry[0]), float(entry[1]), float(entry[2])


def topology_from_dict(data: Any) -> Topology:
    """
    Construye una topología validando el documento.

    Raises:
        TopologyFormatError: Campos ausentes, identificadores duplicados o no
            consecutivos, o puntos fuera del área.
    """
    if not isinstance(data, dict):
        raise TopologyFormatError("El documento de topología debe ser un mapeo")
    missing = [k for k in ('area', 'radio_radius', 'nodes') if k not in data]
    if missing:
        raise TopologyFormatError(f"Faltan campos en la topología: {', '.join(missing)}")

    try:
        w, h = (float(v) for v in data['area'])
        radius = float(data['radio_radius'])
        entries = [_node_entry(e) for e in data['nodes']]
    except (TypeError, ValueError) as e:
        raise TopologyFormatError(f"Valores de topología inválidos: {e}")

    seen = set()
    for node_id, x, y in entries:
        if node_id in seen:
            raise TopologyFormatError(f"Identificador de nodo duplicado: {node_id}")
        seen.add(node_id)
        if not (math.isfinite(x) and math.isfinite(y)) or not (0 <= x <= w and 0 <= y <= h):
            raise TopologyFormatError(f"El nodo {node_id} ({x}, {y}) está fuera del área {w}x{h}")

    entries.sort()
    if [e[0] for e in entries] != list(range(len(entries))):
        raise TopologyFormatError("Los identificadores de nodo deben ser 0..n-1")

    try:
        return Topology(
            nodes=tuple((node_id, Point(x, y)) for node_id, x, y in entries),
            radio_radius=radius,
            area=(w, h),
        )
    except InvalidParameterError as e:
        raise TopologyFormatError(str(e))


def load_topology(path: Union[str, Path]) -> Topology:
    """Carga una topología desde un archivo"""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise TopologyFormatError(f"No se pudo leer la topología {path}: {e}")
    except yaml.YAMLError as e:
        raise TopologyFormatError(f"Topología mal formada en {path}: {e}")
    return topology_from_dict(data)
