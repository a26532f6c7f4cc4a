from pathlib import Path
import os
import sys
import math
import logging
from typing import Any, Dict, Optional

import yaml

from errors import ConfigError, InvalidParameterError

# Parámetros por defecto de los procesos de enlace (MB/ms y ms)
DEFAULT_LINK_CONFIG = {
    'b_min': 1.0,                 # Ancho de banda mínimo de un enlace
    'b_max': 10.0,                # Ancho de banda máximo de un enlace
    'mean_dwell': 20.0,           # Tiempo medio entre cambios de ancho de banda
    'drift_mode': 'linear-drift', # resample-uniform | linear-drift | static
    'drift_step': 1.0,            # Magnitud máxima del incremento por cambio (linear-drift)
}

# Parámetros por defecto del barrido de experimentos (rejilla de la evaluación)
DEFAULT_EXPERIMENT_CONFIG = {
    'node_counts': list(range(100, 301, 25)),  # 100, 125, ..., 300
    'area': [100.0, 100.0],                    # Área de despliegue en metros
    'radio_radius': 15.0,                      # Alcance de radio en metros
    'repetitions': 10,                         # Repeticiones por número de nodos
    'payload': 10.0,                           # Carga útil en MB
    'warmup': None,                            # None => 50 x mean_dwell
    'base_seed': 2024,                         # Semilla base del barrido
    'routers': ['ml-forwarding', 'last-observed-greedy', 'min-hop'],
    'link_config': dict(DEFAULT_LINK_CONFIG),
}

# Opciones por defecto de la orden `route`
DEFAULT_ROUTE_OPTIONS = {
    'nodes': 100,
    'seed': 7,
    'router': 'ml-forwarding',
    'payload': 10.0,
    'warmup': None,
    'recompute_region': False,
}

# Múltiplo de mean_dwell usado como calentamiento cuando no se indica otro
WARMUP_DWELLS = 50

LOG_FORMAT = '%(asctime)s - %(levelname)s - %(message)s'

# --- Funciones de utilidad ---

def setup_logging(level: Optional[str] = None) -> None:
    """
    Configura el logging del proceso.

    Los mensajes siempre van a stderr; stdout queda reservado para datos.

    Args:
        level (str): Nivel de logging. Si es None se toma de MESHSIM_LOG_LEVEL.
    """
    level_name = (level or os.getenv("MESHSIM_LOG_LEVEL", "INFO")).upper()
    logging.basicConfig(
        level=getattr(logging, level_name, logging.INFO),
        format=LOG_FORMAT,
        stream=sys.stderr
    )


def env_int(name: str, default: int) -> int:
    """Lee un entero de una variable de entorno, con valor por defecto si falta o no es válido"""
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"La variable {name} debe ser un entero, se recibió: {value!r}")


def as_whole_number(name: str, value: Any) -> int:
    """
    Convierte a entero sin truncar: 3 y 3.0 se aceptan, 1.7 no.

    Raises:
        ValueError: Si el valor no representa un número entero.
        TypeError: Si el valor no es numérico.
    """
    if isinstance(value, bool):
        raise TypeError(f"{name} debe ser un número entero, se recibió: {value!r}")
    if isinstance(value, int):
        return value
    number = float(value)
    if not number.is_integer():
        raise ValueError(f"{name} debe ser un número entero, se recibió: {value!r}")
    return int(number)


def require_positive(name: str, value: float) -> float:
    """
    Valida que un parámetro numérico sea finito y estrictamente positivo.

    Raises:
        InvalidParameterError: Si el valor no es finito o es <= 0.
    """
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
        raise InvalidParameterError(f"{name} debe ser un número positivo, se recibió: {value!r}")
    return float(value)


def require_non_negative(name: str, value: float) -> float:
    """Valida que un parámetro numérico sea finito y >= 0"""
    if not isinstance(value, (int, float)) or not math.isfinite(value) or value < 0:
        raise InvalidParameterError(f"{name} debe ser un número no negativo, se recibió: {value!r}")
    return float(value)


def load_config_file(path: str) -> Dict[str, Any]:
    """
    Carga un archivo de configuración YAML como diccionario.

    Args:
        path (str): Ruta del archivo.

    Returns:
        Dict[str, Any]: Contenido del archivo (vacío si el archivo está vacío).

    Raises:
        ConfigError: Si el archivo no existe, no es YAML válido o no es un mapeo.
    """
    config_path = Path(path)
    if not config_path.exists():
        raise ConfigError(f"Archivo de configuración no encontrado: {path}")

    try:
        with open(config_path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigError(f"Error al leer la configuración {path}: {e}")

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"La configuración {path} debe ser un mapeo clave-valor")
    return data


def merge_with_defaults(data: Dict[str, Any], defaults: Dict[str, Any], section: str) -> Dict[str, Any]:
    """
    Combina un diccionario con sus valores por defecto, rechazando claves desconocidas.

    Raises:
        ConfigError: Si aparece una clave que no existe en los valores por defecto.
    """
    unknown = sorted(set(data) - set(defaults))
    if unknown:
        raise ConfigError(f"Claves desconocidas en '{section}': {', '.join(unknown)}")
    return {**defaults, **data}
