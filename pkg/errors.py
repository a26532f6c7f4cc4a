"""
Excepciones del simulador.

Todas heredan de SimulationError, que a su vez es un ValueError. La línea de
comandos convierte cualquier SimulationError en código de salida 2.
"""


class SimulationError(ValueError):
    """Error base del simulador de reenvío."""


class InvalidParameterError(SimulationError):
    """Parámetro fuera de rango (número de nodos, área, radio, configuración de enlaces...)."""


class UnknownNodeError(SimulationError):
    """El identificador de nodo no existe en la topología."""


class TimeRegressionError(SimulationError):
    """Se pidió avanzar el reloj a un instante anterior al actual."""


class NoSuchLinkError(SimulationError):
    """No existe enlace entre los dos nodos indicados."""


class EmptyHistoryError(SimulationError):
    """El historial de ancho de banda no tiene muestras."""


class DuplicateTimestampError(SimulationError):
    """Dos muestras del historial comparten el mismo instante."""


class TimeInPastError(SimulationError):
    """El instante de predicción es anterior a la muestra más reciente."""


class DegeneratePairError(SimulationError):
    """Origen y destino están en la misma posición."""


class InvalidEndpointsError(SimulationError):
    """Origen y destino iguales o desconocidos en una ruta."""


class TopologyFormatError(SimulationError):
    """Archivo de topología mal formado."""


class ConfigError(SimulationError):
    """Archivo de configuración inválido."""


class EmitError(SimulationError):
    """Fallo al escribir resultados en el destino."""


class ResultsStoreError(SimulationError):
    """La base de resultados no se puede abrir o escribir."""
