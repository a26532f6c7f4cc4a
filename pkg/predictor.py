"""
Predicción del ancho de banda futuro de un enlace.

A partir de las tres últimas muestras (t_m, B_m) se calculan los coeficientes
de diferencias divididas

    alpha_k = sum_{m=0..k} B_m / prod_{n=0..k, n != m} (t_m - t_n)

y se evalúa el polinomio en forma de Newton

    B(t_p) = alpha_0 + alpha_1 (t_p - t_0) + alpha_2 (t_p - t_1)(t_p - t_0)

Con menos de tres muestras el polinomio se degrada a lineal o constante.
"""
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

from errors import DuplicateTimestampError, EmptyHistoryError, TimeInPastError
from network_model import BandwidthSample, History3


@dataclass(frozen=True)
class Coefficients:
    """Coeficientes del polinomio de Newton y sus anclas temporales"""
    alpha0: float
    alpha1: Optional[float] = None
    alpha2: Optional[float] = None
    t0: Optional[float] = None
    t1: Optional[float] = None

    @property
    def degree(self) -> int:
        if self.alpha2 is not None:
            return 2
        return 1 if self.alpha1 is not None else 0


def _samples(history) -> List[BandwidthSample]:
    """Acepta un History3 o una secuencia de muestras"""
    samples = list(history.samples if isinstance(history, History3) else history)
    if not samples:
        raise EmptyHistoryError("El historial no tiene muestras")
    for prev, cur in zip(samples, samples[1:]):
        if cur.t <= prev.t:
            raise DuplicateTimestampError(
                f"Los instantes del historial deben ser estrictamente crecientes ({prev.t}, {cur.t})"
            )
    return samples


def _divided_difference(samples: Sequence[BandwidthSample], k: int) -> float:
    """Diferencia dividida [B_0, ..., B_k] en forma de suma"""
    total = 0.0
    for m in range(k + 1):
        denom = 1.0
        for n in range(k + 1):
            if n != m:
                denom *= samples[m].t - samples[n].t
        total += samples[m].b / denom
    return total


def divided_coefficients(history) -> Coefficients:
    """
    Calcula los coeficientes alpha a partir del historial.

    Args:
        history: History3 (o secuencia de BandwidthSample) con 1 a 3 muestras.

    Returns:
        Coefficients: alpha0 siempre; alpha1 con 2 o más muestras; alpha2 con 3.

    Raises:
        EmptyHistoryError: Si no hay muestras.
        DuplicateTimestampError: Si los instantes no son estrictamente crecientes.
    """
    samples = _samples(history)[-3:]
    alpha0 = samples[0].b
    t0 = samples[0].t

    if len(samples) == 1:
        return Coefficients(alpha0=alpha0, t0=t0)

    alpha1 = _divided_difference(samples, 1)
    t1 = samples[1].t
    if len(samples) == 2:
        return Coefficients(alpha0=alpha0, alpha1=alpha1, t0=t0, t1=t1)

    alpha2 = _divided_difference(samples, 2)
    return Coefficients(alpha0=alpha0, alpha1=alpha1, alpha2=alpha2, t0=t0, t1=t1)


def evaluate_unclamped(coefficients: Coefficients, t_p: float) -> float:
    """Evalúa el polinomio de Newton en t_p sin recortar a cero"""
    value = coefficients.alpha0
    if coefficients.alpha1 is not None:
        value += coefficients.alpha1 * (t_p - coefficients.t0)
    if coefficients.alpha2 is not None:
        value += coefficients.alpha2 * (t_p - coefficients.t1) * (t_p - coefficients.t0)
    return value


def predict_bandwidth(history, t_p: float) -> float:
    """
    Predice el ancho de banda del enlace en el instante t_p.

    Args:
        history: History3 con al menos una muestra.
        t_p (float): Instante de predicción (ms), no anterior a la última muestra.

    Returns:
        float: Predicción recortada a max(B, 0).

    Raises:
        EmptyHistoryError: Si no hay muestras.
        TimeInPastError: Si t_p es anterior a la muestra más reciente.
    """
    samples = _samples(history)
    if not math.isfinite(t_p) or t_p < samples[-1].t:
        raise TimeInPastError(
            f"t_p={t_p} es anterior a la última muestra ({samples[-1].t})"
        )
    return max(evaluate_unclamped(divided_coefficients(samples), t_p), 0.0)
