"""
Región de reenvío: el cono de 90 grados con vértice en el origen s y bisectriz
en la dirección s -> d.

Girar sd 45 grados a cada lado y quedarse con el cuadrante que contiene a d es
lo mismo que exigir que el ángulo entre (p - s) y (d - s) sea como mucho 45 grados,
así que se usa directamente esa prueba angular.
"""
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from errors import DegeneratePairError
from network_model import Point

HALF_ANGLE = math.pi / 4
ANGLE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ForwardingRegion:
    apex: Point
    direction: Tuple[float, float]  # vector unitario hacia el destino
    half_angle: float = HALF_ANGLE


def forwarding_region(s_pos: Point, d_pos: Point) -> ForwardingRegion:
    """
    Construye la región de reenvío desde s hacia d.

    Raises:
        DegeneratePairError: Si s y d coinciden.
    """
    dx = d_pos.x - s_pos.x
    dy = d_pos.y - s_pos.y
    norm = math.hypot(dx, dy)
    if norm == 0.0:
        raise DegeneratePairError(f"Origen y destino coinciden en {s_pos}")
    return ForwardingRegion(apex=s_pos, direction=(dx / norm, dy / norm))


def angle_between(region: ForwardingRegion, p: Point) -> Optional[float]:
    """Ángulo (radianes) entre p - vértice y la dirección de la región; None si p es el vértice"""
    vx = p.x - region.apex.x
    vy = p.y - region.apex.y
    if vx == 0.0 and vy == 0.0:
        return None
    ux, uy = region.direction
    return abs(math.atan2(ux * vy - uy * vx, ux * vx + uy * vy))


def in_region(region: ForwardingRegion, p: Point) -> bool:
    """True si p está en el cono (bordes incluidos); el vértice queda fuera"""
    angle = angle_between(region, p)
    return angle is not None and angle <= region.half_angle + ANGLE_TOLERANCE
