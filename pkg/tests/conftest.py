import pytest

from network_model import (
    DriftMode,
    LinkProcessConfig,
    Point,
    Topology,
    advance_to,
    init_links,
    pin_link,
)

STATIC = LinkProcessConfig(b_min=1.0, b_max=10.0, mean_dwell=20.0, drift_mode=DriftMode.STATIC)


def make_topology(points, radius, area=(100.0, 100.0)) -> Topology:
    """Topología a partir de una lista de coordenadas (x, y)"""
    return Topology(
        nodes=tuple((i, Point(float(x), float(y))) for i, (x, y) in enumerate(points)),
        radio_radius=float(radius),
        area=area,
    )


def make_static_state(points, radius, clock=0.0, seed=0):
    """Estado con enlaces fijos y el reloj en `clock`"""
    state = init_links(make_topology(points, radius), STATIC, seed)
    advance_to(state, clock)
    return state


@pytest.fixture
def line_state():
    """Línea 0-1-2-3 con todos los enlaces fijos a 4 MB/ms"""
    state = make_static_state([(0, 0), (10, 0), (20, 0), (30, 0)], radius=12)
    for u, v in [(0, 1), (1, 2), (2, 3)]:
        pin_link(state, u, v, [(0.0, 4.0)])
    return state


@pytest.fixture
def diamond_state():
    """
    Rombo s=0, a=1, b=2, d=3 con el reloj en t=3.

    s-a crece (2, 4, 6) y s-b decrece (9, 8, 7): la última observación favorece
    a b y la extrapolación favorece a a (8 frente a 6).
    """
    state = make_static_state([(0, 0), (10, 3), (10, -3), (20, 0)], radius=12, clock=3.0)
    pin_link(state, 0, 1, [(0.0, 2.0), (1.0, 4.0), (2.0, 6.0)])
    pin_link(state, 0, 2, [(0.0, 9.0), (1.0, 8.0), (2.0, 7.0)])
    for u, v in [(1, 2), (1, 3), (2, 3)]:
        pin_link(state, u, v, [(0.0, 5.0)])
    return state
