import math

import numpy as np
import pytest

from errors import DegeneratePairError
from geometry import HALF_ANGLE, angle_between, forwarding_region, in_region
from network_model import Point


def test_region_points_towards_destination():
    region = forwarding_region(Point(0, 0), Point(10, 0))
    assert region.apex == Point(0, 0)
    assert region.direction == pytest.approx((1.0, 0.0))
    assert region.half_angle == HALF_ANGLE

    region = forwarding_region(Point(3, 4), Point(3, 9))
    assert region.direction == pytest.approx((0.0, 1.0))


def test_degenerate_pair():
    with pytest.raises(DegeneratePairError):
        forwarding_region(Point(2, 2), Point(2, 2))


@pytest.mark.parametrize("p, expected", [
    ((5, 0), True),
    ((-5, 0), False),
    ((0, 10), False),
    ((5, 5), True),
    ((5, -5), True),
    ((5, 5.01), False),
    ((0, 0), False),
])
def test_in_region_examples(p, expected):
    region = forwarding_region(Point(0, 0), Point(10, 0))
    assert in_region(region, Point(*p)) is expected


def test_apex_has_no_angle():
    region = forwarding_region(Point(1, 1), Point(4, 5))
    assert angle_between(region, Point(1, 1)) is None
    assert angle_between(region, Point(4, 5)) == pytest.approx(0.0, abs=1e-12)


def test_destination_is_always_in_its_region():
    rng = np.random.default_rng(11)
    for _ in range(10_000):
        s, d = rng.uniform(0, 100, (2, 2))
        if np.allclose(s, d):
            continue
        region = forwarding_region(Point(*s), Point(*d))
        assert in_region(region, Point(*d))


def test_region_covers_a_quarter_of_the_circle():
    rng = np.random.default_rng(12)
    s = Point(50.0, 50.0)
    region = forwarding_region(s, Point(80.0, 65.0))
    theta = rng.uniform(0, 2 * math.pi, 1_000_000)
    xs = s.x + np.cos(theta)
    ys = s.y + np.sin(theta)
    inside = sum(in_region(region, Point(float(x), float(y))) for x, y in zip(xs, ys))
    assert abs(inside / len(theta) - 0.25) <= 0.01


def _rotate(p, angle, center):
    c, s = math.cos(angle), math.sin(angle)
    x, y = p[0] - center[0], p[1] - center[1]
    return (center[0] + c * x - s * y, center[1] + s * x + c * y)


def _away_from_boundary(s, d, p):
    region = forwarding_region(Point(*s), Point(*d))
    angle = angle_between(region, Point(*p))
    return angle is not None and abs(angle - HALF_ANGLE) > 1e-6


def test_rotation_preserves_membership():
    rng = np.random.default_rng(13)
    checked = 0
    while checked < 2_000:
        s, d, p, center = (tuple(v) for v in rng.uniform(-50, 50, (4, 2)))
        if not _away_from_boundary(s, d, p):
            continue
        angle = float(rng.uniform(0, 2 * math.pi))
        before = in_region(forwarding_region(Point(*s), Point(*d)), Point(*p))
        rs, rd, rp = (_rotate(v, angle, center) for v in (s, d, p))
        after = in_region(forwarding_region(Point(*rs), Point(*rd)), Point(*rp))
        assert before == after
        checked += 1


def test_scaling_about_apex_preserves_membership():
    rng = np.random.default_rng(14)
    checked = 0
    while checked < 2_000:
        s, d, p = (tuple(v) for v in rng.uniform(-50, 50, (3, 2)))
        if not _away_from_boundary(s, d, p):
            continue
        lam = float(rng.uniform(0.01, 100))
        scale = lambda v: (s[0] + lam * (v[0] - s[0]), s[1] + lam * (v[1] - s[1]))
        before = in_region(forwarding_region(Point(*s), Point(*d)), Point(*p))
        after = in_region(forwarding_region(Point(*s), Point(*scale(d))), Point(*scale(p)))
        assert before == after
        checked += 1
