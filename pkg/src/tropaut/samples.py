"""Built-in inputs: the unit interval and the length-4 circle with their
divisors and groups, plus the complete graph K4 and theta graphs."""

from __future__ import annotations

from pathlib import Path

from .formats import parse_divisor, parse_group, parse_model

INTERVAL = """\
# unit interval [x, y]
vertex x
vertex y
edge e x y 1
"""

CIRCLE4 = """\
# circle of length 4: x, p1, xp (antipodal to x), p2
edge a x p1 1
edge b p1 xp 1
edge c xp p2 1
edge d p2 x 1
"""

K4 = "".join(f"edge e{i}{j} v{i} v{j} 1\n" for i in range(4) for j in range(i + 1, 4))

THETA = """\
edge a u v 1
edge b u v 1
edge c u v 1
"""

THETA_123 = """\
edge a u v 1
edge b u v 2
edge c u v 3
"""

FILES = {
    "interval.graph": INTERVAL,
    "interval_point.div": "chip v:x 1\n",
    "interval_midpoint.div": "chip e:e@1/2 1\n",
    "interval_double_midpoint.div": "chip e:e@1/2 2\n",
    "interval_swap.group": "auto\n",
    "circle4.graph": CIRCLE4,
    "circle4_antipodal.div": "chip v:x 1\nchip v:xp 1\n",
    "circle4_rotation.group": "rotate 2\n",
    "circle4_reflection.group": "reflect v:x v:xp\n",
    "circle4_dihedral.group": "rotate 2\nreflect v:x v:xp\n",
    "k4.graph": K4,
    "theta.graph": THETA,
    "theta123.graph": THETA_123,
}


def write_examples(directory: str | Path) -> list[Path]:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    out = []
    for name, text in FILES.items():
        p = d / name
        p.write_text(text)
        out.append(p)
    return out


def interval():
    return parse_model(INTERVAL)


def circle4():
    return parse_model(CIRCLE4)


def k4():
    return parse_model(K4)


def theta():
    return parse_model(THETA)


def theta_123():
    return parse_model(THETA_123)


def load(graph: str, divisor: str | None = None, group: str | None = None):
    """Model, divisor and group from entries of :data:`FILES`."""
    m = parse_model(FILES[graph], graph)
    d = parse_divisor(m, FILES[divisor], divisor) if divisor else None
    g = parse_group(m, FILES[group], group) if group else None
    return m, d, g
