"""Geometry of the ``(1/p, s)`` diagram: arrows, index points, SVG and CSV.

An arrow joins ``(1/p, s)`` to ``(1/q, s)``.  Its length (the lost
integrability) is ``d / c`` where ``d = |s/n - 1/p|`` is the horizontal
distance to the critical line ``s = n/p`` and ``c`` is ``b`` below the line
and ``a`` on or above it.  Every coordinate comes from
:mod:`qcc.exponents`; nothing is recomputed here except the check itself.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence

from .exponents import (
    QCRegularity,
    Regime,
    as_exact,
    interpolation_indices,
    reciprocal,
    regime_of,
    target_inv_q,
)

__all__ = [
    "Arrow",
    "IndexPoint",
    "arrow",
    "figure_arrows",
    "index_arrows",
    "index_points",
    "to_csv",
    "to_svg",
    "Diagram",
    "build",
]


@dataclass(frozen=True)
class Arrow:
    label: str
    s: object
    inv_p: object
    inv_q: object
    regime: Regime
    c: object
    d: object
    n: int = 2

    @property
    def gap(self):
        return self.inv_q - self.inv_p

    @property
    def expected_gap(self):
        return self.d * reciprocal(self.c)

    @property
    def exact(self) -> bool:
        return all(isinstance(x, Fraction) for x in (self.s, self.inv_p, self.inv_q))

    def proportional(self, tol: float = 1e-12) -> bool:
        """``gap == d / c``: exactly for rational data, else to ``tol``."""
        if self.exact and isinstance(self.expected_gap, Fraction):
            return self.gap == self.expected_gap
        return abs(float(self.gap) - float(self.expected_gap)) <= tol

    def row(self) -> dict:
        return {
            "kind": "arrow",
            "label": self.label,
            "regime": self.regime.value,
            "s": self.s,
            "inv_p": self.inv_p,
            "inv_q": self.inv_q,
            "d": self.d,
            "c": self.c,
            "gap": self.gap,
        }


@dataclass(frozen=True)
class IndexPoint:
    label: str
    inv: object
    s: object

    def row(self) -> dict:
        return {"kind": "point", "label": self.label, "regime": "", "s": self.s, "inv_p": self.inv,
                "inv_q": "", "d": "", "c": "", "gap": ""}


def _c_for(s, inv_p, reg: QCRegularity):
    regime = regime_of(s, 1 / inv_p if inv_p else float("inf"), reg.n)
    return regime, (reg.b if regime is Regime.SUBCRITICAL else reg.a)


def arrow(s, p, reg: QCRegularity, label: str = "") -> Arrow:
    """The arrow for ``(s, p)``; raises ``ValueError`` when ``q <= 1``."""
    s = as_exact(s)
    inv_p = reciprocal(p)
    inv_q = target_inv_q(s, p, reg)
    if inv_q >= 1:
        raise ValueError(f"q <= 1 for s={s}, p={p}")
    regime, c = _c_for(s, inv_p, reg)
    if isinstance(inv_q, float):
        s, inv_p = float(s), float(inv_p)
    return Arrow(label or f"s={s},1/p={inv_p}", s, inv_p, inv_q, regime, c, abs(s / reg.n - inv_p), reg.n)


def figure_arrows(reg: QCRegularity, s_values: Sequence, inv_p_values: Sequence) -> List[Arrow]:
    """Arrows on a grid of source points, skipping rejected ones (``q <= 1``)."""
    out = []
    for s in s_values:
        for inv in inv_p_values:
            inv = as_exact(inv)
            if not 0 < inv < 1:
                continue
            try:
                out.append(arrow(s, 1 / inv, reg))
            except ValueError:
                continue
    return out


def index_points(s, p, reg: QCRegularity, epsilon0=None) -> List[IndexPoint]:
    """The four interpolation end points at ``s = 0`` and ``s = 1``."""
    idx = interpolation_indices(s, p, reg, epsilon0=epsilon0)
    inv = idx.inverse
    return [
        IndexPoint("p0", inv["p0"], Fraction(0)),
        IndexPoint("q0", inv["q0"], Fraction(0)),
        IndexPoint("p1", inv["p1"], Fraction(1)),
        IndexPoint("q1", inv["q1"], Fraction(1)),
    ]


def index_arrows(s, p, reg: QCRegularity, epsilon0=None) -> List[Arrow]:
    """End-point arrows ``p0 -> q0`` (``s = 0``) and ``p1 -> q1`` (``s = 1``)."""
    idx = interpolation_indices(s, p, reg, epsilon0=epsilon0)
    inv = idx.inverse
    out = []
    for j, sj in ((0, Fraction(0)), (1, Fraction(1))):
        ip, iq = inv[f"p{j}"], inv[f"q{j}"]
        regime, c = _c_for(sj, ip, reg)
        if isinstance(ip, float) or isinstance(iq, float):
            sj = float(sj)
        out.append(Arrow(f"index{j}", sj, ip, iq, regime, c, abs(sj / reg.n - ip), reg.n))
    return out


def _fmt(x) -> str:
    if x == "" or x is None:
        return ""
    if isinstance(x, Fraction):
        return repr(float(x))
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _exact_str(x) -> str:
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    return ""


CSV_FIELDS = ["kind", "label", "regime", "s", "inv_p", "inv_q", "d", "c", "gap", "inv_p_exact", "inv_q_exact"]


def to_csv(arrows: Iterable[Arrow], points: Iterable[IndexPoint] = ()) -> str:
    """Machine-readable endpoints; '.' decimals, exact fractions alongside."""
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for item in list(arrows) + list(points):
        row = item.row()
        out = {k: _fmt(v) for k, v in row.items()}
        out["inv_p_exact"] = _exact_str(row["inv_p"])
        out["inv_q_exact"] = _exact_str(row["inv_q"])
        w.writerow(out)
    return buf.getvalue()


_SIZE = 400
_PAD = 40


def _xy(inv, s):
    x = _PAD + float(inv) * _SIZE
    y = _PAD + (1.0 - float(s)) * _SIZE
    return round(x, 3), round(y, 3)


def to_svg(arrows: Iterable[Arrow], points: Iterable[IndexPoint] = (), n: int = 2,
           title: Optional[str] = None) -> str:
    """Standalone SVG of the unit square ``0 <= 1/p, s <= 1``."""
    W = _SIZE + 2 * _PAD
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{W}" viewBox="0 0 {W} {W}">',
        "<defs><marker id=\"head\" markerWidth=\"8\" markerHeight=\"6\" refX=\"8\" refY=\"3\" orient=\"auto\">"
        "<path d=\"M0,0 L8,3 L0,6 z\" fill=\"black\"/></marker></defs>",
        f'<rect x="{_PAD}" y="{_PAD}" width="{_SIZE}" height="{_SIZE}" fill="none" stroke="gray"/>',
    ]
    if title:
        parts.append(f'<text x="{_PAD}" y="{_PAD - 15}" font-size="14">{title}</text>')
    # critical line s = n / p from (0, 0) to (1/n, 1)
    x0, y0 = _xy(0, 0)
    x1, y1 = _xy(Fraction(1, n), 1)
    parts.append(f'<line class="critical" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" stroke="red" stroke-dasharray="4 3"/>')
    parts.append(f'<text x="{_PAD + _SIZE / 2}" y="{W - 8}" font-size="12">1/p</text>')
    parts.append(f'<text x="6" y="{_PAD + _SIZE / 2}" font-size="12">s</text>')
    for a in arrows:
        xa, ya = _xy(a.inv_p, a.s)
        xb, yb = _xy(a.inv_q, a.s)
        parts.append(
            f'<line class="arrow" data-label="{a.label}" x1="{xa}" y1="{ya}" x2="{xb}" y2="{yb}" '
            f'stroke="black" marker-end="url(#head)"/>'
        )
        parts.append(f'<circle cx="{xa}" cy="{ya}" r="2.5" fill="black"/>')
    for pt in points:
        x, y = _xy(pt.inv, pt.s)
        parts.append(f'<circle class="index" cx="{x}" cy="{y}" r="4" fill="none" stroke="blue"/>')
        parts.append(f'<text x="{x + 5}" y="{y - 5}" font-size="11" fill="blue">{pt.label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


DEFAULT_S = (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4), Fraction(1))
DEFAULT_INV_P = tuple(Fraction(i, 10) for i in range(1, 10))


@dataclass
class Diagram:
    n: int
    arrows: List[Arrow]
    points: List[IndexPoint]

    def csv(self) -> str:
        return to_csv(self.arrows, self.points)

    def svg(self, title: Optional[str] = None) -> str:
        return to_svg(self.arrows, self.points, self.n, title)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "arrows": [{k: _fmt(v) for k, v in a.row().items()} | {"proportional": a.proportional()}
                       for a in self.arrows],
            "points": [{"label": p.label, "inv": _fmt(p.inv), "s": _fmt(p.s)} for p in self.points],
        }


def build(reg: QCRegularity, sources: Optional[Sequence] = None, s_values: Sequence = DEFAULT_S,
          inv_p_values: Sequence = DEFAULT_INV_P, index_for: Optional[tuple] = None,
          epsilon0=None) -> Diagram:
    """Arrows for explicit ``(s, p)`` sources (or a grid) plus optional index layout.

    ``index_for = (s, p)`` adds the four interpolation points and the two
    end-point arrows of that construction.
    """
    if sources is not None:
        arrows = [arrow(s, p, reg) for s, p in sources]
    else:
        arrows = figure_arrows(reg, s_values, inv_p_values)
    points = []
    if index_for is not None:
        s, p = index_for
        points = index_points(s, p, reg, epsilon0)
        arrows += index_arrows(s, p, reg, epsilon0)
    return Diagram(reg.n, arrows, points)
