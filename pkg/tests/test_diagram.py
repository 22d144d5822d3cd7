import csv
import io
import xml.etree.ElementTree as ET
from fractions import Fraction as F

from hypothesis import given, settings
from hypothesis import strategies as st

from qcc.diagram import arrow, build, figure_arrows, index_points
from qcc.exponents import QCRegularity, Regime, target_inv_q

REG = QCRegularity(2, a=2, b=1)


def test_subcritical_arrow_gap():
    a = arrow(1, F(3, 2), REG)
    assert a.regime is Regime.SUBCRITICAL
    assert a.gap == a.d / REG.b == F(1, 6)
    assert a.proportional()


def test_critical_arrow_has_zero_length():
    a = arrow(F(1, 2), 4, REG)
    assert a.regime is Regime.CRITICAL and a.gap == 0


def test_index_layout():
    pts = {p.label: p for p in index_points(F(1, 2), 2, QCRegularity(2, b=1))}
    assert pts["p0"].inv == F(1, 3) and pts["p0"].s == 0
    assert pts["p1"].inv == F(2, 3) and pts["p1"].s == 1
    assert pts["q0"].inv == F(2, 3)
    assert pts["q1"].inv == F(5, 6)


def test_endpoints_are_exponent_outputs():
    for a in figure_arrows(REG, [F(1, 4), F(1, 2), 1], [F(i, 10) for i in range(1, 10)]):
        assert a.inv_q == target_inv_q(a.s, 1 / a.inv_p, REG)


@settings(max_examples=100, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=30),
       st.fractions(min_value=F(1, 30), max_value=F(29, 30), max_denominator=30),
       st.fractions(min_value=F(11, 10), max_value=8, max_denominator=20))
def test_gap_proportional_exact(s, inv_p, c):
    reg = QCRegularity(2, a=c, b=c)
    try:
        a = arrow(s, 1 / inv_p, reg)
    except ValueError:
        return
    assert a.exact and a.gap == a.d / c


def test_csv_round_trip():
    d = build(QCRegularity(2, b=1), sources=[(F(1, 2), 2)], index_for=(F(1, 2), 2))
    rows = list(csv.DictReader(io.StringIO(d.csv())))
    arrows = [r for r in rows if r["kind"] == "arrow"]
    points = [r for r in rows if r["kind"] == "point"]
    assert len(arrows) == 3 and len(points) == 4
    src = arrows[0]
    assert src["inv_p_exact"] == "1/2" and src["inv_q_exact"] == "3/4"
    assert float(src["inv_q"]) == 0.75
    assert all("," not in r["s"] for r in rows)


def test_svg_is_well_formed():
    d = build(REG, index_for=(F(1, 2), 2))
    root = ET.fromstring(d.svg(title="test"))
    ns = "{http://www.w3.org/2000/svg}"
    lines = root.findall(f"{ns}line")
    assert sum(1 for ln in lines if ln.get("class") == "critical") == 1
    assert sum(1 for ln in lines if ln.get("class") == "arrow") == len(d.arrows)
    assert len(root.findall(f"{ns}circle[@class='index']")) == 4


def test_to_dict_flags_proportionality():
    d = build(REG).to_dict()
    assert d["arrows"] and all(a["proportional"] for a in d["arrows"])
