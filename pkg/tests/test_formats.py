import json
import xml.dom.minidom

import numpy as np
import pytest
from hypothesis import given, strategies as st

from misobc import dofregion as dr
from misobc.formats import csv_number, csv_text, json_number, json_text
from misobc.montecarlo import Fig3Row
from misobc.svg import region_svg, sweep_svg, vertex_letters


def test_csv_number():
    assert csv_number(0.1 + 0.2) == "0.3"
    assert csv_number(1 / 3) == "0.333333333333"
    assert csv_number(None) == ""
    assert csv_number(True) == "true"
    assert csv_number(np.int64(4)) == "4"


def test_csv_text():
    assert csv_text(["a", "b"], [[1, "x"], [0.5, None]]) == "a,b\n1,x\n0.5,\n"


@given(st.floats(-1e6, 1e6, allow_nan=False, exclude_max=True, exclude_min=True))
def test_json_number_roundtrips_without_exponent(x):
    text = json_number(x)
    assert "e" not in text.lower()
    assert float(text) == x


def test_json_number_large_keeps_exponent():
    assert float(json_number(1e20)) == 1e20


def test_json_text_order_and_validity():
    obj = {"z": 1, "a": [1.5, 2e-7], "m": {"k": None, "t": True}, "rows": [{"x": 1}]}
    text = json_text(obj)
    assert list(json.loads(text)) == ["z", "a", "m", "rows"]
    assert json.loads(text)["a"][1] == 2e-7
    assert "e-" not in text


def test_json_rejects_unknown():
    with pytest.raises(TypeError):
        json_text({"x": object()})


def test_vertex_letters_fig2():
    verts = dr.enumerate_vertices(dr.theorem1_region(2, 3, 0.5))
    letters = vertex_letters(verts, 2)
    assert letters == {(0.5, 0.5, 0.5): "A", (1.0, 0.5, 0.0): "B", (0.5, 1.0, 0.0): "C"}


def test_region_svg_is_valid_and_labelled():
    poly, tpoly = dr.theorem1_region(2, 3, 0.5), dr.tp_region(2, 3, 0.5)
    text = region_svg(poly, dr.enumerate_vertices(poly), tpoly, dr.enumerate_vertices(tpoly), 2, 0.5)
    doc = xml.dom.minidom.parseString(text)
    assert doc.documentElement.getAttribute("viewBox") == "0 0 800 600"
    assert "A (0.5, 0.5, 0.5)" in text and "B (1, 0.5, 0)" in text


def test_region_svg_needs_three_users():
    poly = dr.theorem1_region(2, 4, 0.5)
    with pytest.raises(ValueError):
        region_svg(poly, [], poly, [], 2, 0.5)


def test_sweep_svg():
    rows = [Fig3Row(s, sch, -10.0, (1, 1, 1), s / 10 + (sch == "pp"), 0.0)
            for sch in ("tp", "pp") for s in (5.0, 10.0)]
    text = sweep_svg(rows)
    xml.dom.minidom.parseString(text)
    assert text.count("<path") == 2 and "stroke-dasharray" in text
