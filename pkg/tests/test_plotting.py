import pytest

from midsearch.errors import InvalidParams
from midsearch.harness import CSV_HEADER
from midsearch.plotting import read_results_csv, render_svg

SAMPLE = (
    CSV_HEADER
    + "\n"
    + "uniform,100,5,10,0.5,0.2,0.8,100.0\n"
    + "uniform,200,7,10,0.7,0.35,0.93,200.0\n"
    + "midsearch,100,9,10,0.9,0.55,0.99,100.0\n"
    + "midsearch,200,10,10,1.0,0.72,1.0,200.0\n"
)


def test_read_series(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text(SAMPLE)
    series = read_results_csv(p)
    assert [s.name for s in series] == ["uniform", "midsearch"]
    assert series[0].samples == [100.0, 200.0]
    assert series[1].rate == [0.9, 1.0]


def test_render_deterministic(tmp_path):
    p = tmp_path / "r.csv"
    p.write_text(SAMPLE)
    series = read_results_csv(p)
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    render_svg(series, out1)
    render_svg(series, out2)
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    assert b1.startswith(b"<svg")
    text = b1.decode()
    assert text.count("<polyline") == 2  # one curve per algorithm
    assert text.count("<polygon") == 2  # one band per algorithm


def test_header_only_gives_empty_axes(tmp_path):
    p = tmp_path / "h.csv"
    p.write_text(CSV_HEADER + "\n")
    series = read_results_csv(p)
    out = tmp_path / "h.svg"
    render_svg(series, out)
    text = out.read_text()
    assert "<polyline" not in text
    assert "<rect" in text  # axes frame still drawn


def test_malformed_rejected(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("foo,bar\n1,2\n")
    with pytest.raises(InvalidParams):
        read_results_csv(p)
    p.write_text(CSV_HEADER + "\nuniform,abc,1,2,0.5,0.1,0.9,3\n")
    with pytest.raises(InvalidParams):
        read_results_csv(p)
