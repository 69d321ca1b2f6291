import xml.etree.ElementTree as ET
from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gean.campaign import (
    CSV_HEADER,
    SCHEMES,
    CampaignConfig,
    CampaignRow,
    band_std,
    is_infeasible,
    read_results,
    rows_from_csv,
    rows_to_csv,
    run_campaign,
    write_outputs,
)
from gean.stats import ChannelModel

ZO, ZOE = ChannelModel.ZERO_ONE, ChannelModel.ZERO_ONE_E
SVG_NS = "{http://www.w3.org/2000/svg}"


def test_empty_population_single_trial():
    cfg = CampaignConfig(schemes=("GEAN",), models=(ZO,), t_values=(0,), trials=1)
    (row,) = run_campaign(cfg)
    assert row.achieved_reliability == 1.0
    assert row.mean_t_hat == 0.0


def test_config_validation():
    with pytest.raises(ValueError):
        CampaignConfig(trials=0)
    with pytest.raises(ValueError):
        CampaignConfig(t_values=())
    with pytest.raises(ValueError):
        CampaignConfig(schemes=("MLE",))
    with pytest.raises(ValueError):
        CampaignConfig(alpha=1.0)


def test_row_count_includes_infeasible_cells():
    cfg = CampaignConfig(schemes=("GEAN", "GEAN-WAEC"), models=(ZO, ZOE), t_values=(100, 1000), trials=2)
    rows = run_campaign(cfg)
    assert len(rows) == 2 * 2 * 2
    blocked = [r for r in rows if is_infeasible(r)]
    assert {(r.model, r.t) for r in blocked} == {("zoe", 100)}
    assert all(r.reason.startswith("infeasible") for r in blocked)
    for r in rows:
        if not is_infeasible(r):
            assert 0.0 <= r.achieved_reliability <= 1.0 and r.std_slots >= 0


def test_ezb_cell_reports_a_swept_configuration():
    cfg = CampaignConfig(schemes=("EZB",), models=(ZO,), t_values=(1000,), trials=10, alpha=0.9, beta=0.1)
    (row,) = run_campaign(cfg)
    assert row.scheme == "EZB"
    assert row.achieved_reliability >= 0.9
    assert row.mean_slots > 0


def test_slot_cost_saturates_at_large_t():
    cfg = CampaignConfig(schemes=("GEAN",), models=(ZO,), t_values=(10**4, 10**5), trials=20)
    small, large = run_campaign(cfg)
    assert large.mean_slots / small.mean_slots <= 1.5


def test_parallel_matches_serial():
    base = CampaignConfig(schemes=("GEAN", "EZB"), models=(ZO, ZOE), t_values=(800, 2000), trials=3)
    assert rows_to_csv(run_campaign(base)) == rows_to_csv(run_campaign(replace(base, workers=2)))


def test_band_std():
    assert band_std([5.0], 0) == 0.0
    assert band_std([1.0, 3.0], 0) == pytest.approx(2**0.5)
    vals = [float(i % 7) for i in range(400)]
    assert band_std(vals, 1) == band_std(vals, 1) > 0


# -- CSV -------------------------------------------------------------------------


def test_header_and_empty_fields():
    row = CampaignRow("GEAN", "zoe", 100, 0.95, 0.05, 400, reason="infeasible: t below t_ml=702.6")
    text = rows_to_csv([row, replace(row, mean_slots=float("nan"))])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert "nan" not in text.lower()
    assert lines[1] == "GEAN,zoe,100,0.95,0.05,400,,,,,,infeasible: t below t_ml=702.6"


_opt = st.one_of(st.none(), st.floats(allow_nan=False, allow_infinity=False))
_rows = st.builds(
    CampaignRow,
    scheme=st.sampled_from(SCHEMES),
    model=st.sampled_from(["zo", "zoe"]),
    t=st.integers(0, 10**7),
    alpha=st.floats(0, 0.999),
    beta=st.floats(0.001, 0.999),
    trials=st.integers(1, 10**4),
    achieved_reliability=_opt,
    mean_slots=_opt,
    std_slots=_opt,
    mean_t_hat=_opt,
    mean_probe_slots=_opt,
    reason=st.text(st.characters(blacklist_characters="\x00\r\n")),
)


@settings(max_examples=200)
@given(rows=st.lists(_rows, max_size=8))
def test_csv_round_trip(rows):
    assert rows_from_csv(rows_to_csv(rows)) == rows


@pytest.mark.parametrize("reason", ["a\x00b", "two\nlines", "cr\r"])
def test_row_rejects_multiline_reason(reason):
    with pytest.raises(ValueError):
        CampaignRow("GEAN", "zo", 1, 0.9, 0.1, 1, reason=reason)


def test_csv_rejects_foreign_header():
    with pytest.raises(ValueError):
        rows_from_csv("a,b,c\n1,2,3\n")


# -- files -----------------------------------------------------------------------


def test_write_outputs(tmp_path):
    cfg = CampaignConfig(schemes=("GEAN", "GEAN-WAEC"), models=(ZO, ZOE), t_values=(100, 1500), trials=2,
                         output_dir=tmp_path / "run")
    rows = run_campaign(cfg)
    paths = write_outputs(rows, cfg)
    assert [p.name for p in paths] == ["results.csv", "reliability.svg", "slots.svg"]
    assert read_results(paths[0]) == rows
    for svg in paths[1:]:
        root = ET.parse(svg).getroot()
        assert root.tag == f"{SVG_NS}svg"
        assert root.get("version") == "1.1"
        assert root.iter(f"{SVG_NS}path") is not None


def test_charts_are_byte_stable(tmp_path):
    cfg = CampaignConfig(models=(ZO,), t_values=(300, 900), trials=2)
    rows = run_campaign(cfg)
    a = write_outputs(rows, replace(cfg, output_dir=tmp_path / "a"))
    b = write_outputs(rows, replace(cfg, output_dir=tmp_path / "b"))
    assert all(x.read_bytes() == y.read_bytes() for x, y in zip(a, b))


def test_write_errors_carry_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    cfg = CampaignConfig(output_dir=blocker / "sub")
    row = CampaignRow("GEAN", "zo", 10, 0.95, 0.05, 1)
    with pytest.raises(OSError, match=str(blocker)):
        write_outputs([row], cfg)
    with pytest.raises(ValueError):
        write_outputs([], cfg)
