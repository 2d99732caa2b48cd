import pytest
from hypothesis import given, strategies as st

from ntrack import Box, parse_detections, parse_ground_truth, parse_results, parse_seqinfo
from ntrack.errors import InvalidBox, MalformedRow, MalformedSeqInfo
from ntrack.motio import ResultEntry, write_results

SEQINFO = """[Sequence]
name=vid09_01
imWidth=3840
imHeight=2160
seqLength=300
frameRate=30
"""


class TestParseSeqinfo:
    def test_basic(self):
        meta = parse_seqinfo(SEQINFO)
        assert meta.name == "vid09_01"
        assert meta.image_width == 3840
        assert meta.image_height == 2160
        assert meta.frame_count == 300
        assert meta.frame_rate == 30

    def test_missing_width(self):
        text = SEQINFO.replace("imWidth=3840\n", "")
        with pytest.raises(MalformedSeqInfo):
            parse_seqinfo(text)

    def test_unknown_keys_ignored(self):
        meta = parse_seqinfo(SEQINFO + "imDir=img1\nimExt=.jpg\n")
        assert meta == parse_seqinfo(SEQINFO)

    def test_crlf_accepted(self):
        meta = parse_seqinfo(SEQINFO.replace("\n", "\r\n"))
        assert meta.frame_count == 300


class TestParseDetections:
    def test_basic_row(self):
        (d,) = parse_detections("1,-1,0,0,10,10,0.9,-1,-1,-1")
        assert (d.frame, d.cx, d.cy, d.s, d.w, d.conf) == (1, 5, 5, 100, 10, 0.9)

    def test_subpixel_center(self):
        (d,) = parse_detections("1,-1,1359.1,413.27,120.26,362.77,2.3,-1,-1,-1")
        assert d.cx == pytest.approx(1419.23)
        assert d.cy == pytest.approx(594.655)

    def test_negative_width_reports_line(self):
        with pytest.raises(InvalidBox) as exc:
            parse_detections("1,-1,0,0,-5,10,0.9,-1,-1,-1")
        assert exc.value.line_no == 1

    def test_non_numeric_field(self):
        with pytest.raises(MalformedRow) as exc:
            parse_detections("1,-1,0,0,10,10,0.9,-1,-1,-1\n2,-1,a,0,10,10,0.9,-1,-1,-1")
        assert exc.value.line_no == 2

    def test_too_few_columns(self):
        with pytest.raises(MalformedRow):
            parse_detections("1,-1,0,0,10,10")

    def test_sorted_by_frame_stable(self):
        text = ("3,-1,0,0,10,10,0.5,-1,-1,-1\n"
                "1,-1,20,0,10,10,0.6,-1,-1,-1\n"
                "3,-1,40,0,10,10,0.7,-1,-1,-1\n")
        dets = parse_detections(text)
        assert [d.frame for d in dets] == [1, 3, 3]
        # ties keep input order
        assert dets[1].conf == 0.5 and dets[2].conf == 0.7


class TestParseGroundTruth:
    def test_basic_row(self):
        (e,) = parse_ground_truth("5,3,100,100,50,40,1,1,1.0")
        assert (e.frame, e.id, e.flag, e.visibility) == (5, 3, 1, 1.0)
        assert e.box == Box(100, 100, 50, 40)

    def test_flag_zero_retained(self):
        (e,) = parse_ground_truth("5,3,100,100,50,40,0,1,0.25")
        assert e.flag == 0
        assert e.visibility == 0.25

    def test_empty_file(self):
        assert parse_ground_truth("") == []

    def test_visibility_out_of_range(self):
        with pytest.raises(MalformedRow):
            parse_ground_truth("5,3,100,100,50,40,1,1,1.5")


class TestWriteResults:
    def test_single_entry(self):
        text = write_results([ResultEntry(1, 7, Box(0, 0, 10, 10), 1.0)])
        assert text == "1,7,0.000000,0.000000,10.000000,10.000000,1.000000,-1,-1,-1\n"

    def test_empty(self):
        assert write_results([]) == ""

    def test_sorted_by_frame_then_id(self):
        entries = [
            ResultEntry(2, 1, Box(0, 0, 1, 1), 0.5),
            ResultEntry(1, 9, Box(0, 0, 1, 1), 0.5),
            ResultEntry(1, 2, Box(0, 0, 1, 1), 0.5),
        ]
        lines = write_results(entries).splitlines()
        assert [ln.split(",")[:2] for ln in lines] == [["1", "2"], ["1", "9"], ["2", "1"]]


entry_strategy = st.builds(
    ResultEntry,
    frame=st.integers(1, 500),
    id=st.integers(1, 99),
    box=st.builds(
        Box,
        left=st.floats(-100, 4000, allow_nan=False).map(lambda v: round(v, 3)),
        top=st.floats(-100, 4000, allow_nan=False).map(lambda v: round(v, 3)),
        width=st.floats(0.5, 500, allow_nan=False).map(lambda v: round(v, 3)),
        height=st.floats(0.5, 500, allow_nan=False).map(lambda v: round(v, 3)),
    ),
    conf=st.floats(0, 10, allow_nan=False).map(lambda v: round(v, 3)),
)


@given(st.lists(entry_strategy, max_size=30))
def test_write_parse_write_fixpoint(entries):
    once = write_results(entries)
    twice = write_results(parse_results(once))
    assert once == twice


@given(st.lists(entry_strategy, max_size=30))
def test_round_trip_value_identical(entries):
    parsed = parse_results(write_results(entries))
    assert len(parsed) == len(entries)
    for got, want in zip(parsed, sorted(entries, key=lambda e: (e.frame, e.id))):
        assert got.frame == want.frame and got.id == want.id
        assert got.box.left == pytest.approx(want.box.left, abs=1e-6)
        assert got.box.width == pytest.approx(want.box.width, abs=1e-6)
