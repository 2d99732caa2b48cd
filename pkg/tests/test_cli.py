import filecmp
import json
from importlib import resources
from pathlib import Path

import pytest

from ntrack import Box, ResultEntry, parse_ground_truth
from ntrack.cli import main
from ntrack.motio import write_results

REPO_ROOT = Path(__file__).resolve().parents[1]
DEMO_SCENE = REPO_ROOT / "configs" / "demo_scene.json"


@pytest.fixture()
def exported_scene(tmp_path):
    seq_dir = tmp_path / "demo01"
    assert main(["synth", "--config", str(DEMO_SCENE), "--out", str(seq_dir)]) == 0
    return seq_dir


class TestSynthCommand:
    def test_produces_mot_layout(self, exported_scene):
        assert (exported_scene / "seqinfo.ini").is_file()
        assert (exported_scene / "gt" / "gt.txt").is_file()
        assert (exported_scene / "det" / "det.txt").is_file()
        assert len(list((exported_scene / "flow").glob("*.flo"))) == 119

    def test_seed_changes_detections(self, tmp_path):
        cfg = json.loads(DEMO_SCENE.read_text())
        cfg["noise"]["center_jitter"] = 2.0
        for seed, name in ((1, "a"), (2, "b")):
            cfg["seed"] = seed
            p = tmp_path / f"scene_{name}.json"
            p.write_text(json.dumps(cfg))
            assert main(["synth", "--config", str(p), "--out", str(tmp_path / name)]) == 0
        assert (tmp_path / "a" / "det" / "det.txt").read_text() != \
               (tmp_path / "b" / "det" / "det.txt").read_text()

    def test_missing_config_is_usage_error(self, tmp_path):
        assert main(["synth", "--config", str(tmp_path / "nope.json"),
                     "--out", str(tmp_path / "o")]) == 2

    def test_invalid_config_is_usage_error(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"name": "x", "frame_count": 0,
                                 "image_width": 10, "image_height": 10}))
        assert main(["synth", "--config", str(p), "--out", str(tmp_path / "o")]) == 2


class TestTrackCommand:
    def test_track_writes_results_counts_manifest(self, exported_scene, tmp_path):
        out = tmp_path / "out"
        rc = main(["track", "--seq", str(exported_scene), "--seed", "1", "--out", str(out)])
        assert rc == 0
        assert (out / "demo01.txt").is_file()
        counts = json.loads((out / "demo01_counts.json").read_text())
        assert counts["unique_count"] == 5
        manifest = json.loads((out / "demo01_manifest.json").read_text())
        assert manifest["seed"] == 1
        assert manifest["config"]["n_particles"] == 100
        assert manifest["inputs"]["flow_dir"].endswith("flow")

    def test_repeat_run_byte_identical(self, exported_scene, tmp_path):
        for name in ("r1", "r2"):
            assert main(["track", "--seq", str(exported_scene), "--seed", "5",
                         "--out", str(tmp_path / name)]) == 0
        assert filecmp.cmp(tmp_path / "r1" / "demo01.txt",
                           tmp_path / "r2" / "demo01.txt", shallow=False)
        assert filecmp.cmp(tmp_path / "r1" / "demo01_counts.json",
                           tmp_path / "r2" / "demo01_counts.json", shallow=False)

    def test_missing_det_is_usage_error(self, tmp_path):
        bad = tmp_path / "empty"
        bad.mkdir()
        (bad / "seqinfo.ini").write_text(
            "[Sequence]\nname=empty\nimWidth=100\nimHeight=100\nseqLength=5\n")
        assert main(["track", "--seq", str(bad), "--out", str(tmp_path / "o")]) == 2

    def test_missing_flow_warns_and_runs(self, exported_scene, tmp_path, capsys):
        import shutil
        shutil.rmtree(exported_scene / "flow")
        rc = main(["track", "--seq", str(exported_scene), "--out", str(tmp_path / "o")])
        assert rc == 0
        assert "identity-motion fallback" in capsys.readouterr().err

    def test_config_file_and_flag_override(self, exported_scene, tmp_path):
        cfg_file = tmp_path / "t.json"
        cfg_file.write_text(json.dumps({"neighbors": 5, "seed": 9}))
        out = tmp_path / "out"
        assert main(["track", "--seq", str(exported_scene), "--config", str(cfg_file),
                     "--neighbors", "1", "--rla", "off", "--out", str(out)]) == 0
        manifest = json.loads((out / "demo01_manifest.json").read_text())
        assert manifest["config"]["neighbors"] == 1  # flag beats file
        assert manifest["config"]["rla"] is False
        assert manifest["seed"] == 9  # file beats default


class TestEvalCommand:
    def test_perfect_results_score_one(self, exported_scene, tmp_path, capsys):
        gt = parse_ground_truth((exported_scene / "gt" / "gt.txt").read_text())
        rows = [ResultEntry(frame=e.frame, id=e.id, box=e.box, conf=1.0) for e in gt]
        results = tmp_path / "demo01.txt"
        results.write_text(write_results(rows))
        out = tmp_path / "report"
        rc = main(["eval", "--seq", str(exported_scene), "--results", str(results),
                   "--margin", "50", "--out", str(out)])
        assert rc == 0
        printed = capsys.readouterr().out
        assert "MOTA=1.000000" in printed
        doc = json.loads((out / "demo01_metrics.json").read_text())
        assert doc["aggregate"]["idf1"] == 1.0

    def test_mismatched_sequence_name(self, exported_scene, tmp_path):
        results = tmp_path / "other.txt"
        results.write_text("")
        assert main(["eval", "--seq", str(exported_scene),
                     "--results", str(results)]) == 2

    def test_invalid_margin(self, exported_scene, tmp_path):
        results = tmp_path / "demo01.txt"
        results.write_text("")
        assert main(["eval", "--seq", str(exported_scene), "--results", str(results),
                     "--margin", "480"]) == 2


class TestCountCommand:
    def test_reference_file(self, capsys):
        fixture = resources.files("ntrack.data").joinpath("texcot22_counts.json")
        with resources.as_file(fixture) as path:
            rc = main(["count", "--pairs", str(path)])
        assert rc == 0
        out = capsys.readouterr().out
        mape_pct = float(next(ln for ln in out.splitlines()
                              if ln.startswith("MAPE_PCT=")).split("=")[1])
        assert mape_pct == pytest.approx(4.0, abs=0.1)

    def test_plain_pairs_file(self, tmp_path, capsys):
        p = tmp_path / "pairs.json"
        p.write_text(json.dumps({"pairs": [{"gt": 10, "hyp": 13}]}))
        assert main(["count", "--pairs", str(p)]) == 0
        assert "RMSE=3.000000" in capsys.readouterr().out

    def test_unknown_method(self, tmp_path):
        fixture = resources.files("ntrack.data").joinpath("texcot22_counts.json")
        with resources.as_file(fixture) as path:
            assert main(["count", "--pairs", str(path), "--method", "nope"]) == 2


def test_full_pipeline_deterministic(tmp_path):
    """synth -> track -> eval twice with one seed: byte-identical artifacts."""
    outputs = []
    for run in ("first", "second"):
        base = tmp_path / run
        seq = base / "demo01"
        assert main(["synth", "--config", str(DEMO_SCENE), "--out", str(seq)]) == 0
        assert main(["track", "--seq", str(seq), "--seed", "3",
                     "--out", str(base / "track")]) == 0
        assert main(["eval", "--seq", str(seq),
                     "--results", str(base / "track" / "demo01.txt"),
                     "--margin", "50", "--out", str(base / "eval")]) == 0
        outputs.append(base)
    for rel in ("demo01/det/det.txt", "track/demo01.txt", "track/demo01_counts.json",
                "eval/demo01_metrics.json"):
        assert filecmp.cmp(outputs[0] / rel, outputs[1] / rel, shallow=False), rel
