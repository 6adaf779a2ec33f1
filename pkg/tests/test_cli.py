import json

import pytest

from predsearch.cli import main
from predsearch.milp.mps import read_mps_file
from tests.conftest import TWO_VAR_MPS


@pytest.fixture
def instance_dir(tmp_path):
    out = tmp_path / "instances"
    assert main(["generate", "--family", "independent_set", "--nodes", "14", "--affinity", "2",
                 "--count", "3", "--seed", "5", "--out", str(out)]) == 0
    return out


def instance_paths(instance_dir):
    return [str(instance_dir / f"independent_set_{i}.mps") for i in range(3)]


class TestCommands:
    def test_generate_is_reproducible(self, tmp_path, instance_dir):
        again = tmp_path / "again"
        main(["generate", "--family", "independent_set", "--nodes", "14", "--affinity", "2",
              "--count", "3", "--seed", "5", "--out", str(again)])
        for name in ("independent_set_0.mps", "independent_set_2.mps", "manifest.json"):
            assert (again / name).read_bytes() == (instance_dir / name).read_bytes()

    def test_solve_reruns_byte_identical(self, tmp_path, instance_dir):
        mps = instance_paths(instance_dir)[0]
        outs = []
        for k in range(2):
            out = tmp_path / f"solve{k}.json"
            assert main(["solve", mps, "--no-time-limit", "--strip-timings", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        payload = json.loads(outs[0])
        assert payload["result"]["status"] == "optimal"
        assert payload["objective"] >= 1.0

    def test_oracle_agrees_with_solve(self, tmp_path):
        mps = tmp_path / "two_var.mps"
        mps.write_text(TWO_VAR_MPS)
        main(["oracle", str(mps), "--out", str(tmp_path / "oracle.json")])
        main(["solve", str(mps), "--no-time-limit", "--out", str(tmp_path / "solve.json")])
        oracle = json.loads((tmp_path / "oracle.json").read_text())
        solved = json.loads((tmp_path / "solve.json").read_text())
        assert oracle["objective"] == solved["objective"] == -1.0
        assert oracle["result"]["num_optimal"] == 2

    def test_parse_error_exits_2(self, tmp_path):
        bad = tmp_path / "bad.mps"
        bad.write_text(TWO_VAR_MPS.replace("ENDATA\n", ""))
        assert main(["solve", str(bad), "--out", str(tmp_path / "out.json")]) == 2

    def test_missing_input_exits_2(self, tmp_path):
        assert main(["collect", str(tmp_path / "none.mps"), "--out-dir", str(tmp_path / "labels")]) == 2

    def test_unwritable_output_exits_2(self, tmp_path, instance_dir):
        blocker = tmp_path / "blocker"
        blocker.write_text("")
        assert main(["featurize", instance_paths(instance_dir)[0], "--out", str(blocker / "graph.json")]) == 2

    def test_invalid_settings_exit_2(self, tmp_path, instance_dir):
        cfg = tmp_path / "search.json"
        cfg.write_text(json.dumps({"k0": 1, "k1": 1, "delta": 5}))
        code = main(["search", "--config", str(cfg), "--instance", instance_paths(instance_dir)[0],
                     "--labels", str(tmp_path)])
        assert code == 2

    def test_featurize(self, tmp_path, instance_dir):
        out = tmp_path / "graph.json"
        main(["featurize", instance_paths(instance_dir)[0], "--out", str(out)])
        graph = json.loads(out.read_text())
        assert graph["n"] == graph["q"] == 14
        assert len(graph["var_feats"][0]) == 18


class TestPipeline:
    def test_collect_train_search_rerun(self, tmp_path, instance_dir):
        paths = instance_paths(instance_dir)
        labels = tmp_path / "labels"

        def run(tag):
            out = tmp_path / tag
            assert main(["collect", *paths, "--out-dir", str(labels), "--no-time-limit"]) == 0
            assert main(["train", "--instances", *paths[:2], "--valid", paths[2], "--labels", str(labels),
                         "--epochs", "3", "--hidden-dim", "8", "--seed", "1",
                         "--out", str(out / "model.json"), "--history", str(out / "history.csv")]) == 0
            assert main(["predict", "--model", str(out / "model.json"), "--instance", paths[2],
                         "--out", str(out / "probs.json")]) == 0
            assert main(["search", "--model", str(out / "model.json"), "--instance", paths[2],
                         "--k0", "3", "--k1", "2", "--delta", "2", "--time-limit", "30", "--strip-timings",
                         "--export-mps", str(out / "restricted.mps"), "--out", str(out / "search.json")]) == 0
            return out

        a, b = run("a"), run("b")
        for name in ("model.json", "history.csv", "probs.json", "search.json", "restricted.mps"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name

        result = json.loads((a / "search.json").read_text())
        assert result["partial"]["i0"] and result["partial"]["i1"]
        assert result["objective"] is not None
        restricted = read_mps_file(str(a / "restricted.mps"))
        assert restricted.num_binary == 14 + 5
        assert len(json.loads((a / "probs.json").read_text())["probs"]) == 14
        assert sorted(p.name for p in labels.iterdir()) == [f"independent_set_{i}.json" for i in range(3)]

    def test_evaluate_outputs(self, tmp_path, instance_dir):
        paths = instance_paths(instance_dir)
        labels = tmp_path / "labels"
        main(["collect", *paths, "--out-dir", str(labels), "--no-time-limit"])
        spec = {
            "instances": paths,
            "methods": [
                {"tag": "plain"},
                {"tag": "ps", "kind": "search", "label_dir": str(labels),
                 "search": {"k0": 3, "k1": 3, "delta": 2}},
                {"tag": "fix", "kind": "search", "label_dir": str(labels),
                 "search": {"k0": 3, "k1": 3, "mode": "fix"}},
            ],
            "time_limit": 30,
            "bks_time_limit": 30,
            "baseline_tag": "plain",
            "time_axis": "lp_iterations",
        }
        cfg = tmp_path / "eval.json"
        cfg.write_text(json.dumps(spec))
        outputs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            assert main(["evaluate", "--config", str(cfg), "--workers", "2", "--out-dir", str(out)]) == 0
            outputs.append(out)
        for name in ("records.csv", "aggregate.csv", "curves.csv", "bks.json"):
            assert (outputs[0] / name).read_bytes() == (outputs[1] / name).read_bytes(), name
        header = (outputs[0] / "curves.csv").read_text().splitlines()[0]
        assert header == "method,lp_iterations,mean_gap_rel"
        assert len((outputs[0] / "records.csv").read_text().splitlines()) == 1 + 9

    def test_perturb_and_reliability(self, tmp_path, instance_dir):
        paths = instance_paths(instance_dir)
        out = tmp_path / "perturb"
        assert main(["perturb", paths[0], "--trials", "5", "--flips", "0", "1", "--seed", "2",
                     "--out-dir", str(out)]) == 0
        lines = (out / "independent_set_0_perturb.csv").read_text().splitlines()
        assert lines[0] == "instance,flips,trials,infeasible_pct,gap_min,gap_avg,gap_max"
        assert lines[1].startswith("independent_set_0,0,5,0.0,")

        labels = tmp_path / "labels"
        main(["collect", paths[0], "--out-dir", str(labels), "--no-time-limit"])
        rel = tmp_path / "reliability.csv"
        assert main(["reliability", "--instance", paths[0], "--labels", str(labels),
                     "--sizes", "2,2", "4,0", "--out", str(rel)]) == 0
        assert len(rel.read_text().splitlines()) == 3
