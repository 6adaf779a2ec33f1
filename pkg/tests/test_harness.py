import math

import networkx as nx
import pytest

from predsearch.harness import (
    aggregate,
    compute_bks,
    curves,
    evaluate,
    gain,
    gaps,
    label_distance_experiment,
    perturb_experiment,
    regap,
    update_bks,
)
from predsearch.harness.metrics import is_better
from predsearch.instgen.independent_set import gen_independent_set, independent_set_instance
from predsearch.learning.labels import collect_sample
from predsearch.models.eval_model import EvalRecord, EvalSpec, MethodKind, MethodSpec, PerturbSpec
from predsearch.models.milp_model import ObjSense
from predsearch.models.search_model import SearchConfig
from predsearch.models.solve_model import SolveParams
from predsearch.reporter import read_records_csv, write_aggregate_csv, write_json, write_records_csv

EXACT = SolveParams(time_limit=None, rel_gap_tol=1e-9)


class TestMetrics:
    def test_published_gaps(self):
        assert round(gaps(19.43, 12.02)[0], 2) == 7.41
        assert round(gaps(15.46, 12.02)[0], 2) == 3.44

    def test_published_gains(self):
        assert round(gain(7.41, 3.44), 1) == 53.6
        assert round(gain(3.29, 1.41), 1) == 57.1

    def test_equal_gaps(self):
        assert gain(2.5, 2.5) == 0.0

    def test_zero_guard(self):
        assert gaps(0.0, 0.0) == (0.0, 0.0)
        assert gain(0.0, 0.0) == 0.0
        assert gain(0.0, 1.0) == -math.inf

    def test_relative_gap(self):
        assert gaps(5.0, 5.0)[1] == 0.0
        assert gaps(9.0, 10.0)[1] == pytest.approx(0.1)

    def test_is_better(self):
        assert is_better(3.0, 2.0, ObjSense.MAX)
        assert is_better(2.0, 3.0, ObjSense.MIN)
        assert not is_better(2.0, 2.0, ObjSense.MAX)


class TestBks:
    def test_triangle(self, triangle):
        assert compute_bks([triangle], EXACT) == {"triangle": 1.0}

    def test_infeasible_excluded(self):
        from tests.conftest import binary_instance
        from predsearch.models.milp_model import Sense

        bad = binary_instance([1.0], [({0: 1.0}, 0.0, Sense.LE), ({0: 1.0}, 1.0, Sense.GE)], name="bad")
        assert compute_bks([bad], EXACT) == {}

    def test_update_and_regap(self):
        records = [
            EvalRecord(instance="a", method="ps", obj=12.0, status="optimal"),
            EvalRecord(instance="a", method="plain", obj=9.0, status="feasible_time_limit"),
        ]
        bks = update_bks({"a": 10.0}, records, {"a": ObjSense.MAX})
        assert bks == {"a": 12.0}
        final = regap(records, bks)
        assert final[0].gap_abs == 0.0 and final[0].gap_rel == 0.0
        assert final[1].gap_abs == 3.0
        assert final[1].bks == 12.0

    def test_min_sense_update(self):
        records = [EvalRecord(instance="a", method="m", obj=11.0, status="optimal")]
        assert update_bks({"a": 10.0}, records, {"a": ObjSense.MIN}) == {"a": 10.0}


class TestAggregate:
    def test_equal_methods_gain_zero(self):
        records = [
            EvalRecord(instance=f"i{k}", method=m, obj=1.0, bks=2.0, gap_abs=1.0, gap_rel=0.5, status="optimal")
            for k in range(3) for m in ("plain", "ps")
        ]
        rows = aggregate(records, baseline_tag="plain")
        assert [r.method for r in rows] == ["plain", "ps"]
        assert all(r.gain_pct == 0.0 for r in rows)
        assert rows[1].avg_gap_rel == pytest.approx(0.5)

    def test_unsolved_excluded(self):
        records = [
            EvalRecord(instance="i0", method="m", obj=1.0, bks=1.0, gap_abs=0.0, gap_rel=0.0, status="optimal"),
            EvalRecord(instance="i1", method="m", status="unknown"),
        ]
        row = aggregate(records)[0]
        assert (row.instances, row.solved) == (2, 1)
        assert row.gain_pct is None

    def test_csv_round_trip(self, tmp_path):
        records = [
            EvalRecord(instance="i0", method="m", obj=3.5, bks=4.0, gap_abs=0.5, gap_rel=0.125,
                       wall_time=0.25, status="feasible_time_limit"),
            EvalRecord(instance="i1", method="m", status="infeasible"),
        ]
        path = str(tmp_path / "records.csv")
        write_records_csv(records, path)
        back = read_records_csv(path)
        assert [r.model_dump(exclude={"curve"}) for r in back] == [r.model_dump(exclude={"curve"}) for r in records]
        write_aggregate_csv(aggregate(back), str(tmp_path / "aggregate.csv"))
        assert (tmp_path / "aggregate.csv").read_text().startswith("method,instances,solved")

    def test_iteration_axis_drops_wall_time(self, tmp_path):
        path = tmp_path / "records.csv"
        write_records_csv([EvalRecord(instance="i", method="m", wall_time=1.5, status="optimal")],
                          str(path), time_axis="lp_iterations")
        assert "wall_time" not in path.read_text()


class TestCurves:
    def test_non_increasing(self):
        records = [
            EvalRecord(instance="a", method="m", obj=10.0, status="optimal", curve=[(1.0, 5.0), (3.0, 10.0)]),
            EvalRecord(instance="b", method="m", obj=4.0, status="optimal", curve=[(2.0, 4.0)]),
        ]
        points = curves(records, {"a": 10.0, "b": 4.0})
        assert [p.t for p in points] == [0.0, 1.0, 2.0, 3.0]
        values = [p.mean_gap_rel for p in points]
        assert values[0] == 1.0
        assert values == sorted(values, reverse=True)
        assert values[-1] == pytest.approx(0.0, abs=1e-9)


class TestPerturb:
    def test_no_flips(self, triangle):
        out = perturb_experiment(triangle, PerturbSpec(trials=4, flips=[0]), EXACT, x_opt=[1.0, 0.0, 0.0])
        assert out[0].infeasible_pct == 0.0
        assert out[0].gap_max == 0.0

    def test_flip_everything(self, triangle):
        out = perturb_experiment(triangle, PerturbSpec(trials=2, flips=[3]), EXACT, x_opt=[1.0, 0.0, 0.0])
        assert out[0].infeasible_pct == 100.0
        assert out[0].gap_avg is None

    def test_single_flip_on_path(self):
        # path 0-1-2: optimum {0, 2}; flipping one pinned value costs at most 1 or breaks feasibility
        inst = independent_set_instance(nx.path_graph(3), name="path")
        out = perturb_experiment(inst, PerturbSpec(trials=10, flips=[1], seed=3), EXACT)
        assert 0.0 <= out[0].infeasible_pct <= 100.0
        if out[0].gap_max is not None:
            assert out[0].gap_max == pytest.approx(1.0)

    def test_seeded(self, triangle):
        spec = PerturbSpec(trials=5, flips=[1, 2], seed=9)
        assert perturb_experiment(triangle, spec, EXACT) == perturb_experiment(triangle, spec, EXACT)

    def test_flip_sets_nested_per_trial(self):
        inst = independent_set_instance(nx.cycle_graph(6), name="cycle")
        x = [1.0, 0.0, 1.0, 0.0, 1.0, 0.0]
        alone = perturb_experiment(inst, PerturbSpec(trials=8, flips=[1], seed=4), EXACT, x_opt=x)
        both = perturb_experiment(inst, PerturbSpec(trials=8, flips=[3, 1], seed=4), EXACT, x_opt=x)
        assert both[1] == alone[0]

    def test_too_many_flips(self, triangle):
        from predsearch.errors import InvalidSizeError

        with pytest.raises(InvalidSizeError):
            perturb_experiment(triangle, PerturbSpec(trials=1, flips=[4]), EXACT, x_opt=[1.0, 0.0, 0.0])


class TestReliability:
    def test_distance_counts_wrong_pins(self, triangle):
        rows = label_distance_experiment(triangle, [0.9, 0.1, 0.1], [0.0, 1.0, 0.0], [(1, 1), (0, 0)])
        assert (rows[0].distance, rows[0].wrong) == (2.0, 2)
        assert rows[1].distance == 0.0


class TestEvaluate:
    def test_end_to_end_with_label_predictions(self, tmp_path):
        instances = [gen_independent_set(12, 2, seed=5, index=i) for i in range(2)]
        label_dir = tmp_path / "labels"
        for inst in instances:
            write_json(collect_sample(inst, EXACT), str(label_dir / f"{inst.name}.json"))
        spec = EvalSpec(
            instances=[inst.name for inst in instances],
            methods=[
                MethodSpec(tag="plain"),
                MethodSpec(tag="ps", kind=MethodKind.SEARCH, label_dir=str(label_dir),
                           search=SearchConfig(k0=2, k1=2, delta=2)),
            ],
            time_limit=None,
            bks_time_limit=None,
            baseline_tag="plain",
            time_axis="lp_iterations",
            workers=2,
        )
        report = evaluate(spec, instances)
        assert len(report.records) == 4
        assert set(report.bks) == {inst.name for inst in instances}
        for rec in report.records:
            assert rec.obj is not None
            assert rec.gap_abs >= 0.0
            if rec.method == "plain":
                assert rec.gap_abs == pytest.approx(0.0, abs=1e-9)
        assert report.aggregate[0].gain_pct == 0.0

    def test_missing_model(self, triangle):
        from predsearch.errors import MissingInputError

        spec = EvalSpec(instances=["triangle"],
                        methods=[MethodSpec(tag="ps", kind=MethodKind.SEARCH, model_path="nope.json")])
        with pytest.raises(MissingInputError):
            evaluate(spec, [triangle])
