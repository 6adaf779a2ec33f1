"""
Command-line job runner. Every subcommand accepts --config <file.json> (validated by the
subcommand's settings model; explicit flags win) and --seed.
"""
import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Type, TypeVar

from pydantic import BaseModel, ValidationError

from predsearch import config
from predsearch.errors import MissingInputError, PredSearchError
from predsearch.harness.evaluate import evaluate, load_instances, load_labels
from predsearch.harness.perturb import perturb_experiment
from predsearch.harness.reliability import label_distance_experiment
from predsearch.instgen import write_instances
from predsearch.learning.features import featurize
from predsearch.learning.gnn import GnnModel
from predsearch.learning.labels import collect_sample
from predsearch.learning.train import train
from predsearch.milp.mps import read_mps_file, write_mps_file
from predsearch.models.eval_model import EvalSpec, GenSpec, PerturbSpec
from predsearch.models.search_model import SearchConfig
from predsearch.models.solve_model import SolveParams, SolveStatus
from predsearch.models.train_model import TrainConfig
from predsearch import reporter
from predsearch.search.partial import select_partial
from predsearch.search.predict_search import predict_and_search, restricted_instance
from predsearch.solver.branch_bound import solve_milp
from predsearch.solver.brute_force import brute_force

logger = logging.getLogger("predsearch.cli")

M = TypeVar("M", bound=BaseModel)


def load_settings(model_cls: Type[M], config_path: Optional[str], overrides: Dict[str, Any]) -> M:
    base: Dict[str, Any] = {}
    if config_path:
        if not os.path.exists(config_path):
            raise MissingInputError(f"config file not found: {config_path}")
        with open(config_path, encoding="utf-8") as f:
            base = json.load(f)
    merged = {**base, **{k: v for k, v in overrides.items() if v is not None}}
    return model_cls.model_validate(merged)


def _solve_params(args, **extra) -> SolveParams:
    overrides = {
        "time_limit": getattr(args, "time_limit", None),
        "pool_size": getattr(args, "pool_size", None),
        "node_limit": getattr(args, "node_limit", None),
        "seed": args.seed,
        **extra,
    }
    params = load_settings(SolveParams, args.config, overrides)
    if getattr(args, "no_time_limit", False):
        params = params.model_copy(update={"time_limit": None})
    return params


# --- subcommands ---------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = load_settings(GenSpec, args.config, {
        "family": args.family, "count": args.count, "nodes": args.nodes, "affinity": args.affinity,
        "items": args.items, "bids": args.bids, "seed": args.seed,
    })
    write_instances(spec, args.out)
    return 0


def cmd_solve(args) -> int:
    inst = read_mps_file(args.instance)
    result = solve_milp(inst, _solve_params(args))
    if args.strip_timings:
        result = result.strip_timings()
    payload = {
        "instance": inst.name,
        "objective": inst.to_original_sense(result.objective) if result.has_solution else None,
        "result": result.model_dump(mode="json"),
    }
    reporter.write_json(payload, args.out)
    return 0


def cmd_collect(args) -> int:
    params = _solve_params(args)
    os.makedirs(args.out_dir, exist_ok=True)
    for inst in load_instances(args.instances):
        sample = collect_sample(inst, params, args.temperature)
        reporter.write_json(sample, os.path.join(args.out_dir, f"{inst.name}.json"))
    return 0


def cmd_featurize(args) -> int:
    graph = featurize(read_mps_file(args.instance))
    reporter.write_json(graph.to_json_dict(), args.out)
    return 0


def _dataset(paths: List[str], label_dir: str):
    return [(featurize(inst), load_labels(label_dir, inst.name).marginals) for inst in load_instances(paths)]


def cmd_train(args) -> int:
    cfg = load_settings(TrainConfig, args.config, {
        "lr": args.lr, "batch_size": args.batch_size, "epochs": args.epochs,
        "hidden_dim": args.hidden_dim, "seed": args.seed,
    })
    data = _dataset(args.instances, args.labels)
    valid = _dataset(args.valid, args.labels) if args.valid else []
    model, history = train(data, cfg, valid or None)
    model.save(args.out, meta={"train_config": cfg.model_dump(mode="json"),
                               "best_epoch": history.best_epoch, "train_instances": len(data)})
    if args.history:
        reporter.write_history_csv(history, args.history)
    return 0


def cmd_predict(args) -> int:
    inst = read_mps_file(args.instance)
    probs = GnnModel.load(args.model).forward(featurize(inst))
    reporter.write_json({"instance": inst.name, "probs": probs.tolist()}, args.out)
    return 0


def cmd_search(args) -> int:
    inst = read_mps_file(args.instance)
    base = load_settings(SearchConfig, args.config, {
        "k0": args.k0, "k1": args.k1, "delta": args.delta, "mode": args.mode,
        "formulation": args.formulation, "time_limit": args.time_limit,
    })
    cfg = base.model_copy(update={"solve_params": base.solve_params.model_copy(update={"seed": args.seed})})
    if args.labels:
        probs = load_labels(args.labels, inst.name).marginals
        model = None
    else:
        if not args.model:
            raise MissingInputError("search needs --model or --labels")
        model = GnnModel.load(args.model)
        probs = model.forward(featurize(inst))
    if args.export_mps:
        ps = select_partial(probs, cfg.k0, cfg.k1)
        write_mps_file(restricted_instance(inst, ps, cfg), args.export_mps)
        logger.info(f"Exported restricted problem to {args.export_mps}")
    result = predict_and_search(inst, model, cfg, probs=probs)
    if args.strip_timings:
        result = result.model_copy(update={"result": result.result.strip_timings(), "predict_seconds": 0.0})
    if args.out:
        reporter.write_json(result, args.out)
    return 0


def cmd_evaluate(args) -> int:
    spec = load_settings(EvalSpec, args.config, {
        "time_limit": args.time_limit, "workers": args.workers, "seed": args.seed,
    })
    report = evaluate(spec)
    out = args.out_dir
    reporter.write_records_csv(report.records, os.path.join(out, "records.csv"), spec.time_axis)
    reporter.write_aggregate_csv(report.aggregate, os.path.join(out, "aggregate.csv"))
    reporter.write_curves_csv(report.curves, os.path.join(out, "curves.csv"), spec.time_axis)
    reporter.write_json(report.bks, os.path.join(out, "bks.json"))
    return 0


def cmd_perturb(args) -> int:
    spec = load_settings(PerturbSpec, args.config, {
        "trials": args.trials, "flips": args.flips, "seed": args.seed,
        "restrict": tuple(args.restrict) if args.restrict else None,
    })
    params = SolveParams(time_limit=None, seed=spec.seed)
    os.makedirs(args.out_dir, exist_ok=True)
    for inst in load_instances(args.instances):
        summaries = perturb_experiment(inst, spec, params)
        reporter.write_perturb_csv(inst.name, summaries, os.path.join(args.out_dir, f"{inst.name}_perturb.csv"))
    return 0


def cmd_oracle(args) -> int:
    inst = read_mps_file(args.instance)
    result = brute_force(inst)
    reporter.write_json({
        "instance": inst.name,
        "objective": inst.to_original_sense(result.incumbent.objective) if result.incumbent else None,
        "result": result.model_dump(mode="json"),
    }, args.out)
    return 0


def cmd_reliability(args) -> int:
    inst = read_mps_file(args.instance)
    sample = load_labels(args.labels, inst.name)
    ref = solve_milp(inst, SolveParams(time_limit=None, seed=args.seed))
    if ref.status != SolveStatus.OPTIMAL:
        raise PredSearchError(f"{inst.name}: reference solve ended {ref.status.value}")
    sizes = [tuple(int(v) for v in s.split(",")) for s in args.sizes]
    rows = label_distance_experiment(inst, sample.marginals, ref.incumbent.values, sizes)
    reporter.write_reliability_csv(inst.name, rows, args.out)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    uvicorn.run("predsearch.app:app", host=args.host, port=args.port)
    return 0


# --- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON settings file; explicit flags override it")
    common.add_argument("--seed", type=int, default=config.SEED)
    common.add_argument("--strip-timings", action="store_true", help="zero wall-clock fields in JSON output")

    budget = argparse.ArgumentParser(add_help=False)
    budget.add_argument("--time-limit", type=float)
    budget.add_argument("--no-time-limit", action="store_true", help="run until optimality")
    budget.add_argument("--node-limit", type=int)
    budget.add_argument("--pool-size", type=int)

    parser = argparse.ArgumentParser(prog="predsearch", description="Predict-and-search toolkit for binary MILPs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", parents=[common], help="generate IS / CA instances as MPS")
    p.add_argument("--family", choices=["independent_set", "combinatorial_auction"])
    p.add_argument("--count", type=int)
    p.add_argument("--nodes", type=int)
    p.add_argument("--affinity", type=int)
    p.add_argument("--items", type=int)
    p.add_argument("--bids", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", parents=[common, budget], help="branch-and-bound solve of one MPS file")
    p.add_argument("instance")
    p.add_argument("--out", default="solve.json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("collect", parents=[common, budget], help="solution pools -> label files")
    p.add_argument("instances", nargs="+")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--temperature", type=float, default=1.0)
    p.set_defaults(func=cmd_collect)

    p = sub.add_parser("featurize", parents=[common], help="bipartite graph JSON")
    p.add_argument("instance")
    p.add_argument("--out", default="graph.json")
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("train", parents=[common], help="train the GNN on labeled instances")
    p.add_argument("--instances", nargs="+", required=True)
    p.add_argument("--valid", nargs="*")
    p.add_argument("--labels", required=True)
    p.add_argument("--epochs", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--batch-size", type=int)
    p.add_argument("--hidden-dim", type=int)
    p.add_argument("--out", default=config.MODEL_PATH)
    p.add_argument("--history")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common], help="marginal probabilities for one instance")
    p.add_argument("--model", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", default="probs.json")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("search", parents=[common], help="predict, restrict and solve once")
    p.add_argument("--model")
    p.add_argument("--labels", help="use label marginals instead of the model")
    p.add_argument("--instance", required=True)
    p.add_argument("--k0", type=int)
    p.add_argument("--k1", type=int)
    p.add_argument("--delta", type=int)
    p.add_argument("--mode", choices=["search", "fix"])
    p.add_argument("--formulation", choices=["indicator", "compact"])
    p.add_argument("--time-limit", type=float)
    p.add_argument("--export-mps")
    p.add_argument("--out")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("evaluate", parents=[common], help="instances x methods evaluation")
    p.add_argument("--time-limit", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("perturb", parents=[common], help="flip-and-fix experiment around the optimum")
    p.add_argument("instances", nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--flips", type=int, nargs="+")
    p.add_argument("--restrict", type=int, nargs=2, metavar=("K0", "K1"))
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("oracle", parents=[common], help="brute-force optimum of a small instance")
    p.add_argument("instance")
    p.add_argument("--out", default="oracle.json")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("reliability", parents=[common], help="distance of label-based partial solutions to the optimum")
    p.add_argument("--instance", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--sizes", nargs="+", required=True, metavar="K0,K1")
    p.add_argument("--out", default="reliability.csv")
    p.set_defaults(func=cmd_reliability)

    p = sub.add_parser("serve", parents=[common], help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    logging.basicConfig(level=config.LOG_LEVEL, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PredSearchError, ValidationError, OSError) as e:
        logger.error(f"❌ {args.command} failed: {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
