"""
Recolouring Lab - Command Line Interface

Named experiments on proper, frugal and frozen colourings: exact enumeration,
recolouring graphs, Glauber mixing, graph constructions and bound verification.
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, Optional

import pandas as pd

from recolor.core.data.exports import all_satisfied, write_payload
from recolor.core.tools import Budgets, ExperimentConfig, experiment_tools, verification_tools
from recolor.core.utils.config import config

COMMAND_PARAMS = {
    "enumerate": ("graph", "family", "n", "a", "b", "l", "k_level", "delta", "copies", "k"),
    "recolouring-graph": ("graph", "family", "n", "a", "b", "l", "k_level", "delta", "copies", "k", "export"),
    "mixing": ("graph", "family", "n", "a", "b", "l", "k_level", "delta", "copies", "k", "mode", "restrict",
               "t_max", "epsilons", "trials", "escape_runs"),
    "construct": ("graph", "family", "n", "a", "b", "l", "k_level", "delta", "copies", "graph_out", "colouring_out"),
    "verify": ("bound", "orders", "count", "samples", "max_n"),
    "random-regular-scan": ("orders", "delta", "trials"),
    "girth-hunt": ("delta", "girth", "copies", "max_trials", "cycle_samples", "graph_out", "colouring_out"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help="64-bit seed (default: RECOLOR_SEED or freshly drawn)")
    common.add_argument("--budget-nodes", type=int, help="Enumeration node budget")
    common.add_argument("--budget-steps", type=int, help="Glauber step budget per chain")
    common.add_argument("--budget-seconds", type=float, help="Wall-clock budget per search (0 = unlimited)")
    common.add_argument("--workers", type=int, help="Worker processes")
    common.add_argument("--output", "-o", type=str, help="Payload file path")
    common.add_argument("--format", choices=["json", "csv"], default="json", help="Payload format (default: json)")
    common.add_argument("--config", type=str, help="JSON file with experiment parameters")
    common.add_argument("--verbose", "-v", action="store_true", help="Verbose output")

    graph_args = argparse.ArgumentParser(add_help=False)
    graph_args.add_argument("--graph", type=str, help="Graph file (n m header, then edges)")
    graph_args.add_argument("--family", type=str,
                            help="complete, cycle, path, star, bipartite, empty, J, beta, lift, random-lift, random-regular")
    graph_args.add_argument("--n", type=int, help="Order of the family graph (leaves for star)")
    graph_args.add_argument("--a", type=int, help="First side of complete bipartite")
    graph_args.add_argument("--b", type=int, help="Second side of complete bipartite")
    graph_args.add_argument("--l", type=int, help="Fibers of J(l)")
    graph_args.add_argument("--k-level", type=int, help="k of J(2k)")
    graph_args.add_argument("--delta", type=int, help="Maximum degree Δ (default: 3)")
    graph_args.add_argument("--copies", type=int, help="Fiber size of a lift")

    parser = argparse.ArgumentParser(
        description="Recolouring Lab - Command Line Interface",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py enumerate --family J --l 2 --delta 3
  python cli.py mixing --exact --family path --n 2 --k 3 --format csv -o results/p2.csv
  python cli.py mixing --lowerbound --k-level 5 --delta 3 --trials 500 --seed 7
  python cli.py verify --bound theorem1 --seed 1
  python cli.py girth-hunt --delta 3 --girth 5 --copies 50 --graph-out witness.txt
        """,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common, graph_args], help="Count all, frugal and frozen colourings")
    p.add_argument("--k", type=int, help="Palette size (default: Δ+1)")

    p = sub.add_parser("recolouring-graph", parents=[common, graph_args], help="Build and summarize the recolouring graph")
    p.add_argument("--k", type=int, help="Palette size (default: Δ+1)")
    p.add_argument("--export", type=str, help="Write the recolouring graph as a graph file")

    p = sub.add_parser("mixing", parents=[common, graph_args], help="Exact TV profile or the level-set lower bound")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const="exact", help="Exact profile (default)")
    mode.add_argument("--lowerbound", dest="mode", action="store_const", const="lowerbound",
                      help="Monte-Carlo level-set experiment on J(2k)")
    p.add_argument("--k", type=int, help="Palette size (default: Δ+1)")
    p.add_argument("--restrict", choices=["all", "nonfrozen"], help="State set for the exact profile")
    p.add_argument("--t-max", type=int, help="Profile horizon")
    p.add_argument("--epsilons", type=float, nargs="+", help="Thresholds for t_mix")
    p.add_argument("--trials", type=int, help="Monte-Carlo trials")
    p.add_argument("--escape-runs", type=int, help="Trajectories for the escape-time distribution")

    p = sub.add_parser("construct", parents=[common, graph_args], help="Build a family graph and its distinguished colouring")
    p.add_argument("--graph-out", type=str, help="Graph file to write")
    p.add_argument("--colouring-out", type=str, help="Colouring file to write")

    p = sub.add_parser("verify", parents=[common], help="Check bounds against exhaustive oracles")
    p.add_argument("--bound", type=str, default="all", help="Sweep name or 'all'")
    p.add_argument("--orders", type=int, nargs="+", help="Graph orders for corpus sweeps")
    p.add_argument("--count", type=int, help="Random instances")
    p.add_argument("--samples", type=int, help="Random samples per order")
    p.add_argument("--max-n", type=int, help="Largest order of random instances")

    p = sub.add_parser("random-regular-scan", parents=[common], help="Frozen-colouring frequency in random regular graphs")
    p.add_argument("--orders", type=int, nargs="+", help="Orders n to sample")
    p.add_argument("--delta", type=int, help="Degree Δ (default: 3)")
    p.add_argument("--trials", type=int, help="Samples per order")

    p = sub.add_parser("girth-hunt", parents=[common], help="Random lifts until the target girth is reached")
    p.add_argument("--delta", type=int, help="Degree Δ (default: 3)")
    p.add_argument("--girth", type=int, help="Target girth")
    p.add_argument("--copies", type=int, help="Fiber size k")
    p.add_argument("--max-trials", type=int, help="Trial budget")
    p.add_argument("--cycle-samples", type=int, help="Lifts sampled for short-cycle means")
    p.add_argument("--graph-out", type=str, help="Witness graph file")
    p.add_argument("--colouring-out", type=str, help="Witness colouring file")

    sub.add_parser("status", help="Show configuration and available experiments")
    return parser


def collect_params(args: argparse.Namespace) -> Dict[str, Any]:
    """Experiment parameters: the --config file first, then explicit flags on top."""
    params: Dict[str, Any] = {}
    if getattr(args, "config", None):
        with open(args.config) as f:
            params.update(json.load(f))
    for name in COMMAND_PARAMS.get(args.command, ()):
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    return params


def build_experiment(args: argparse.Namespace) -> ExperimentConfig:
    defaults = Budgets()
    budgets = Budgets(
        nodes=args.budget_nodes or defaults.nodes,
        steps=args.budget_steps or defaults.steps,
        seconds=args.budget_seconds if args.budget_seconds is not None else defaults.seconds,
    )
    return ExperimentConfig(
        command=args.command,
        params=collect_params(args),
        seed=args.seed,
        budgets=budgets,
        output=args.output,
        format=args.format,
        workers=args.workers or config.WORKERS,
    )


def exit_code(payload: Dict[str, Any]) -> int:
    if payload["status"] == "partial":
        return 2
    if payload["status"] != "ok":
        return 1
    return 0 if all_satisfied(payload) else 1


def main(argv: Optional[list] = None) -> int:
    """Main CLI function."""
    parser = build_parser()
    args = parser.parse_args(argv)

    verbose = getattr(args, "verbose", False)
    logging.basicConfig(
        level=logging.DEBUG if verbose else config.LOG_LEVEL.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    if args.command == "status":
        show_system_status()
        return 0

    experiment = build_experiment(args)
    print(f"🔍 Running {experiment.command}")
    print("=" * 60)

    payload, series = experiment_tools.run(experiment)

    if verbose:
        display_detailed_results(payload)
    else:
        display_summary_results(payload)

    if experiment.output:
        save_results(payload, experiment.output, experiment.format, series)

    return exit_code(payload)


def show_system_status():
    """Display configuration and available experiments."""
    print("🔧 Recolouring Lab - System Status")
    print("=" * 50)

    print("\n⚙️  Configuration:")
    print(f"  Seed: {config.SEED if config.SEED is not None else 'drawn per run'}")
    print(f"  RNG: {config.RNG_ALGORITHM}")
    print(f"  Workers: {config.WORKERS}")
    print(f"  Output Dir: {config.OUTPUT_DIR}")
    print(f"  Log Level: {config.LOG_LEVEL}")

    print("\n⏱️  Budgets:")
    print(f"  Enumeration nodes: {config.get_budget('nodes')}")
    print(f"  Chain steps: {config.get_budget('steps')}")
    print(f"  Wall seconds: {config.get_budget('seconds') or 'unlimited'}")
    print(f"  Dense matrix states: {config.MAX_DENSE_STATES}")

    print("\n🧪 Experiments:")
    for command in experiment_tools.commands:
        print(f"  {command}")
    print(f"\n📐 Verification sweeps: {', '.join(verification_tools.sweeps)}")
    print(f"\n{'✅ Configuration valid' if config.validate_config() else '❌ Configuration invalid'}")


def display_summary_results(payload: Dict[str, Any]):
    """Display concise results."""
    status = payload.get("status")
    result = payload.get("result", {})
    print(f"🎲 Seed: {payload.get('seed')}")

    if status == "failed":
        print(f"❌ Experiment failed: {result.get('error', 'Unknown error')}")
        return
    if status == "partial":
        print(f"⏳ Budget exhausted: {result.get('error')}")
        print(f"   Partial results: {result.get('partial')}")
        return

    for item in payload.get("verdicts", []):
        mark = {True: "✅", False: "❌"}.get(item.get("satisfied"), "❔")
        print(f"  {mark} {item['name']}")

    print(f"\n✅ Status: {status.title()} ({payload['meta']['elapsed']:.2f}s)")


def display_detailed_results(payload: Dict[str, Any]):
    """Display detailed results."""
    display_summary_results(payload)
    if payload.get("status") != "ok":
        return

    print("\n" + "=" * 60)
    print("📊 DETAILED RESULTS")
    print("=" * 60)
    print(json.dumps(payload["result"], indent=2, default=str))


def save_results(payload: Dict[str, Any], output_path: str, fmt: str = "json", series: Optional[pd.DataFrame] = None):
    """Save the payload (and its series for csv) to disk."""
    try:
        for path in write_payload(payload, output_path, fmt, series):
            print(f"\n💾 Results saved to: {path}")
    except OSError as e:
        print(f"❌ Error saving results: {str(e)}")


if __name__ == "__main__":
    sys.exit(main())
