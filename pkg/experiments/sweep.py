# experiments/sweep.py
"""Back ends of the `run`, `compare` and `dump-topology` commands."""
import os
from concurrent.futures import ProcessPoolExecutor, as_completed
from typing import Dict, List, Optional, Tuple

from tqdm import tqdm

import config as settings
from experiments.config_loader import SweepSpec, load_experiment_config, load_sweep_spec
from network.topology import write_edge_csv
from simulation.engine import ExperimentConfig, build_topology, run_experiment
from simulation.metrics import MetricsTable
from utils.csv_writer import write_csv_atomic

SUMMARY_HEADER = ["paradigm", "connectivity", "reliability", "seed", "final_mean_loss", "final_std_loss",
                  "rounds_to_threshold", "total_messages", "dataset_digest"]

RunKey = Tuple[int, str, int]   # (condition index, paradigm, seed)


def run_csv_name(paradigm: str, seed: int) -> str:
    return f"{paradigm}_{seed}.csv"


def condition_dir(out: str, connectivity: float, reliability: float) -> str:
    return os.path.join(out, f"c{connectivity:g}_r{reliability:g}")


def apply_overrides(experiment: ExperimentConfig, seed: Optional[int] = None,
                    paradigm: Optional[str] = None) -> ExperimentConfig:
    changes = {}
    if seed is not None:
        changes["seed"] = seed
    if paradigm is not None:
        changes["paradigm"] = paradigm
    return experiment.with_overrides(**changes) if changes else experiment


def cmd_run(config_path: str, seed: Optional[int] = None, paradigm: Optional[str] = None,
            out: Optional[str] = None) -> int:
    experiment = apply_overrides(load_experiment_config(config_path), seed, paradigm)
    out = out or settings.OUT_DIR
    print(f"Running {experiment.paradigm} (seed={experiment.seed}, rounds={experiment.rounds}, "
          f"clients={experiment.n_clients}, C={experiment.connectivity:g}, R={experiment.reliability:g})")
    table = run_experiment(experiment)
    path = table.write_csv(os.path.join(out, run_csv_name(experiment.paradigm, experiment.seed)))
    final = table.final()
    print(f"[OK] Metrics written to: {path}")
    print(f"Final mean loss: {final.mean_loss:.6f}  std: {final.std_loss:.6f}  "
          f"messages: {final.messages_sent}  merges: {final.merges_applied}")
    return 0


def expand_sweep(spec: SweepSpec) -> Dict[RunKey, ExperimentConfig]:
    """The paradigm x seed x condition cross product, in summary order."""
    runs: Dict[RunKey, ExperimentConfig] = {}
    for index, (connectivity, reliability) in enumerate(spec.conditions):
        for paradigm in spec.paradigms:
            for seed in spec.seeds:
                runs[(index, paradigm, seed)] = spec.base.with_overrides(
                    paradigm=paradigm, seed=seed, connectivity=connectivity, reliability=reliability)
    return runs


def _run_quietly(experiment: ExperimentConfig) -> MetricsTable:
    return run_experiment(experiment, show_progress=False)


def summary_row(experiment: ExperimentConfig, table: MetricsTable, loss_threshold: float) -> list:
    final = table.final()
    return [experiment.paradigm, experiment.connectivity, experiment.reliability, experiment.seed,
            final.mean_loss, final.std_loss, table.rounds_to_threshold(loss_threshold),
            table.total_messages, table.dataset_digest]


def run_sweep(spec: SweepSpec, jobs: Optional[int] = None) -> Dict[RunKey, MetricsTable]:
    runs = expand_sweep(spec)
    jobs = jobs or spec.jobs
    results: Dict[RunKey, MetricsTable] = {}
    progress = tqdm(total=len(runs), desc="Sweep", ascii=True, unit="run", disable=not settings.SHOW_PROGRESS)
    try:
        if jobs <= 1:
            for key, experiment in runs.items():
                results[key] = _run_quietly(experiment)
                progress.update(1)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as executor:
                futures = {executor.submit(_run_quietly, experiment): key for key, experiment in runs.items()}
                for future in as_completed(futures):
                    key = futures[future]
                    try:
                        results[key] = future.result()
                    except Exception as e:
                        tqdm.write(f"[ERROR] Run {key[1]} seed={key[2]} failed: {e}")
                        for pending in futures:
                            pending.cancel()
                        raise
                    progress.update(1)
    finally:
        progress.close()
    return results


def cmd_compare(sweep_path: str, out: Optional[str] = None, jobs: Optional[int] = None,
                loss_threshold: Optional[float] = None, seed: Optional[int] = None,
                paradigm: Optional[str] = None) -> int:
    spec = load_sweep_spec(sweep_path)
    if seed is not None:
        spec.seeds = [seed]
    if paradigm is not None:
        spec.paradigms = [paradigm]
    out = out or spec.out
    threshold = spec.loss_threshold if loss_threshold is None else loss_threshold
    runs = expand_sweep(spec)
    print(f"Comparing {len(spec.paradigms)} paradigm(s) x {len(spec.seeds)} seed(s) x "
          f"{len(spec.conditions)} condition(s) = {len(runs)} runs")

    results = run_sweep(spec, jobs)
    rows: List[list] = []
    for key, experiment in runs.items():
        table = results[key]
        directory = condition_dir(out, experiment.connectivity, experiment.reliability)
        table.write_csv(os.path.join(directory, run_csv_name(experiment.paradigm, experiment.seed)))
        rows.append(summary_row(experiment, table, threshold))
    summary_path = write_csv_atomic(os.path.join(out, "summary.csv"), SUMMARY_HEADER, rows)
    print(f"[OK] {len(rows)} run CSVs and summary written to: {summary_path}")
    for row in rows:
        print(f"  {row[0]:<10} C={row[1]:g} R={row[2]:g} seed={row[3]}: "
              f"mean={row[4]:.4f} std={row[5]:.4f} threshold_round={row[6]} messages={row[7]}")
    return 0


def cmd_dump_topology(config_path: str, out: Optional[str] = None, seed: Optional[int] = None) -> int:
    experiment = apply_overrides(load_experiment_config(config_path), seed)
    topology = build_topology(experiment)
    path = write_edge_csv(topology, os.path.join(out or settings.OUT_DIR, "topology.csv"))
    print(f"[OK] {len(topology.edges())} edges over {topology.n_nodes} nodes written to: {path}")
    return 0
