"""Result files: summary table, prediction CSVs, model artifact, DOT export.

The model artifact is a flat `key = value` text file carrying the config
echo, the winning genotype, the trained readout and the trial seeds; floats
are written with repr so a reload re-predicts bit-identically. Summary rows
are tab-separated with the column order documented in the README. In pi mode
the seconds column is written as NA so repeated runs are byte-identical.
"""
from __future__ import annotations

import logging
import os
from dataclasses import dataclass

import numpy as np

from . import topology
from .datasets import TaskSpec, make_task
from .harness import ExperimentConfig, RunReport
from .optimize import GenotypeLayout
from .readout import ReadoutWeights, predict, rmse
from .reservoir import Activation, BuildContext, MSCRGenotype, build_system
from .signs import PI_MODE

log = logging.getLogger(__name__)

SUMMARY_HEADER = "model\tdistribution\tactivation\tmean_rmse\tstd_rmse\trank\teffective_dim\tseconds"


def _fmt_floats(values) -> str:
    return ",".join(repr(float(v)) for v in np.asarray(values).reshape(-1))


def _fmt_bits(values) -> str:
    return ",".join(str(int(v)) for v in np.asarray(values).reshape(-1))


def summary_row(report: RunReport) -> str:
    cfg = report.config
    seconds = "NA" if cfg.signs == PI_MODE else f"{report.seconds:.3f}"
    return "\t".join([
        cfg.model, cfg.signs, cfg.activation,
        f"{report.mean_rmse:.6e}", f"{report.std_rmse:.6e}",
        str(report.best.report.rank), str(report.effective_dim), seconds,
    ])


def write_summary(reports, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for report in reports:
            fh.write(summary_row(report) + "\n")


def write_outputs(report: RunReport, out_dir) -> dict:
    """Write summary, per-trial predictions, fitness traces and the artifact.

    Returns a dict of the written paths.
    """
    os.makedirs(out_dir, exist_ok=True)
    paths = {"summary": os.path.join(out_dir, "summary.tsv")}
    write_summary([report], paths["summary"])

    for i, trial in enumerate(report.trials):
        p = os.path.join(out_dir, f"predictions_trial{i:02d}.csv")
        with open(p, "w", encoding="utf-8") as fh:
            fh.write("y_pred,y_true\n")
            for yp, yt in zip(trial.predictions, trial.targets):
                fh.write(f"{float(yp)!r},{float(yt)!r}\n")
        paths[f"predictions_trial{i:02d}"] = p

    paths["trace"] = os.path.join(out_dir, "trace.csv")
    with open(paths["trace"], "w", encoding="utf-8") as fh:
        fh.write("trial,iteration,best_fitness\n")
        for i, trial in enumerate(report.trials):
            for j, v in enumerate(trial.trace):
                fh.write(f"{i},{j},{float(v)!r}\n")

    paths["artifact"] = os.path.join(out_dir, "artifact.txt")
    write_artifact(report, paths["artifact"])
    return paths


def write_artifact(report: RunReport, path):
    cfg = report.config
    best = report.best
    lines = [
        ("format", "cycleres-artifact-1"),
        ("model", cfg.model),
        ("task", cfg.task),
        ("signs", cfg.signs),
        ("activation", cfg.activation),
        ("k", best.genotype.k),
        ("n", cfg.n),
        ("rho", repr(float(cfg.rho))),
        ("ridge_lambda", repr(float(cfg.ridge_lambda))),
        ("bias", int(cfg.bias)),
        ("bias_scale", repr(float(cfg.bias_scale))),
        ("normalize", "default" if cfg.normalize is None else int(cfg.normalize)),
        ("mstsn_path", cfg.mstsn_path or ""),
        ("seed", cfg.seed),
        ("trials", cfg.trials),
        ("divergent_trials", report.divergent_trials),
        ("best_trial", report.best_trial),
        ("sign_seed", "" if best.sign_seed is None else best.sign_seed),
        ("narma_seed", "" if best.narma_seed is None else best.narma_seed),
        ("genotype_s", _fmt_floats(best.genotype.s)),
        ("genotype_H", _fmt_floats(best.genotype.H)),
        ("genotype_d", _fmt_bits(best.genotype.d)),
        ("genotype_A", _fmt_bits(best.genotype.A)),
        ("rank", best.report.rank),
        ("valid_mask", _fmt_bits(best.report.valid_mask)),
        ("eval_order", _fmt_bits(best.report.eval_order)),
        ("removed_edges", ";".join(f"{i}>{j}" for i, j in best.report.removed_edges)),
        ("validation_fitness", repr(float(best.validation_fitness))),
        ("test_rmse", repr(float(best.test_rmse))),
        ("readout_intercept", int(best.weights.intercept) if best.weights else 0),
        ("readout_weights", _fmt_floats(best.weights.w) if best.weights else ""),
    ]
    with open(path, "w", encoding="utf-8") as fh:
        for key, value in lines:
            fh.write(f"{key} = {value}\n")


@dataclass
class Artifact:
    fields: dict

    def __getitem__(self, key):
        return self.fields[key]

    @property
    def genotype(self) -> MSCRGenotype:
        k = int(self.fields["k"])
        return MSCRGenotype(
            k=k,
            s=_parse_floats(self.fields["genotype_s"]),
            H=_parse_floats(self.fields["genotype_H"]).reshape(k, k),
            d=_parse_bits(self.fields["genotype_d"]),
            A=_parse_bits(self.fields["genotype_A"]).reshape(k, k),
        )

    @property
    def weights(self) -> ReadoutWeights:
        w = _parse_floats(self.fields["readout_weights"])
        intercept = bool(int(self.fields["readout_intercept"]))
        return ReadoutWeights(w=w, features=w.shape[0] - intercept, intercept=intercept)

    @property
    def build_context(self) -> BuildContext:
        f = self.fields
        return BuildContext(
            n=int(f["n"]), rho=float(f["rho"]),
            activation=Activation.parse(f["activation"]),
            sign_mode=f["signs"], sign_seed=int(f["sign_seed"]) if f["sign_seed"] else None,
            bias_enabled=bool(int(f["bias"])), bias_scale=float(f["bias_scale"]),
        )

    @property
    def task_spec(self) -> TaskSpec:
        f = self.fields
        normalize = None if f["normalize"] == "default" else bool(int(f["normalize"]))
        return TaskSpec(name=f["task"],
                        seed=int(f["narma_seed"]) if f["narma_seed"] else None,
                        mstsn_path=f["mstsn_path"] or None, normalize=normalize)


def _parse_floats(text: str) -> np.ndarray:
    if not text:
        return np.empty(0)
    return np.array([float(t) for t in text.split(",")])


def _parse_bits(text: str) -> np.ndarray:
    if not text:
        return np.empty(0, dtype=np.uint8)
    return np.array([int(t) for t in text.split(",")], dtype=np.uint8)


def load_artifact(path) -> Artifact:
    fields = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line.strip():
                continue
            key, _, value = line.partition(" = ")
            fields[key] = value
    if fields.get("format") != "cycleres-artifact-1":
        raise ValueError(f"{path} is not a cycleres artifact")
    return Artifact(fields)


def repredict(artifact: Artifact):
    """Rebuild the stored model and re-score the test segment.

    Returns (test_rmse, predictions); bit-identical to the original run on
    the same kernel backend.
    """
    task = make_task(artifact.task_spec)
    system = build_system(artifact.genotype, artifact.build_context)
    states = system.run(task.inputs, washout=task.washout.stop)
    rows = states[task.test.start - task.washout.stop : task.test.stop - task.washout.stop]
    predictions = predict(rows, artifact.weights)
    return rmse(predictions, task.targets[task.test]), predictions


def export_topology_dot(genotype: MSCRGenotype, path):
    """Write the searched wiring as a DOT digraph.

    Valid encoders become nodes; a pseudo-node `input` feeds each attached
    valid encoder with the edge labeled by its input scaling; kept
    inter-encoder edges between valid encoders are labeled by their gain.
    Invalid encoders and every edge touching them are omitted.
    """
    report, repaired = topology.analyze(genotype.A, genotype.d)
    lines = ["digraph reservoir_topology {", "  rankdir=LR;"]
    valid = [i for i in range(genotype.k) if report.valid_mask[i]]
    if any(genotype.d[i] for i in valid):
        lines.append('  input [shape=diamond, label="u"];')
    for i in valid:
        lines.append(f'  e{i + 1} [shape=circle, label="{i + 1}"];')
    for i in valid:
        if genotype.d[i]:
            lines.append(f'  input -> e{i + 1} [label="s={genotype.s[i]:.6g}"];')
    for src in valid:
        for dst in valid:
            if repaired[src, dst]:
                lines.append(f'  e{src + 1} -> e{dst + 1} [label="H={genotype.H[src, dst]:.6g}"];')
    lines.append("}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
