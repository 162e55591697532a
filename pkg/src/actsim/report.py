"""Experiment sweeps, CSV tables and figures."""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from . import algorithms
from .checks import Check, check_transform, checker_for, fig4_k, generic_checks
from .engine import run
from .instances import (GENERATORS, PointerChasingSpec, UnknownGenerator, fig4_layout,
                        gen_c4_disjointness_instance, gen_c4free_host, gen_dfpc_instance,
                        gen_symmetry_instance, generate, random_disjointness, random_ids,
                        random_labeled_connected)
from .model import Instance, Model, default_N, make_instance, max_degree

COLUMNS = ["instance", "n", "delta", "nact", "eact", "awake", "rounds", "bits", "verdicts"]

LOCAL_ONLY = ("universal-local",)


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep of one algorithm over generated instances.

    ``sweep`` lists the values of the size parameter: ``n`` for graph
    generators and ``k`` for the ``fig4`` generator.
    """

    algorithm: str
    generator: str
    sweep: tuple[int, ...]
    seeds: tuple[int, ...] = (0,)
    model: str | None = None
    edge_prob: float | None = None
    M: int = 1
    round_cap: int | None = None
    out: str | None = None

    def __post_init__(self):
        algorithms.build(self.algorithm, self.M)  # raises UnknownAlgorithm
        if self.generator not in INSTANCE_SOURCES:
            raise UnknownGenerator(self.generator)


@dataclass
class ReportRow:
    instance: str
    n: int
    delta: int
    nact: int
    eact: int
    awake: int
    rounds: int
    bits: int
    checks: list[Check] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def verdicts(self) -> str:
        return ";".join(f"{c.name}={'pass' if c.passed else 'FAIL'}" for c in self.checks)

    def failures(self) -> list[str]:
        return [f"{self.instance}: {c.name} {c.detail}".rstrip() for c in self.checks if not c.passed]

    def as_csv_row(self) -> list:
        return [self.instance, self.n, self.delta, self.nact, self.eact, self.awake,
                self.rounds, self.bits, self.verdicts]


# -- instance sources ------------------------------------------------------


def _inputs_for(algorithm: str, n: int, seed: int, ids: Sequence[int]) -> list[str] | None:
    inner = algorithm.split(":", 1)[1] if algorithm.startswith(("local-to-congest:", "dilated:")) else algorithm
    rng = random.Random(seed)
    if inner == "broadcast-cycle":
        holder = rng.randrange(n)
        return ["1" if v == holder else "0" for v in range(n)]
    if inner == "one-leader":
        return ["1" if rng.random() < 0.3 else "0" for _ in range(n)]
    if inner == "universal-local:identity":
        return [format(rng.randrange(8), "03b") for _ in range(n)]
    return None


def _model_for(spec: ExperimentSpec) -> Model:
    if spec.model:
        return Model(spec.model)
    if spec.algorithm.startswith(LOCAL_ONLY) or spec.algorithm.startswith("local-to-congest:"):
        return Model.LOCAL
    return Model.CONGEST


def _graph_source(spec: ExperimentSpec, size: int, seed: int) -> tuple[str, Instance]:
    kw = {} if spec.edge_prob is None else {"edge_prob": spec.edge_prob}
    g = generate(spec.generator, size, seed, **kw)
    if spec.generator == "random":
        ids = random_ids(size, 4 * size, seed + 1)
    else:
        ids = list(range(1, size + 1))
    inputs = _inputs_for(spec.algorithm, size, seed, ids)
    inst = make_instance(g, ids, inputs, N=default_N(size, ids), model=_model_for(spec),
                         round_cap=spec.round_cap, seed=seed)
    return f"{spec.generator}(n={size},seed={seed})", inst


def _fig4_source(spec: ExperimentSpec, k: int, seed: int) -> tuple[str, Instance]:
    pc = PointerChasingSpec.random(k, seed)
    inst = gen_dfpc_instance(pc, model=_model_for(spec))
    return f"fig4(k={k},n={pc.n},seed={seed})", inst


def _disjointness_source(spec: ExperimentSpec, size: int, seed: int) -> tuple[str, Instance]:
    ds = random_disjointness(gen_c4free_host(size, seed), seed)
    inst = gen_c4_disjointness_instance(ds, connect=True, model=_model_for(spec))
    return f"disjointness(n={size},seed={seed})", inst


def _symmetry_source(spec: ExperimentSpec, size: int, seed: int) -> tuple[str, Instance]:
    a = random_labeled_connected(size, seed)
    b = a if seed % 2 == 0 else random_labeled_connected(size, seed + 1000)
    inst = gen_symmetry_instance(a, b, size, model=_model_for(spec))
    return f"symmetry(n={size},seed={seed})", inst


INSTANCE_SOURCES = {name: _graph_source for name in GENERATORS}
INSTANCE_SOURCES.update({
    "fig4": _fig4_source,
    "disjointness": _disjointness_source,
    "symmetry": _symmetry_source,
})


def build_instance(spec: ExperimentSpec, size: int, seed: int) -> tuple[str, Instance]:
    return INSTANCE_SOURCES[spec.generator](spec, size, seed)


# -- running ---------------------------------------------------------------


def evaluate(name: str, inst: Instance, M: int = 1, label: str = "") -> ReportRow:
    """Run one algorithm on one instance and apply every relevant check."""
    behavior = algorithms.build(name, M)
    res = run(inst, behavior, trace=True)
    checks = generic_checks(inst, res)
    if name.startswith("local-to-congest:"):
        inner = name.split(":", 1)[1]
        local = run(inst.with_params(model=Model.LOCAL), behavior.inner)
        checks += check_transform(local, res, M)
        inner_check = checker_for(inner)
        if res.terminated and inner_check is not None:
            # the inner round bound refers to the untransformed clock
            checks += [c for c in inner_check(inst, res) if c.name != "rounds"]
    else:
        inner_check = checker_for(name)
        if res.terminated and inner_check is not None:
            checks += inner_check(inst, res)
    led = res.ledger
    row = ReportRow(label or f"n={inst.n}", inst.n, max_degree(inst.graph), led.nact, led.eact,
                    led.awake_max, led.rounds_used, led.bits_sent, checks)
    k = fig4_k(inst) if name == "dfpc" else None
    if k is not None:
        row.extra = {"k": k, "centre": led.node_act[fig4_layout(inst.n, k)[0]]}
    return row


def run_experiment(spec: ExperimentSpec) -> list[ReportRow]:
    rows = []
    for size in spec.sweep:
        for seed in spec.seeds:
            label, inst = build_instance(spec, size, seed)
            rows.append(evaluate(spec.algorithm, inst, spec.M, label))
    return rows


def rows_to_csv(rows: Iterable[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow(row.as_csv_row())
    return buf.getvalue()


def separation_table(rows: Iterable[ReportRow]) -> list[dict]:
    """One line per ``k``: the degree, worst node activation, centre
    activation and edge activation (maxima over seeds)."""
    by_k: dict[int, dict] = {}
    for row in rows:
        k = row.extra.get("k")
        if k is None:
            continue
        line = by_k.setdefault(k, {"k": k, "delta": 2 * k + 1, "nact": 0, "centre": 0, "eact": 0})
        line["nact"] = max(line["nact"], row.nact)
        line["centre"] = max(line["centre"], row.extra["centre"])
        line["eact"] = max(line["eact"], row.eact)
    return [by_k[k] for k in sorted(by_k)]


def separation_csv(table: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, ["k", "delta", "nact", "centre", "eact"], lineterminator="\n")
    w.writeheader()
    w.writerows(table)
    return buf.getvalue()


# -- figures ---------------------------------------------------------------


def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    return plt


def plot_activation(rows: Sequence[ReportRow], path: str | Path, title: str = "") -> Path:
    """Node and edge activation against instance size (max over seeds)."""
    plt = _pyplot()
    by_n: dict[int, list[int]] = {}
    for row in rows:
        cur = by_n.setdefault(row.n, [0, 0, 0])
        cur[0] = max(cur[0], row.nact)
        cur[1] = max(cur[1], row.eact)
        cur[2] = max(cur[2], row.awake)
    xs = sorted(by_n)
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(xs, [by_n[x][0] for x in xs], "o-", label="nact")
    ax.plot(xs, [by_n[x][1] for x in xs], "s--", label="eact")
    ax.set_xlabel("n")
    ax.set_ylabel("activations")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def plot_separation(table: Sequence[dict], path: str | Path) -> Path:
    plt = _pyplot()
    ks = [t["k"] for t in table]
    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(ks, [t["centre"] for t in table], "o-", label="centre node activation")
    ax.plot(ks, [t["eact"] for t in table], "s--", label="eact")
    ax.plot(ks, [2 * k for k in ks], ":", color="grey", label="2k")
    ax.set_xlabel("k  (max degree 2k+1)")
    ax.set_ylabel("activations")
    ax.set_ylim(bottom=0)
    ax.legend(frameon=False)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path


def write_report(rows: Sequence[ReportRow], out_dir: str | Path, stem: str) -> list[Path]:
    """CSV table plus figure(s) under ``out_dir``; returns the written paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    p = out / f"{stem}.csv"
    p.write_text(rows_to_csv(rows))
    written.append(p)
    table = separation_table(rows)
    if table:
        p = out / f"{stem}_separation.csv"
        p.write_text(separation_csv(table))
        written.append(p)
        written.append(plot_separation(table, out / f"{stem}_separation.png"))
    if rows:
        written.append(plot_activation(rows, out / f"{stem}.png", title=stem))
    return written
