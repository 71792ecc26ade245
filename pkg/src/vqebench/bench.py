"""Benchmark harness: PES scans, error-vs-FCI tables, parameter statistics.

Scan outputs are deterministic for a fixed spec and seed: rows are emitted
in fixture-then-method order regardless of worker completion order, and
wall-clock time is excluded from the determinism contract.
"""

from __future__ import annotations

import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .drivers import (
    OptimizerConfig,
    VQEResult,
    adapt_milestones,
    adapt_vqe,
    minimize,
    uscc_vqe,
)
from .fci import fci_solve, sector_basis
from .fermion import FixtureRecord, load_fcidump, load_manifest, qubit_hamiltonian
from .pools import mp2_amplitudes, spatial_generalized_pool, uccsd_pool, uscc_screen
from .statevector import hf_state

CHEMICAL_ACCURACY = 1.594e-3  # Hartree per kcal/mol

CSV_COLUMNS = [
    "molecule", "basis", "r_value", "method", "eps", "energy", "e_fci",
    "abs_err", "n_params", "n_iterations", "status", "wall_time",
]
CSV_VERSION = "scan-csv-v1"


@dataclass
class MethodSpec:
    flavor: str  # vqe | adapt | uscc
    eps: float | None = None

    def name(self) -> str:
        return self.flavor if self.eps is None else f"{self.flavor}@{self.eps:g}"


@dataclass
class ScanSpec:
    fixtures: list[str]
    methods: list[MethodSpec]
    manifest_path: str
    out_path: str | None = None
    seed: int = 0
    workers: int = 1
    adapt_max_ops: int | None = None

    @classmethod
    def from_json(cls, path) -> "ScanSpec":
        data = json.loads(Path(path).read_text())
        methods = [MethodSpec(m["flavor"], m.get("eps")) for m in data["methods"]]
        return cls(
            fixtures=list(data["fixtures"]),
            methods=methods,
            manifest_path=data["manifest"],
            out_path=data.get("out"),
            seed=int(data.get("seed", 0)),
            workers=int(data.get("workers", 1)),
            adapt_max_ops=data.get("adapt_max_ops"),
        )


@dataclass
class ScanRow:
    molecule: str
    basis: str
    r_value: float
    method: str
    eps: float | None
    energy: float
    e_fci: float
    n_params: int
    n_iterations: int
    status: str
    wall_time: float

    @property
    def abs_err(self) -> float:
        return abs(self.energy - self.e_fci)

    def as_list(self) -> list:
        return [
            self.molecule, self.basis, f"{self.r_value:.3f}", self.method,
            "" if self.eps is None else f"{self.eps:g}", f"{self.energy:.12f}",
            f"{self.e_fci:.12f}", f"{self.abs_err:.6e}", self.n_params,
            self.n_iterations, self.status, f"{self.wall_time:.3f}",
        ]


class PreflightError(RuntimeError):
    pass


def preflight(spec: ScanSpec) -> dict[str, FixtureRecord]:
    manifest = load_manifest(spec.manifest_path)
    missing = [f for f in spec.fixtures if f not in manifest]
    bad_paths = [
        f for f in spec.fixtures
        if f in manifest and not Path(manifest[f].path).exists()
    ]
    if missing or bad_paths:
        raise PreflightError(
            f"missing fixtures: {missing or '-'}; missing files: {bad_paths or '-'}"
        )
    for m in spec.methods:
        if m.eps is not None and m.eps <= 0:
            raise PreflightError(f"non-positive threshold in {m.name()}")
    return manifest


def _scan_fixture(label: str, rec: FixtureRecord, spec: ScanSpec) -> list[ScanRow]:
    rows: list[ScanRow] = []
    mi = load_fcidump(rec.path, label=label)
    h = qubit_hamiltonian(mi)
    sec = sector_basis(mi.n_qubits, mi.n_alpha, mi.n_beta)
    e_fci = fci_solve(h, sec, k=1)[0][0]
    ref = hf_state(mi.n_qubits, mi.hf_occupation())
    cfg = OptimizerConfig(seed=spec.seed)

    def emit(method, eps, result: VQEResult | None, n_params, t0, status=None):
        rows.append(
            ScanRow(
                molecule=rec.molecule, basis=rec.basis, r_value=rec.r_value,
                method=method, eps=eps,
                energy=result.energy if result else float("nan"),
                e_fci=e_fci, n_params=n_params,
                n_iterations=result.iterations if result else 0,
                status=status or ("ok" if result.converged else "unconverged"),
                wall_time=time.time() - t0,
            )
        )

    adapt_epses = sorted(
        (m.eps for m in spec.methods if m.flavor == "adapt"), reverse=True
    )
    if adapt_epses:
        t0 = time.time()
        try:
            pool = spatial_generalized_pool(mi)
            tight = min(adapt_epses)
            res = adapt_vqe(h, ref, pool, tight, cfg, sector=sec,
                            max_ops=spec.adapt_max_ops)
            ms = adapt_milestones(res, adapt_epses)
            for eps in adapt_epses:
                if eps in ms:
                    n, e = ms[eps]
                    sub = VQEResult(e, res.parameters[:n], res.ansatz[:n],
                                    res.iterations, res.gradient_norm_final,
                                    converged=True)
                    emit("adapt", eps, sub, n, t0)
                else:
                    emit("adapt", eps, res, len(res.ansatz), t0, status="unconverged")
        except Exception as exc:  # scan must not abort on one failure
            for eps in adapt_epses:
                emit("adapt", eps, None, 0, t0, status=f"error:{type(exc).__name__}")

    for m in spec.methods:
        if m.flavor == "adapt":
            continue
        t0 = time.time()
        try:
            if m.flavor == "vqe":
                pool = uccsd_pool(mi)
                res = minimize(h, ref, [e for e in pool.entries], cfg, sector=sec)
                emit("vqe", None, res, pool.size, t0)
            elif m.flavor == "uscc":
                res = uscc_vqe(h, ref, mi, m.eps, cfg, sector=sec)
                emit("uscc", m.eps, res, res.extras.get("pool_size", 0), t0)
            else:
                raise ValueError(f"unknown scan method {m.flavor}")
        except Exception as exc:
            emit(m.flavor, m.eps, None, 0, t0, status=f"error:{type(exc).__name__}")
    return rows


def run_scan(spec: ScanSpec) -> list[ScanRow]:
    manifest = preflight(spec)
    results: dict[str, list[ScanRow]] = {}
    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            futures = {
                label: pool.submit(_scan_fixture, label, manifest[label], spec)
                for label in spec.fixtures
            }
            for label, fut in futures.items():
                results[label] = fut.result()
    else:
        for label in spec.fixtures:
            results[label] = _scan_fixture(label, manifest[label], spec)
    rows: list[ScanRow] = []
    for label in spec.fixtures:  # deterministic output order
        rows.extend(results[label])
    return rows


def rows_to_csv(rows: list[ScanRow]) -> str:
    def q(cell) -> str:
        s = str(cell)
        if any(c in s for c in ',"\n'):
            s = '"' + s.replace('"', '""') + '"'
        return s

    out = [f"# {CSV_VERSION}", ",".join(CSV_COLUMNS)]
    for r in rows:
        out.append(",".join(q(c) for c in r.as_list()))
    return "\n".join(out) + "\n"


def rows_to_jsonl(rows: list[ScanRow]) -> str:
    out = []
    for r in rows:
        d = {c: getattr(r, c) for c in
             ("molecule", "basis", "r_value", "method", "eps", "energy",
              "e_fci", "n_params", "n_iterations", "status", "wall_time")}
        d["abs_err"] = r.abs_err
        out.append(json.dumps(d))
    return "\n".join(out) + "\n"


def summarize(rows: list[ScanRow]) -> dict:
    """Per (molecule, basis, method, eps) statistics plus cross-method ratios."""
    if not rows:
        raise ValueError("no rows to summarize")
    groups: dict[tuple, list[ScanRow]] = {}
    for r in rows:
        groups.setdefault((r.molecule, r.basis, r.method, r.eps), []).append(r)
    table = []
    for key in sorted(groups, key=lambda k: tuple(str(x) for x in k)):
        rs = [r for r in groups[key] if not np.isnan(r.energy)]
        if not rs:
            continue
        params = [r.n_params for r in rs]
        errs = [r.abs_err for r in rs]
        table.append(
            {
                "molecule": key[0], "basis": key[1], "method": key[2], "eps": key[3],
                "n_points": len(rs),
                "mean_params": float(np.mean(params)),
                "min_params": int(np.min(params)),
                "max_params": int(np.max(params)),
                "frac_chem_acc": float(np.mean([e < CHEMICAL_ACCURACY for e in errs])),
                "max_abs_err": float(np.max(errs)),
            }
        )
    ratios = []
    by_key = {(t["molecule"], t["basis"], t["method"], t["eps"]): t for t in table}
    for (mol, bas, method, eps), t in by_key.items():
        if method != "uscc" or eps is None:
            continue
        other = by_key.get((mol, bas, "adapt", eps))
        if other and other["mean_params"] > 0:
            ratios.append(
                {
                    "molecule": mol, "basis": bas, "eps": eps,
                    "uscc_over_adapt_params": t["mean_params"] / other["mean_params"],
                }
            )
    return {"groups": table, "ratios": ratios}
