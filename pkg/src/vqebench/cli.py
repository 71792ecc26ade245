"""Command-line entry point for the workbench.

Exit codes: 0 success, 1 computation finished but flagged unconverged,
2 input/usage errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .bench import ScanSpec, rows_to_csv, rows_to_jsonl, run_scan, summarize
from .drivers import OptimizerConfig, adapt_vqe, minimize, nu_vqe, uscc_vqe
from .excited import EomBasis, fixed_ansatz_factory, fs_vqe, qeom, vqd
from .fci import fci_solve, sector_basis
from .fermion import load_fcidump, load_manifest, qubit_hamiltonian
from .pools import (generalized_pool, mp2_amplitudes, spatial_generalized_pool,
                    uccsd_pool, uscc_screen)
from .statevector import hf_state

EXIT_OK = 0
EXIT_UNCONVERGED = 1
EXIT_INPUT = 2


def default_manifest() -> Path | None:
    env = os.environ.get("VQEBENCH_FIXTURES")
    if env:
        p = Path(env)
        return p if p.name == "manifest.json" else p / "manifest.json"
    here = Path(__file__).resolve()
    candidates = [Path.cwd()] + list(Path.cwd().parents)
    candidates += [here.parents[2], here.parents[3] if len(here.parents) > 3 else here.parents[2]]
    for base in candidates:
        p = base / "fixtures" / "manifest.json"
        if p.exists():
            return p
    return None


def _load_problem(args):
    if args.fcidump:
        mi = load_fcidump(args.fcidump)
    elif args.fixture:
        manifest_path = args.manifest or default_manifest()
        if manifest_path is None:
            raise SystemExit2("no fixture manifest found; set VQEBENCH_FIXTURES")
        manifest = load_manifest(manifest_path)
        if args.fixture not in manifest:
            raise SystemExit2(f"unknown fixture label {args.fixture!r}")
        mi = load_fcidump(manifest[args.fixture].path, label=args.fixture)
    else:
        raise SystemExit2("one of --fcidump or --fixture is required")
    if args.sector:
        try:
            a, b = (int(x) for x in args.sector.split(","))
        except ValueError:
            raise SystemExit2("--sector expects 'n_alpha,n_beta'") from None
        mi.n_alpha, mi.n_beta = a, b
    return mi


class SystemExit2(Exception):
    pass


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2, default=_json_default) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _result_payload(res, e_fci=None) -> dict:
    out = {
        "flavor": res.flavor,
        "energy": res.energy,
        "n_params": res.n_params,
        "iterations": res.iterations,
        "gradient_norm_final": res.gradient_norm_final,
        "converged": res.converged,
        "parameters": res.parameters,
        "ansatz": [op.label for op in res.ansatz],
        "trace": [
            {
                "iteration": t.iteration, "n_ops": t.n_ops, "energy": t.energy,
                "gradient_norm": t.gradient_norm, "selected": t.selected,
            }
            for t in res.trace
        ],
    }
    if e_fci is not None:
        out["e_fci"] = e_fci
        out["abs_err"] = abs(res.energy - e_fci)
    return out


def _setup(mi):
    h = qubit_hamiltonian(mi)
    sec = sector_basis(mi.n_qubits, mi.n_alpha, mi.n_beta)
    ref = hf_state(mi.n_qubits, mi.hf_occupation())
    return h, sec, ref


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="vqebench", description=__doc__)
    ap.add_argument("--manifest", help="fixture manifest path (default: discovered)")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p, eps=False, conv=False):
        p.add_argument("--fcidump")
        p.add_argument("--fixture")
        p.add_argument("--sector", help="n_alpha,n_beta override")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.add_argument("--format", choices=("csv", "json"), default="json")
        if eps:
            p.add_argument("--eps", type=float, default=1e-3)
        if conv:
            p.add_argument("--conv", type=float, default=1e-3)

    for name in ("vqe", "nuvqe", "fci", "pools"):
        add_common(sub.add_parser(name))
    add_common(sub.add_parser("adapt"), conv=True)
    add_common(sub.add_parser("uscc"), eps=True)
    add_common(sub.add_parser("vqd"), conv=True)
    p_fs = sub.add_parser("fs")
    add_common(p_fs)
    p_fs.add_argument("--omega", type=float, required=True)
    add_common(sub.add_parser("qeom"))
    p_scan = sub.add_parser("scan")
    p_scan.add_argument("--config", required=True)
    p_scan.add_argument("--out")
    p_scan.add_argument("--format", choices=("csv", "json"), default="csv")
    p_scan.add_argument("--summary", action="store_true")

    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else 0

    try:
        if args.command == "scan":
            spec = ScanSpec.from_json(args.config)
            rows = run_scan(spec)
            text = rows_to_csv(rows) if args.format == "csv" else rows_to_jsonl(rows)
            out_path = args.out or spec.out_path
            if out_path:
                Path(out_path).write_text(text)
            else:
                sys.stdout.write(text)
            if args.summary:
                sys.stdout.write(json.dumps(summarize(rows), indent=2) + "\n")
            bad = [r for r in rows if r.status != "ok"]
            return EXIT_UNCONVERGED if bad else EXIT_OK

        mi = _load_problem(args)
        cfg = OptimizerConfig(seed=args.seed)
        h, sec, ref = _setup(mi)

        if args.command == "fci":
            pairs = fci_solve(h, sec)
            _emit(
                {
                    "label": mi.label,
                    "n_qubits": mi.n_qubits,
                    "sector": [mi.n_alpha, mi.n_beta],
                    "sector_dim": sec.dim,
                    "energies": [e for e, _ in pairs],
                },
                args,
            )
            return EXIT_OK

        if args.command == "pools":
            payload = {}
            up = uccsd_pool(mi)
            gp = generalized_pool(mi)
            payload["uccsd_size"] = up.size
            payload["generalized_size"] = gp.size
            payload["uscc"] = {}
            amps = mp2_amplitudes(mi)
            for eps in (1e-1, 1e-2, 1e-3, 1e-4):
                payload["uscc"][f"{eps:g}"] = uscc_screen(mi, amps, eps).size
            payload["uccsd_jsonl"] = up.dump_jsonl().splitlines()
            _emit(payload, args)
            return EXIT_OK

        e_fci = fci_solve(h, sec, k=1)[0][0]

        if args.command == "vqe":
            res = minimize(h, ref, [e for e in uccsd_pool(mi).entries], cfg, sector=sec)
        elif args.command == "adapt":
            res = adapt_vqe(h, ref, spatial_generalized_pool(mi), args.conv, cfg, sector=sec)
        elif args.command == "uscc":
            res = uscc_vqe(h, ref, mi, args.eps, cfg, sector=sec)
        elif args.command == "nuvqe":
            res = nu_vqe(h, ref, [e for e in uccsd_pool(mi).entries], cfg, sector=sec)
        elif args.command == "fs":
            res = fs_vqe(h, ref, [e for e in generalized_pool(mi).entries],
                         args.omega, cfg, sector=sec)
        elif args.command == "vqd":
            factory = fixed_ansatz_factory(
                h, ref, [e for e in generalized_pool(mi).entries], cfg, sector=sec
            )
            results = vqd(h, ref, factory, k=1, cfg=cfg, sector=sec)
            spectrum = fci_solve(h, sec, k=len(results))
            _emit(
                {
                    "levels": [
                        {
                            "level": i,
                            "energy": r.energy,
                            "gap_to_ground": r.energy - results[0].energy,
                            "overlap_diagnostics": r.extras.get("overlaps_sq", []),
                            "e_fci": spectrum[i][0] if i < len(spectrum) else None,
                        }
                        for i, r in enumerate(results)
                    ]
                },
                args,
            )
            return (
                EXIT_OK if all(r.converged for r in results) else EXIT_UNCONVERGED
            )
        elif args.command == "qeom":
            basis = EomBasis.singles_doubles(mi)
            energies, _ = qeom(h, ref if sec is None else _ground_state(h, sec), basis)
            spectrum = [e for e, _ in fci_solve(h, sec)]
            _emit(
                {
                    "excitation_energies": energies,
                    "fci_gaps": [e - spectrum[0] for e in spectrum[1:]],
                },
                args,
            )
            return EXIT_OK
        else:
            return EXIT_INPUT

        _emit(_result_payload(res, e_fci), args)
        return EXIT_OK if res.converged else EXIT_UNCONVERGED

    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def _ground_state(h, sec):
    from .fci import fci_solve

    e, vec = fci_solve(h, sec, k=1)[0]
    return sec.embed(vec)


if __name__ == "__main__":
    raise SystemExit(main())
