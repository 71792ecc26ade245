"""Fixture production: FCIDUMP files plus a manifest with regression energies.

Primary-suite tests consume only the committed outputs of this tool; the
manifest records the RHF energy and an independently computed determinant-CI
ground energy per point as cross-oracle constants.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .detci import fci_ground_energy
from .molecules import BUILDERS, GEOMETRY_NOTES
from .scf import ScfConvergenceError, mo_integrals, run_rhf

FCI_DIM_CAP = 20_000

_CHEMIST_PERMS = [
    (0, 1, 2, 3), (1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
    (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0),
]


def write_fcidump(path: Path, h1: np.ndarray, eri: np.ndarray, e_core: float, n_elec: int):
    n = h1.shape[0]
    lines = [
        f"&FCI NORB={n},NELEC={n_elec},MS2=0,",
        " ORBSYM=" + ",".join(["1"] * n) + ",",
        " ISYM=1,",
        "&END",
    ]
    written = set()
    for i in range(n):
        for j in range(i + 1):
            for k in range(n):
                for l in range(k + 1):
                    key = min(
                        tuple((i, j, k, l)[t] for t in perm) for perm in _CHEMIST_PERMS
                    )
                    if key in written:
                        continue
                    written.add(key)
                    v = eri[i, j, k, l]
                    if abs(v) > 1e-16:
                        lines.append(f"{v:23.16e} {i+1:3d} {j+1:3d} {k+1:3d} {l+1:3d}")
    for i in range(n):
        for j in range(i + 1):
            if abs(h1[i, j]) > 1e-16:
                lines.append(f"{h1[i, j]:23.16e} {i+1:3d} {j+1:3d}   0   0")
    lines.append(f"{e_core:23.16e}   0   0   0   0")
    path.write_text("\n".join(lines) + "\n")


def _sector_dim(n_orb: int, n_alpha: int, n_beta: int) -> int:
    from math import comb

    return comb(n_orb, n_alpha) * comb(n_orb, n_beta)


def generate_point(molecule: str, basis: str, r: float, out_dir: Path) -> dict:
    atoms = BUILDERS[molecule](r)
    res = run_rhf(atoms, basis)
    h1, eri = mo_integrals(res)
    n_orb = h1.shape[0]
    n_alpha = n_beta = res.n_electrons // 2
    label = f"{molecule}_{basis.replace('-', '')}_{r:.3f}"
    fname = f"{label}.fcidump"
    write_fcidump(out_dir / fname, h1, eri, res.e_nuc, res.n_electrons)

    fci = None
    if _sector_dim(n_orb, n_alpha, n_beta) <= FCI_DIM_CAP:
        fci = fci_ground_energy(h1, eri, n_alpha, n_beta, e_core=res.e_nuc)[0]

    return {
        "label": label,
        "path": fname,
        "molecule": molecule,
        "basis": basis,
        "geometry": GEOMETRY_NOTES[molecule],
        "r_value": round(r, 6),
        "n_qubits": 2 * n_orb,
        "n_alpha": n_alpha,
        "n_beta": n_beta,
        "hf_energy": res.e_hf,
        "fci_ground_energy": fci,
    }


def generate(recipe: dict, out_dir: Path) -> dict:
    out_dir.mkdir(parents=True, exist_ok=True)
    fixtures = []
    errors = []
    seen = set()
    for entry in recipe["fixtures"]:
        molecule = entry["molecule"]
        basis = entry["basis"]
        for r in entry["grid"]:
            label = f"{molecule}_{basis.replace('-', '')}_{float(r):.3f}"
            if label in seen:
                raise ValueError(f"duplicate fixture label {label}")
            seen.add(label)
            try:
                rec = generate_point(molecule, basis, float(r), out_dir)
                fixtures.append(rec)
                print(
                    f"  {rec['label']:24s} HF {rec['hf_energy']: .10f}"
                    + (
                        f"  FCI {rec['fci_ground_energy']: .10f}"
                        if rec["fci_ground_energy"] is not None
                        else "  FCI (skipped: sector too large)"
                    ),
                    file=sys.stderr,
                )
            except ScfConvergenceError as exc:
                errors.append({"label": label, "error": str(exc)})
                print(f"  {label:24s} SKIPPED: {exc}", file=sys.stderr)
    manifest = {
        "generator": "integralgen 0.1.0",
        "conventions": {
            "integrals": "MO basis, chemists' (pq|rs), restricted HF orbitals",
            "units": "Hartree; geometry parameters in Angstrom",
        },
        "fixtures": fixtures,
        "errors": errors,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return manifest


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="integralgen", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    gen = sub.add_parser("generate", help="produce FCIDUMP fixtures from a recipe")
    gen.add_argument("--recipe", required=True, type=Path)
    gen.add_argument("--out", required=True, type=Path)
    args = ap.parse_args(argv)
    if args.command == "generate":
        recipe = json.loads(args.recipe.read_text())
        manifest = generate(recipe, args.out)
        print(
            f"wrote {len(manifest['fixtures'])} fixtures, "
            f"{len(manifest['errors'])} skipped",
            file=sys.stderr,
        )
        return 0 if not manifest["errors"] else 1
    return 2


if __name__ == "__main__":
    raise SystemExit(main())
