"""Generate integral fixtures for the adaptforge solvers.

Usage: python -m fixturegen --molecule lih --bonds 1.0:3.0:0.5 --out fixtures/
"""
import argparse
import json
import math
import os
import sys

import numpy as np
from pyscf import ao2mo, fci, gto, scf, symm

H2O_ANGLE_DEG = 104.5
PRUNE = 1e-12

SUBGROUP = {"lih": "C2v", "f2": "D2h", "h2": "D2h", "h2o": "C2v"}


def geometry(molecule, r):
    if molecule == "h2":
        return f"H 0 0 0; H 0 0 {r}"
    if molecule == "lih":
        return f"Li 0 0 0; H 0 0 {r}"
    if molecule == "f2":
        return f"F 0 0 0; F 0 0 {r}"
    if molecule == "h2o":
        half = math.radians(H2O_ANGLE_DEG) / 2.0
        y = r * math.sin(half)
        z = r * math.cos(half)
        return f"O 0 0 0; H 0 {y} {z}; H 0 {-y} {z}"
    raise ValueError(f"unknown molecule {molecule}")


def bond_label(r):
    s = f"{r:.4f}".rstrip("0")
    if s.endswith("."):
        s += "0"
    return s


def parse_bonds(spec):
    if ":" in spec:
        lo, hi, step = (float(x) for x in spec.split(":"))
        n = int(round((hi - lo) / step)) + 1
        return [round(lo + i * step, 6) for i in range(n)]
    return [float(x) for x in spec.split(",")]


def generate_one(molecule, r):
    mol = gto.M(
        atom=geometry(molecule, r),
        basis="sto-3g",
        unit="Angstrom",
        symmetry=SUBGROUP[molecule],
        verbose=0,
    )
    mf = scf.ROHF(mol)
    mf.conv_tol = 1e-11
    mf.max_cycle = 500
    mf.kernel()
    if not mf.converged:
        # retry with level shift before giving up
        mf.level_shift = 0.3
        mf.kernel()
    if not mf.converged:
        raise RuntimeError(f"SCF did not converge for {molecule} at {r} A")

    c = mf.mo_coeff
    norb = c.shape[1]
    nelec = mol.nelectron
    if mol.spin != 0:
        raise RuntimeError("closed-shell references only")
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), norb)  # chemist (pq|rs)
    ecore = mol.energy_nuc()

    nso = 2 * norb
    one_body = np.zeros((nso, nso))
    for p in range(norb):
        for q in range(norb):
            one_body[2 * p, 2 * q] = h1[p, q]
            one_body[2 * p + 1, 2 * q + 1] = h1[p, q]

    # coefficient of a+_p a+_q a_r a_s (with the 1/2 prefactor) is <pq|sr> = (ps|qr)
    two_body = []
    for p in range(nso):
        for q in range(nso):
            for r_ in range(nso):
                for s in range(nso):
                    if p % 2 != s % 2 or q % 2 != r_ % 2:
                        continue
                    v = eri[p // 2, s // 2, q // 2, r_ // 2]
                    if abs(v) > PRUNE:
                        two_body.append([p, q, r_, s, float(v)])

    occ = ["1" if i < nelec else "0" for i in range(nso)]
    orbsym = symm.label_orb_symm(mol, mol.irrep_name, mol.symm_orb, c)

    e_fci, _ = fci.direct_spin1.FCI().kernel(h1, eri, norb, (nelec // 2, nelec // 2), ecore=ecore)

    doc = {
        "format_version": 1,
        "molecule_label": molecule,
        "bond_length": r,
        "basis_label": "sto-3g",
        "n_spin_orbitals": nso,
        "n_electrons": nelec,
        "constant": float(ecore),
        "one_body": one_body.tolist(),
        "two_body": two_body,
        "orbital_energies": [float(e) for e in mf.mo_energy],
        "hf_occupation": "".join(occ),
        "irreps": [str(x) for x in orbsym],
    }
    return doc, float(mf.e_tot), float(e_fci)


def main(argv=None):
    ap = argparse.ArgumentParser(prog="fixturegen")
    ap.add_argument("--molecule", required=True, choices=sorted(SUBGROUP))
    ap.add_argument("--bonds", required=True)
    ap.add_argument("--out", default="fixtures")
    args = ap.parse_args(argv)

    out_dir = os.path.join(args.out, args.molecule)
    os.makedirs(out_dir, exist_ok=True)
    golden_path = os.path.join(args.out, "golden.json")
    golden = {}
    if os.path.exists(golden_path):
        with open(golden_path) as fh:
            golden = json.load(fh)

    for r in parse_bonds(args.bonds):
        doc, e_hf, e_fci = generate_one(args.molecule, r)
        label = bond_label(r)
        with open(os.path.join(out_dir, f"{label}.json"), "w") as fh:
            json.dump(doc, fh, separators=(",", ":"))
        golden.setdefault(args.molecule, {})[label] = {"hf": e_hf, "fci": e_fci}
        print(f"{args.molecule} {label} HF={e_hf:.10f} FCI={e_fci:.10f}", file=sys.stderr)

    with open(golden_path, "w") as fh:
        json.dump(golden, fh, indent=2, sort_keys=True)
        fh.write("\n")


if __name__ == "__main__":
    main()
