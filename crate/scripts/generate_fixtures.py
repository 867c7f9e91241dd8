#!/usr/bin/env python3
"""Regenerate the integral fixtures shipped in ../fixtures.

Needs pyscf. Hydrogen systems use symmetrically (Loewdin) orthonormalized
STO-6G atomic orbitals, one per atom. BeH2 freezes the Be 1s core and builds
an active space from Be sp hybrids and the two H 1s functions, orthogonalized
against the core and then symmetrically orthonormalized.

Orbital order (spatial index = position in the list):
  h4_square: atoms clockwise around the square
  h4_linear / h6_linear: atoms left to right
  beh2: H(-z), hybrid(-z), hybrid(+z), H(+z)

The reference energies in reference.json come from pyscf's own FCI solver in
the S_z = 0 sector and are independent of the Rust code.
"""
import json
import os

import numpy as np
from pyscf import ao2mo, fci, gto, scf
from pyscf.tools import fcidump

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "fixtures")
BASIS = "sto-6g"


def lowdin(s):
    w, v = np.linalg.eigh(s)
    return v @ np.diag(w ** -0.5) @ v.T


def write(name, h1, eri, ecore, norb, nelec, refs, meta):
    path = os.path.join(OUT, name + ".fcidump")
    fcidump.from_integrals(path, h1, eri, norb, nelec, nuc=ecore, ms=0,
                           tol=1e-14, float_format=" %.17e")
    e, _ = fci.direct_spin1.kernel(h1, eri, norb, (nelec // 2, nelec // 2),
                                   ecore=ecore, conv_tol=1e-13, max_cycle=500,
                                   nroots=1)
    refs[name] = {"fci_energy": float(e), "n_electrons": nelec, "sz2": 0,
                  "n_spatial": norb, **meta}


def hydrogen(name, coords, refs, meta):
    mol = gto.M(atom=[["H", c] for c in coords], basis=BASIS, unit="Angstrom",
                spin=0, verbose=0)
    coeff = lowdin(mol.intor("int1e_ovlp"))
    hcore = mol.intor("int1e_kin") + mol.intor("int1e_nuc")
    h1 = coeff.T @ hcore @ coeff
    eri = ao2mo.restore(1, ao2mo.kernel(mol, coeff), coeff.shape[1])
    write(name, h1, eri, mol.energy_nuc(), coeff.shape[1], mol.nelectron,
          refs, meta)


def beh2(name, r, refs):
    mol = gto.M(atom=[["Be", (0, 0, 0)], ["H", (0, 0, -r)], ["H", (0, 0, r)]],
                basis=BASIS, unit="Angstrom", spin=0, verbose=0)
    mf = scf.RHF(mol)
    mf.conv_tol = 1e-12
    mf.kernel()
    s = mol.intor("int1e_ovlp")
    labels = mol.ao_labels()

    def ao(tag):
        (idx,) = [i for i, l in enumerate(labels) if tag in l]
        e = np.zeros(s.shape[0])
        e[idx] = 1.0
        return e

    core = mf.mo_coeff[:, 0]
    core = core / np.sqrt(core @ s @ core)
    be2s, be2pz = ao("0 Be 2s"), ao("0 Be 2pz")
    ha, hb = ao("1 H 1s"), ao("2 H 1s")
    raw = [ha, (be2s - be2pz) / np.sqrt(2), (be2s + be2pz) / np.sqrt(2), hb]
    proj = np.eye(s.shape[0]) - np.outer(core, core @ s)
    act = np.array([proj @ v for v in raw]).T
    act = act @ lowdin(act.T @ s @ act)

    hcore = mol.intor("int1e_kin") + mol.intor("int1e_nuc")
    dm_core = 2.0 * np.outer(core, core)
    vj, vk = mf.get_jk(mol, dm_core)
    ecore = mol.energy_nuc() + np.einsum("ij,ji", dm_core, hcore + 0.5 * (vj - 0.5 * vk))
    h1 = act.T @ (hcore + vj - 0.5 * vk) @ act
    norb = act.shape[1]
    eri = ao2mo.restore(1, ao2mo.kernel(mol, act), norb)
    write(name, h1, eri, ecore, norb, mol.nelectron - 2, refs,
          {"system": "BeH2", "bond_length": r, "frozen_core": 1})


def main():
    os.makedirs(OUT, exist_ok=True)
    refs = {}
    d = 1.5
    square = [(0, 0, 0), (0, d, 0), (d, d, 0), (d, 0, 0)]
    hydrogen("h4_square_d1.5", square, refs, {"system": "H4 square", "bond_length": d})
    hydrogen("h4_linear_r1.5", [(0, 0, i * d) for i in range(4)], refs,
             {"system": "H4 linear", "bond_length": d})
    hydrogen("h6_linear_r1.5", [(0, 0, i * d) for i in range(6)], refs,
             {"system": "H6 linear", "bond_length": d})
    for r in (1.5, 2.0, 2.6, 3.0, 3.5):
        beh2("beh2_r%.1f" % r, r, refs)
    with open(os.path.join(OUT, "reference.json"), "w") as fh:
        json.dump(dict(sorted(refs.items())), fh, indent=2)
        fh.write("\n")


if __name__ == "__main__":
    main()
