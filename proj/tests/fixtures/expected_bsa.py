"""Records buried surface areas for the structure fixtures with freesasa.

Atoms: heavy atoms of model 1 amino-acid residues (highest-occupancy
alternate location), Bondi radii, 1.4 A probe, Lee-Richards slices.

Usage: python3 expected_bsa.py structures/2XHE.pdb:A:B ... > expected_bsa.csv
"""
import sys

import freesasa
from Bio.PDB import PDBParser

from expected_interfaces import heavy_atoms, kept_residues

BONDI = {"C": 1.70, "N": 1.55, "O": 1.52, "S": 1.80, "P": 1.80, "SE": 1.90, "F": 1.47,
         "CL": 1.75, "BR": 1.85, "I": 1.98, "H": 1.20}


def chain_atoms(model, chain_id):
    return [a for r in kept_residues(model[chain_id]) for a in heavy_atoms(r)]


def sasa(atoms):
    coords = [float(x) for a in atoms for x in a.coord]
    radii = [BONDI.get(a.element.upper(), 1.80) for a in atoms]
    params = freesasa.Parameters({"algorithm": freesasa.LeeRichards, "n-slices": 100, "probe-radius": 1.4})
    return freesasa.calcCoord(coords, radii, params).totalArea()


def main(specs):
    print("entry,chain_a,chain_b,sasa_a,sasa_b,sasa_complex,bsa")
    parser = PDBParser(QUIET=True)
    for spec in specs:
        path, a, b = spec.split(":")
        s = parser.get_structure("x", path)
        model = next(iter(s))
        atoms_a, atoms_b = chain_atoms(model, a), chain_atoms(model, b)
        sa, sb, sab = sasa(atoms_a), sasa(atoms_b), sasa(atoms_a + atoms_b)
        print(f"{s.header['idcode']},{a},{b},{sa:.2f},{sb:.2f},{sab:.2f},{sa + sb - sab:.2f}")


if __name__ == "__main__":
    main(sys.argv[1:])
