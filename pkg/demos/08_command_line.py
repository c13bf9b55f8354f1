"""The command line interface, driven from Python.

Equivalent shell commands are printed before each step.
"""
import json
import tempfile
from pathlib import Path

import numpy as np

from specshift import random_pair
from specshift.cli import main, read_pieces, write_matrix

work = Path(tempfile.mkdtemp(prefix="specshift-demo-"))
H0, V = random_pair(4, np.random.default_rng(0))
write_matrix(work / "h0.json", H0)
write_matrix(work / "v.json", V)


def run(*args):
    print("\n$ specshift", " ".join(args))
    code = main(list(args))
    print("exit code", code)
    return code


run("compute", "--h0", str(work / "h0.json"), "--v", str(work / "v.json"), "-p", "3",
    "--grid", "-5:5:11", "--out", str(work / "densities"))
print((work / "densities" / "masses.csv").read_text())
dens = read_pieces(work / "densities" / "pieces.csv")
print("re-read orders:", sorted(dens))

run("spline", "--nodes", "0,1,3", "--kind", "basic", "--grid", "0:3:7", "--out", str(work / "spline"))

run("verify", "--random", "5", "6", "--orders", "1..4", "--node-sets", "50", "--out", str(work / "report"))
rep = json.loads((work / "report" / "report.json").read_text())
print("first record:", json.dumps(rep["records"][0], indent=1))

# A deliberately non-Hermitian input is a validation error (exit code 2).
(work / "bad.json").write_text('{"dim": 2, "re": [[0, 1], [0, 0]]}')
run("verify", "--h0", str(work / "h0.json"), "--v", str(work / "bad.json"))
print("\nfiles are in", work)
