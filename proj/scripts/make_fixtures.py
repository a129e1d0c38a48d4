#!/usr/bin/env python3
"""Writes the matrix fixtures in fixtures/ at full double precision."""
import json
import math
import pathlib

import numpy as np

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
r2 = 1 / math.sqrt(2)
r3 = math.sqrt(3) / 2
I = 1j


def write(name, M, kind=None):
    M = np.asarray(M, dtype=complex)
    real = not np.any(M.imag)
    entries = [[float(z.real) if real else [float(z.real), float(z.imag)] for z in row] for row in M]
    doc = {"format": "ndefect-matrix/1", "rows": M.shape[0], "cols": M.shape[1],
           "kind": kind or ("real" if real else "complex"), "entries": entries}
    (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")


shift4 = np.diag(np.ones(3), 1)
rc_ns = np.array([[0, 0, 1, -I],
                  [2, 0, 0, 0],
                  [0, 1, r2, I * r2],
                  [0, -I, I * r2, -r2]])
ex_a = np.array([[1, 0, 0], [0, 1, 1], [1, 0, 1]])
ex_b = np.array([[0, 1, 0], [1, 0, 1], [0, 1, 1.5 * I]])
ex_eig = np.array([[0, 0, r2, I * r2],
                   [0, 0, 1, I],
                   [1, r2, r3, -r3 * I],
                   [I, I * r2, -r3 * I, -r3]])

write("shift4", shift4)
write("rc_ns", rc_ns)
write("ex_a", ex_a)
write("ex_b", ex_b)
write("ex_eig", ex_eig)
write("real_ex_a", ex_a)

# 2 x 4 state [[I, B*], [B, BB* + xx*]] with B from rc_ns and x = sqrt(2) e1:
# the four vectors x, y, B*x, By are independent, so the state is entangled.
x = np.zeros(4, dtype=complex)
x[0] = math.sqrt(2)
C = rc_ns @ rc_ns.conj().T + np.outer(x, x.conj())
M = np.block([[np.eye(4), rc_ns.conj().T], [rc_ns, C]])
write("sep_entangled_n4", M, "psd")

# product state: (1 0; 0 0) (x) rho plus (0 0; 0 1) (x) rho, separable
rho = np.array([[2, 1j, 0], [-1j, 2, 0], [0, 0, 1]])
write("sep_product_n3", np.kron(np.diag([1, 0.5]), rho), "psd")
