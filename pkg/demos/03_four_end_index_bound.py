"""A minimal sphere with four planar ends and its index bound.

The surface is derived at import time by solving the conformality (null)
system on the rational ansatz f_j = d_j z + sum_k c_jk/(z - q_k): three
finite poles plus an end at infinity.  Its total curvature is 12 pi, the
inversion is a Willmore sphere of energy 16 pi, and the count of negative
directions of the second variation never exceeds the number of ends.
"""
import math

import numpy as np
from scipy.linalg import eigh

from willmore import invert, quantization_report, willmore_energy, willmore_residual
from willmore.variation import assemble_Q, gram_matrix, polynomial_test_basis
from willmore.weierstrass import four_end_immersion

imm = four_end_immersion()
print("ends:")
for e in imm.ends:
    loc = "infinity" if not np.isfinite(e.location) else f"{e.location:.6f}"
    print(f"  at {loc:>22}: residue norm {e.residue_norm:.6f}, planar={e.planar}, "
          f"embedded={e.embedded}")
print("conformality residual:", imm.null_residual())

rep = quantization_report(imm)
print(f"\ntotal curvature / pi : {rep['total_curvature'] / math.pi:.9f}   (expect 12)")
print(f"inverted energy / pi : {rep['willmore_of_inversion'] / math.pi:.9f}   (expect 16)")

psi = invert(imm.surface())
print(f"direct energy / pi   : {willmore_energy(psi) / math.pi:.9f}")
pts = np.array([0.4 + 0.2j, -0.5 + 0.6j, 0.1 - 0.7j, 2.2 + 1.1j])
print("Willmore residual    :", np.max(willmore_residual(psi, pts)))

print("\nindex bound at increasing basis degree:")
basis = polynomial_test_basis(imm, 4)
asm = assemble_Q(imm, basis)
gram = gram_matrix(basis)
for deg in (2, 3, 4):
    n = (deg + 1) ** 2
    w = eigh(asm.Q[:n, :n], gram[:n, :n], eigvals_only=True)
    tol = max(100.0 * asm.extrapolation_error, 1e-7 * np.abs(w).max())
    neg = int(np.sum(w < -tol))
    print(f"  degree {deg} ({n:2d} functions): negative directions = {neg} <= {imm.m}"
          f"   smallest eigenvalue = {w.min():+.3f}")
