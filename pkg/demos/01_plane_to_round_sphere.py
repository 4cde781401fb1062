"""The simplest pipeline: the flat plane, inverted into a round sphere.

The plane is Re(z, -iz, 0) lifted to height 1, a minimal surface with a
single planar end at infinity.  Its inversion x -> x/|x|^2 is a round sphere
of diameter 1: total curvature 0 upstairs, Willmore energy 4 pi downstairs,
and the Willmore equation residual vanishes pointwise.
"""
import math

import numpy as np

from willmore import (
    invert,
    plane_immersion,
    quantization_report,
    surface_point_frame,
    willmore_energy,
    willmore_residual,
)

imm = plane_immersion()
end = imm.ends[0]
print("ends:", imm.m)
print("residue vector at infinity:", np.round(end.residue_vector, 12))
print("residue norm (= 2 alpha^2):", end.residue_norm)
print("asymptotic normal:", end.asymptotic_normal)
print("conformality residual:", imm.null_residual())

rep = quantization_report(imm)
print(f"\ntotal curvature: {rep['total_curvature']:.3e}  (a plane is flat)")
print(f"energy of the inversion via Gauss-Bonnet: {rep['willmore_of_inversion']:.12f}")
print(f"4 pi                                    : {4 * math.pi:.12f}")

psi = invert(imm.surface())
W = willmore_energy(psi)
print(f"energy of the inversion by direct quadrature: {W:.12f}")

fr = surface_point_frame(psi, 0.37 + 0.21j)
print(f"\nmean curvature of the inverted surface: {fr.mean_curvature:.6f} "
      f"(sphere of radius 1/2)")
pts = np.array([0.3 + 0.2j, -1.1 + 0.7j, 2.0 - 0.4j])
print("Willmore equation residual at sample points:", willmore_residual(psi, pts))
