"""Where the counterterm comes from: the boundary flux of the curvature
variation one-form.

Around a planar end, the circulation of
(Delta_g w + 2 K w) * star(dw) - star(d|dw|^2_g)/2 over large coordinate
circles grows like -8 pi r^2 v(p)^2 (boundary orientation of the punctured
neighborhood), which is exactly the residue counterterm after the change of
variables r = alpha / R.
"""
import math

import numpy as np

from willmore import INFINITY, SpherePolynomial, plane_immersion
from willmore.charts import IDENTITY
from willmore.geometry import boundary_one_form_values, composite_w
from willmore.quadrature import circulation

imm = plane_immersion()
surface = imm.surface()
v = SpherePolynomial({(0, 0, 0): 0.4, (1, 0, 0): 0.3, (0, 0, 1): 0.5})
w = composite_w(surface, v)
vp = v(INFINITY)


def one_form(chart, nodes):
    a1, a2 = boundary_one_form_values(surface, w, chart, nodes)
    return a1.value, a2.value


print(f"value of v at the end: {vp:.6f};  -8 pi v^2 = {-8 * math.pi * vp**2:.6f}\n")
print("   r      circulation / r^2")
radii = [30.0, 100.0, 300.0, 1000.0]
for r in radii:
    c = circulation(one_form, IDENTITY, r, nt=512, clockwise=True)
    print(f"{r:7.0f}   {c / r**2:+.9f}")

circ = np.array([circulation(one_form, IDENTITY, r, nt=512, clockwise=True) for r in radii])
A = np.stack([np.array(radii) ** 2, np.ones(len(radii))], axis=1)
coef, _ = np.linalg.lstsq(A, circ, rcond=None)[:2]
print(f"\nfitted r^2 coefficient : {coef[0]:+.9f}")
print(f"predicted -8 pi v(p)^2 : {-8 * math.pi * vp**2:+.9f}")
