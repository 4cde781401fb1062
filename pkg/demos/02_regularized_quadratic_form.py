"""The regularized second-variation form on the plane.

For the variation v = 1, the interior energy integral over the surface minus
small disks around the end grows exactly like the residue counterterm
8 pi / R^2, so the regularized difference is zero at every radius: this is
the cancellation that makes the quadratic form well-defined.  For general v
the limit is finite and matches an independent finite-difference Hessian of
the Willmore energy along normal graphs of the inverted surface.
"""
from willmore import ConstantField, SpherePolynomial, plane_immersion
from willmore.variation import (
    assemble_Q,
    basis_from_fields,
    fd_hessian_oracle,
    q_value,
)

imm = plane_immersion()

print("== exact cancellation for v = 1 ==")
asm = assemble_Q(imm, basis_from_fields(imm, [ConstantField(1.0)]))
for R in asm.radii:
    interior = asm.interior_matrix(R)[0, 0]
    counter = asm.counterterm_matrix(R)[0, 0]
    print(f"  R = {R:5.3f}: interior = {interior:14.6f}   counterterm = {counter:14.6f}"
          f"   difference = {interior - counter:+.3e}")
print(f"  extrapolated Q(1,1) = {asm.Q[0, 0]:+.3e}")

print("\n== quadratic form vs finite-difference Hessian ==")
fields = {
    "1        (dilation)   ": ConstantField(1.0),
    "n3       (translation)": SpherePolynomial({(0, 0, 1): 1.0}),
    "n3^2                  ": SpherePolynomial({(0, 0, 2): 1.0}),
    "n1*n2                 ": SpherePolynomial({(1, 1, 0): 1.0}),
}
for name, v in fields.items():
    q = q_value(imm, v)
    fd = fd_hessian_oracle(imm, v)
    print(f"  v = {name}  Q = {q:+12.6f}   d^2W/dt^2 = {fd:+12.6f}   gap = {abs(q - fd):.2e}")
print("\nthe conformal directions (1, n3) are genuine null directions of the")
print("round sphere; the quadratic modes are strictly stable.")
