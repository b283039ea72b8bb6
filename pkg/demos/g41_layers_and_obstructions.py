"""Filiform algebra g41: layers, non-separating invariants, the degree-two homotopy and divergent obstructions."""
from tpcohomology.catalog import g41_tangential_homotopy, load_entry
from tpcohomology.obstruction import entry_obstructions, evaluate_obstruction, independence_certificate
from tpcohomology.schouten import sigma
from tpcohomology.stratification import declared_separation, invariant_jacobian_rank, jump_indices

e = load_entry("g41")
for mu in [(1, 0, 0, 0), (0, 1, 0, 0), (2, 1, -1, 3)]:
    print(f"J at {mu}: {jump_indices(e.spec, e.jh_order, mu)}")
inv = [e.scalar("x1"), e.scalar("x2^2 - 2*x1*x3")]
print("invariant Jacobian rank at (0,1,0,0):", invariant_jacobian_rank(inv, (0, 1, 0, 0)))
print("separation:", declared_separation(e))

phi = e.scalar("x1*x4^2 + x2*x3")
B = g41_tangential_homotopy(phi, e)
print("homotopy witness:", B, " reproduces phi*L:", sigma(e.ps, B) == e.ps.bivector * phi)

for group, specs, grid in entry_obstructions(e):
    for spec in specs:
        v = evaluate_obstruction(spec, grid)
        exponent = "" if v.exponent is None else f", exponent {v.exponent:.3f}"
        print(f"{spec.name}: {v.classification}{exponent}")
    if len(specs) > 1:
        print(" ", independence_certificate(specs, grid).summary())
