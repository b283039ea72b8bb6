"""Heisenberg algebra: Poisson tensor, splitting, the coboundary and exactness of closed fields."""
from tpcohomology.catalog import load_entry
from tpcohomology.cohomology import TruncationSpec, casimir_basis, is_exact, tangential_cocycles
from tpcohomology.schouten import hamiltonian_field, schouten_bracket, sigma
from tpcohomology.splitting import check_intertwining
from tpcohomology.tensors import MultiVec

e = load_entry("heisenberg")
L = e.ps.bivector
print("Poisson tensor:", L)
print("[L, L] =", schouten_bracket(L, L))
print("H_x1 =", hamiltonian_field(e.ps, e.scalar("x1")), " sigma(x1) =", sigma(e.ps, MultiVec.scalar(e.scalar("x1"))))
print("invariants up to degree 2 with 1/x3:", [str(c) for c in casimir_basis(e.ps, TruncationSpec(2, 1))])

s = e.splitting
print("transversal frame:", [str(X) for X in s.transversal], "coframe:", [str(b) for b in s.transversal_coframe])
report = check_intertwining(s, samples=30, max_degree=3, seed=1)
print(f"intertwining identity: {report.passed}/{report.samples} samples")

closed = tangential_cocycles(s, 1, TruncationSpec(2, 1))
print(f"{len(closed)} closed tangential 1-fields in the window; first three and their primitives:")
for X in closed[:3]:
    v = is_exact(s, X, slack=2)
    print(f"  {X}  ->  {v.status}, witness {v.witness}")
