"""su(2): the Poisson tensor is a coboundary of the Euler field but has no tangential primitive."""
from tpcohomology.catalog import load_entry
from tpcohomology.cohomology import TruncationSpec, is_exact, truncated_dimensions

e = load_entry("su2")
s = e.splitting
L = e.ps.bivector
for slack in range(5):
    print(f"tangential search, degree 6, slack {slack}:",
          is_exact(s, L, slack=slack, window=TruncationSpec(6, 0)).status)
full = is_exact(s, L, slack=0, full_complex=True)
print("full complex:", full.status, "witness", full.witness)

for q in range(3):
    r = truncated_dimensions(s, q, TruncationSpec(3, 1), slack=2)
    print(f"q={q}: kernel {r.kernel_dim}, image {r.image_dim}, quotient {r.quotient_dim}")
    for rep in r.representatives[:4]:
        print("   ", rep)
