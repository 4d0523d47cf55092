"""Where does A^k x go: to zero, around in circles, or off to infinity?

For a linear map the answer is decided by which invariant subspaces the
seed touches. Splitting R^n into stable / unit / unstable parts answers it
without iterating anything -- but iteration is cheap, so this script does
both and lets them argue.

The subtle case is a unit-modulus eigenvalue sitting in a nontrivial Jordan
chain: |lambda| = 1 looks harmless, yet A^k grows like k^(depth-1) along the
chain. True eigenvectors of that same eigenvalue still just rotate. The
classifier reports the polynomial degree; the brute-force orbit confirms it
with a straight line in log(norm) vs log(k).
"""

import numpy as np

from limitlab.linear import classify_growth, spectral_split, stability_bound

rng = np.random.default_rng(3)


def brute_norms(A, x, k=400):
    out = np.empty(k + 1)
    v = np.array(x, dtype=float)
    for i in range(k + 1):
        out[i] = np.linalg.norm(v)
        v = A @ v
    return out


# a 4d example: contraction (+0.5), rotation pair on the unit circle, expansion (1.25)
c, s = np.cos(0.7), np.sin(0.7)
A = np.zeros((4, 4))
A[0, 0] = 0.5
A[1:3, 1:3] = [[c, -s], [s, c]]
A[3, 3] = 1.25

split = spectral_split(A)
print("subspace dimensions (stable, unit, unstable):", split.dims)

for x, label in [
    ([1.0, 0.0, 0.0, 0.0], "on the stable axis"),
    ([0.0, 1.0, 1.0, 0.0], "in the rotation plane"),
    ([0.0, 0.0, 0.0, 1e-3], "tiny kick along the expansion"),
    ([1.0, 1.0, 0.0, 0.0], "stable + unit mix"),
]:
    g = classify_growth(A, x)
    norms = brute_norms(A, x)
    print(f"{label:32s} -> {g.verdict:22s} rate={g.rate}"
          f"  |A^400 x| = {norms[-1]:.3e}")

# the stable+unit subspace admits a uniform bound on ||A^k||
basis = np.hstack([split.stable_basis, split.unit_basis])
M = stability_bound(A, basis)
print(f"\nuniform bound on the stable+unit subspace: {M:.6f}")

# unit modulus with a Jordan chain: bounded-looking spectrum, unbounded orbits
J = np.eye(3)
J[0, 1] = J[1, 2] = 1.0
print("\ndefective unit eigenvalue (3-chain at lambda = 1):")
for x, label in [
    ([1.0, 0.0, 0.0], "true eigenvector"),
    ([0.0, 1.0, 0.0], "depth-2 vector"),
    ([0.0, 0.0, 1.0], "depth-3 vector"),
]:
    g = classify_growth(J, x)
    norms = brute_norms(J, x)
    # observed polynomial degree from the last decade of iterates
    deg = np.polyfit(np.log(np.arange(200, 401)), np.log(norms[200:]), 1)[0]
    print(f"  {label:16s} -> {g.verdict:22s} rate={g.rate}"
          f"  measured degree ~ {deg:.3f}")

# same spectrum, diagonalizable: everything stays put
print("\nsame eigenvalues, no chain:")
g = classify_growth(np.eye(3), [1.0, 1.0, 1.0])
print(f"  identity seed      -> {g.verdict} rate={g.rate}")
