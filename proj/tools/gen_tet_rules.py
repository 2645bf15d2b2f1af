#!/usr/bin/env python3
"""Search for fully symmetric, positive-weight, interior quadrature rules on the
reference tetrahedron {x, y, z >= 0, x + y + z <= 1}.

usage: gen_tet_rules.py DEGREE NPOINTS [SEED] [SECONDS]

Prints "DEGREE NPOINTS" followed by one "x y z w" line per node (weights sum
to 1/6). Each candidate orbit structure (S4 orbits of size 1, 4, 6, 12, 24)
is fitted to the monomial moments with scipy least squares from random
starts.
"""
import itertools
import math
import sys
import time

import numpy as np
from scipy.optimize import least_squares

p = int(sys.argv[1])
npts = int(sys.argv[2])
seed = int(sys.argv[3]) if len(sys.argv) > 3 else 0
budget = float(sys.argv[4]) if len(sys.argv) > 4 else 3000.0
rng = np.random.default_rng(seed)

mons = np.array([(i, j, k) for i in range(p + 1) for j in range(p + 1 - i) for k in range(p + 1 - i - j)])
exact = np.array([math.factorial(i) * math.factorial(j) * math.factorial(k) / math.factorial(i + j + k + 3)
                  for i, j, k in mons])
npar = {1: 0, 4: 1, 6: 1, 12: 2, 24: 3}
# Number of S4-invariant polynomials up to each degree: a lower bound on the unknowns.
invariants = {4: 5, 6: 9, 8: 15, 10: 23, 12: 34}


def orbit_perms(cls):
    base = {1: (0, 0, 0, 0), 4: (0, 0, 0, 1), 6: (0, 0, 1, 1), 12: (0, 0, 1, 2), 24: (0, 1, 2, 3)}[cls]
    return np.array(sorted(set(itertools.permutations(base))))


OP = {c: orbit_perms(c) for c in npar}


def generator(cls, par):
    if cls == 1:
        return np.array([0.25])
    if cls == 4:
        a = par[0]
        return np.array([a, 1 - 3 * a])
    if cls == 6:
        a = par[0]
        return np.array([a, 0.5 - a])
    if cls == 12:
        a, c = par
        return np.array([a, c, 1 - 2 * a - c])
    a, c, e = par
    return np.array([a, c, e, 1 - a - c - e])


def unpack(x, struct):
    bary, weights, o = [], [], 0
    for cls in struct:
        g = generator(cls, x[o:o + npar[cls]])
        o += npar[cls]
        bary.append(g[OP[cls]])
        weights.append(np.full(cls, x[o]))
        o += 1
    return np.vstack(bary), np.concatenate(weights)


def residual(x, struct):
    bary, w = unpack(x, struct)
    pts = bary[:, 1:]
    pw = pts[:, :, None] ** np.arange(p + 1)[None, None, :]
    m = pw[:, 0, mons[:, 0]] * pw[:, 1, mons[:, 1]] * pw[:, 2, mons[:, 2]]
    return (w @ m) / exact - 1.0


def acceptable(x, struct):
    bary, w = unpack(x, struct)
    if w.min() <= 0 or bary.min() < -1e-15:
        return False
    return len(np.unique(np.round(bary[:, 1:], 12), axis=0)) == len(w)


def initial(struct):
    x = []
    for cls in struct:
        if cls == 4:
            x.append(rng.uniform(0.01, 0.32))
        elif cls == 6:
            x.append(rng.uniform(0.01, 0.24))
        elif cls == 12:
            a = rng.uniform(0.01, 0.45)
            x += [a, rng.uniform(0.01, 1 - 2 * a - 0.01)]
        elif cls == 24:
            x += list(rng.dirichlet([1, 1, 1, 1])[:3])
        x.append(rng.uniform(0.2, 1.5) / 6 / npts)
    return np.array(x)


def structures():
    out = []
    for n1 in (0, 1):
        for n24 in range(npts // 24 + 1):
            for n12 in range(npts // 12 + 1):
                for n6 in range(npts // 6 + 1):
                    r = npts - n1 - 24 * n24 - 12 * n12 - 6 * n6
                    if r < 0 or r % 4:
                        continue
                    n4 = r // 4
                    unknowns = n1 + 2 * n4 + 2 * n6 + 3 * n12 + 4 * n24
                    if invariants[p] <= unknowns <= invariants[p] + 3:
                        out.append([1] * n1 + [4] * n4 + [6] * n6 + [12] * n12 + [24] * n24)
    rng.shuffle(out)
    return out


def main():
    structs = structures()
    print(len(structs), "structures", file=sys.stderr, flush=True)
    t0 = time.time()
    while time.time() - t0 < budget:
        for struct in structs:
            for _ in range(20):
                try:
                    r = least_squares(residual, initial(struct), args=(struct,), xtol=1e-15, ftol=1e-15,
                                      gtol=1e-15, max_nfev=400)
                except Exception:
                    continue
                if np.max(np.abs(r.fun)) < 1e-13 and acceptable(r.x, struct):
                    bary, w = unpack(r.x, struct)
                    print("found", struct, np.max(np.abs(r.fun)), file=sys.stderr)
                    print(p, len(w))
                    for q, wt in zip(bary[:, 1:], w):
                        print("%.17g %.17g %.17g %.17g" % (q[0], q[1], q[2], wt))
                    return 0
            if time.time() - t0 > budget:
                break
    print("no rule found", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
