"""Reference implementations that share no code with the package, plus
builders for small random complexes.

The oracles are slow and only meant for tiny inputs.
"""

from itertools import combinations

import numpy as np

from randcech.cech import SimplicialComplex


def circumcentre(P):
    """Centre of the smallest sphere through all rows of P, inside their affine hull."""
    P = np.asarray(P, dtype=float)
    if len(P) == 1:
        return P[0].copy()
    base = P[0]
    A = P[1:] - base
    rhs = 0.5 * np.einsum("ij,ij->i", A, A)
    # centre = base + A^T w with (A A^T) w = rhs
    w, *_ = np.linalg.lstsq(A @ A.T, rhs, rcond=None)
    return base + A.T @ w


def brute_miniball_radius(P):
    """Smallest enclosing radius by trying the circumball of every support subset.

    Every candidate centre yields a valid enclosing ball (radius taken over all
    points), and the optimal support set is among the subsets, so the minimum
    is exact.
    """
    P = np.asarray(P, dtype=float)
    n, d = P.shape
    best = np.inf
    for size in range(1, min(n, d + 1) + 1):
        for sub in combinations(range(n), size):
            c = circumcentre(P[list(sub)])
            best = min(best, float(np.max(np.linalg.norm(P - c, axis=1))))
    return best


def rank_mod2(M):
    M = (np.asarray(M, dtype=np.uint8) & 1).copy()
    rows, cols = M.shape
    rank = 0
    for c in range(cols):
        pivot = next((r for r in range(rank, rows) if M[r, c]), None)
        if pivot is None:
            continue
        M[[rank, pivot]] = M[[pivot, rank]]
        for r in range(rows):
            if r != rank and M[r, c]:
                M[r] ^= M[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def dense_betti(simplices_by_dim, k_max):
    """Betti numbers over Z/2 via ranks of dense boundary matrices."""
    index = [{s: i for i, s in enumerate(sorted(level))} for level in simplices_by_dim]
    ranks = [0] * (len(index) + 1)
    for j in range(1, len(index)):
        faces, cofaces = index[j - 1], index[j]
        if not faces or not cofaces:
            continue
        M = np.zeros((len(faces), len(cofaces)), dtype=np.uint8)
        for s, col in cofaces.items():
            for drop in range(len(s)):
                M[faces[s[:drop] + s[drop + 1:]], col] = 1
        ranks[j] = rank_mod2(M)
    return [len(index[k]) - ranks[k] - ranks[k + 1] for k in range(k_max + 1)]


def union_find_count(n, edges):
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    comps = n
    for a, b in edges:
        ra, rb = find(int(a)), find(int(b))
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps


def closure(maximal):
    """All nonempty faces of the given simplices."""
    out = set()
    for s in maximal:
        s = tuple(sorted(s))
        for k in range(1, len(s) + 1):
            out.update(combinations(s, k))
    return out


def simplices_by_dim(simplex_set, max_dim):
    levels = [[] for _ in range(max_dim + 1)]
    for s in simplex_set:
        if len(s) - 1 <= max_dim:
            levels[len(s) - 1].append(tuple(s))
    return levels


# builders for random test complexes -------------------------------------


def complex_from_set(simplex_set, max_dim, n_vertices=None, seed=None):
    """A SimplicialComplex from vertex tuples; values grow with dimension so faces come first."""
    levels = simplices_by_dim(simplex_set, max_dim)
    rng = np.random.default_rng(seed)
    sims, vals = [], []
    for d, level in enumerate(levels):
        level = sorted(level)
        sims.append(np.array(level, dtype=np.int64).reshape(-1, d + 1))
        vals.append(d + (rng.random(len(level)) if seed is not None else np.zeros(len(level))))
    if n_vertices is None:
        n_vertices = len(levels[0])
    return SimplicialComplex(n_vertices, tuple(sims), tuple(vals), max_dim)


def random_abstract_complex(rng, n_vertices, max_dim):
    maximal = []
    for _ in range(rng.integers(1, 3 * n_vertices)):
        size = min(int(rng.integers(1, max_dim + 2)), n_vertices)
        maximal.append(tuple(sorted(int(v) for v in rng.choice(n_vertices, size=size, replace=False))))
    faces = closure(maximal) | {(v,) for v in range(n_vertices)}
    return faces
