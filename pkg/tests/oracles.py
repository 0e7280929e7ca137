"""Independent reference implementations used to check the fast paths.

These deliberately use plain Python loops and recompute everything from
the raw inputs (e.g. radii from centers) rather than reusing package code.
"""
import math


def sq_dist(a, b):
    return sum((float(x) - float(y)) * (float(x) - float(y)) for x, y in zip(a, b))


def squared_radii(centers):
    return [min(sq_dist(c, o) for j, o in enumerate(centers) if j != i)
            for i, c in enumerate(centers)]


def cell_of(point, centers, r2=None):
    """Index of the nearest covering ball among ``centers``, or None."""
    if r2 is None:
        r2 = squared_radii(centers)
    best, best_d = None, None
    for i, c in enumerate(centers):
        d = sq_dist(point, c)
        if d <= r2[i] and (best_d is None or d < best_d):
            best, best_d = i, d
    return best


def ik_kernel_bruteforce(partitionings, x, y):
    """Fraction of partitionings in which x and y fall into the same ball."""
    same = 0
    for centers in partitionings:
        r2 = squared_radii(centers)
        a, b = cell_of(x, centers, r2), cell_of(y, centers, r2)
        if a is not None and a == b:
            same += 1
    return same / len(partitionings)


def mean_vec(vectors):
    n = len(vectors)
    return [sum(v[k] for v in vectors) / n for k in range(len(vectors[0]))]


def dot(a, b):
    return sum(float(x) * float(y) for x, y in zip(a, b))


def algorithm1(vectors, scale, tau, rho):
    """Literal prototype discovery on a {graph_id: vector} mapping.

    Returns (clusters, scores) with clusters as (prototype, sorted members)
    and scores as {graph_id: s}; clusters is empty when the first growth is
    rejected.
    """
    def K(g, C):
        return scale * dot(vectors[g], mean_vec([vectors[c] for c in C]))

    Pi = sorted(vectors)
    clusters = []
    while len(Pi) > 1:
        # strict > keeps the first (lowest id) maximiser
        g_p = Pi[0]
        for g in Pi[1:]:
            if K(g, Pi) > K(g_p, Pi):
                g_p = g
        rest = [g for g in Pi if g != g_p]
        g_q = rest[0]
        for g in rest[1:]:
            if K(g, [g_p]) > K(g_q, [g_p]):
                g_q = g
        gamma = (1 - rho) * K(g_q, [g_p])
        if gamma <= tau:
            break
        C = sorted({g_p, g_q})
        while gamma > tau:
            C = sorted({g for g in Pi if K(g, C) > gamma} | {g_p})
            gamma = (1 - rho) * gamma
        clusters.append((g_p, C))
        Pi = [g for g in Pi if g not in C]
    scores = {}
    for g in vectors:
        if clusters:
            scores[g] = max(K(g, C) for _, C in clusters)
    return clusters, scores


def auc_pairwise(scores, labels):
    """O(n^2) concordance: anomaly above normal counts 1, ties 1/2."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    total = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                total += 1.0
            elif p == q:
                total += 0.5
    return total / (len(pos) * len(neg))


def quantile_sorted(values, q):
    """Linear-interpolation quantile on an explicitly sorted list."""
    v = sorted(values)
    pos = q * (len(v) - 1)
    lo = math.floor(pos)
    hi = min(lo + 1, len(v) - 1)
    return v[lo] + (v[hi] - v[lo]) * (pos - lo)
