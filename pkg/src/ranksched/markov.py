"""Strongly connected components and stationary distributions."""
from __future__ import annotations

from fractions import Fraction

EXACT_LIMIT = 64
TV_TOLERANCE = 1e-9


def strongly_connected_components(vertices, successors):
    """Tarjan's algorithm without recursion.

    ``successors(v)`` returns an iterable of vertices.  Components come out
    in reverse topological order, each as a list.
    """
    index = {}
    low = {}
    on_stack = set()
    stack = []
    out = []
    counter = 0
    for root in vertices:
        if root in index:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        work = [(root, iter(successors(root)))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(successors(w))))
                    advanced = True
                    break
                if w in on_stack and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(comp)
    return out


def stationary_exact(states, P):
    """Solve f = fP, sum f = 1 over Fractions.  ``P[s]`` maps successors to
    probabilities and must stay inside ``states``."""
    k = len(states)
    pos = {s: i for i, s in enumerate(states)}
    # row t: sum_s f_s P[s][t] - f_t = 0, last row replaced by normalisation
    A = [[Fraction(0)] * (k + 1) for _ in range(k)]
    for s in states:
        for t, p in P[s].items():
            A[pos[t]][pos[s]] += p
    for t in range(k):
        A[t][t] -= 1
    A[k - 1] = [Fraction(1)] * k + [Fraction(1)]
    for col in range(k):
        piv = next(r for r in range(col, k) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(k):
            if r != col and A[r][col] != 0:
                factor = A[r][col]
                A[r] = [x - factor * y for x, y in zip(A[r], A[col])]
    return {s: A[pos[s]][k] for s in states}


def stationary_approx(states, P, tol=TV_TOLERANCE, max_sweeps=10 ** 6):
    """Power iteration on the lazy chain (I + P) / 2, stopping once two sweeps
    are within ``tol`` in total variation."""
    pos = {s: i for i, s in enumerate(states)}
    k = len(states)
    rows = [[(pos[t], float(p)) for t, p in P[s].items()] for s in states]
    v = [1.0 / k] * k
    for _ in range(max_sweeps):
        nxt = [0.5 * x for x in v]
        for i, row in enumerate(rows):
            half = 0.5 * v[i]
            for t, p in row:
                nxt[t] += half * p
        tv = 0.5 * sum(abs(a - b) for a, b in zip(nxt, v))
        v = nxt
        if tv < tol:
            break
    total = sum(v)
    return {s: Fraction(v[pos[s]] / total).limit_denominator(10 ** 12) for s in states}


def stationary_distribution(states, P):
    """(distribution, exact flag)."""
    if len(states) <= EXACT_LIMIT:
        return stationary_exact(states, P), True
    return stationary_approx(states, P), False
