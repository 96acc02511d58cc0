"""Pure-python kernels. Semantics here are the contract; the compiled
extension must match these results bit-for-bit (same enumeration order,
same left-to-right summation, same tie handling)."""

from itertools import permutations

NEG_INF = float("-inf")


def best_path_exhaustive(scores):
    """Enumerate all n! orders lexicographically; return the one maximizing
    the sum of consecutive-pair scores.

    Returns (order, total, tie_seen). Keeping only strictly-better orders
    during a lexicographic sweep makes the winner the lexicographically
    smallest among ties; tie_seen reports that another order achieved the
    same total.
    """
    s = _rows(scores)
    n = len(s)
    if n == 1:
        return [0], 0.0, False
    best_order = None
    best_total = NEG_INF
    tie_seen = False
    for perm in permutations(range(n)):
        total = 0.0
        last = perm[0]
        for k in range(1, n):
            cur = perm[k]
            total += s[last][cur]
            last = cur
        if best_order is None or total > best_total:
            best_order = perm
            best_total = total
            tie_seen = False
        elif total == best_total:
            tie_seen = True
    return list(best_order), best_total, tie_seen


def best_path_greedy(scores):
    """Greedy chain from every start; keep the best-scoring chain.

    Within a step, ties go to the smallest index; between chains, ties go to
    the lexicographically smallest order (equivalently the smallest start,
    since chains with equal starts are identical).
    """
    s = _rows(scores)
    n = len(s)
    if n == 1:
        return [0], 0.0, False
    best_order = None
    best_total = NEG_INF
    tie_seen = False
    for start in range(n):
        order = [start]
        visited = [False] * n
        visited[start] = True
        total = 0.0
        last = start
        for _ in range(n - 1):
            best_j = -1
            best_s = NEG_INF
            dup = False
            for j in range(n):
                if visited[j]:
                    continue
                v = s[last][j]
                if best_j < 0 or v > best_s:
                    best_j = j
                    best_s = v
                    dup = False
                elif v == best_s:
                    dup = True
            if dup:
                tie_seen = True
            visited[best_j] = True
            order.append(best_j)
            total += best_s
            last = best_j
        if best_order is None or total > best_total:
            best_order = order
            best_total = total
        elif total == best_total:
            tie_seen = True
    return best_order, best_total, tie_seen


def path_total(scores, order):
    """Sum of consecutive-pair scores along order, left to right."""
    s = _rows(scores)
    total = 0.0
    for k in range(1, len(order)):
        total += s[order[k - 1]][order[k]]
    return total


def count_inversions(seq):
    """Number of pairs out of order, by merge sort."""
    _, inv = _sort_count(list(seq))
    return inv


def _sort_count(arr):
    n = len(arr)
    if n <= 1:
        return arr, 0
    mid = n // 2
    left, a = _sort_count(arr[:mid])
    right, b = _sort_count(arr[mid:])
    merged = []
    inv = 0
    i = j = 0
    while i < len(left) and j < len(right):
        if left[i] <= right[j]:
            merged.append(left[i])
            i += 1
        else:
            merged.append(right[j])
            j += 1
            inv += len(left) - i
    merged.extend(left[i:])
    merged.extend(right[j:])
    return merged, a + b + inv


def _rows(scores):
    if hasattr(scores, "tolist"):
        return scores.tolist()
    return scores
