"""Small exact bipartite matching used by deciders, the oracle, and csuff."""

from __future__ import annotations

from typing import Optional, Sequence


def max_bipartite_matching(n_left: int, n_right: int,
                           adj: Sequence[Sequence[int]]) -> list[int]:
    """Maximum matching via augmenting paths.

    adj[i] lists the right vertices admissible for left vertex i.  Returns
    match_left with match_left[i] = matched right vertex or -1.
    """
    match_left = [-1] * n_left
    match_right = [-1] * n_right

    def augment(i: int, seen: list[bool]) -> bool:
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                if match_right[j] == -1 or augment(match_right[j], seen):
                    match_left[i] = j
                    match_right[j] = i
                    return True
        return False

    for i in range(n_left):
        augment(i, [False] * n_right)
    return match_left


def perfect_matching(n: int, adj: Sequence[Sequence[int]]) -> Optional[list[int]]:
    """A perfect matching of n left to >= n right vertices, or None."""
    n_right = max((max(js, default=-1) for js in adj), default=-1) + 1
    match = max_bipartite_matching(n, max(n, n_right), adj)
    if all(j != -1 for j in match):
        return match
    return None
