"""Longest nondecreasing subsequence statistics of a word."""
import math
from bisect import bisect_right


def lis_length(x):
    """Length of the longest nondecreasing subsequence (patience sorting)."""
    piles = []
    for value in x:
        pos = bisect_right(piles, value)
        if pos == len(piles):
            piles.append(value)
        else:
            piles[pos] = value
    return len(piles)


def count_nondecreasing(x):
    """Exact number of nonempty nondecreasing subsequences of ``x``."""
    # ending[v] = number of subsequences seen so far whose last element is v
    ending = {}
    for value in x:
        below = sum(c for v, c in ending.items() if v <= value)
        ending[value] = ending.get(value, 0) + below + 1
    return sum(ending.values())


def lis_log_count(x):
    """``log2`` of the number of nonempty nondecreasing subsequences."""
    count = count_nondecreasing(x)
    if count == 0:
        return 0.0
    return math.log2(count)
