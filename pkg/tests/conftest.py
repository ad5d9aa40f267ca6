"""Shared corpus matrices and independent brute-force helpers."""

from __future__ import annotations

import itertools
from fractions import Fraction

from partreg import QMatrix


def schur() -> QMatrix:
    return QMatrix.of([[1, 1, -1]])


def vdw() -> QMatrix:
    return QMatrix.of([
        [-1, 1, 0, 0, -1],
        [0, -1, 1, 0, -1],
        [0, 0, -1, 1, -1],
    ])


def four_seven() -> QMatrix:
    return QMatrix.of([
        [1, 1, 0, -1, 0, 0, 0],
        [1, 0, 1, 0, -1, 0, 0],
        [0, 1, 1, 0, 0, -1, 0],
        [1, 1, 1, 0, 0, 0, -1],
    ])


def fractional_b_matrix() -> QMatrix:
    return QMatrix.of([[4, -4, 2], [5, -5, 3]])


def diag12() -> QMatrix:
    return QMatrix.of([[1, 0], [0, 2]])


def schur_image() -> QMatrix:
    return QMatrix.of([[1, 0], [0, 1], [1, 1]])


def vdw_image() -> QMatrix:
    return QMatrix.of([[1, 0], [1, 1], [1, 2], [1, 3]])


def ordered_bell(n: int) -> int:
    """Independent recurrence: a(n) = sum over k of C(n,k) * a(n-k)."""
    values = [1]
    for m in range(1, n + 1):
        total = 0
        for k in range(1, m + 1):
            total += _binomial(m, k) * values[m - k]
        values.append(total)
    return values[n]


def _binomial(n: int, k: int) -> int:
    result = 1
    for i in range(k):
        result = result * (n - i) // (i + 1)
    return result


def brute_force_ordered_partitions(v: int) -> set[tuple[tuple[int, ...], ...]]:
    """All ordered set partitions, generated independently of the library."""

    def set_partitions(elements: list[int]):
        if not elements:
            yield []
            return
        first, rest = elements[0], elements[1:]
        for partial in set_partitions(rest):
            yield [[first]] + [list(b) for b in partial]
            for i in range(len(partial)):
                copy = [list(b) for b in partial]
                copy[i].append(first)
                yield copy

    out: set[tuple[tuple[int, ...], ...]] = set()
    for blocks in set_partitions(list(range(v))):
        canon = [tuple(sorted(b)) for b in blocks]
        for perm in itertools.permutations(canon):
            out.add(tuple(perm))
    return out


def random_rational(rng, max_num: int = 4, max_den: int = 3) -> Fraction:
    num = rng.randint(-max_num, max_num)
    den = rng.randint(1, max_den)
    return Fraction(num, den)


def random_matrix(rng, rows: int, cols: int, max_num: int = 4, max_den: int = 3) -> QMatrix:
    return QMatrix.of([
        [random_rational(rng, max_num, max_den) for _ in range(cols)]
        for _ in range(rows)
    ])
