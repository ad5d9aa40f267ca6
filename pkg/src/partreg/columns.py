"""Columns-condition certificates: check, enumerate, decide, verify.

An ordered partition (I_1, ..., I_m) of a matrix's column indices witnesses
Rado's columns condition when the I_1 columns sum to zero exactly and each
later block's column sum is a linear combination of all earlier columns.  By
Rado's theorem this decides kernel partition regularity, so the search here
is the core decision procedure; everything is exact rational arithmetic.

Ordered partitions are enumerated in one fixed canonical order (see
enumerate_ordered_partitions), which makes "the first certificate found"
reproducible across runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

from .linalg import Q, QMatrix, QVector, rational, residual_functionals, span_membership

DEFAULT_PARTITION_CAP = 10_000_000


@dataclass(frozen=True)
class OrderedPartition:
    """Ordered list of disjoint, non-empty blocks of column indices."""

    blocks: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(blocks: Iterable[Iterable[int]]) -> "OrderedPartition":
        cleaned = tuple(tuple(sorted(set(int(i) for i in block))) for block in blocks)
        if not cleaned or any(not block for block in cleaned):
            raise ValueError("blocks must be non-empty")
        seen: set[int] = set()
        for block in cleaned:
            for i in block:
                if i < 0:
                    raise ValueError("column indices must be non-negative")
                if i in seen:
                    raise ValueError(f"column {i} appears in two blocks")
                seen.add(i)
        return OrderedPartition(cleaned)

    @staticmethod
    def from_one_based(blocks: Iterable[Iterable[int]]) -> "OrderedPartition":
        return OrderedPartition.of([[i - 1 for i in block] for block in blocks])

    @property
    def block_count(self) -> int:
        return len(self.blocks)

    def universe(self) -> frozenset[int]:
        return frozenset(i for block in self.blocks for i in block)

    def covers(self, v: int) -> bool:
        return self.universe() == frozenset(range(v))

    def to_one_based(self) -> list[list[int]]:
        return [[i + 1 for i in block] for block in self.blocks]

    def __str__(self) -> str:
        return " | ".join("{" + ",".join(str(i + 1) for i in block) + "}" for block in self.blocks)


WitnessTerms = tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class ColumnsConditionCertificate:
    """Ordered partition plus explicit rational witnesses.

    witnesses[t-1] belongs to block t (0-based t >= 1) and lists, for every
    column i of the earlier blocks in increasing index order, a coefficient
    c_i such that the block-t column sum equals sum(c_i * column_i).
    """

    partition: OrderedPartition
    witnesses: tuple[WitnessTerms, ...]

    def witness_map(self, t: int) -> dict[int, Fraction]:
        """Coefficient map for 0-based block index t >= 1."""
        return dict(self.witnesses[t - 1])

    def to_json_dict(self) -> dict:
        return {
            "partition": self.partition.to_one_based(),
            "witnesses": [
                [{"column": i + 1, "coeff": str(c)} for i, c in terms]
                for terms in self.witnesses
            ],
        }

    @staticmethod
    def from_json_dict(data: dict) -> "ColumnsConditionCertificate":
        partition = OrderedPartition.from_one_based(data["partition"])
        witnesses = tuple(
            tuple((int(term["column"]) - 1, rational(term["coeff"])) for term in terms)
            for terms in data.get("witnesses", [])
        )
        return ColumnsConditionCertificate(partition, witnesses)


class PartitionCapExceeded(Exception):
    """Raised when enumeration is truncated by its cap with items remaining."""

    def __init__(self, cap: int):
        super().__init__(f"ordered-partition enumeration capped at {cap}")
        self.cap = cap


@dataclass(frozen=True)
class CapExceeded:
    """Decision outcome: the search was truncated, the question is open."""

    cap: int


def _set_partitions(v: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Set partitions of {0,...,v-1} from restricted-growth strings, lex order.

    Block j is always opened by the least element not already placed in
    blocks 0..j-1.
    """
    a = [0] * v
    # prefix_max[i] = max(a[:i]) for i >= 1, maintained incrementally
    prefix_max = [0] * (v + 1)
    while True:
        blocks: list[list[int]] = [[] for _ in range(max(a) + 1)]
        for i, b in enumerate(a):
            blocks[b].append(i)
        yield tuple(tuple(block) for block in blocks)
        i = v - 1
        while i > 0:
            if a[i] <= prefix_max[i]:
                a[i] += 1
                for j in range(i + 1, v):
                    a[j] = 0
                for j in range(i, v):
                    prefix_max[j + 1] = max(prefix_max[j], a[j])
                break
            i -= 1
        else:
            return


def enumerate_ordered_partitions(
    v: int, cap: int | None = None
) -> Iterator[OrderedPartition]:
    """Yield every ordered set partition of {0,...,v-1} exactly once.

    Canonical order: set partitions come from restricted-growth strings in
    lexicographic order, and each is expanded by permuting its blocks, with
    permutations in lexicographic order.  Once `cap` partitions have been
    yielded and more remain, PartitionCapExceeded is raised, so truncation is
    always explicit.
    """
    if v < 1:
        raise ValueError("need at least one column index")
    produced = 0
    for blocks in _set_partitions(v):
        for perm in itertools.permutations(range(len(blocks))):
            if cap is not None and produced >= cap:
                raise PartitionCapExceeded(cap)
            produced += 1
            yield OrderedPartition(tuple(blocks[i] for i in perm))


def _block_sum(cols: list[QVector], block: tuple[int, ...]) -> QVector:
    acc = list(cols[block[0]].entries)
    for i in block[1:]:
        entries = cols[i].entries
        for r in range(len(acc)):
            acc[r] += entries[r]
    return QVector(tuple(acc))


def check_partition(
    A: QMatrix, partition: OrderedPartition
) -> ColumnsConditionCertificate | None:
    """Certificate for `partition` witnessing the columns condition, or None.

    Witness coefficients come from the canonical exact solve against the
    earlier columns in increasing index order (free coefficients pinned to
    zero); certificates are not unique, only validity is contractual.
    """
    if not partition.covers(A.cols):
        raise ValueError("partition does not cover the matrix's column indices")
    cols = A.columns()
    if not _block_sum(cols, partition.blocks[0]).is_zero():
        return None
    witnesses: list[WitnessTerms] = []
    earlier: list[int] = sorted(partition.blocks[0])
    for t in range(1, partition.block_count):
        target = _block_sum(cols, partition.blocks[t])
        coeffs = span_membership([cols[i] for i in earlier], target)
        if coeffs is None:
            return None
        witnesses.append(tuple(zip(earlier, coeffs)))
        earlier = sorted(earlier + list(partition.blocks[t]))
    return ColumnsConditionCertificate(partition, tuple(witnesses))


def verify_certificate(A: QMatrix, certificate: ColumnsConditionCertificate) -> bool:
    """Exact re-check of every certificate invariant against A.

    Independent of how the certificate was produced; never raises.  False on
    any structural defect (bad partition, out-of-range or non-earlier witness
    columns) or any arithmetic violation.
    """
    try:
        partition = certificate.partition
        if not partition.covers(A.cols):
            return False
        if len(certificate.witnesses) != partition.block_count - 1:
            return False
        cols = A.columns()
        if not _block_sum(cols, partition.blocks[0]).is_zero():
            return False
        earlier: set[int] = set(partition.blocks[0])
        for t in range(1, partition.block_count):
            terms = certificate.witnesses[t - 1]
            used = [i for i, _ in terms]
            if len(set(used)) != len(used) or any(i not in earlier for i in used):
                return False
            target = _block_sum(cols, partition.blocks[t])
            combo = QVector.zero(A.rows)
            for i, c in terms:
                combo = combo + cols[i].scale(c)
            if combo != target:
                return False
            earlier.update(partition.blocks[t])
        return True
    except Exception:
        return False


def decide_columns_condition(
    A: QMatrix, cap: int | None = DEFAULT_PARTITION_CAP
) -> ColumnsConditionCertificate | None | CapExceeded:
    """First certificate in canonical enumeration order, if any.

    None is returned only after the whole space of ordered partitions was
    enumerated; a truncated search returns CapExceeded instead of guessing.
    Cheap filters (first block must sum to zero, later blocks must pass the
    cached annihilator test) prune partitions without changing which
    certificate is found first.
    """
    cols = A.columns()
    u = A.rows
    sum_memo: dict[frozenset[int], tuple[Fraction, ...]] = {}
    residual_memo: dict[frozenset[int], QMatrix] = {}

    def block_sum(block: tuple[int, ...]) -> tuple[Fraction, ...]:
        key = frozenset(block)
        cached = sum_memo.get(key)
        if cached is None:
            acc = [Q(0)] * u
            for i in block:
                entries = cols[i].entries
                for r in range(u):
                    acc[r] += entries[r]
            cached = tuple(acc)
            sum_memo[key] = cached
        return cached

    def residual(prefix: frozenset[int]) -> QMatrix:
        cached = residual_memo.get(prefix)
        if cached is None:
            cached = residual_functionals([cols[i] for i in sorted(prefix)], dim=u)
            residual_memo[prefix] = cached
        return cached

    try:
        for partition in enumerate_ordered_partitions(A.cols, cap):
            if any(x != 0 for x in block_sum(partition.blocks[0])):
                continue
            prefix = frozenset(partition.blocks[0])
            passed = True
            for t in range(1, partition.block_count):
                R = residual(prefix)
                if R.rows:
                    s = block_sum(partition.blocks[t])
                    if any(
                        sum((row[r] * s[r] for r in range(u)), Q(0)) != 0
                        for row in R.entries
                    ):
                        passed = False
                        break
                prefix = prefix | frozenset(partition.blocks[t])
            if passed:
                certificate = check_partition(A, partition)
                assert certificate is not None
                return certificate
    except PartitionCapExceeded as exceeded:
        return CapExceeded(exceeded.cap)
    return None


@dataclass(frozen=True)
class FirstEntriesMatrix:
    """Matrix whose rows each start with a positive entry, consistently per column.

    Validated on construction: no zero row, the first non-zero entry of each
    row is positive, and first entries sharing a column are equal.  Unital
    means every first entry is 1.
    """

    matrix: QMatrix

    def __post_init__(self) -> None:
        by_column: dict[int, Fraction] = {}
        for row in self.matrix.entries:
            j = next((k for k, x in enumerate(row) if x != 0), None)
            if j is None:
                raise ValueError("first-entries matrix cannot have a zero row")
            if row[j] <= 0:
                raise ValueError("first entries must be positive")
            if by_column.setdefault(j, row[j]) != row[j]:
                raise ValueError("first entries in one column must agree")

    @property
    def unital(self) -> bool:
        for row in self.matrix.entries:
            first = next(x for x in row if x != 0)
            if first != 1:
                return False
        return True


def first_entries_from_certificate(
    A: QMatrix, certificate: ColumnsConditionCertificate
) -> FirstEntriesMatrix:
    """Unital first-entries matrix G with A @ G == 0, built from a certificate.

    Column t of G places 1 at the rows of block t and the negated witness
    coefficients of every later block at the rows they reference, so each
    column reproduces one clause of the certificate.  Invalid certificates
    are rejected.
    """
    if not verify_certificate(A, certificate):
        raise ValueError("certificate fails verification against the matrix")
    m = certificate.partition.block_count
    block_of = {
        i: t for t, block in enumerate(certificate.partition.blocks) for i in block
    }
    grid = [[Q(0)] * m for _ in range(A.cols)]
    for i in range(A.cols):
        grid[i][block_of[i]] = Q(1)
    for t, terms in enumerate(certificate.witnesses, start=1):
        for i, coeff in terms:
            grid[i][t] = -coeff
    G = QMatrix(A.cols, m, tuple(tuple(row) for row in grid))
    product = A.matmul(G)
    assert product.is_zero(), "construction violated A @ G == 0"
    return FirstEntriesMatrix(G)


def is_first_entries_sufficient(A: QMatrix) -> Fraction | None:
    """Common positive first entry of all rows, when one exists.

    A fast sufficient condition (not a decision): a matrix with no zero row
    whose rows all start with the same positive value c maps monochromatic
    inputs to monochromatic images after scaling by c.
    """
    common: Fraction | None = None
    for row in A.entries:
        first = next((x for x in row if x != 0), None)
        if first is None or first <= 0:
            return None
        if common is None:
            common = first
        elif first != common:
            return None
    return common
