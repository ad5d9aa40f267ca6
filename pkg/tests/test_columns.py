import itertools
import random
from fractions import Fraction as F

import pytest

from conftest import (
    brute_force_ordered_partitions,
    four_seven,
    ordered_bell,
    random_matrix,
    schur,
    schur_image,
    fractional_b_matrix,
    vdw,
)
from partreg import (
    CapExceeded,
    ColumnsConditionCertificate,
    FirstEntriesMatrix,
    OrderedPartition,
    PartitionCapExceeded,
    QMatrix,
    QVector,
    check_partition,
    decide_columns_condition,
    enumerate_ordered_partitions,
    first_entries_from_certificate,
    is_first_entries_sufficient,
    verify_certificate,
)


# ---------------------------------------------------------------- enumeration

def test_enumeration_counts_match_ordered_bell():
    for v in (1, 2, 3, 4, 5):
        count = sum(1 for _ in enumerate_ordered_partitions(v))
        assert count == ordered_bell(v)
    assert ordered_bell(3) == 13
    assert ordered_bell(5) == 541


def test_enumeration_matches_brute_force_up_to_four():
    for v in (1, 2, 3, 4):
        ours = [p.blocks for p in enumerate_ordered_partitions(v)]
        assert len(ours) == len(set(ours)), "duplicates in the stream"
        assert set(ours) == brute_force_ordered_partitions(v)


def test_enumeration_order_is_the_documented_one():
    first_six = [p.blocks for p in itertools.islice(enumerate_ordered_partitions(3), 6)]
    assert first_six == [
        ((0, 1, 2),),
        ((0, 1), (2,)),
        ((2,), (0, 1)),
        ((0, 2), (1,)),
        ((1,), (0, 2)),
        ((0,), (1, 2)),
    ]


def test_cap_raises_only_when_items_remain():
    gen = enumerate_ordered_partitions(3, cap=5)
    for _ in range(5):
        next(gen)
    with pytest.raises(PartitionCapExceeded):
        next(gen)
    # a cap equal to the space size never fires
    assert sum(1 for _ in enumerate_ordered_partitions(3, cap=13)) == 13


def test_ordered_partition_validation():
    with pytest.raises(ValueError):
        OrderedPartition.of([[0, 1], [1, 2]])
    with pytest.raises(ValueError):
        OrderedPartition.of([[0], []])
    with pytest.raises(ValueError):
        OrderedPartition.of([])


# ------------------------------------------------------------ check_partition

def test_check_partition_schur_classical_partition():
    cert = check_partition(schur(), OrderedPartition.from_one_based([[1, 3], [2]]))
    assert cert is not None
    # column 2 = 1 * column 1 + 0 * column 3 under the canonical solve
    assert cert.witnesses == (((0, F(1)), (2, F(0))),)
    assert verify_certificate(schur(), cert)


def test_check_partition_schur_bad_first_block():
    assert check_partition(schur(), OrderedPartition.from_one_based([[1, 2], [3]])) is None


def test_check_partition_vdw_classical_partition():
    cert = check_partition(vdw(), OrderedPartition.from_one_based([[1, 2, 3, 4], [5]]))
    assert cert is not None
    assert verify_certificate(vdw(), cert)
    combo = QVector.zero(3)
    cols = vdw().columns()
    for i, c in cert.witnesses[0]:
        combo = combo + cols[i].scale(c)
    assert combo == cols[4]


def test_check_partition_rejects_non_covering_partition():
    with pytest.raises(ValueError):
        check_partition(schur(), OrderedPartition.from_one_based([[1, 2]]))


# --------------------------------------------------------- verify_certificate

def test_verify_rejects_tampered_witness():
    cert = check_partition(schur(), OrderedPartition.from_one_based([[1, 3], [2]]))
    tampered = ColumnsConditionCertificate(
        cert.partition, (((0, F(7)), (2, F(0))),)
    )
    assert not verify_certificate(schur(), tampered)


def test_verify_rejects_foreign_partition():
    cert = check_partition(schur(), OrderedPartition.from_one_based([[1, 3], [2]]))
    moved = ColumnsConditionCertificate(
        OrderedPartition.from_one_based([[1, 2], [3]]), cert.witnesses
    )
    assert not verify_certificate(schur(), moved)


def test_verify_rejects_witness_using_later_columns():
    cert = ColumnsConditionCertificate(
        OrderedPartition.from_one_based([[1, 3], [2]]),
        (((1, F(1)),),),  # references its own block
    )
    assert not verify_certificate(schur(), cert)


def test_verify_assembled_matrix_at_one_half():
    assembled = QMatrix.of([
        [4, -4, 2, F(-1, 2), 0],
        [5, -5, 3, 0, F(-1, 2)],
    ])
    cert = check_partition(
        assembled, OrderedPartition.from_one_based([[1, 2], [3, 5], [4]])
    )
    assert cert is not None
    assert verify_certificate(assembled, cert)


def test_certificate_json_round_trip():
    cert = check_partition(vdw(), OrderedPartition.from_one_based([[1, 2, 3, 4], [5]]))
    again = ColumnsConditionCertificate.from_json_dict(cert.to_json_dict())
    assert again == cert


# ----------------------------------------------------------------- decisions

def test_decide_schur_finds_the_classical_certificate_first():
    cert = decide_columns_condition(schur())
    assert cert.partition == OrderedPartition.from_one_based([[1, 3], [2]])


def test_decide_four_seven():
    cert = decide_columns_condition(four_seven())
    assert isinstance(cert, ColumnsConditionCertificate)
    assert verify_certificate(four_seven(), cert)
    # the classical partition is itself a witness
    classical = check_partition(
        four_seven(), OrderedPartition.from_one_based([[1, 4, 5, 7], [2, 6], [3]])
    )
    assert classical is not None and verify_certificate(four_seven(), classical)


def test_decide_no_zero_sum_subset_is_definitive():
    assert decide_columns_condition(QMatrix.of([[1, 1]])) is None


def test_decide_reports_cap():
    result = decide_columns_condition(vdw(), cap=1)
    assert result == CapExceeded(1)


def test_decide_is_sound_on_random_matrices():
    rng = random.Random(23)
    for _ in range(25):
        M = random_matrix(rng, rng.randint(1, 2), rng.randint(1, 4), max_num=2, max_den=1)
        result = decide_columns_condition(M)
        if isinstance(result, ColumnsConditionCertificate):
            assert verify_certificate(M, result)


def test_decide_invariant_under_column_permutation_and_row_scaling():
    rng = random.Random(29)
    matrices = [schur(), QMatrix.of([[1, 1]]), schur_image().transpose()]
    for M in matrices:
        baseline = decide_columns_condition(M) is not None
        for _ in range(5):
            perm = list(range(M.cols))
            rng.shuffle(perm)
            permuted = QMatrix.from_columns([M.column(j) for j in perm])
            assert (decide_columns_condition(permuted) is not None) == baseline
            scaled = M.scale(F(rng.choice([1, 2, 3, -1, -2]), rng.choice([1, 2])))
            assert (decide_columns_condition(scaled) is not None) == baseline


# ------------------------------------------------------------- first entries

def test_first_entries_schur_pinned():
    cert = check_partition(schur(), OrderedPartition.from_one_based([[1, 3], [2]]))
    fe = first_entries_from_certificate(schur(), cert)
    assert fe.matrix == QMatrix.of([[1, -1], [0, 1], [1, 0]])
    assert fe.unital
    assert schur().matmul(fe.matrix).is_zero()


def test_first_entries_single_block_is_all_ones_column():
    M = QMatrix.of([[1, -1]])
    cert = check_partition(M, OrderedPartition.from_one_based([[1, 2]]))
    fe = first_entries_from_certificate(M, cert)
    assert fe.matrix == QMatrix.of([[1], [1]])


def test_first_entries_vdw():
    cert = check_partition(vdw(), OrderedPartition.from_one_based([[1, 2, 3, 4], [5]]))
    fe = first_entries_from_certificate(vdw(), cert)
    assert fe.matrix.rows == 5 and fe.matrix.cols == 2
    assert vdw().matmul(fe.matrix).is_zero()
    assert fe.unital


def test_first_entries_rejects_invalid_certificate():
    cert = check_partition(schur(), OrderedPartition.from_one_based([[1, 3], [2]]))
    tampered = ColumnsConditionCertificate(cert.partition, (((0, F(5)), (2, F(0))),))
    with pytest.raises(ValueError):
        first_entries_from_certificate(schur(), tampered)


def test_first_entries_matrix_shape_validation():
    with pytest.raises(ValueError):
        FirstEntriesMatrix(QMatrix.of([[0, 0]]))
    with pytest.raises(ValueError):
        FirstEntriesMatrix(QMatrix.of([[-1, 1]]))
    with pytest.raises(ValueError):
        FirstEntriesMatrix(QMatrix.of([[1, 0], [2, 1]]))
    assert FirstEntriesMatrix(QMatrix.of([[1, 0], [1, 2]])).unital


def test_glance_condition():
    assert is_first_entries_sufficient(schur_image()) == 1
    assert is_first_entries_sufficient(QMatrix.of([[1, 0], [0, 2]])) is None
    assert is_first_entries_sufficient(QMatrix.of([[0]])) is None
    assert is_first_entries_sufficient(QMatrix.of([[F(1, 2), 5], [0, F(1, 2)]])) == F(1, 2)
