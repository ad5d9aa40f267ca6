"""Scaled columns-condition feasibility over unknown positive scalars.

A ScalingTemplate groups the columns of an assembled matrix under unknown
strictly positive scalars (or fixes them at 1).  For a candidate ordered
partition, build_system linearises the columns condition of the scaled
matrix into an affine system: multiplying columns by positive scalars never
changes their span, so the later-block membership constraints can be stated
once against annihilators of the *unscaled* earlier columns.  That reduction
is what keeps the system affine rather than polynomial; it is valid for any
nonzero scalar values, and the one place scalar value 0 could sneak in
(enumerate_feasible_scalars, which is sign-unconstrained) re-checks 0
directly against the matrix.

feasible_positive decides the system exactly: equalities are eliminated by
Gaussian substitution, then Fourier-Motzkin elimination runs over the strict
inequalities x_i > 0 with strictness tracked through combinations - exact
rational arithmetic makes that sound, no epsilons.  Infeasible systems come
with a Farkas-style witness: a non-negative combination of the positivity
constraints plus an arbitrary-sign combination of the equalities whose
variables cancel and whose constant is contradictory.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from .columns import (
    DEFAULT_PARTITION_CAP,
    OrderedPartition,
    check_partition,
    enumerate_ordered_partitions,
)
from .linalg import Q, QMatrix, QVector, residual_functionals

FIXED_ONE = None  # group tag for columns that carry no scalar


@dataclass(frozen=True)
class ScalingTemplate:
    """Columns of an assembled matrix, grouped under scalar variables.

    group_of[j] is the variable id scaling column j, or FIXED_ONE (None) for
    columns fixed at 1.  Columns sharing a variable are scaled together.
    """

    columns: tuple[QVector, ...]
    group_of: tuple[int | None, ...]
    nvars: int

    def __post_init__(self) -> None:
        if not self.columns:
            raise ValueError("template needs at least one column")
        dim = self.columns[0].dim
        if any(c.dim != dim for c in self.columns):
            raise ValueError("columns differ in dimension")
        if len(self.group_of) != len(self.columns):
            raise ValueError("one group tag per column required")
        used = {g for g in self.group_of if g is not None}
        if used != set(range(self.nvars)):
            raise ValueError("every variable id in 0..nvars-1 must scale some column")

    @property
    def dim(self) -> int:
        return self.columns[0].dim

    def scaled_matrix(self, assignment: Sequence[Fraction]) -> QMatrix:
        """Assembled matrix with each column multiplied by its scalar."""
        if len(assignment) != self.nvars:
            raise ValueError("assignment size does not match variable count")
        scaled = [
            col if g is None else col.scale(assignment[g])
            for col, g in zip(self.columns, self.group_of)
        ]
        return QMatrix.from_columns(scaled)


@dataclass(frozen=True)
class LinearEquality:
    """coeffs . x + const == 0"""

    coeffs: tuple[Fraction, ...]
    const: Fraction


@dataclass(frozen=True)
class AffineSystem:
    nvars: int
    equalities: tuple[LinearEquality, ...]
    positivity: frozenset[int]


@dataclass(frozen=True)
class PositiveSolution:
    """Exact assignment, strictly positive on the system's positivity set."""

    assignment: tuple[Fraction, ...]


@dataclass(frozen=True)
class FarkasWitness:
    """Certified infeasibility.

    ineq_multipliers[j] >= 0 weighs the constraint x_p > 0 for p the j-th
    smallest member of the positivity set; eq_multipliers[l] (any sign)
    weighs equality l.  The weighted sum of these affine forms has zero
    coefficients and a constant that contradicts the derived relation.
    """

    ineq_multipliers: tuple[Fraction, ...]
    eq_multipliers: tuple[Fraction, ...]


def verify_farkas(system: AffineSystem, witness: FarkasWitness) -> bool:
    """Re-derive the contradiction from the witness multipliers."""
    pos = sorted(system.positivity)
    if len(witness.ineq_multipliers) != len(pos):
        return False
    if len(witness.eq_multipliers) != len(system.equalities):
        return False
    if any(lam < 0 for lam in witness.ineq_multipliers):
        return False
    coeffs = [Q(0)] * system.nvars
    const = Q(0)
    for lam, p in zip(witness.ineq_multipliers, pos):
        coeffs[p] += lam
    for mu, eq in zip(witness.eq_multipliers, system.equalities):
        for i, c in enumerate(eq.coeffs):
            coeffs[i] += mu * c
        const += mu * eq.const
    if any(c != 0 for c in coeffs):
        return False
    if any(lam > 0 for lam in witness.ineq_multipliers):
        return const <= 0  # derived "const > 0" fails
    return const != 0  # derived "const == 0" fails


# Internal inequality representation: coeffs over the free variables,
# constant, strictness, and provenance multipliers (lam over positivity
# constraints, mu over original equalities).
_Ineq = tuple[tuple[Fraction, ...], Fraction, bool, tuple[Fraction, ...], tuple[Fraction, ...]]


def _prune(ineqs: list[_Ineq]) -> tuple[list[_Ineq], _Ineq | None]:
    """Drop tautologies and dominated rows; surface constant contradictions.

    Rows are normalised by their first non-zero coefficient's absolute value
    (a positive scaling, so provenance multipliers stay valid); among rows
    with equal coefficients only the tightest constant survives.  Dominance
    never changes feasibility.
    """
    best: dict[tuple[tuple[Fraction, ...], bool], _Ineq] = {}
    order: list[tuple[tuple[Fraction, ...], bool]] = []
    for coeffs, const, strict, lam, mu in ineqs:
        lead = next((c for c in coeffs if c != 0), None)
        if lead is None:
            if const < 0 or (const == 0 and strict):
                return [], (coeffs, const, strict, lam, mu)
            continue  # tautology
        scale = Q(1) / abs(lead)
        if scale != 1:
            coeffs = tuple(scale * c for c in coeffs)
            const = scale * const
            lam = tuple(scale * x for x in lam)
            mu = tuple(scale * x for x in mu)
        key = (coeffs, strict)
        kept = best.get(key)
        if kept is None:
            best[key] = (coeffs, const, strict, lam, mu)
            order.append(key)
        elif const < kept[1]:
            best[key] = (coeffs, const, strict, lam, mu)
    return [best[k] for k in order], None


def solve_positive(
    system: AffineSystem,
) -> tuple[PositiveSolution | None, FarkasWitness | None]:
    """Decide the system exactly; return (solution, None) or (None, witness)."""
    nv = system.nvars
    pos = sorted(system.positivity)
    n_eq = len(system.equalities)

    # --- stage 1: eliminate equalities by exact Gauss-Jordan substitution ---
    # Each reduced row keeps the invariant: row form == sum(mu_l * equality_l).
    reduced: list[list] = []  # items: [pivot, coeffs, const, mu]
    for idx, eq in enumerate(system.equalities):
        coeffs = list(eq.coeffs)
        const = eq.const
        mu = [Q(0)] * n_eq
        mu[idx] = Q(1)
        for p, pcoeffs, pconst, pmu in reduced:
            f = coeffs[p]
            if f != 0:
                coeffs = [a - f * b for a, b in zip(coeffs, pcoeffs)]
                const -= f * pconst
                mu = [a - f * b for a, b in zip(mu, pmu)]
        pivot = next((i for i, c in enumerate(coeffs) if c != 0), None)
        if pivot is None:
            if const != 0:
                return None, FarkasWitness((Q(0),) * len(pos), tuple(mu))
            continue
        inv = Q(1) / coeffs[pivot]
        coeffs = [inv * c for c in coeffs]
        const *= inv
        mu = [inv * m for m in mu]
        for row in reduced:
            f = row[1][pivot]
            if f != 0:
                row[1] = [a - f * b for a, b in zip(row[1], coeffs)]
                row[2] = row[2] - f * const
                row[3] = [a - f * b for a, b in zip(row[3], mu)]
        reduced.append([pivot, coeffs, const, mu])

    pivot_rows = {p: (coeffs, const, mu) for p, coeffs, const, mu in reduced}
    free_vars = [i for i in range(nv) if i not in pivot_rows]
    nf = len(free_vars)

    # --- stage 2: restate each positivity constraint over the free variables ---
    ineqs: list[_Ineq] = []
    for j, p in enumerate(pos):
        lam = tuple(Q(1) if i == j else Q(0) for i in range(len(pos)))
        if p in pivot_rows:
            coeffs, const, mu = pivot_rows[p]
            # x_p = -const - sum(coeffs_f * x_f) on the solution set
            fcoeffs = tuple(-coeffs[f] for f in free_vars)
            ineqs.append((fcoeffs, -const, True, lam, tuple(-m for m in mu)))
        else:
            fcoeffs = tuple(Q(1) if f == p else Q(0) for f in free_vars)
            ineqs.append((fcoeffs, Q(0), True, lam, (Q(0),) * n_eq))

    ineqs, contradiction = _prune(ineqs)
    if contradiction is not None:
        return None, FarkasWitness(contradiction[3], contradiction[4])

    # --- stage 3: Fourier-Motzkin over the free variables ---
    snapshots: list[tuple[int, list[_Ineq], list[_Ineq]]] = []
    while True:
        occurring = [
            k for k in range(nf) if any(row[0][k] != 0 for row in ineqs)
        ]
        if not occurring:
            break
        # classic heuristic: eliminate the variable minimising lower*upper
        def cost(k: int, rows: list[_Ineq] = ineqs) -> tuple[int, int]:
            lo = sum(1 for row in rows if row[0][k] > 0)
            hi = sum(1 for row in rows if row[0][k] < 0)
            return (lo * hi, k)

        k = min(occurring, key=cost)
        lowers = [row for row in ineqs if row[0][k] > 0]
        uppers = [row for row in ineqs if row[0][k] < 0]
        passthrough = [row for row in ineqs if row[0][k] == 0]
        snapshots.append((k, lowers, uppers))
        combined: list[_Ineq] = list(passthrough)
        for lo_row in lowers:
            a = lo_row[0][k]
            for up_row in uppers:
                b = -up_row[0][k]
                coeffs = tuple(
                    b * x + a * y for x, y in zip(lo_row[0], up_row[0])
                )
                const = b * lo_row[1] + a * up_row[1]
                strict = lo_row[2] or up_row[2]
                lam = tuple(b * x + a * y for x, y in zip(lo_row[3], up_row[3]))
                mu = tuple(b * x + a * y for x, y in zip(lo_row[4], up_row[4]))
                combined.append((coeffs, const, strict, lam, mu))
        ineqs, contradiction = _prune(combined)
        if contradiction is not None:
            return None, FarkasWitness(contradiction[3], contradiction[4])

    # --- stage 4: back-substitute a concrete point, preferring the value 1 ---
    free_values: dict[int, Fraction] = {}

    def evaluate(row: _Ineq, skip: int) -> Fraction:
        coeffs, const, _, _, _ = row
        total = const
        for k, c in enumerate(coeffs):
            if k != skip and c != 0:
                total += c * free_values[free_vars[k]]
        return total

    for k, lowers, uppers in reversed(snapshots):
        lo_bound: tuple[Fraction, bool] | None = None
        for row in lowers:
            bound = -evaluate(row, k) / row[0][k]
            if lo_bound is None or bound > lo_bound[0] or (
                bound == lo_bound[0] and row[2]
            ):
                lo_bound = (bound, row[2])
        hi_bound: tuple[Fraction, bool] | None = None
        for row in uppers:
            bound = -evaluate(row, k) / row[0][k]
            if hi_bound is None or bound < hi_bound[0] or (
                bound == hi_bound[0] and row[2]
            ):
                hi_bound = (bound, row[2])
        one = Q(1)
        ok_lo = lo_bound is None or one > lo_bound[0] or (one == lo_bound[0] and not lo_bound[1])
        ok_hi = hi_bound is None or one < hi_bound[0] or (one == hi_bound[0] and not hi_bound[1])
        if ok_lo and ok_hi:
            value = one
        elif lo_bound is not None and hi_bound is not None:
            value = (
                lo_bound[0]
                if lo_bound[0] == hi_bound[0]
                else (lo_bound[0] + hi_bound[0]) / 2
            )
        elif lo_bound is not None:
            value = lo_bound[0] + 1
        else:
            assert hi_bound is not None
            value = hi_bound[0] - 1
        free_values[free_vars[k]] = value

    for f in free_vars:
        free_values.setdefault(f, Q(1))

    assignment = [Q(0)] * nv
    for f in free_vars:
        assignment[f] = free_values[f]
    for p, (coeffs, const, _mu) in pivot_rows.items():
        assignment[p] = -const - sum(
            (coeffs[f] * free_values[f] for f in free_vars), Q(0)
        )

    for eq in system.equalities:
        total = sum((c * a for c, a in zip(eq.coeffs, assignment)), eq.const)
        assert total == 0, "back-substitution broke an equality"
    assert all(assignment[p] > 0 for p in pos), "back-substitution lost positivity"
    return PositiveSolution(tuple(assignment)), None


def feasible_positive(system: AffineSystem) -> PositiveSolution | None:
    """Strictly positive exact solution of the system, if one exists."""
    solution, _ = solve_positive(system)
    return solution


def iter_system_equalities(
    template: ScalingTemplate,
    partition: OrderedPartition,
    residual_memo: dict[frozenset[int], QMatrix] | None = None,
) -> Iterator[tuple[tuple[Fraction, ...], Fraction]]:
    """Yield (coeffs, const) equalities of the scaled columns condition.

    First the rows of "block-1 scaled columns sum to zero", then for each
    later block the annihilator rows of the earlier unscaled columns applied
    to the block's scaled sum.  Lazy by block, so callers doing early
    infeasibility pruning skip the unneeded annihilator computations; the
    memo caches annihilators across partitions of the same template.
    """
    if not partition.covers(len(template.columns)):
        raise ValueError("partition does not cover the template's columns")
    cols = template.columns
    u = template.dim
    nvars = template.nvars
    group_of = template.group_of

    def accumulate(block: tuple[int, ...], value_of) -> tuple[tuple[Fraction, ...], Fraction]:
        coeffs = [Q(0)] * nvars
        const = Q(0)
        for i in block:
            value = value_of(cols[i].entries)
            g = group_of[i]
            if g is None:
                const += value
            else:
                coeffs[g] += value
        return tuple(coeffs), const

    first = partition.blocks[0]
    for r in range(u):
        yield accumulate(first, lambda col, r=r: col[r])

    if residual_memo is None:
        residual_memo = {}
    prefix = frozenset(first)
    for t in range(1, partition.block_count):
        R = residual_memo.get(prefix)
        if R is None:
            R = residual_functionals([cols[i] for i in sorted(prefix)], dim=u)
            residual_memo[prefix] = R
        for functional in R.entries:
            yield accumulate(
                partition.blocks[t],
                lambda col, f=functional: sum((f[r] * col[r] for r in range(u)), Q(0)),
            )
        prefix = prefix | frozenset(partition.blocks[t])


def build_system(
    template: ScalingTemplate,
    partition: OrderedPartition,
    residual_memo: dict[frozenset[int], QMatrix] | None = None,
) -> AffineSystem:
    """Affine system expressing the columns condition of the scaled matrix.

    All scalar variables are required strictly positive.
    """
    equalities = tuple(
        LinearEquality(coeffs, const)
        for coeffs, const in iter_system_equalities(template, partition, residual_memo)
    )
    return AffineSystem(template.nvars, equalities, frozenset(range(template.nvars)))


@dataclass(frozen=True)
class ScalarSet:
    """Solution set of a one-variable scaled feasibility question.

    kind is one of "empty", "finite", "all", "all_except"; `values` carries
    the finite members, `excluded` the removed points of a co-finite set.
    """

    kind: str
    values: tuple[Fraction, ...] = ()
    excluded: tuple[Fraction, ...] = ()

    @staticmethod
    def empty() -> "ScalarSet":
        return ScalarSet("empty")

    @staticmethod
    def finite(values: Sequence[Fraction]) -> "ScalarSet":
        vals = tuple(sorted(set(values)))
        return ScalarSet("finite", values=vals) if vals else ScalarSet.empty()

    @staticmethod
    def all_rationals() -> "ScalarSet":
        return ScalarSet("all")

    @staticmethod
    def all_except(excluded: Sequence[Fraction]) -> "ScalarSet":
        exc = tuple(sorted(set(excluded)))
        return ScalarSet("all_except", excluded=exc) if exc else ScalarSet.all_rationals()

    def contains(self, value: Fraction) -> bool:
        if self.kind == "empty":
            return False
        if self.kind == "finite":
            return value in self.values
        if self.kind == "all":
            return True
        return value not in self.excluded

    def union(self, other: "ScalarSet") -> "ScalarSet":
        if self.kind == "empty":
            return other
        if other.kind == "empty":
            return self
        if self.kind == "all" or other.kind == "all":
            return ScalarSet.all_rationals()
        if self.kind == "finite" and other.kind == "finite":
            return ScalarSet.finite(self.values + other.values)
        if self.kind == "all_except" and other.kind == "all_except":
            return ScalarSet.all_except(
                tuple(set(self.excluded) & set(other.excluded))
            )
        cofinite = self if self.kind == "all_except" else other
        finite = other if self.kind == "all_except" else self
        return ScalarSet.all_except(
            tuple(set(cofinite.excluded) - set(finite.values))
        )

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "values": [str(v) for v in self.values],
            "excluded": [str(v) for v in self.excluded],
        }


def enumerate_feasible_scalars(
    template: ScalingTemplate, partition: OrderedPartition
) -> ScalarSet:
    """Exact, sign-unconstrained solution set of a single-variable template.

    All values for which the partition witnesses the columns condition of
    the scaled matrix.  The affine reduction is exact for every nonzero
    value; the value 0 can shrink spans, so whenever 0 is a candidate it is
    re-checked directly against the scaled matrix.  Multi-variable templates
    are rejected.
    """
    if template.nvars > 1:
        raise ValueError("enumerate_feasible_scalars handles at most one variable")
    system = build_system(template, partition)
    if template.nvars == 0:
        consistent = all(eq.const == 0 for eq in system.equalities)
        return ScalarSet.all_rationals() if consistent else ScalarSet.empty()

    value: Fraction | None = None
    constrained = False
    for eq in system.equalities:
        a, c = eq.coeffs[0], eq.const
        if a == 0:
            if c != 0:
                return ScalarSet.empty()
        else:
            root = -c / a
            if constrained and root != value:
                return ScalarSet.empty()
            value, constrained = root, True

    if not constrained:
        if _scaled_check(template, partition, Q(0)):
            return ScalarSet.all_rationals()
        return ScalarSet.all_except((Q(0),))
    assert value is not None
    if value == 0 and not _scaled_check(template, partition, Q(0)):
        return ScalarSet.empty()
    return ScalarSet.finite((value,))


def _scaled_check(
    template: ScalingTemplate, partition: OrderedPartition, value: Fraction
) -> bool:
    matrix = template.scaled_matrix([value] * template.nvars)
    return check_partition(matrix, partition) is not None


def scalar_union_over_partitions(
    template: ScalingTemplate, cap: int | None = DEFAULT_PARTITION_CAP
) -> ScalarSet:
    """Union of enumerate_feasible_scalars over every ordered partition.

    Raises PartitionCapExceeded if the enumeration is truncated, since a
    partial union would be silently wrong.
    """
    if template.nvars > 1:
        raise ValueError("scalar union handles at most one variable")
    result = ScalarSet.empty()
    for partition in enumerate_ordered_partitions(len(template.columns), cap):
        result = result.union(enumerate_feasible_scalars(template, partition))
    return result
