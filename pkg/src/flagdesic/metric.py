"""Invariant metrics as positive block-constant termwise multipliers.

A metric is a symmetric table {lambda_ij > 0} over unordered block pairs; it
acts on tangent matrices entry by entry (Hadamard product with the
block-constant multiplier matrix). The degenerate 0/1 multipliers used as
bracket probes share the data shape but are flagged and excluded from
metric-only operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .flag import FlagPartition, TangentVector
from .linalg import CMatrix, Mode

#: lambda sampling range for random_metric (log-uniform).
RANDOM_LAMBDA_RANGE = (1e-2, 1e2)


@dataclass(frozen=True, eq=False)
class InvariantMetric:
    """Multiplier table lambda_ij indexed by block pairs i < j.

    ``degenerate=True`` marks probe multipliers (zeros allowed); those are not
    metrics and are rejected by metric-only operations.
    """

    partition: FlagPartition
    lam: dict
    degenerate: bool = field(default=False)

    def __post_init__(self):
        expected = set(self.partition.positive_pairs())
        got = set(self.lam)
        if got != expected:
            raise ValueError(
                f"multiplier table must cover exactly the pairs {sorted(expected)}, "
                f"got {sorted(got)}"
            )
        for pair, v in self.lam.items():
            v = float(v)
            if self.degenerate:
                if v < 0:
                    raise ValueError(f"multiplier {pair} is negative: {v}")
            elif v <= 0:
                raise ValueError(f"metric multiplier {pair} must be positive, got {v}")

    @classmethod
    def from_pairs(cls, partition: FlagPartition, values, default: float = 1.0):
        """Build from a partial {(i,j): lambda} mapping; missing pairs get ``default``."""
        lam = {pair: default for pair in partition.positive_pairs()}
        for (i, j), v in dict(values).items():
            key = (i, j) if i < j else (j, i)
            if key not in lam:
                raise ValueError(f"block pair ({i},{j}) invalid for this partition")
            lam[key] = float(v)
        return cls(partition, lam)

    @classmethod
    def normal(cls, partition: FlagPartition):
        """The normal metric: every multiplier equal to 1."""
        return cls.from_pairs(partition, {})

    def value(self, i: int, j: int) -> float:
        if i == j:
            raise ValueError("diagonal multipliers are not part of the metric")
        return float(self.lam[(i, j) if i < j else (j, i)])

    def max_lambda(self) -> float:
        return max(float(v) for v in self.lam.values())

    @cached_property
    def multiplier_matrix(self) -> np.ndarray:
        """n x n real multiplier grid; diagonal blocks are zero."""
        n = self.partition.total
        grid = np.zeros((n, n))
        for i, j in self.partition.positive_pairs():
            r0, r1 = self.partition.block_range(i)
            c0, c1 = self.partition.block_range(j)
            lam = self.value(i, j)
            grid[r0:r1, c0:c1] = lam
            grid[c0:c1, r0:r1] = lam
        return grid


def hadamard_action(g: InvariantMetric, x: TangentVector) -> TangentVector:
    """Termwise product: block (i, j) of the result is lambda_ij * a_ij.

    Exact tangent vectors stay exact; the float multipliers are applied as
    their exact rational values (0/1 probes in particular stay exactly 0/1).
    """
    if g.partition != x.partition:
        raise ValueError("metric and tangent vector live on different partitions")
    if x.mode is Mode.FLOAT:
        data = x.matrix.data * g.multiplier_matrix
        return TangentVector(x.partition, CMatrix(data, Mode.FLOAT))
    arr = x.matrix.data.copy()
    for i, j in x.partition.positive_pairs():
        lam = Fraction(g.value(i, j))
        r0, r1 = x.partition.block_range(i)
        c0, c1 = x.partition.block_range(j)
        for r in range(r0, r1):
            for c in range(c0, c1):
                arr[r, c] = arr[r, c] * lam
                arr[c, r] = arr[c, r] * lam
    return TangentVector(x.partition, CMatrix(arr, Mode.EXACT))


def basis_metric(partition: FlagPartition, i: int, j: int) -> InvariantMetric:
    """Degenerate probe multiplier: 1 on the (i, j)/(j, i) blocks, 0 elsewhere.

    Not positive definite, hence flagged; used as a finite certificate basis,
    every multiplier table being a positive combination of these.
    """
    if i == j:
        raise ValueError("probe multipliers connect two distinct blocks")
    key = (i, j) if i < j else (j, i)
    if key not in partition.positive_pairs():
        raise ValueError(f"block pair ({i},{j}) invalid for this partition")
    lam = {pair: 0.0 for pair in partition.positive_pairs()}
    lam[key] = 1.0
    return InvariantMetric(partition, lam, degenerate=True)


def metric_inner(g: InvariantMetric, x: TangentVector, y: TangentVector) -> float:
    """Riemannian inner product -tr((lambda . x) y); positive definite on m."""
    if g.degenerate:
        raise ValueError("degenerate probe multipliers are not metrics")
    if g.partition != x.partition or g.partition != y.partition:
        raise ValueError("partition mismatch")
    if x.mode is not Mode.FLOAT or y.mode is not Mode.FLOAT:
        raise ValueError("metric_inner is Float-mode only")
    gx = hadamard_action(g, x)
    val = np.trace(gx.matrix.data @ y.matrix.data)
    return float(-val.real)


def random_metric(partition: FlagPartition, seed) -> InvariantMetric:
    """Multipliers drawn i.i.d. log-uniform on [1e-2, 1e2]; deterministic per seed."""
    rng = np.random.default_rng(seed)
    lo, hi = np.log10(RANDOM_LAMBDA_RANGE[0]), np.log10(RANDOM_LAMBDA_RANGE[1])
    lam = {pair: float(10.0 ** rng.uniform(lo, hi)) for pair in partition.positive_pairs()}
    return InvariantMetric(partition, lam)
