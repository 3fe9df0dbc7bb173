"""Shared test helpers: seeded samplers for tangent vectors and matrices."""

import numpy as np
from hypothesis import HealthCheck, settings

from flagdesic import CMatrix, FlagPartition, Mode, TangentVector

settings.register_profile(
    "ci", derandomize=True, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("ci")


def random_tangent(partition: FlagPartition, rng: np.random.Generator) -> TangentVector:
    """Generic dense tangent vector: complex Gaussian upper blocks, skew-completed."""
    blocks = {}
    for i, j in partition.positive_pairs():
        ri = partition.parts[i - 1]
        cj = partition.parts[j - 1]
        blocks[(i, j)] = rng.normal(size=(ri, cj)) + 1j * rng.normal(size=(ri, cj))
    return TangentVector.from_blocks(partition, blocks)


def random_skew(n: int, rng: np.random.Generator) -> CMatrix:
    """Generic skew-Hermitian matrix (diagonal allowed to be nonzero)."""
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return CMatrix((z - z.conj().T) / 2.0, Mode.FLOAT)


def random_complex(rows: int, cols: int, rng: np.random.Generator) -> CMatrix:
    z = rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))
    return CMatrix(z, Mode.FLOAT)
