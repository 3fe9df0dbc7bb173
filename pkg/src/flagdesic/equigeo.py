"""Geodesic and equigeodesic tests, structure predicates, and the canonical form.

A tangent vector is a geodesic direction for one metric when the m-part of
[X, lambda.X] vanishes; it is equigeodesic (geodesic for every invariant
metric) exactly when all cross products of its blocks vanish:

    a_ij a_jm = 0   for all ordered distinct triples (i, j, m).

Two independent routes decide this: the block condition above, and a finite
bracket certificate probing [X, L_ij X] over the 0/1 multiplier basis. The
equivalence of the two is one of the library's acceptance gates.

Equigeodesic matrices admit a block-unitary canonical form: conjugation by a
suitable U = U_1 + ... + U_s (direct sum) turns A into an essentially diagonal
J whose positive entries a_k are the nonzero singular values of the blocks and
determine the spectrum {+/- i a_k}.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .flag import FlagPartition, TangentVector
from .linalg import CMatrix, Mode, commutator, project_m
from .metric import InvariantMetric, basis_metric, hadamard_action

#: Default relative tolerance for block products and bracket residuals.
DEFAULT_EQUI_TOL = 1e-8

#: Singular values below RANK_TOL * (largest sigma across all blocks) are rank noise.
RANK_TOL = 1e-9

#: Canonical-form residual contract, relative to ||A||_F.
CANON_RESIDUAL_TOL = 1e-9

#: Entry threshold for essential diagonality, relative to the largest modulus.
ESSENTIAL_ENTRY_TOL = 1e-9


class NotEquigeodesic(ValueError):
    """Raised when an operation requires an equigeodesic input and gets none."""

    def __init__(self, message, violating_triple=None):
        super().__init__(message)
        self.violating_triple = violating_triple


@dataclass(frozen=True)
class EquigeodesicVerdict:
    is_equigeodesic: bool
    method: str  # "block-condition" or "bracket-certificate"
    worst_residual: float
    violating_triple: Optional[tuple] = None


@dataclass(frozen=True)
class CanonicalForm:
    """Block-diagonal unitary U with essentially diagonal J = U^* A U.

    ``pairs`` lists the extracted entries (global row, global col, a_k) with
    row < col and a_k > 0, sorted by descending a_k then (row, col);
    coordinates are 1-based.
    """

    U: CMatrix
    J: CMatrix
    pairs: tuple
    residual: float


@dataclass(frozen=True)
class ConjugationInvariants:
    """Numerical block ranks and singular values, per unordered block pair."""

    ranks: dict
    singular_values: dict


# ---------------------------------------------------------------------------
# geodesic test for one metric
# ---------------------------------------------------------------------------


def is_geodesic_vector(x: TangentVector, g: InvariantMetric, tol: float = DEFAULT_EQUI_TOL):
    """Whether [X, lambda.X]_m vanishes for this one metric.

    Returns (verdict, residual) with the residual normalized by
    ||X||_F^2 * max(lambda); exact inputs are evaluated in Float.
    """
    if g.degenerate:
        raise ValueError("degenerate probe multipliers are not metrics")
    if g.partition != x.partition:
        raise ValueError("partition mismatch")
    xf = x.to_float()
    y = hadamard_action(g, xf)
    bracket = project_m(commutator(xf.matrix, y.matrix), x.partition)
    scale = xf.fro() ** 2 * g.max_lambda()
    if scale == 0.0:
        return True, 0.0
    residual = bracket.fro() / scale
    return residual <= tol, residual


# ---------------------------------------------------------------------------
# equigeodesic tests
# ---------------------------------------------------------------------------


def _ordered_triples(s: int):
    for i in range(1, s + 1):
        for j in range(1, s + 1):
            for m in range(1, s + 1):
                if i != j and j != m and i != m:
                    yield i, j, m


def _scan_block_products(x: TangentVector, tol: float):
    """Normalized ||a_ij a_jm|| / (||a_ij|| ||a_jm||) over all ordered triples.

    Returns (worst residual, first violating triple or None, argmax triple).
    """
    worst = 0.0
    first_bad = None
    argmax = None
    for i, j, m in _ordered_triples(x.partition.s):
        aij = x.block(i, j)
        ajm = x.block(j, m)
        if x.mode is Mode.EXACT:
            prod = aij @ ajm
            if prod.is_zero():
                continue
            res = prod.to_float().fro() / (aij.to_float().fro() * ajm.to_float().fro())
        else:
            nij = aij.fro()
            njm = ajm.fro()
            if nij == 0.0 or njm == 0.0:
                continue
            res = (aij @ ajm).fro() / (nij * njm)
        if res > worst:
            worst = res
            argmax = (i, j, m)
        if first_bad is None and (x.mode is Mode.EXACT or res > tol):
            first_bad = (i, j, m)
    return worst, first_bad, argmax


def is_equigeodesic(x: TangentVector, tol: float = DEFAULT_EQUI_TOL) -> EquigeodesicVerdict:
    """Block condition: every ordered product a_ij a_jm (i, j, m distinct) vanishes.

    Float mode compares ||a_ij a_jm||_F against tol * ||a_ij||_F ||a_jm||_F,
    which makes the verdict scale-invariant; Exact mode is a strict zero test.
    Vacuously true when the partition has fewer than three blocks.
    """
    worst, first_bad, _ = _scan_block_products(x, tol)
    if x.mode is Mode.EXACT:
        ok = first_bad is None
    else:
        ok = worst <= tol
    return EquigeodesicVerdict(
        is_equigeodesic=ok,
        method="block-condition",
        worst_residual=worst,
        violating_triple=None if ok else first_bad,
    )


def equigeodesic_certificate(x: TangentVector, tol: float = DEFAULT_EQUI_TOL) -> EquigeodesicVerdict:
    """Bracket certificate: [X, L_ij X]_m = 0 for every 0/1 probe multiplier L_ij.

    The probes form a basis of all multiplier tables, so the s(s-1)/2 bracket
    evaluations quantify over every invariant metric at once.
    """
    p = x.partition
    worst = 0.0
    failed = False
    xnorm = x.to_float().fro()
    for i, j in p.positive_pairs():
        y = hadamard_action(basis_metric(p, i, j), x)
        bracket = project_m(commutator(x.matrix, y.matrix), p)
        if x.mode is Mode.EXACT:
            if not bracket.is_zero():
                failed = True
                ynorm = y.to_float().fro()
                worst = max(worst, bracket.to_float().fro() / (xnorm * ynorm))
        else:
            ynorm = y.fro()
            if ynorm == 0.0 or xnorm == 0.0:
                continue
            res = bracket.fro() / (xnorm * ynorm)
            worst = max(worst, res)
            if res > tol:
                failed = True
    if x.mode is Mode.FLOAT:
        failed = worst > tol
    triple = None
    if failed:
        _, first_bad, argmax = _scan_block_products(x, tol)
        triple = first_bad if first_bad is not None else argmax
    return EquigeodesicVerdict(
        is_equigeodesic=not failed,
        method="bracket-certificate",
        worst_residual=worst,
        violating_triple=triple,
    )


# ---------------------------------------------------------------------------
# structure predicates
# ---------------------------------------------------------------------------


def is_essentially_diagonal(m: CMatrix, entry_tol: Optional[float] = None) -> bool:
    """At most one nonzero entry in each row and each column.

    Float entries count as nonzero above ``entry_tol`` (default: 1e-9 times
    the largest modulus); Exact entries are tested exactly.
    """
    if m.mode is Mode.EXACT:
        nonzero = np.array([[bool(v) for v in row] for row in m.data])
    else:
        mags = np.abs(m.data)
        top = float(mags.max(initial=0.0))
        thr = entry_tol if entry_tol is not None else ESSENTIAL_ENTRY_TOL * top
        nonzero = mags > thr
    return bool(nonzero.sum(axis=0).max(initial=0) <= 1 and nonzero.sum(axis=1).max(initial=0) <= 1)


def is_essentially_block_diagonal(x: TangentVector, tol: float = ESSENTIAL_ENTRY_TOL) -> bool:
    """At most one nonzero block a_ij in each block-row and each block-column.

    A sufficient condition for being equigeodesic: the products a_ij a_jm then
    always involve a zero factor.
    """
    s = x.partition.s
    total = x.fro()
    counts_row = [0] * (s + 1)
    counts_col = [0] * (s + 1)
    for i in range(1, s + 1):
        for j in range(1, s + 1):
            if i == j:
                continue
            blk = x.block(i, j)
            if x.mode is Mode.EXACT:
                nz = not blk.is_zero()
            else:
                nz = blk.fro() > tol * total
            if nz:
                counts_row[i] += 1
                counts_col[j] += 1
    return max(counts_row) <= 1 and max(counts_col) <= 1


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------


def _block_svds(x: TangentVector):
    """Compact SVD of every upper block; returns ({pair: (u, s, vh)}, sigma_max)."""
    svds = {}
    sigma_max = 0.0
    for pair in x.partition.positive_pairs():
        blk = x.block(*pair).data
        u, s, vh = np.linalg.svd(blk, full_matrices=False)
        svds[pair] = (u, s, vh)
        if s.size:
            sigma_max = max(sigma_max, float(s[0]))
    return svds, sigma_max


def _complete_unitary(cols: np.ndarray, n: int) -> np.ndarray:
    """Extend orthonormal columns to an n x n unitary."""
    if cols.shape[1] == 0:
        return np.eye(n, dtype=np.complex128)
    u, _, _ = np.linalg.svd(cols, full_matrices=True)
    return np.hstack([cols, u[:, cols.shape[1]:]])


def canonicalize(x: TangentVector, rank_tol: float = RANK_TOL) -> CanonicalForm:
    """Reduce an equigeodesic vector to its essentially diagonal form.

    Per block index, the image spaces of the incoming blocks are mutually
    orthogonal (this is what the equigeodesic condition buys), so one
    block-diagonal unitary U aligns every block with its singular vectors at
    once. Raises NotEquigeodesic on inputs that fail the block condition;
    for near-rank-boundary inputs the rank_tol cut is the caller's risk.
    """
    if x.mode is not Mode.FLOAT:
        raise ValueError("canonicalize is Float-mode only")
    verdict = is_equigeodesic(x)
    if not verdict.is_equigeodesic:
        raise NotEquigeodesic(
            f"input is not equigeodesic: blocks {verdict.violating_triple} have "
            f"residual {verdict.worst_residual:.3e}",
            violating_triple=verdict.violating_triple,
        )
    p = x.partition
    n = p.total
    A = x.matrix.data

    svds, sigma_max = _block_svds(x)
    threshold = rank_tol * sigma_max

    # gather singular-vector columns per block: left vectors of a_ij live in
    # block i, right vectors in block j, matched index by index
    collected = {bi: [] for bi in range(1, p.s + 1)}
    for (i, j), (u, s, vh) in svds.items():
        for k in range(int(np.sum(s > threshold))):
            collected[i].append((u[:, k], ("u", (i, j), k)))
            collected[j].append((vh[k, :].conj(), ("v", (i, j), k)))

    positions = {}
    u_full = np.zeros((n, n), dtype=np.complex128)
    for bi in range(1, p.s + 1):
        lo, hi = p.block_range(bi)
        nb = hi - lo
        if len(collected[bi]) > nb:
            raise NotEquigeodesic(
                f"block {bi} rank budget exceeded; input is not equigeodesic"
            )
        basis = []
        for vec, tag in collected[bi]:
            w = vec.astype(np.complex128).copy()
            for q in basis:
                w -= (q.conj() @ w) * q
            norm = float(np.linalg.norm(w))
            if norm < 0.5:
                raise NotEquigeodesic(
                    "block image spaces are not orthogonal; input fails the "
                    "equigeodesic condition too marginally to canonicalize"
                )
            w /= norm
            positions[tag] = lo + len(basis)
            basis.append(w)
        cols = np.column_stack(basis) if basis else np.zeros((nb, 0), dtype=np.complex128)
        u_full[lo:hi, lo:hi] = _complete_unitary(cols, nb)

    # rotate each right-side column by a unit phase so the listed entry is real > 0
    for (i, j), (u, s, vh) in svds.items():
        for k in range(int(np.sum(s > threshold))):
            up = positions[("u", (i, j), k)]
            vp = positions[("v", (i, j), k)]
            alpha = u_full[:, up].conj() @ (A @ u_full[:, vp])
            if abs(alpha) > 0:
                u_full[:, vp] *= alpha.conjugate() / abs(alpha)

    j_raw = u_full.conj().T @ A @ u_full

    pairs = []
    j_clean = np.zeros((n, n), dtype=np.complex128)
    for (i, j), (u, s, vh) in svds.items():
        for k in range(int(np.sum(s > threshold))):
            row = positions[("u", (i, j), k)]
            col = positions[("v", (i, j), k)]
            a_k = float(j_raw[row, col].real)
            pairs.append((row + 1, col + 1, a_k))
            j_clean[row, col] = a_k
            j_clean[col, row] = -a_k

    residual = float(np.linalg.norm(j_raw - j_clean))
    bound = CANON_RESIDUAL_TOL * max(x.fro(), 1e-300)
    if residual > bound:
        raise RuntimeError(
            f"canonical form residual {residual:.3e} exceeds {bound:.3e}; "
            "input is too close to the rank boundary"
        )
    j_mat = CMatrix(j_clean, Mode.FLOAT)
    if not is_essentially_diagonal(j_mat):
        raise RuntimeError("canonical form is not essentially diagonal")
    pairs.sort(key=lambda rc: (-rc[2], rc[0], rc[1]))
    return CanonicalForm(
        U=CMatrix(u_full, Mode.FLOAT),
        J=j_mat,
        pairs=tuple(pairs),
        residual=residual,
    )


def conjugation_invariants(x: TangentVector, rank_tol: float = RANK_TOL) -> ConjugationInvariants:
    """Block ranks and singular values, invariant under block-unitary conjugation.

    Ranks use the global cut sigma > rank_tol * sigma_max so that a zero block
    perturbed by conjugation noise stays rank zero.
    """
    if x.mode is not Mode.FLOAT:
        raise ValueError("conjugation_invariants is Float-mode only")
    svds, sigma_max = _block_svds(x)
    threshold = rank_tol * sigma_max
    ranks = {}
    values = {}
    for pair, (_, s, _) in svds.items():
        keep = [float(v) for v in s if v > threshold]
        ranks[pair] = len(keep)
        values[pair] = tuple(keep)
    return ConjugationInvariants(ranks=ranks, singular_values=values)


# ---------------------------------------------------------------------------
# samplers
# ---------------------------------------------------------------------------


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_block_unitary(partition: FlagPartition, seed) -> CMatrix:
    """Haar-distributed element of U(n_1) + ... + U(n_s) (block-diagonal)."""
    rng = _as_rng(seed)
    n = partition.total
    out = np.zeros((n, n), dtype=np.complex128)
    for i in range(1, partition.s + 1):
        lo, hi = partition.block_range(i)
        nb = hi - lo
        z = rng.normal(size=(nb, nb)) + 1j * rng.normal(size=(nb, nb))
        q, r = np.linalg.qr(z)
        d = np.diagonal(r)
        q = q * (d / np.abs(d))
        out[lo:hi, lo:hi] = q
    return CMatrix(out, Mode.FLOAT)


def _sample_cross_pairs(partition: FlagPartition, rng: np.random.Generator, keep_prob: float):
    """Disjoint global index pairs crossing block boundaries."""
    pool = list(rng.permutation(partition.total) + 1)
    chosen = []
    skipped = []
    while pool:
        u = pool.pop()
        partner = None
        for k, v in enumerate(pool):
            if partition.block_of(v) != partition.block_of(u):
                partner = k
                break
        if partner is None:
            continue
        v = pool.pop(partner)
        if rng.random() < keep_prob:
            chosen.append((min(u, v), max(u, v)))
        else:
            skipped.append((min(u, v), max(u, v)))
    if not chosen and skipped:
        chosen.append(skipped[0])
    return chosen


def random_essentially_diagonal(
    partition: FlagPartition,
    seed,
    mode: Mode = Mode.FLOAT,
    values=None,
) -> TangentVector:
    """Essentially diagonal skew-Hermitian sample with zero diagonal blocks.

    One nonzero entry per row and column at most, all of them crossing block
    boundaries. ``values``, when given, is the draw set for entries (required
    for Exact mode); otherwise magnitudes are uniform in [0.3, 3] with random
    phase.
    """
    rng = _as_rng(seed)
    n = partition.total
    pairs = _sample_cross_pairs(partition, rng, keep_prob=0.8)
    if mode is Mode.FLOAT:
        arr = np.zeros((n, n), dtype=np.complex128)
        for r, c in pairs:
            if values is not None:
                z = complex(values[rng.integers(len(values))])
            else:
                z = rng.uniform(0.3, 3.0) * np.exp(2j * np.pi * rng.uniform())
            arr[r - 1, c - 1] = z
            arr[c - 1, r - 1] = -np.conj(z)
        return TangentVector(partition, CMatrix(arr, Mode.FLOAT))
    if values is None:
        raise ValueError("Exact sampling needs an explicit value set")
    arr = CMatrix.zeros(n, n, Mode.EXACT).data.copy()
    for r, c in pairs:
        z = values[rng.integers(len(values))]
        arr[r - 1, c - 1] = z
        arr[c - 1, r - 1] = -z.conjugate()
    return TangentVector(partition, CMatrix(arr, Mode.EXACT))


def random_equigeodesic(partition: FlagPartition, seed) -> TangentVector:
    """Random equigeodesic vector.

    An essentially diagonal sample conjugated by a random block-diagonal
    unitary: the converse of the canonical form construction.
    """
    rng = _as_rng(seed)
    base = random_essentially_diagonal(partition, rng)
    u = random_block_unitary(partition, rng)
    return base.conjugated_by(u)
