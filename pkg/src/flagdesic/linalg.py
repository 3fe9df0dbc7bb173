"""Scalar fields and the dense complex-matrix kernels used by every other module.

Two computation modes run through the whole library:

* ``Mode.FLOAT``  -- numpy complex128 matrices, tolerance-based predicates.
* ``Mode.EXACT``  -- Gaussian rationals (pairs of ``fractions.Fraction``) in
  object arrays, exact ring arithmetic and exact zero tests.

A matrix never mixes modes; mixed-mode binary operations raise ``ValueError``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import TYPE_CHECKING, Iterable, Sequence, Union

import numpy as np

if TYPE_CHECKING:
    from .flag import FlagPartition

#: Relative tolerance used by residual checks unless a caller overrides it.
DEFAULT_RTOL = 1e-9

#: Skew-Hermitian validation is relative to the Frobenius norm: tau = factor * ||a||_F.
SKEW_TOL_FACTOR = 1e-9


class Mode(Enum):
    """Computation mode of a scalar or matrix."""

    FLOAT = "float"
    EXACT = "exact"


class NotSkewHermitian(ValueError):
    """Input matrix is not skew-Hermitian (within tolerance in Float mode)."""


class ExactSpectrumUnavailable(ValueError):
    """The exact spectral extraction failed; caller should fall back to Float."""


class GaussianRational:
    """Exact complex scalar p/q + (r/s)i with arbitrary-precision rational parts.

    Instances are immutable by convention and hashable. Arithmetic accepts
    ``int`` and ``Fraction`` operands so that numpy object-dtype reductions
    (which may seed sums with integer zero) work transparently.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse strings like ``"3"``, ``"-1/2"``, ``"i"``, ``"2i"``, ``"1/2-3/4i"``."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty Gaussian rational literal")
        # split into at most two signed tokens
        split = None
        for k in range(1, len(s)):
            if s[k] in "+-":
                if split is not None:
                    raise ValueError(f"cannot parse Gaussian rational {text!r}")
                split = k
        tokens = [s] if split is None else [s[:split], s[split:]]

        def _imag_value(tok: str) -> Fraction:
            body = tok[:-1]
            if body in ("", "+"):
                return Fraction(1)
            if body == "-":
                return Fraction(-1)
            return Fraction(body)

        try:
            if len(tokens) == 1:
                tok = tokens[0]
                if tok.endswith("i"):
                    return cls(0, _imag_value(tok))
                return cls(Fraction(tok), 0)
            re_tok, im_tok = tokens
            if not im_tok.endswith("i"):
                raise ValueError("second term must be imaginary")
            return cls(Fraction(re_tok), _imag_value(im_tok))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse Gaussian rational {text!r}: {exc}") from None

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return GaussianRational(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        return GaussianRational(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Exact squared modulus."""
        return self.re * self.re + self.im * self.im

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __abs__(self):
        return math.sqrt(float(self.abs2()))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        imag = f"{abs(self.im)}i"
        if self.re == 0:
            return imag if self.im > 0 else f"-{imag}"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{imag}"

    def __repr__(self):
        return f"GaussianRational('{self}')"


#: A matrix entry: builtin complex in Float mode, GaussianRational in Exact mode.
Scalar = Union[complex, GaussianRational]

_GR_ZERO = GaussianRational(0)
_GR_ONE = GaussianRational(1)


def _as_exact(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)):
        return GaussianRational(value, 0)
    raise ValueError(f"not an exact scalar: {value!r}")


@dataclass(frozen=True, eq=False)
class CMatrix:
    """Dense complex matrix in one of the two scalar modes.

    ``data`` is complex128 for Float and an object array of GaussianRational
    for Exact; it is frozen after construction.
    """

    data: np.ndarray
    mode: Mode

    def __post_init__(self):
        if self.mode is Mode.FLOAT:
            arr = np.array(self.data, dtype=np.complex128)
        elif self.mode is Mode.EXACT:
            arr = np.array(self.data, dtype=object)
            for v in arr.flat:
                if not isinstance(v, GaussianRational):
                    raise ValueError(
                        "Exact matrices must hold GaussianRational entries only; "
                        f"got {type(v).__name__} (mode mixing is rejected)"
                    )
        else:  # pragma: no cover
            raise ValueError(f"unknown mode {self.mode!r}")
        if arr.ndim != 2:
            raise ValueError(f"matrix must be 2-dimensional, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "data", arr)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_complex(cls, rows) -> "CMatrix":
        return cls(np.array(rows, dtype=np.complex128), Mode.FLOAT)

    @classmethod
    def from_exact(cls, rows: Sequence[Sequence]) -> "CMatrix":
        """Build an Exact matrix; entries may be int, Fraction or GaussianRational."""
        grid = [[_as_exact(v) for v in row] for row in rows]
        return cls(np.array(grid, dtype=object), Mode.EXACT)

    @classmethod
    def zeros(cls, rows: int, cols: int, mode: Mode = Mode.FLOAT) -> "CMatrix":
        if mode is Mode.FLOAT:
            return cls(np.zeros((rows, cols), dtype=np.complex128), mode)
        return cls(np.full((rows, cols), _GR_ZERO, dtype=object), mode)

    @classmethod
    def identity(cls, n: int, mode: Mode = Mode.FLOAT) -> "CMatrix":
        if mode is Mode.FLOAT:
            return cls(np.eye(n, dtype=np.complex128), mode)
        arr = np.full((n, n), _GR_ZERO, dtype=object)
        for k in range(n):
            arr[k, k] = _GR_ONE
        return cls(arr, mode)

    # -- shape -------------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return self.data.shape[0]

    @property
    def n_cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple:
        return self.data.shape

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    # -- arithmetic ---------------------------------------------------------

    def _check_binary(self, other: "CMatrix", op: str, matmul: bool = False):
        if not isinstance(other, CMatrix):
            raise ValueError(f"{op}: expected CMatrix, got {type(other).__name__}")
        if self.mode is not other.mode:
            raise ValueError(f"{op}: mode mismatch ({self.mode.value} vs {other.mode.value})")
        if matmul:
            if self.n_cols != other.n_rows:
                raise ValueError(f"{op}: dimension mismatch {self.shape} @ {other.shape}")
        elif self.shape != other.shape:
            raise ValueError(f"{op}: dimension mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "CMatrix") -> "CMatrix":
        self._check_binary(other, "add")
        return CMatrix(self.data + other.data, self.mode)

    def __sub__(self, other: "CMatrix") -> "CMatrix":
        self._check_binary(other, "subtract")
        return CMatrix(self.data - other.data, self.mode)

    def __neg__(self) -> "CMatrix":
        if self.mode is Mode.FLOAT:
            return CMatrix(-self.data, self.mode)
        return CMatrix(np.array([[-v for v in row] for row in self.data], dtype=object), self.mode)

    def __matmul__(self, other: "CMatrix") -> "CMatrix":
        self._check_binary(other, "matmul", matmul=True)
        return CMatrix(np.dot(self.data, other.data), self.mode)

    def scale(self, s: Scalar) -> "CMatrix":
        if self.mode is Mode.FLOAT:
            return CMatrix(self.data * complex(s), self.mode)
        g = _as_exact(s)
        return CMatrix(np.array([[v * g for v in row] for row in self.data], dtype=object), self.mode)

    @property
    def H(self) -> "CMatrix":
        """Conjugate transpose."""
        if self.mode is Mode.FLOAT:
            return CMatrix(self.data.conj().T.copy(), self.mode)
        arr = np.array(
            [[self.data[r, c].conjugate() for r in range(self.n_rows)] for c in range(self.n_cols)],
            dtype=object,
        )
        return CMatrix(arr, self.mode)

    def trace(self) -> Scalar:
        if not self.is_square:
            raise ValueError("trace of a non-square matrix")
        if self.mode is Mode.FLOAT:
            return complex(np.trace(self.data))
        t = _GR_ZERO
        for k in range(self.n_rows):
            t = t + self.data[k, k]
        return t

    def fro(self) -> float:
        """Frobenius norm (float in both modes)."""
        if self.mode is Mode.FLOAT:
            return float(np.linalg.norm(self.data))
        return math.sqrt(float(self.fro2_exact()))

    def fro2_exact(self) -> Fraction:
        if self.mode is not Mode.EXACT:
            raise ValueError("fro2_exact requires Exact mode")
        total = Fraction(0)
        for v in self.data.flat:
            total += v.abs2()
        return total

    def is_zero(self, tol: float = 0.0) -> bool:
        if self.mode is Mode.FLOAT:
            return bool(np.max(np.abs(self.data), initial=0.0) <= tol)
        return all(not v for v in self.data.flat)

    def entry(self, r: int, c: int) -> Scalar:
        v = self.data[r, c]
        return complex(v) if self.mode is Mode.FLOAT else v

    def submatrix(self, r0: int, r1: int, c0: int, c1: int) -> "CMatrix":
        return CMatrix(self.data[r0:r1, c0:c1].copy(), self.mode)

    def to_float(self) -> "CMatrix":
        if self.mode is Mode.FLOAT:
            return self
        arr = np.array([[complex(v) for v in row] for row in self.data], dtype=np.complex128)
        return CMatrix(arr, Mode.FLOAT)

    def allclose(self, other: "CMatrix", tol: float = DEFAULT_RTOL) -> bool:
        """Relative Frobenius comparison in Float mode, exact equality in Exact."""
        self._check_binary(other, "allclose")
        if self.mode is Mode.EXACT:
            return (self - other).is_zero()
        scale = max(self.fro(), other.fro(), 1.0)
        return (self - other).fro() <= tol * scale

    def __repr__(self):
        return f"CMatrix({self.n_rows}x{self.n_cols}, {self.mode.value})"


# ---------------------------------------------------------------------------
# skew-Hermitian validation
# ---------------------------------------------------------------------------


def skew_defect(a: CMatrix) -> float:
    """Frobenius norm of a + a^*; exact zero reported as 0.0 in Exact mode."""
    if not a.is_square:
        raise ValueError("skew-Hermitian test requires a square matrix")
    return (a + a.H).fro()


def is_skew_hermitian(a: CMatrix, tol_factor: float = SKEW_TOL_FACTOR) -> bool:
    if a.mode is Mode.EXACT:
        return (a + a.H).is_zero()
    return skew_defect(a) <= tol_factor * a.fro()


def require_skew_hermitian(a: CMatrix, tol_factor: float = SKEW_TOL_FACTOR):
    if not is_skew_hermitian(a, tol_factor):
        raise NotSkewHermitian(
            f"matrix is not skew-Hermitian (defect {skew_defect(a):.3e}, "
            f"tolerance {tol_factor * a.fro():.3e})"
        )


# ---------------------------------------------------------------------------
# the kernels
# ---------------------------------------------------------------------------


def commutator(a: CMatrix, b: CMatrix) -> CMatrix:
    """Matrix commutator ab - ba (exact in Exact mode)."""
    if not a.is_square or not b.is_square:
        raise ValueError("commutator requires square matrices")
    a._check_binary(b, "commutator")
    return a @ b - b @ a


def project_m(a: CMatrix, partition: "FlagPartition") -> CMatrix:
    """Zero the diagonal blocks of ``a``, i.e. project onto the tangent space m.

    Off-diagonal blocks are returned unchanged. Idempotent, and self-adjoint
    for the trace pairing.
    """
    if a.shape != (partition.total, partition.total):
        raise ValueError(
            f"matrix shape {a.shape} does not match partition of total {partition.total}"
        )
    arr = a.data.copy()
    for i in range(1, partition.s + 1):
        lo, hi = partition.block_range(i)
        if a.mode is Mode.FLOAT:
            arr[lo:hi, lo:hi] = 0.0
        else:
            arr[lo:hi, lo:hi] = _GR_ZERO
    return CMatrix(arr, a.mode)


def killing_inner(a: CMatrix, b: CMatrix) -> Scalar:
    """Trace pairing tr(ab).

    The ambient Lie-algebra pairing is a positive multiple of this; the factor
    is dropped because every criterion in the library is a zero or sign test.
    """
    if not a.is_square:
        raise ValueError("killing_inner requires square matrices")
    a._check_binary(b, "killing_inner")
    return (a @ b).trace()


def _hermitian_from_skew(a: CMatrix) -> np.ndarray:
    # a skew-Hermitian => -i a is Hermitian with eigenvalues theta (a v = i theta v)
    h = -1j * a.to_float().data
    return (h + h.conj().T) / 2.0


def skew_spectrum(a: CMatrix, tol_factor: float = SKEW_TOL_FACTOR) -> list:
    """Sorted real list theta_1 >= ... >= theta_n with eig(a) = {i * theta_k}.

    Float mode solves the Hermitian eigenproblem for -i a. Exact mode extracts
    the rational eigenvalues of -a^2 (raising ExactSpectrumUnavailable if any
    is irrational) and signs them against the float eigensolver.
    """
    require_skew_hermitian(a, tol_factor)
    if a.mode is Mode.FLOAT:
        w = np.linalg.eigvalsh(_hermitian_from_skew(a))
        return [float(t) for t in w[::-1]]
    squares = exact_skew_squares(a)
    thetas, _ = signed_thetas_from_squares(squares, a)
    return thetas


def unitary_exp(a: CMatrix, t: float) -> CMatrix:
    """exp(t a) for skew-Hermitian a, via the spectral decomposition of -i a."""
    if a.mode is not Mode.FLOAT:
        raise ValueError("unitary_exp is Float-mode only")
    require_skew_hermitian(a)
    w, v = np.linalg.eigh(_hermitian_from_skew(a))
    phases = np.exp(1j * t * w)
    return CMatrix((v * phases) @ v.conj().T, Mode.FLOAT)


def block_svd(a: CMatrix):
    """Full SVD a = P diag(sigma) Q^* with sigma descending.

    Returns (P, sigma, Q) with P, Q unitary CMatrix and sigma a float array.
    """
    if a.mode is not Mode.FLOAT:
        raise ValueError("block_svd is Float-mode only (exact SVD is out of scope)")
    u, s, vh = np.linalg.svd(a.data, full_matrices=True)
    return CMatrix(u, Mode.FLOAT), s, CMatrix(vh.conj().T, Mode.FLOAT)


# ---------------------------------------------------------------------------
# exact spectral extraction
# ---------------------------------------------------------------------------


def exact_char_poly(a: CMatrix) -> list:
    """Monic characteristic polynomial of an Exact matrix.

    Returns descending GaussianRational coefficients [1, c1, ..., cn] for
    x^n + c1 x^(n-1) + ... + cn, computed by the trace recursion
    M_k = A M_(k-1) + c_k I, c_k = -tr(A M_(k-1)) / k.
    """
    if a.mode is not Mode.EXACT:
        raise ValueError("exact_char_poly requires Exact mode")
    if not a.is_square:
        raise ValueError("characteristic polynomial of a non-square matrix")
    n = a.n_rows
    ident = CMatrix.identity(n, Mode.EXACT)
    coeffs = [_GR_ONE]
    m = ident
    for k in range(1, n + 1):
        am = a @ m
        c = -(am.trace()) / k
        coeffs.append(c)
        m = am + ident.scale(c)
    return coeffs


def _synthetic_division(poly: list, root: Fraction):
    """Divide a monic Fraction polynomial (descending coeffs) by (x - root)."""
    out = [poly[0]]
    for c in poly[1:]:
        out.append(c + root * out[-1])
    remainder = out.pop()
    return out, remainder


def _rational_roots(poly: list, approx: Iterable[float]) -> dict:
    """All roots of a monic Fraction polynomial, or raise if any is irrational.

    Candidates come from the float approximations (denominators bounded by the
    lcm D of the coefficient denominators, which bounds every rational root's
    denominator for a monic polynomial); each candidate is verified by exact
    synthetic division, so a returned root is never wrong.
    """
    roots: dict = {}
    work = list(poly)
    while len(work) > 1 and work[-1] == 0:
        roots[Fraction(0)] = roots.get(Fraction(0), 0) + 1
        work.pop()

    denom_lcm = 1
    for c in work:
        denom_lcm = math.lcm(denom_lcm, c.denominator)

    candidates = set()
    for v in approx:
        if not math.isfinite(v):
            continue
        exact_v = Fraction(v)
        candidates.add(Fraction(round(exact_v * denom_lcm), denom_lcm))
        candidates.add(exact_v.limit_denominator(denom_lcm))
        candidates.add(Fraction(round(exact_v)))
    for cand in sorted(candidates, reverse=True):
        if cand == 0:
            continue
        while len(work) > 1:
            quotient, remainder = _synthetic_division(work, cand)
            if remainder != 0:
                break
            roots[cand] = roots.get(cand, 0) + 1
            work = quotient
    if len(work) > 1:
        raise ExactSpectrumUnavailable(
            f"characteristic polynomial has irrational roots "
            f"(degree {len(work) - 1} factor remains); fall back to Float mode"
        )
    return roots


def exact_skew_squares(a: CMatrix) -> list:
    """Rational eigenvalues of -a^2 for exact skew-Hermitian a.

    Returns [(theta_squared, multiplicity), ...] sorted descending; raises
    ExactSpectrumUnavailable when the characteristic polynomial of -a^2 has an
    irrational root.
    """
    if a.mode is not Mode.EXACT:
        raise ValueError("exact_skew_squares requires Exact mode")
    require_skew_hermitian(a)
    minus_a2 = -(a @ a)
    coeffs = exact_char_poly(minus_a2)
    fracs = []
    for c in coeffs:
        if c.im != 0:
            raise ExactSpectrumUnavailable(
                "characteristic polynomial of -a^2 is not real; input not skew-Hermitian"
            )
        fracs.append(c.re)
    af = a.to_float().data
    approx = [float(x) for x in np.linalg.eigvalsh(-(af @ af))]
    roots = _rational_roots(fracs, approx)
    for r in roots:
        if r < 0:
            raise ExactSpectrumUnavailable(f"-a^2 has a negative eigenvalue {r}")
    total = sum(roots.values())
    if total != a.n_rows:
        raise ExactSpectrumUnavailable("rational root multiplicities do not fill the spectrum")
    return sorted(roots.items(), key=lambda kv: kv[0], reverse=True)


def signed_thetas_from_squares(squares: list, a: CMatrix):
    """Assign signs to the exact magnitudes sqrt(theta^2) using float eigenvalues.

    Returns (thetas, squares_aligned): both sorted so that thetas descend,
    with squares_aligned[k] == thetas[k]^2 as a Fraction.
    """
    mags = []
    for sq, mult in squares:
        root = math.sqrt(float(sq))
        mags.extend([(root, sq)] * mult)
    mags.sort(key=lambda ms: ms[0], reverse=True)

    float_thetas = skew_spectrum(a.to_float())
    by_abs = sorted(range(len(float_thetas)), key=lambda k: abs(float_thetas[k]), reverse=True)
    scale = max((m for m, _ in mags), default=0.0)
    signed = []
    for idx, (mag, sq) in zip(by_abs, mags):
        ft = float_thetas[idx]
        if abs(abs(ft) - mag) > 1e-6 * max(scale, 1.0):
            raise ExactSpectrumUnavailable(
                "float eigenvalues do not match the exact magnitudes; "
                "spectrum too clustered to sign reliably"
            )
        theta = mag if ft >= 0 else -mag
        signed.append((theta, sq))
    signed.sort(key=lambda ts: ts[0], reverse=True)
    return [t for t, _ in signed], [sq for _, sq in signed]
