"""Dense multilinear algebra and entropic functionals.

Matrices are plain ``numpy`` arrays. Tensor products follow the row-major,
left-factor-most-significant convention of :func:`numpy.kron` everywhere in
the package; subsystems of a composite space are described by a
:class:`DimProfile`. All logarithms are base 2.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetError, InputError

HERMITIAN_TOL = 1e-9
EIGEN_CLAMP = 1e-10
TRACE_TOL = 1e-9

DEFAULT_MAX_DIM = 2**14
HARD_MAX_DIM = 2**16


def max_dim() -> int:
    """Ambient-dimension cap, overridable through ``QCONF_MAX_DIM`` (at most 2**16)."""
    raw = os.environ.get("QCONF_MAX_DIM")
    if not raw:
        return DEFAULT_MAX_DIM
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"QCONF_MAX_DIM must be an integer, got {raw!r}") from None
    return max(1, min(value, HARD_MAX_DIM))


def check_budget(dim: int, what: str = "matrix") -> None:
    cap = max_dim()
    if dim > cap:
        raise BudgetError(f"{what} dimension {dim} exceeds the cap {cap}")


@dataclass(frozen=True)
class DimProfile:
    """Ordered subsystem dimensions with distinct party labels."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]

    def __init__(self, dims: Sequence[int], labels: Sequence[str] | None = None):
        dims = tuple(int(d) for d in dims)
        if labels is None:
            labels = tuple(f"A{i + 1}" for i in range(len(dims)))
        labels = tuple(str(s) for s in labels)
        if any(d < 1 for d in dims):
            raise InputError(f"subsystem dimensions must be positive, got {dims}")
        if len(labels) != len(dims):
            raise InputError(f"{len(labels)} labels for {len(dims)} subsystems")
        if len(set(labels)) != len(labels):
            raise InputError(f"party labels must be unique, got {labels}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.dims)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"unknown party {label!r}; have {self.labels}") from None

    def subset(self, keep: Iterable[int]) -> "DimProfile":
        keep = sorted(keep)
        return DimProfile([self.dims[i] for i in keep], [self.labels[i] for i in keep])

    def permuted(self, perm: Sequence[int]) -> "DimProfile":
        return DimProfile([self.dims[i] for i in perm], [self.labels[i] for i in perm])


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, refusing results larger than the dimension cap."""
    a = np.asarray(a)
    b = np.asarray(b)
    check_budget(max(a.shape[0] * b.shape[0], a.shape[-1] * b.shape[-1]), "kron result")
    return np.kron(a, b)


def kron_all(factors: Iterable[np.ndarray]) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for f in factors:
        f = np.asarray(f)
        if f.ndim == 1:
            f = f.reshape(-1, 1)
        out = kron(out, f)
    return out


def _check_square(rho: np.ndarray, dim: int | None = None) -> np.ndarray:
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InputError(f"expected a square matrix, got shape {rho.shape}")
    if dim is not None and rho.shape[0] != dim:
        raise InputError(f"matrix dimension {rho.shape[0]} does not match profile dimension {dim}")
    return rho


def hermitize(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return (M + M^dagger)/2, rejecting inputs whose asymmetry exceeds ``tol``."""
    m = _check_square(m)
    asym = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if asym > tol:
        raise InputError(f"matrix is not Hermitian (max asymmetry {asym:.3g})")
    return (m + m.conj().T) / 2


def hermitian_eigen(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues in descending order."""
    h = hermitize(m)
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]
    return vals[order], vecs[:, order]


def _clamped_spectrum(m: np.ndarray) -> np.ndarray:
    vals = np.linalg.eigvalsh(hermitize(m))
    if vals.size and vals.min() < -EIGEN_CLAMP:
        raise InputError(f"operator has eigenvalue {vals.min():.3g} below -{EIGEN_CLAMP:g}")
    return np.clip(vals, 0.0, None)


def spectrum_entropy(vals: np.ndarray) -> float:
    """-sum(l log2 l) over the positive entries of ``vals`` (unnormalized)."""
    vals = np.asarray(vals, dtype=float)
    vals = vals[vals > 0]
    return float(-np.sum(vals * np.log2(vals)))


def operator_entropy(op: np.ndarray) -> float:
    """-Tr(op log2 op) for a PSD, possibly subnormalized operator.

    Summing this over the blocks of a classical-quantum operator gives the
    joint entropy of the classical register and the quantum part.
    """
    return spectrum_entropy(_clamped_spectrum(op))


def von_neumann_entropy(rho: np.ndarray) -> float:
    """Von Neumann entropy in bits of a normalized density matrix."""
    rho = _check_square(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InputError(f"density matrix has trace {tr:.12g}, expected 1")
    s = operator_entropy(rho)
    return float(min(max(s, 0.0), np.log2(rho.shape[0])))


def _einsum_letters(n: int) -> str:
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise BudgetError(f"too many subsystems ({n}) for tensor contraction")
    return letters


def partial_trace(rho: np.ndarray, profile: DimProfile, keep: Iterable[int]) -> np.ndarray:
    """Reduced operator on the subsystems ``keep`` (returned in their original order)."""
    rho = _check_square(rho, profile.total)
    keep = sorted(set(int(k) for k in keep))
    n = len(profile)
    if any(k < 0 or k >= n for k in keep):
        raise InputError(f"subsystem indices {keep} out of range for {n} subsystems")
    if len(keep) == n:
        return rho.copy()
    letters = _einsum_letters(n)
    row = list(letters[:n])
    col = list(letters[n : 2 * n])
    for i in range(n):
        if i not in keep:
            col[i] = row[i]
    out = "".join(row[i] for i in keep) + "".join(col[i] for i in keep)
    t = rho.reshape(profile.dims + profile.dims)
    red = np.einsum("".join(row) + "".join(col) + "->" + out, t)
    d = int(np.prod([profile.dims[i] for i in keep], dtype=np.int64))
    return red.reshape(d, d)


def permute_subsystems(rho: np.ndarray, profile: DimProfile, perm: Sequence[int]) -> np.ndarray:
    """Re-express ``rho`` with subsystem ``perm[k]`` moved to position ``k``."""
    rho = _check_square(rho, profile.total)
    perm = [int(p) for p in perm]
    n = len(profile)
    if sorted(perm) != list(range(n)):
        raise InputError(f"{perm} is not a permutation of range({n})")
    t = rho.reshape(profile.dims + profile.dims)
    t = t.transpose(perm + [n + p for p in perm])
    return t.reshape(rho.shape)


def subsystem_entropy(rho: np.ndarray, profile: DimProfile, part: Iterable[int]) -> float:
    part = list(part)
    if not part:
        return 0.0
    return von_neumann_entropy(partial_trace(rho, profile, part))


def _disjoint(a: Iterable[int], b: Iterable[int]) -> tuple[set[int], set[int]]:
    a, b = set(a), set(b)
    if a & b:
        raise InputError(f"parts overlap on {sorted(a & b)}")
    return a, b


def conditional_entropy(rho: np.ndarray, profile: DimProfile, part_a, part_b) -> float:
    """S(A|B) = S(AB) - S(B)."""
    a, b = _disjoint(part_a, part_b)
    return subsystem_entropy(rho, profile, a | b) - subsystem_entropy(rho, profile, b)


def coherent_information(rho: np.ndarray, profile: DimProfile, part_a, part_b) -> float:
    """I(A>B) = S(B) - S(AB); subsystems outside A and B are traced out."""
    a, b = _disjoint(part_a, part_b)
    return subsystem_entropy(rho, profile, b) - subsystem_entropy(rho, profile, a | b)


def trace_norm(m: np.ndarray) -> float:
    return float(np.sum(np.abs(np.linalg.eigvalsh(hermitize(m)))))


def trace_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the trace norm of a - b."""
    a = _check_square(a)
    b = _check_square(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch {a.shape} vs {b.shape}")
    return 0.5 * trace_norm(a - b)


def psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = hermitian_eigen(m)
    if vals.size and vals.min() < -EIGEN_CLAMP:
        raise InputError(f"operator has eigenvalue {vals.min():.3g} below -{EIGEN_CLAMP:g}")
    vals = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * vals) @ vecs.conj().T


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Root fidelity ||sqrt(a) sqrt(b)||_1."""
    a = _check_square(a)
    b = _check_square(b)
    if a.shape != b.shape:
        raise InputError(f"dimension mismatch {a.shape} vs {b.shape}")
    sv = np.linalg.svd(psd_sqrt(a) @ psd_sqrt(b), compute_uv=False)
    return float(min(np.sum(sv), 1.0 + 1e-12))


def purified_distance(a: np.ndarray, b: np.ndarray) -> float:
    """sqrt(1 - F^2) for normalized states (no sub-normalized correction)."""
    f = min(fidelity(a, b), 1.0)
    return float(np.sqrt(max(0.0, 1.0 - f * f)))


def projector(vec: np.ndarray) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())


def is_unitary(u: np.ndarray, tol: float = 1e-9) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def qft(d: int) -> np.ndarray:
    """Quantum Fourier transform exp(2 pi i jk/d)/sqrt(d)."""
    j = np.arange(d)
    f = np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)
    if not is_unitary(f):
        raise AssertionError("QFT construction is not unitary")
    return f


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph
