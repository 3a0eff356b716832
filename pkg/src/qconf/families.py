"""Named multipartite state families used throughout the tests and demos."""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np

from . import linalg
from .errors import InputError
from .linalg import DimProfile
from .states import MultipartiteState

PBIT_TOL = 1e-8


def example_ghz(m: int, d: int = 2) -> MultipartiteState:
    """(1/sqrt(d)) sum_i |i>^{(x)m} on parties A1..Am, no eavesdropper."""
    if m < 2 or d < 2:
        raise InputError(f"GHZ state needs m >= 2 and d >= 2, got m={m}, d={d}")
    linalg.check_budget(d**m, "GHZ state")
    vec = np.zeros(d**m, dtype=complex)
    stride = sum(d**k for k in range(m))
    vec[np.arange(d) * stride] = 1 / np.sqrt(d)
    return MultipartiteState.from_vector(vec, DimProfile([d] * m))


def default_family(d: int, k: int) -> list[np.ndarray]:
    """Powers of the Fourier transform: I, QFT_d, QFT_d^2, ... (k members)."""
    f = linalg.qft(d)
    return [np.linalg.matrix_power(f, a) for a in range(k)]


def _check_family(d: int, k: int, family) -> list[np.ndarray]:
    family = default_family(d, k) if family is None else [np.asarray(u, dtype=complex) for u in family]
    if len(family) != k:
        raise InputError(f"expected {k} unitaries, got {len(family)}")
    for a, u in enumerate(family):
        if u.shape != (d, d) or not linalg.is_unitary(u):
            raise InputError(f"family member {a} is not a {d}x{d} unitary")
    return family


def _basis(dim: int, i: int) -> np.ndarray:
    e = np.zeros(dim, dtype=complex)
    e[i] = 1.0
    return e


def _against_co_vectors(d: int, k: int, family, with_eve: bool):
    """Yield (x, alpha, beta, gamma, product vector) over all labels."""
    for x, a, b, g in itertools.product(range(d), range(k), range(k), range(k)):
        ex = _basis(d, x)
        va = np.kron(family[a] @ ex, _basis(k, b))
        vb = np.kron(family[b] @ ex, _basis(k, g))
        vc = np.kron(family[g] @ ex, _basis(k, a))
        v = np.kron(np.kron(va, vb), vc)
        if with_eve:
            v = np.kron(v, _basis(k**3, (a * k + b) * k + g))
        yield x, a, b, g, v


def example_against_co(d: int, k: int, family: Sequence[np.ndarray] | None = None) -> MultipartiteState:
    """Encrypted-key state where omniscience protocols fall short.

    Each of A, B, C holds an encrypted copy of a uniform x (rotated by a
    unitary indexed by another player's label) together with one label;
    Eve holds all three labels. Parties have dimension d*k, Eve k**3.
    """
    family = _check_family(d, k, family)
    dim = (d * k) ** 3 * k**3
    linalg.check_budget(dim, "against-CO state")
    vecs = np.array([v for *_, v in _against_co_vectors(d, k, family, True)]).T
    rho = vecs @ vecs.conj().T / (d * k**3)
    return MultipartiteState(rho, DimProfile([d * k] * 3 + [k**3], ["A", "B", "C", "E"]), eve_index=3)


def example_against_co_pure(d: int, k: int, family: Sequence[np.ndarray] | None = None) -> MultipartiteState:
    """Coherent (pure, tripartite) version of :func:`example_against_co`."""
    family = _check_family(d, k, family)
    linalg.check_budget((d * k) ** 3, "against-CO pure state")
    vec = sum(v for *_, v in _against_co_vectors(d, k, family, False)) / np.sqrt(d * k**3)
    return MultipartiteState.from_vector(vec, DimProfile([d * k] * 3, ["A", "B", "C"]))


def against_co_local_information(d: int, basis: np.ndarray, family: Sequence[np.ndarray] | None = None) -> float:
    """I(Y;X) when one player measures its encrypted register in ``basis``.

    X is the uniform key, the encrypting unitary is drawn uniformly from
    ``family`` and unknown to the measuring player; Y is the outcome of the
    rank-one measurement onto the columns of ``basis``.
    """
    from .classical import mutual_information

    k = 2 if family is None else len(family)
    family = _check_family(d, k, family)
    basis = np.asarray(basis, dtype=complex)
    joint = np.zeros((d, basis.shape[1]))
    for u in family:
        amp = basis.conj().T @ u  # amp[y, x] = <b_y|U|x>
        joint += (np.abs(amp) ** 2).T / (d * k)
    return mutual_information(joint)


class PbitShieldError(InputError):
    """The supplied shield family leaks the key to Eve."""

    def __init__(self, deviation: float):
        super().__init__(f"Eve marginals of the shield states differ by {deviation:.3g} in trace norm")
        self.deviation = deviation


def example_pbit(
    d: int,
    shield_state,
    shield_dims: Sequence[int],
    eve_dim: int,
    unitaries: Sequence[np.ndarray],
) -> MultipartiteState:
    """Private-bit state (1/sqrt d) sum_x |x...x> (U_x)|psi_0>.

    ``shield_state`` is |psi_0> on B_1 ... B_m E. Each ``U_x`` acts either on
    the shields B_1 ... B_m (then the Eve marginals agree automatically) or
    on B_1 ... B_m E; the defining invariant that every psi_x has the same
    Eve marginal is checked and a :class:`PbitShieldError` raised otherwise.
    Player j holds the key register X_j together with the shield B_j.
    """
    shield_dims = [int(s) for s in shield_dims]
    m = len(shield_dims)
    db = int(np.prod(shield_dims, dtype=np.int64))
    psi0 = np.asarray(shield_state, dtype=complex).reshape(-1)
    if psi0.size != db * eve_dim:
        raise InputError(f"shield state has dimension {psi0.size}, expected {db * eve_dim}")
    psi0 = psi0 / np.linalg.norm(psi0)
    if len(unitaries) != d:
        raise InputError(f"expected {d} shield unitaries, got {len(unitaries)}")
    shields = []
    for x, u in enumerate(unitaries):
        u = np.asarray(u, dtype=complex)
        if not linalg.is_unitary(u):
            raise InputError(f"shield unitary {x} is not unitary")
        if u.shape[0] == db:
            u = np.kron(u, np.eye(eve_dim))
        elif u.shape[0] != db * eve_dim:
            raise InputError(f"shield unitary {x} has dimension {u.shape[0]}")
        shields.append(u @ psi0)
    deviation = pbit_eve_deviation(shields, db, eve_dim)
    if deviation > PBIT_TOL:
        raise PbitShieldError(deviation)

    linalg.check_budget(d**m * db * eve_dim, "pbit state")
    vec = np.zeros(d**m * db * eve_dim, dtype=complex)
    stride = sum(d**k for k in range(m))
    for x, s in enumerate(shields):
        vec += np.kron(_basis(d**m, x * stride), s) / np.sqrt(d)
    # reorder X_1..X_m B_1..B_m E into (X_1 B_1) ... (X_m B_m) E
    raw = DimProfile([d] * m + shield_dims + [eve_dim])
    perm = [p for j in range(m) for p in (j, m + j)] + [2 * m]
    rho = linalg.permute_subsystems(linalg.projector(vec), raw, perm)
    profile = DimProfile([d * s for s in shield_dims] + [eve_dim], [f"A{j + 1}" for j in range(m)] + ["E"])
    return MultipartiteState(rho, profile, eve_index=m)


def pbit_eve_deviation(shields: Sequence[np.ndarray], db: int, eve_dim: int) -> float:
    """Largest pairwise trace-norm distance between the Eve marginals of the shield states."""
    prof = DimProfile([db, eve_dim])
    marg = [linalg.partial_trace(linalg.projector(s), prof, [1]) for s in shields]
    worst = 0.0
    for a, b in itertools.combinations(marg, 2):
        worst = max(worst, 2 * linalg.trace_distance(a, b))
    return worst


def default_pbit() -> MultipartiteState:
    """Two-player, one-bit pbit with qubit shields and a qubit Eve.

    |psi_0> is a three-qubit GHZ state on B_1 B_2 E and U_1 = Z (x) X flips
    a phase and a bit on the shields only.
    """
    ghz = np.zeros(8, dtype=complex)
    ghz[0] = ghz[7] = 1 / np.sqrt(2)
    z = np.diag([1.0, -1.0])
    xg = np.array([[0.0, 1.0], [1.0, 0.0]])
    return example_pbit(2, ghz, [2, 2], 2, [np.eye(4), np.kron(z, xg)])
