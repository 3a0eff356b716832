"""Multipartite states, local instruments and the cq-states they induce."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg
from .errors import InputError
from .linalg import DimProfile

COMPLETENESS_TOL = 1e-8
WEIGHT_CUTOFF = 1e-12


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """A density operator on a labelled tensor-product space.

    ``eve_index`` optionally designates one subsystem as the eavesdropper;
    every other subsystem is a legitimate party.
    """

    matrix: np.ndarray
    profile: DimProfile
    eve_index: int | None = None
    _entropy_cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] != self.profile.total:
            raise InputError(
                f"matrix shape {m.shape} does not match profile dimension {self.profile.total}"
            )
        linalg.check_budget(m.shape[0], "state")
        m = linalg.hermitize(m)
        tr = np.trace(m).real
        if abs(tr - 1.0) > linalg.TRACE_TOL:
            raise InputError(f"state has trace {tr:.12g}, expected 1")
        vals = np.linalg.eigvalsh(m)
        if vals.min() < -linalg.EIGEN_CLAMP:
            raise InputError(f"state has negative eigenvalue {vals.min():.3g}")
        if self.eve_index is not None and not 0 <= self.eve_index < len(self.profile):
            raise InputError(f"eve_index {self.eve_index} out of range")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vector(cls, vec, profile: DimProfile, eve_index: int | None = None) -> "MultipartiteState":
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        nrm = np.linalg.norm(vec)
        if nrm == 0:
            raise InputError("zero state vector")
        return cls(linalg.projector(vec / nrm), profile, eve_index)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def parties(self) -> list[int]:
        """Indices of the legitimate (non-Eve) subsystems."""
        return [i for i in range(len(self.profile)) if i != self.eve_index]

    @property
    def party_labels(self) -> list[str]:
        return [self.profile.labels[i] for i in self.parties]

    @property
    def m(self) -> int:
        return len(self.parties)

    @property
    def eve_label(self) -> str | None:
        return None if self.eve_index is None else self.profile.labels[self.eve_index]

    def reduced(self, keep: Iterable[int]) -> np.ndarray:
        return linalg.partial_trace(self.matrix, self.profile, keep)

    def entropy(self, part: Iterable[int]) -> float:
        """Entropy of the marginal on the subsystem indices ``part`` (memoized)."""
        key = frozenset(int(i) for i in part)
        if key not in self._entropy_cache:
            self._entropy_cache[key] = linalg.subsystem_entropy(self.matrix, self.profile, key)
        return self._entropy_cache[key]

    def legitimate(self) -> "MultipartiteState":
        """The marginal on the legitimate parties, Eve traced out."""
        if self.eve_index is None:
            return self
        keep = self.parties
        return MultipartiteState(self.reduced(keep), self.profile.subset(keep))

    def permuted(self, perm: Sequence[int]) -> "MultipartiteState":
        mat = linalg.permute_subsystems(self.matrix, self.profile, perm)
        eve = None if self.eve_index is None else list(perm).index(self.eve_index)
        return MultipartiteState(mat, self.profile.permuted(perm), eve)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return abs(np.trace(self.matrix @ self.matrix).real - 1.0) <= tol


@dataclass(frozen=True, eq=False)
class Branch:
    outcome: str
    kraus: tuple[np.ndarray, ...]


@dataclass(frozen=True, eq=False)
class Instrument:
    """Labelled completely positive branches acting on one party.

    Every Kraus operator maps the party's input space (dimension
    ``input_dim``) to an output space A' of dimension ``output_dim``; a
    POVM is the special case ``output_dim == 1``.
    """

    party: str
    branches: tuple[Branch, ...]

    def __init__(self, party: str, branches):
        norm = []
        for b in branches:
            if isinstance(b, Branch):
                outcome, ops = b.outcome, b.kraus
            else:
                outcome, ops = b
            ops = tuple(np.atleast_2d(np.asarray(k, dtype=complex)) for k in ops)
            if not ops:
                raise InputError(f"branch {outcome!r} of {party} has no Kraus operators")
            norm.append(Branch(str(outcome), ops))
        if not norm:
            raise InputError(f"instrument for {party} has no branches")
        object.__setattr__(self, "party", str(party))
        object.__setattr__(self, "branches", tuple(norm))
        self._validate()

    def _validate(self):
        shapes = {k.shape for b in self.branches for k in b.kraus}
        if len(shapes) != 1:
            raise InputError(f"instrument for {self.party} mixes Kraus shapes {sorted(shapes)}")
        outcomes = [b.outcome for b in self.branches]
        if len(set(outcomes)) != len(outcomes):
            raise InputError(f"instrument for {self.party} repeats outcome labels")
        total = sum(k.conj().T @ k for b in self.branches for k in b.kraus)
        dev = np.max(np.abs(total - np.eye(self.input_dim)))
        if dev > COMPLETENESS_TOL:
            raise InputError(
                f"instrument for {self.party} is incomplete: |sum K^dag K - I| = {dev:.3g}"
            )

    @property
    def input_dim(self) -> int:
        return self.branches[0].kraus[0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.branches[0].kraus[0].shape[0]

    @property
    def outcomes(self) -> tuple[str, ...]:
        return tuple(b.outcome for b in self.branches)

    @property
    def is_pure(self) -> bool:
        """Every branch has Kraus rank one."""
        return all(len(b.kraus) == 1 for b in self.branches)

    @property
    def is_povm(self) -> bool:
        return self.output_dim == 1

    def povm_elements(self) -> list[np.ndarray]:
        return [sum(k.conj().T @ k for k in b.kraus) for b in self.branches]

    def relabelled(self, party: str) -> "Instrument":
        return Instrument(party, self.branches)

    @classmethod
    def basis(cls, party: str, d: int, unitary=None, labels=None) -> "Instrument":
        """Rank-one projective measurement onto the columns of ``unitary``."""
        u = np.eye(d, dtype=complex) if unitary is None else np.asarray(unitary, dtype=complex)
        if u.shape != (d, d) or not linalg.is_unitary(u):
            raise InputError(f"basis for {party} must be a {d}x{d} unitary")
        labels = [str(x) for x in range(d)] if labels is None else labels
        return cls(party, [(labels[x], [u[:, x].conj().reshape(1, d)]) for x in range(d)])

    @classmethod
    def from_povm(cls, party: str, elements, labels=None) -> "Instrument":
        """Measurement with trivial output; each element is split into rank-one rows."""
        branches = []
        for x, el in enumerate(elements):
            vals, vecs = linalg.hermitian_eigen(np.asarray(el, dtype=complex))
            if vals.min() < -linalg.EIGEN_CLAMP:
                raise InputError(f"POVM element {x} of {party} is not PSD")
            rows = [np.sqrt(v) * vecs[:, i].conj().reshape(1, -1) for i, v in enumerate(vals) if v > 1e-14]
            if not rows:
                rows = [np.zeros((1, vecs.shape[0]), dtype=complex)]
            branches.append((str(x) if labels is None else labels[x], rows))
        return cls(party, branches)

    @classmethod
    def identity(cls, party: str, d: int) -> "Instrument":
        """Single-outcome instrument that leaves the system untouched."""
        return cls(party, [("0", [np.eye(d, dtype=complex)])])


@dataclass(frozen=True, eq=False)
class CqState:
    """Outcome tuples of local instruments with their residual operators.

    ``weights`` maps an index tuple (one index into each party's alphabet) to
    the subnormalized residual operator on A'_1 ... A'_m E, where the
    residual profile always ends with the eavesdropper slot (dimension 1 if
    there is none). Tuples of negligible probability are not stored.
    """

    parties: tuple[str, ...]
    alphabets: tuple[tuple[str, ...], ...]
    residual: DimProfile
    weights: Mapping[tuple[int, ...], np.ndarray]

    @property
    def m(self) -> int:
        return len(self.parties)

    @property
    def eve_dim(self) -> int:
        return self.residual.dims[-1]

    def probabilities(self) -> dict[tuple[int, ...], float]:
        return {x: float(np.trace(w).real) for x, w in self.weights.items()}

    def distribution(self) -> np.ndarray:
        """Joint outcome distribution as an array of shape (|X_1|, ..., |X_m|)."""
        p = np.zeros([len(a) for a in self.alphabets])
        for x, w in self.weights.items():
            p[x] = np.trace(w).real
        return p

    def labelled(self) -> dict[tuple[str, ...], np.ndarray]:
        return {
            tuple(self.alphabets[j][i] for j, i in enumerate(x)): w for x, w in self.weights.items()
        }

    def reduced_weights(self, keep: Iterable[int]) -> dict[tuple[int, ...], np.ndarray]:
        """Residual operators reduced to the residual subsystems ``keep``."""
        keep = list(keep)
        return {x: linalg.partial_trace(w, self.residual, keep) for x, w in self.weights.items()}

    def total_trace(self) -> float:
        return float(sum(np.trace(w).real for w in self.weights.values()))


def apply_local(t: np.ndarray, ops: Sequence[np.ndarray], axis: int, n: int) -> np.ndarray:
    """sum_k K_k t K_k^dagger with each K_k acting on tensor factor ``axis``.

    ``t`` has 2n axes (n row indices then n column indices).
    """
    out = None
    for k in ops:
        r = np.moveaxis(np.tensordot(k, t, axes=([1], [axis])), 0, axis)
        r = np.moveaxis(np.tensordot(r, k.conj(), axes=([n + axis], [1])), -1, n + axis)
        out = r if out is None else out + r
    return out


def _tensor_trace(t: np.ndarray, n: int) -> float:
    d = int(np.prod(t.shape[:n], dtype=np.int64))
    return float(np.trace(t.reshape(d, d)).real)


def _order_parties(state: MultipartiteState, instruments: Sequence[Instrument]):
    by_party: dict[str, Instrument] = {}
    for ins in instruments:
        if ins.party in by_party:
            raise InputError(f"two instruments given for party {ins.party}")
        by_party[ins.party] = ins
    labels = state.party_labels
    missing = [p for p in labels if p not in by_party]
    extra = [p for p in by_party if p not in labels]
    if missing or extra:
        raise InputError(f"instruments must cover exactly {labels}; missing {missing}, unknown {extra}")
    ordered = [by_party[p] for p in labels]
    for idx, ins in zip(state.parties, ordered):
        if ins.input_dim != state.profile.dims[idx]:
            raise InputError(
                f"instrument for {ins.party} acts on dimension {ins.input_dim}, "
                f"party has dimension {state.profile.dims[idx]}"
            )
    return ordered


def apply_instruments(state: MultipartiteState, instruments: Sequence[Instrument]) -> CqState:
    """Apply one instrument per legitimate party, identity on Eve."""
    ordered = _order_parties(state, instruments)
    perm = state.parties + ([state.eve_index] if state.eve_index is not None else [])
    rho = state.permuted(perm) if perm != list(range(len(perm))) else state
    m = len(ordered)
    dims = list(rho.profile.dims)
    if state.eve_index is None:
        dims.append(1)
    eve_dim = dims[-1]
    n = m + 1
    t = rho.matrix.reshape(dims + dims)
    out_dims = [ins.output_dim for ins in ordered]
    res_dim = int(np.prod(out_dims, dtype=np.int64)) * eve_dim
    weights: dict[tuple[int, ...], np.ndarray] = {}

    def descend(j: int, tensor: np.ndarray, prefix: tuple[int, ...]):
        if j == m:
            weights[prefix] = tensor.reshape(res_dim, res_dim)
            return
        for x, branch in enumerate(ordered[j].branches):
            child = apply_local(tensor, branch.kraus, j, n)
            if _tensor_trace(child, n) > WEIGHT_CUTOFF:
                descend(j + 1, child, prefix + (x,))

    descend(0, t, ())
    residual = DimProfile(
        out_dims + [eve_dim],
        [f"{ins.party}'" for ins in ordered] + [state.eve_label or "E"],
    )
    return CqState(
        parties=tuple(ins.party for ins in ordered),
        alphabets=tuple(ins.outcomes for ins in ordered),
        residual=residual,
        weights=weights,
    )


def _fresh_label(labels: Sequence[str], base: str) -> str:
    label = base
    while label in labels:
        label += "'"
    return label


def purify(state: MultipartiteState, env_label: str = "R", tol: float = 1e-12) -> MultipartiteState:
    """Append an environment of dimension rank(rho) holding a purification.

    The environment becomes the eavesdropper unless the state already has one.
    """
    vals, vecs = linalg.hermitian_eigen(state.matrix)
    support = vals > tol
    vals, vecs = vals[support], vecs[:, support]
    r = len(vals)
    linalg.check_budget(state.dim * r, "purification")
    vec = np.zeros(state.dim * r, dtype=complex)
    for i in range(r):
        e = np.zeros(r)
        e[i] = 1.0
        vec += np.sqrt(vals[i]) * np.kron(vecs[:, i], e)
    label = _fresh_label(state.profile.labels, env_label)
    profile = DimProfile(state.profile.dims + (r,), state.profile.labels + (label,))
    eve = len(state.profile) if state.eve_index is None else state.eve_index
    return MultipartiteState.from_vector(vec, profile, eve)


def purify_parties(state: MultipartiteState) -> MultipartiteState:
    """Purification of the legitimate marginal, with the purifying system as Eve."""
    return purify(state.legitimate(), env_label=state.eve_label or "E")


def random_state(profile: DimProfile, rank: int, seed: int, eve_index: int | None = None) -> MultipartiteState:
    """Deterministic random density matrix of the requested rank (Ginibre ensemble)."""
    d = profile.total
    if not 1 <= rank <= d:
        raise InputError(f"rank {rank} must lie in [1, {d}]")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = g @ g.conj().T
    return MultipartiteState(rho / np.trace(rho).real, profile, eve_index)


def random_instrument(party: str, d_in: int, n_outcomes: int, d_out: int, rng, pure: bool = True,
                      kraus_per_branch: int = 1) -> Instrument:
    """Random instrument from a Haar isometry C^d_in -> C^(n_outcomes * k * d_out)."""
    k = 1 if pure else kraus_per_branch
    big = n_outcomes * k * d_out
    if big < d_in:
        raise InputError("not enough output dimensions for an isometry")
    u = linalg.random_unitary(big, rng)[:, :d_in]
    branches = []
    for x in range(n_outcomes):
        ops = [u[(x * k + i) * d_out:(x * k + i + 1) * d_out, :] for i in range(k)]
        branches.append((str(x), ops))
    return Instrument(party, branches)


def outcome_tuples(alphabet_sizes: Sequence[int]):
    return itertools.product(*(range(s) for s in alphabet_sizes))
