"""Achievable conference-key and GHZ-distillation rates.

Key rates are an entropy of the measured cq-state minus the minimum total
rate of communication for omniscience (CO), which is the optimum of a
small covering LP whose constraints are generated here from the cq-state.
GHZ rates built from bipartite entanglement (combing, assisted
distillation) are coherent-information optimizations over party subsets.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import classical
from .errors import BudgetError, InputError
from .linalg import operator_entropy
from .lp import lexmin_optimal_vertex
from .states import CqState, Instrument, MultipartiteState, apply_instruments, purify_parties

MAX_PARTIES_CQ = 10
MAX_PARTIES_C = 16
MAX_PARTIES_ENUM = 16
RANK_ONE_TOL = 1e-9
FEASIBILITY_TOL = 1e-7


@dataclass(frozen=True)
class RateConstraint:
    """Lower bound on sum_{i in subset} R_i.

    ``player`` is the index of the player whose quantum output A'_j
    conditions the bound (None for purely classical constraints).
    """

    subset: frozenset
    bound: float
    player: int | None = None

    def lhs(self, rates) -> float:
        return float(sum(rates[i] for i in self.subset))


@dataclass
class RateRegion:
    m: int
    constraints: list[RateConstraint]
    rates: np.ndarray | None = None
    total: float | None = None

    def is_feasible(self, rates, tol: float = FEASIBILITY_TOL) -> bool:
        rates = np.asarray(rates, dtype=float)
        if np.any(rates < -tol):
            return False
        return all(c.lhs(rates) >= c.bound - tol for c in self.constraints)

    def binding(self, tol: float = 1e-9) -> list[RateConstraint]:
        """Constraints with positive bound that hold with equality at the optimum."""
        if self.rates is None:
            return []
        seen, out = set(), []
        for c in self.constraints:
            if c.bound > tol and abs(c.lhs(self.rates) - c.bound) <= 1e-7 and c.subset not in seen:
                seen.add(c.subset)
                out.append(c)
        return out


@dataclass
class RateReport:
    theorem: str
    raw: float
    r_co: float
    optimal_rates: list[float]
    binding_constraints: list[RateConstraint]
    party_labels: list[str]
    witness: dict = field(default_factory=dict)

    @property
    def clamped(self) -> float:
        return max(0.0, self.raw)

    def to_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "raw": self.raw,
            "clamped": self.clamped,
            "R_CO": self.r_co,
            "optimal_rates": list(self.optimal_rates),
            "binding_constraints": [
                {
                    "subset": [self.party_labels[i] for i in sorted(c.subset)],
                    "bound": c.bound,
                    "player": None if c.player is None else self.party_labels[c.player],
                }
                for c in self.binding_constraints
            ],
            "witness": self.witness,
        }


def nonempty_subsets(items: Sequence[int]):
    for r in range(1, len(items) + 1):
        yield from itertools.combinations(items, r)


# --- CO constraints ---------------------------------------------------------


def _grouped_entropy(blocks: dict, keep_axes: Sequence[int]) -> float:
    """Entropy of (X_keep, Q) for cq blocks {x: omega_x^Q}."""
    groups: dict = {}
    for x, w in blocks.items():
        key = tuple(x[i] for i in keep_axes)
        groups[key] = groups[key] + w if key in groups else w
    return sum(operator_entropy(w) for w in groups.values())


def co_constraints_cq(cq: CqState) -> list[RateConstraint]:
    """One constraint per player j and nonempty J not containing j.

    Bound: S(X_J | X_{[m] minus J}, A'_j), evaluated blockwise from the
    residual operators reduced to A'_j.
    """
    m = cq.m
    if m > MAX_PARTIES_CQ:
        raise BudgetError(f"{m} parties exceed the cq constraint budget of {MAX_PARTIES_CQ}")
    out = []
    for j in range(m):
        blocks = cq.reduced_weights([j])
        s_all = sum(operator_entropy(w) for w in blocks.values())
        others = [i for i in range(m) if i != j]
        for subset in nonempty_subsets(others):
            rest = [i for i in range(m) if i not in subset]
            out.append(RateConstraint(frozenset(subset), s_all - _grouped_entropy(blocks, rest), j))
    return out


def co_constraints_c(joint) -> list[RateConstraint]:
    """One constraint per nonempty proper subset I: H(X_I | X_{[m] minus I})."""
    p = classical.check_distribution(joint)
    m = p.ndim
    if m > MAX_PARTIES_C:
        raise BudgetError(f"{m} parties exceed the classical constraint budget of {MAX_PARTIES_C}")
    h_all = classical.shannon_entropy(p)
    out = []
    for subset in nonempty_subsets(range(m)):
        if len(subset) == m:
            continue
        rest = [i for i in range(m) if i not in subset]
        out.append(RateConstraint(frozenset(subset), h_all - classical.shannon_entropy(classical.marginal(p, rest))))
    return out


def min_sum_rate(constraints: Iterable[RateConstraint], m: int) -> RateRegion:
    """Minimum total CO rate and the lexicographically smallest optimal rate vector."""
    constraints = list(constraints)
    strongest: dict = {}
    for c in constraints:
        if not np.isfinite(c.bound):
            raise InputError(f"constraint bound {c.bound} is not finite")
        if c.bound > 0 and c.bound > strongest.get(c.subset, 0.0):
            strongest[c.subset] = c.bound
    if not strongest:
        return RateRegion(m, constraints, np.zeros(m), 0.0)
    subsets = sorted(strongest, key=lambda s: (len(s), sorted(s)))
    a = np.zeros((len(subsets), m))
    for r, s in enumerate(subsets):
        a[r, list(s)] = 1.0
    b = np.array([strongest[s] for s in subsets])
    total, rates = lexmin_optimal_vertex(a, b)
    return RateRegion(m, constraints, rates, float(total))


# --- conference key ---------------------------------------------------------


def cq_conditional_entropy(cq: CqState, given: Sequence[int]) -> float:
    """S(X_[m] | Q) where Q are the residual subsystems ``given``."""
    blocks = cq.reduced_weights(given)
    joint = sum(operator_entropy(w) for w in blocks.values())
    return joint - operator_entropy(sum(blocks.values()))


def _report(theorem, s, region, cq, witness) -> RateReport:
    return RateReport(
        theorem=theorem,
        raw=float(s - region.total),
        r_co=float(region.total),
        optimal_rates=[float(r) for r in region.rates],
        binding_constraints=region.binding(),
        party_labels=list(cq.parties),
        witness=witness,
    )


def key_rate_cq(state: MultipartiteState, instruments: Sequence[Instrument]) -> RateReport:
    """S(X_[m]|E) - R_CO^cq for the cq-state produced by the instruments."""
    cq = apply_instruments(state, instruments)
    s = cq_conditional_entropy(cq, [cq.m])
    region = min_sum_rate(co_constraints_cq(cq), cq.m)
    return _report("key-cq", s, region, cq, {"S(X|E)": s, "eve": state.eve_label})


def _require_povms(instruments: Sequence[Instrument]):
    for ins in instruments:
        if not ins.is_povm:
            raise InputError(f"instrument for {ins.party} has a nontrivial quantum output")


def key_rate_c(state: MultipartiteState, povms: Sequence[Instrument]) -> RateReport:
    """S(X_[m]|E) - R_CO^c for full local measurements."""
    _require_povms(povms)
    cq = apply_instruments(state, povms)
    s = cq_conditional_entropy(cq, [cq.m])
    region = min_sum_rate(co_constraints_c(cq.distribution()), cq.m)
    return _report("key-c", s, region, cq, {"S(X|E)": s, "eve": state.eve_label})


# --- coherent (GHZ) versions ------------------------------------------------


def _require_pure(instruments: Sequence[Instrument]):
    for ins in instruments:
        if not ins.is_pure:
            raise InputError(f"instrument branch not rank one (party {ins.party})")


def ghz_rate_cq(state: MultipartiteState, instruments: Sequence[Instrument], j: int | str | None = None) -> RateReport:
    """S(X_[m] | E A'_{[m] minus j}) - R_CO^cq on the purified state.

    ``state`` is purified to an environment E (its own eavesdropper, if any,
    is treated as part of the environment). With ``j=None`` the best
    distinguished player is chosen.
    """
    _require_pure(instruments)
    psi = purify_parties(state)
    cq = apply_instruments(psi, instruments)
    m = cq.m
    region = min_sum_rate(co_constraints_cq(cq), m)
    players = range(m) if j is None else [_party_pos(list(cq.parties), j)]
    values = {}
    for jj in players:
        given = [i for i in range(m) if i != jj] + [m]
        values[jj] = cq_conditional_entropy(cq, given)
    best = max(values, key=lambda k: (values[k], -k))
    witness = {
        "distinguished_player": cq.parties[best],
        "conditional_entropy": {cq.parties[k]: v for k, v in values.items()},
    }
    return _report("ghz-cq", values[best], region, cq, witness)


# Single-copy, identity-unitary evaluation of the permutation-improved rate.
ghz_rate_cq_single_copy = ghz_rate_cq


def ghz_rate_c(state: MultipartiteState, rank_one_povms: Sequence[Instrument]) -> RateReport:
    """S(X_[m]|E) - R_CO^c on the purified state, rank-one local measurements."""
    _require_povms(rank_one_povms)
    for ins in rank_one_povms:
        for x, el in enumerate(ins.povm_elements()):
            vals = np.sort(np.linalg.eigvalsh(el))[::-1]
            if vals.size > 1 and vals[1] > RANK_ONE_TOL:
                raise InputError(f"POVM element {ins.outcomes[x]} of {ins.party} is not rank one")
    psi = purify_parties(state)
    cq = apply_instruments(psi, rank_one_povms)
    s = cq_conditional_entropy(cq, [cq.m])
    region = min_sum_rate(co_constraints_c(cq.distribution()), cq.m)
    return _report("ghz-c", s, region, cq, {"S(X|E)": s})


# --- bipartite-entanglement routes to GHZ -----------------------------------


def _party_pos(labels: Sequence[str], p: int | str) -> int:
    if isinstance(p, str):
        if p not in labels:
            raise InputError(f"unknown party {p!r}; have {list(labels)}")
        return list(labels).index(p)
    if not 0 <= p < len(labels):
        raise InputError(f"party index {p} out of range for {len(labels)} parties")
    return int(p)


def min_cut_with_witness(state: MultipartiteState, i, j) -> tuple[float, tuple[int, ...]]:
    rho = state.legitimate()
    m = rho.m
    if m > MAX_PARTIES_ENUM:
        raise BudgetError(f"{m} parties exceed the enumeration budget of {MAX_PARTIES_ENUM}")
    i = _party_pos(rho.party_labels, i)
    j = _party_pos(rho.party_labels, j)
    if i == j:
        raise InputError("min-cut needs two distinct parties")
    s_all = rho.entropy(range(m))
    helpers = [k for k in range(m) if k not in (i, j)]
    best, best_j = None, ()
    for r in range(len(helpers) + 1):
        for subset in itertools.combinations(helpers, r):
            side = [k for k in range(m) if k != i and k not in subset]
            value = rho.entropy(side) - s_all
            if best is None or value < best:
                best, best_j = value, subset
    return float(best), best_j


def min_cut_coherent_information(state: MultipartiteState, i, j) -> float:
    """min over helper sets J of I(A_i A_J > rest), where the rest keeps party j."""
    return min_cut_with_witness(state, i, j)[0]


def eoa_lower_bound(state: MultipartiteState, i, j) -> float:
    """Identity-map lower bound on the entanglement of assistance (unclamped)."""
    return max(min_cut_coherent_information(state, i, j), min_cut_coherent_information(state, j, i))


@dataclass
class CombingResult:
    raw: float
    root: int
    binding_subset: tuple[int, ...]
    per_root: list[float]
    party_labels: list[str]

    @property
    def rate(self) -> float:
        return max(0.0, self.raw)

    def to_dict(self) -> dict:
        return {
            "theorem": "ghz-combing",
            "raw": self.raw,
            "clamped": self.rate,
            "root": self.party_labels[self.root],
            "binding_subset": [self.party_labels[k] for k in self.binding_subset],
            "per_root": dict(zip(self.party_labels, self.per_root)),
        }


def combing_ghz_rate(state: MultipartiteState) -> CombingResult:
    """max over roots i of min over nonempty J not containing i of I(A_J > rest)/|J|."""
    rho = state.legitimate()
    m = rho.m
    if m > MAX_PARTIES_ENUM:
        raise BudgetError(f"{m} parties exceed the enumeration budget of {MAX_PARTIES_ENUM}")
    s_all = rho.entropy(range(m))
    per_root, binding = [], []
    for i in range(m):
        leaves = [k for k in range(m) if k != i]
        best, best_j = None, ()
        for subset in nonempty_subsets(leaves):
            rest = [k for k in range(m) if k not in subset]
            value = (rho.entropy(rest) - s_all) / len(subset)
            if best is None or value < best:
                best, best_j = value, subset
        per_root.append(float(best))
        binding.append(best_j)
    root = int(np.argmax(per_root))
    return CombingResult(per_root[root], root, binding[root], per_root, rho.party_labels)
