"""Three-party secret broadcasting of a five-qubit entangled state.

Alice prepares a W-type state a|001> + b|010> + c|100> on qubits (1, 2, 3) and
hands 2 to Bob and 3 to Charlie.  Each party clones their qubit with a
Buzek-Hillery machine twice (round one: 1->4, 2->5, 3->6; round two: 4->7,
5->8, 6->9), measuring the machine wires after each round and exchanging the
outcomes classically.  The object of interest is the reduced state of qubits
(1, 5, 8, 6, 9) and the separability pattern of its qubit pairs, which this
module computes and checks against the published claims for the protocol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .cloner import (
    BRANCH_ORDER,
    CloneAssignment,
    MachineBranch,
    MachineOutcome,
    clone_qubit,
    measure_machines,
)
from .registers import (
    PAULI_X,
    PAULI_Y,
    DensityMatrix,
    InvariantViolation,
    Operator,
    QubitLabel,
    StateVector,
    apply_to_targets,
    partial_trace,
)
from .separability import ENTANGLED, SEPARABLE, PairVerdict, ppt_verdict

_D = QubitLabel.data
_M = QubitLabel.machine

ROUND_ONE_ASSIGNMENTS = (
    CloneAssignment(_D(1), _D(4), _M("A", 1)),
    CloneAssignment(_D(2), _D(5), _M("B", 1)),
    CloneAssignment(_D(3), _D(6), _M("C", 1)),
)
ROUND_TWO_ASSIGNMENTS = (
    CloneAssignment(_D(4), _D(7), _M("A", 2)),
    CloneAssignment(_D(5), _D(8), _M("B", 2)),
    CloneAssignment(_D(6), _D(9), _M("C", 2)),
)

# Pair tables, in report order.  The first five span two parties (the
# broadcast payload), the last six live inside a single party's lab.
NONLOCAL_PAIRS = ((1, 5), (5, 8), (1, 6), (6, 9), (8, 6))
LOCAL_PAIRS = ((1, 7), (1, 4), (2, 5), (2, 8), (3, 6), (3, 9))
ALL_PAIRS = NONLOCAL_PAIRS + LOCAL_PAIRS

PAPER_CLAIMS: dict[str, str] = {
    **{f"{a}{b}": ENTANGLED for a, b in NONLOCAL_PAIRS},
    **{f"{a}{b}": SEPARABLE for a, b in LOCAL_PAIRS},
}

PARTY_NAMES = ("Alice", "Bob", "Charlie")
PARTY_QUBITS = {
    "Alice": (_D(1), _D(4), _D(7)),
    "Bob": (_D(2), _D(5), _D(8)),
    "Charlie": (_D(3), _D(6), _D(9)),
}

STAGE_NAMES = (
    "w_state",
    "round1_cloned",
    "round1_selected",
    "round2_cloned",
    "round2_selected",
    "final",
)


def pair_key(pair: tuple[int, int]) -> str:
    return f"{pair[0]}{pair[1]}"


@dataclass(frozen=True)
class WParams:
    """Real amplitudes (alpha, beta, gamma) of the shared W-type state.

    Inputs whose squared norm is within 1e-6 of 1 are renormalized exactly;
    anything farther off is rejected.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        values = (self.alpha, self.beta, self.gamma)
        if not all(math.isfinite(v) for v in values):
            raise ValueError("amplitudes must be finite real numbers")
        norm_sq = sum(v * v for v in values)
        dev = abs(norm_sq - 1.0)
        if dev > 1e-6:
            raise ValueError(
                f"alpha^2 + beta^2 + gamma^2 = {norm_sq:.9f}, too far from 1"
            )
        if dev > 1e-9:
            scale = math.sqrt(norm_sq)
            object.__setattr__(self, "alpha", self.alpha / scale)
            object.__setattr__(self, "beta", self.beta / scale)
            object.__setattr__(self, "gamma", self.gamma / scale)

    @classmethod
    def normalized(cls, alpha: float, beta: float, gamma: float) -> "WParams":
        """Build from any non-null direction, normalizing exactly."""
        norm = math.sqrt(alpha * alpha + beta * beta + gamma * gamma)
        if not math.isfinite(norm) or norm < 1e-12:
            raise ValueError("amplitudes must form a nonzero finite vector")
        return cls(alpha / norm, beta / norm, gamma / norm)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)

    def zero_components(self) -> tuple[str, ...]:
        names = ("alpha", "beta", "gamma")
        return tuple(n for n, v in zip(names, self.as_tuple()) if v == 0.0)


@dataclass(frozen=True)
class ProtocolConfig:
    params: WParams
    branch1: MachineBranch
    branch2: MachineBranch
    apply_unitaries: bool = True


@dataclass(frozen=True)
class Message:
    """One classical transmission of a machine outcome."""

    sender: str
    receiver: str
    round_no: int
    outcome: MachineOutcome


@dataclass(frozen=True)
class PartyView:
    """What one party holds and knows after the classical exchange."""

    party: str
    qubits: tuple[QubitLabel, ...]
    known_outcomes: dict[tuple[int, str], MachineOutcome] = field(default_factory=dict)


@dataclass(frozen=True)
class Transcript:
    """Full record of one protocol run."""

    config: ProtocolConfig
    stages: dict[str, StateVector]
    p1: float
    p2: float
    messages: tuple[Message, ...]
    views: tuple[PartyView, PartyView, PartyView]
    five_qubit: DensityMatrix
    pairs: dict[str, PairVerdict]
    broadcast_ok: bool


def prepare_w(params: WParams) -> StateVector:
    """The initial three-qubit state alpha|001> + beta|010> + gamma|100>."""
    amps = np.zeros(8, dtype=complex)
    amps[0b001] = params.alpha
    amps[0b010] = params.beta
    amps[0b100] = params.gamma
    return StateVector((_D(1), _D(2), _D(3)), amps)


def _require_register(state: StateVector, expected: set[QubitLabel], stage: str) -> None:
    if set(state.labels) != expected:
        raise ValueError(f"{stage} expects register {sorted(l.name for l in expected)}")


def round_one(state: StateVector) -> StateVector:
    """Clone qubits 1, 2, 3 onto 4, 5, 6 with machines MA1, MB1, MC1."""
    _require_register(state, {_D(i) for i in (1, 2, 3)}, "round_one")
    for assignment in ROUND_ONE_ASSIGNMENTS:
        state = clone_qubit(state, assignment)
    return state


def round_two(state: StateVector) -> StateVector:
    """Clone qubits 4, 5, 6 onto 7, 8, 9 with machines MA2, MB2, MC2."""
    _require_register(state, {_D(i) for i in range(1, 7)}, "round_two")
    for assignment in ROUND_TWO_ASSIGNMENTS:
        state = clone_qubit(state, assignment)
    return state


def branch_select(
    state: StateVector, branch: MachineBranch
) -> tuple[StateVector, float]:
    """Measure whichever round's machine wires are present and drop them."""
    machines = [l for l in state.labels if l.is_machine]
    rounds = {l.round_no for l in machines}
    if len(machines) != 3 or len(rounds) != 1:
        raise ValueError("register must hold exactly one round's machine wires")
    round_no = rounds.pop()
    ordered = tuple(_M(party, round_no) for party in ("A", "B", "C"))
    return measure_machines(state, branch, ordered)


_SIGMA_X = Operator(PAULI_X)
_SIGMA_Y = Operator(PAULI_Y)

# Wire dressing applied after the second selection: bit flips on Alice's
# clones, sigma_y on Bob's and Charlie's originals.  Every dressed wire is
# traced out of the five-qubit state, so downstream verdicts do not depend on
# whether this stage runs; it only rewrites the discarded qubits.
_UNITARY_STAGE = (
    (_SIGMA_X, _D(4)),
    (_SIGMA_X, _D(7)),
    (_SIGMA_Y, _D(2)),
    (_SIGMA_Y, _D(3)),
)


def apply_local_unitaries(state: StateVector) -> StateVector:
    """Apply the local dressing stage (X on 4 and 7, Y on 2 and 3)."""
    _require_register(state, {_D(i) for i in range(1, 10)}, "apply_local_unitaries")
    for op, wire in _UNITARY_STAGE:
        state = apply_to_targets(state, op, (wire,))
    return state


def five_qubit_state(state: StateVector) -> DensityMatrix:
    """Reduced state of qubits (1, 5, 8, 6, 9), the broadcast payload."""
    _require_register(state, {_D(i) for i in range(1, 10)}, "five_qubit_state")
    return partial_trace(state, {_D(i) for i in (1, 5, 8, 6, 9)})


def pair_states(state: StateVector) -> dict[str, DensityMatrix]:
    """Reduced states of all reported qubit pairs, keyed like '15', in report order."""
    _require_register(state, {_D(i) for i in range(1, 10)}, "pair_states")
    return {
        pair_key(pair): partial_trace(state, {_D(pair[0]), _D(pair[1])})
        for pair in ALL_PAIRS
    }


def pair_verdicts(state: StateVector) -> dict[str, PairVerdict]:
    """Separability verdicts for all reported pairs, claims attached."""
    verdicts = {}
    for pair, rho in zip(ALL_PAIRS, pair_states(state).values()):
        key = pair_key(pair)
        verdicts[key] = ppt_verdict(
            rho,
            pair=(_D(pair[0]), _D(pair[1])),
            paper_claim=PAPER_CLAIMS[key],
        )
    return verdicts


def broadcast_verdict(pairs: Mapping[str, PairVerdict]) -> bool:
    """True when every cross-party pair is entangled and every in-lab pair is
    separable, the stated success condition for the broadcast."""
    missing = [pair_key(p) for p in ALL_PAIRS if pair_key(p) not in pairs]
    if missing:
        raise ValueError(f"missing pair verdicts: {', '.join(missing)}")
    nonlocal_ok = all(
        pairs[pair_key(p)].classification == ENTANGLED for p in NONLOCAL_PAIRS
    )
    local_ok = all(
        pairs[pair_key(p)].classification == SEPARABLE for p in LOCAL_PAIRS
    )
    return nonlocal_ok and local_ok


_EXCHANGE_ORDER = (
    ("Alice", "Bob"),
    ("Alice", "Charlie"),
    ("Bob", "Alice"),
    ("Bob", "Charlie"),
    ("Charlie", "Alice"),
    ("Charlie", "Bob"),
)


def classical_exchange(
    branch1: MachineBranch, branch2: MachineBranch
) -> tuple[tuple[PartyView, PartyView, PartyView], tuple[Message, ...]]:
    """Simulate both rounds of outcome announcements.

    Each round every party sends its own outcome to the other two, in the
    fixed order A->B, A->C, B->A, B->C, C->A, C->B.  Afterwards all three
    views hold identical knowledge of all six outcomes.
    """
    messages: list[Message] = []
    known: dict[tuple[int, str], MachineOutcome] = {}
    for round_no, branch in ((1, branch1), (2, branch2)):
        own = dict(zip(PARTY_NAMES, branch.outcomes))
        for sender, receiver in _EXCHANGE_ORDER:
            messages.append(Message(sender, receiver, round_no, own[sender]))
        for party in PARTY_NAMES:
            known[(round_no, party)] = own[party]
    views = tuple(
        PartyView(party, PARTY_QUBITS[party], dict(known)) for party in PARTY_NAMES
    )
    return views, tuple(messages)


def run_protocol(config: ProtocolConfig) -> Transcript:
    """Execute both cloning rounds on the selected branches and analyze the result."""
    w = prepare_w(config.params)
    cloned1 = round_one(w)
    selected1, p1 = branch_select(cloned1, config.branch1)
    cloned2 = round_two(selected1)
    selected2, p2 = branch_select(cloned2, config.branch2)
    final = apply_local_unitaries(selected2) if config.apply_unitaries else selected2

    five = five_qubit_state(final)
    five.validate()
    verdicts = pair_verdicts(final)
    ok = broadcast_verdict(verdicts)
    views, messages = classical_exchange(config.branch1, config.branch2)

    stages = {
        "w_state": w,
        "round1_cloned": cloned1,
        "round1_selected": selected1,
        "round2_cloned": cloned2,
        "round2_selected": selected2,
        "final": final,
    }
    return Transcript(
        config=config,
        stages=stages,
        p1=p1,
        p2=p2,
        messages=messages,
        views=views,
        five_qubit=five,
        pairs=verdicts,
        broadcast_ok=ok,
    )


@dataclass(frozen=True)
class TwoQubitBroadcast:
    """Verdicts for cloning both halves of alpha|00> + beta|11>."""

    alpha_sq: float
    nonlocal_verdict: PairVerdict
    local_verdict: PairVerdict


def two_qubit_broadcast(alpha_sq: float) -> TwoQubitBroadcast:
    """Clone each qubit of alpha|00> + beta|11> once and test two output pairs.

    Both machine wires are traced out without measurement.  The non-local pair
    is (original A, clone B) = (1, 5); the local pair is (original A, clone A)
    = (1, 4).
    """
    if not (0.0 < alpha_sq < 1.0):
        raise ValueError("alpha_sq must lie strictly between 0 and 1")
    amps = np.zeros(4, dtype=complex)
    amps[0b00] = math.sqrt(alpha_sq)
    amps[0b11] = math.sqrt(1.0 - alpha_sq)
    state = StateVector((_D(1), _D(2)), amps)
    state = clone_qubit(state, CloneAssignment(_D(1), _D(4), _M("A", 1)))
    state = clone_qubit(state, CloneAssignment(_D(2), _D(5), _M("B", 1)))

    nonlocal_rho = partial_trace(state, {_D(1), _D(5)})
    local_rho = partial_trace(state, {_D(1), _D(4)})
    return TwoQubitBroadcast(
        alpha_sq=alpha_sq,
        nonlocal_verdict=ppt_verdict(nonlocal_rho),
        local_verdict=ppt_verdict(local_rho),
    )


def _bisect_sign_change(f, lo: float, hi: float, f_lo: float, xtol: float) -> float:
    """Locate a sign change of f on [lo, hi] by bisection."""
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        if (f(mid) < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f(mid)
        else:
            hi = mid
    return 0.5 * (lo + hi)


def locate_broadcast_interval(xtol: float = 1e-9) -> tuple[float, float]:
    """Endpoints in alpha^2 between which the non-local pair is entangled."""

    def f(a2: float) -> float:
        return two_qubit_broadcast(a2).nonlocal_verdict.min_pt_eigenvalue

    center = 0.5
    if f(center) >= 0.0:
        raise InvariantViolation("expected entanglement at alpha^2 = 1/2")
    lower = _bisect_sign_change(f, 1e-6, center, f(1e-6), xtol)
    upper = _bisect_sign_change(f, center, 1.0 - 1e-6, f(center), xtol)
    return lower, upper
