"""Single-qubit teleportation over a shared Bell pair, on state vectors.

The sender holds the message qubit and one half of a Bell pair; a Bell-basis
change (CNOT then Hadamard) and a two-bit measurement select one of four
branches, and the outcome-indexed Pauli correction recovers the message on
the receiver's qubit up to global phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import PureState, rng_stream

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
_PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]])
_PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]])

# Measuring (i, j) on the sender's qubits leaves X^j Z^i |psi> with the
# receiver; these corrections undo that up to global phase.
CORRECTIONS = {
    (0, 0): ("I", np.eye(2)),
    (0, 1): ("X", _PAULI_X),
    (1, 0): ("Z", _PAULI_Z),
    (1, 1): ("XZ", _PAULI_X @ _PAULI_Z),
}


@dataclass(frozen=True)
class TeleportTranscript:
    """Inputs, measured bits, applied correction, and the recovered state."""

    input_state: PureState
    outcome: tuple[int, int]
    correction: str
    output_state: PureState
    fidelity: float


def teleport(input_state: PureState, forced_outcome: tuple[int, int] | None = None,
             seed: int = 0) -> TeleportTranscript:
    """Run the protocol once; the measurement is seeded unless forced.

    Every outcome occurs with probability 1/4 regardless of the input, and
    the recovered state always matches the input up to global phase.
    """
    if input_state.dims != (2,):
        raise ValueError(f"input must be a single qubit, got dims {input_state.dims}")
    if forced_outcome is not None:
        forced_outcome = (int(forced_outcome[0]), int(forced_outcome[1]))
        if forced_outcome not in CORRECTIONS:
            raise ValueError(f"forced outcome must be two bits, got {forced_outcome}")

    psi = input_state.amplitudes
    bell = np.zeros(4)
    bell[0] = bell[3] = 1.0 / math.sqrt(2.0)
    joint = np.kron(psi, bell).reshape(2, 2, 2)

    # CNOT from the message qubit onto the sender's Bell half, then Hadamard
    # on the message qubit: the Bell-basis change.
    joint = joint.copy()
    joint[1] = joint[1, ::-1]
    joint = np.einsum("ij,jbc->ibc", _HADAMARD, joint)

    probs = np.sum(np.abs(joint) ** 2, axis=2)
    if forced_outcome is None:
        flat = probs.reshape(4)
        pick = int(np.searchsorted(np.cumsum(flat), rng_stream(seed).random()))
        outcome = (pick // 2, pick % 2)
    else:
        outcome = forced_outcome

    branch = joint[outcome[0], outcome[1]]
    branch = branch / np.linalg.norm(branch)
    name, correction = CORRECTIONS[outcome]
    out = correction @ branch
    fidelity = min(float(abs(np.vdot(psi, out)) ** 2), 1.0)
    return TeleportTranscript(input_state, outcome, name, PureState(out, (2,)), fidelity)
