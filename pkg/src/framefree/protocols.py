"""Messaging and logical-qubit codes that survive frame averaging.

Classical messages ride one per invariant block: the sender picks the
highest-weight state of each block, the receiver measures the block PVM,
and the unknown collective rotation cannot move probability between
blocks.  Quantum information rides in spaces the averaging never touches:
the j=0 sector of four qubits (a decoherence-free subspace), the
multiplicity space of the most-repeated irrep (a noiseless subsystem), or
a single total-m sector when only dephasing acts.  Exchange operators
commute with every collective rotation and act inside the logical space,
which is what makes logical measurements, and a CHSH violation, possible
without any shared frame.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb, log2, sqrt
from typing import Literal

import numpy as np

from .core import (ATOL, DensityOperator, GroupElement, MAX_QUBITS, RandomSource,
                   StateVector, _readonly, collective_rotation, haar_random_su2,
                   trace_distance)
from .irreps import HalfInteger, IrrepDecomposition, decompose, multiplicity, total_irrep_count

MAX_CODEBOOK_QUBITS = 10
MAX_RATE_QUBITS = 64


@dataclass(frozen=True)
class Message:
    """A classical message index."""

    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError(f"message index must be nonnegative, got {self.index}")


@dataclass(frozen=True, eq=False)
class CodeBookEntry:
    message: Message
    codeword: StateVector
    j: HalfInteger
    r: int


@dataclass(frozen=True, eq=False)
class CodeBook:
    """One codeword per irrep block, indexed by message."""

    n: int
    entries: tuple[CodeBookEntry, ...]
    decomposition: IrrepDecomposition

    def entry(self, message: Message) -> CodeBookEntry:
        for e in self.entries:
            if e.message == message:
                return e
        raise KeyError(f"message {message.index} not in codebook (size {len(self.entries)})")


def build_classical_codebook(n: int, *, singlet_first: bool = False) -> CodeBook:
    """Codebook with the highest-weight state |j, m=j, r> of every block.

    Message indices follow the canonical block order (j descending, then
    path order).  ``singlet_first`` flips the two labels of the n=2 book
    so message 0 rides on the singlet, the historical labeling for that
    example.
    """
    if not 1 <= n <= MAX_CODEBOOK_QUBITS:
        raise ValueError(f"codebook size must be in 1..{MAX_CODEBOOK_QUBITS}, got {n}")
    d = decompose(n)
    order = list(range(len(d.blocks)))
    if singlet_first:
        if n != 2:
            raise ValueError("singlet_first only applies to the two-qubit codebook")
        order.reverse()
    entries = tuple(
        CodeBookEntry(Message(i), StateVector(d.blocks[b].isometry[:, 0]),
                      d.blocks[b].j, d.blocks[b].r)
        for i, b in enumerate(order)
    )
    return CodeBook(n=n, entries=entries, decomposition=d)


def block_outcome_probabilities(state: StateVector,
                                decomposition: IrrepDecomposition) -> np.ndarray:
    """Exact block-PVM outcome distribution, in canonical block order."""
    return np.array([
        float(np.linalg.norm(b.isometry.conj().T @ state.amplitudes) ** 2)
        for b in decomposition.blocks
    ])


def classical_round_trip(msg: Message, codebook: CodeBook, g: GroupElement,
                         rng: RandomSource) -> Message:
    """Send one codeword through an unknown frame rotation and decode it.

    PVM outcome probabilities are computed exactly and then sampled, so
    the measurement pathway is exercised even though the distribution is a
    point mass for valid codewords.
    """
    entry = codebook.entry(msg)
    rotated = entry.codeword.evolve(collective_rotation(g, codebook.n))
    outcome = rng.sample_index(block_outcome_probabilities(rotated, codebook.decomposition))
    block = codebook.decomposition.blocks[outcome]
    for e in codebook.entries:
        if e.j == block.j and e.r == block.r:
            return e.message
    raise RuntimeError("every block carries a message")  # pragma: no cover


def helstrom_success_probability(rho0: DensityOperator, rho1: DensityOperator) -> float:
    """Best two-hypothesis guessing probability at equal priors: 1/2 + D/2."""
    return 0.5 + 0.5 * trace_distance(rho0, rho1)


def dfs_basis_4qubit(basis=None) -> tuple[StateVector, StateVector]:
    """The two j=0 states of four qubits, expanded in a given 1-qubit basis.

    ``basis`` is a 2x2 array whose columns are the orthonormal pair to use
    (default: computational).  With |0>, |1> the chosen pair,

        |0_L> = (1/2) (|01> - |10>)(|01> - |10>)
        |1_L> = (1/sqrt3)(|0011> + |1100>)
                 - (1/(2 sqrt3))(|01> + |10>)(|01> + |10>)

    Any basis choice spans the same two-dimensional sector; the expansion
    merely changes the description.
    """
    b = np.eye(2, dtype=complex) if basis is None else np.array(basis, dtype=complex)
    if b.shape != (2, 2) or np.abs(b.conj().T @ b - np.eye(2)).max() > ATOL:
        raise ValueError("basis must be a 2x2 matrix with orthonormal columns")
    b0, b1 = b[:, 0], b[:, 1]
    antisym = np.kron(b0, b1) - np.kron(b1, b0)
    sym = np.kron(b0, b1) + np.kron(b1, b0)
    zero = 0.5 * np.kron(antisym, antisym)
    one = ((np.kron(np.kron(b0, b0), np.kron(b1, b1))
            + np.kron(np.kron(b1, b1), np.kron(b0, b0))) / sqrt(3.0)
           - np.kron(sym, sym) / (2.0 * sqrt(3.0)))
    return StateVector(zero), StateVector(one)


@dataclass(frozen=True, eq=False)
class LogicalEncoding:
    """Isometric embedding of a logical space into n physical qubits."""

    n: int
    logical_dim: int
    isometry: np.ndarray
    kind: Literal["dfs_j0", "noiseless_subsystem", "dephasing_m_sector"]
    j: HalfInteger | None = None  # noiseless subsystem sector
    m: HalfInteger | None = None  # dephasing sector

    def __post_init__(self):
        v = np.array(self.isometry, dtype=complex)
        if v.shape != (2 ** self.n, self.logical_dim):
            raise ValueError(f"isometry shape {v.shape} does not match "
                             f"({2 ** self.n}, {self.logical_dim})")
        if np.abs(v.conj().T @ v - np.eye(self.logical_dim)).max() > ATOL:
            raise ValueError("isometry columns are not orthonormal")
        object.__setattr__(self, "isometry", _readonly(v))


def dfs_encoding_4qubit(basis=None) -> LogicalEncoding:
    """One logical qubit in the j=0 sector of four physical qubits."""
    zero, one = dfs_basis_4qubit(basis)
    return LogicalEncoding(n=4, logical_dim=2,
                           isometry=np.column_stack([zero.amplitudes, one.amplitudes]),
                           kind="dfs_j0")


def most_repeated_irrep(n: int) -> tuple[HalfInteger, int]:
    """(j, multiplicity) with the largest multiplicity; ties pick the smaller j."""
    best: tuple[HalfInteger, int] | None = None
    for tj in range(n % 2, n + 1, 2):
        count = multiplicity(n, HalfInteger(tj))
        if best is None or count > best[1]:
            best = (HalfInteger(tj), count)
    return best


def noiseless_subsystem_plan(n: int) -> LogicalEncoding:
    """Encode into the multiplicity space of the most-repeated irrep.

    Logical basis state r rides on |j_max, m=j_max, r>; frame averaging
    mixes only the carrier index, so the multiplicity index survives.
    """
    if not 2 <= n <= MAX_CODEBOOK_QUBITS:
        raise ValueError(f"qubit count must be in 2..{MAX_CODEBOOK_QUBITS}, got {n}")
    j_max, count = most_repeated_irrep(n)
    blocks = decompose(n).blocks_with_j(j_max)
    columns = np.column_stack([b.isometry[:, 0] for b in blocks])
    return LogicalEncoding(n=n, logical_dim=count, isometry=columns,
                           kind="noiseless_subsystem", j=j_max)


def dephasing_sector_encoding(n: int, m=None) -> LogicalEncoding:
    """Computational basis states of one total-m sector (default: the largest).

    Collective dephasing only kills coherence between different total-m
    sectors, so any single sector is a protected code.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
    weights = np.bitwise_count(np.arange(2 ** n, dtype=np.uint64)).astype(int)
    if m is None:
        weight = int(np.argmax(np.bincount(weights, minlength=n + 1)))
    else:
        tm = HalfInteger.of(m).twice
        if abs(tm) > n or (tm + n) % 2:
            raise ValueError(f"m = {HalfInteger.of(m)} is not a total-m value for n = {n}")
        weight = (n - tm) // 2
    indices = np.flatnonzero(weights == weight)
    iso = np.zeros((2 ** n, len(indices)), dtype=complex)
    iso[indices, np.arange(len(indices))] = 1.0
    return LogicalEncoding(n=n, logical_dim=len(indices), isometry=iso,
                           kind="dephasing_m_sector", m=HalfInteger(n - 2 * weight))


def encode_logical(psi: StateVector, encoding: LogicalEncoding) -> DensityOperator:
    """Embed a logical pure state into the physical space."""
    if psi.dim != encoding.logical_dim:
        raise ValueError(f"logical state dim {psi.dim} does not match "
                         f"encoding dim {encoding.logical_dim}")
    return StateVector(encoding.isometry @ psi.amplitudes).to_density()


class DecodingError(ValueError):
    """The physical state has (numerically) no support on the code."""


def decode_logical(rho_phys: DensityOperator, encoding: LogicalEncoding) -> DensityOperator:
    """Invert the encoding; for noiseless subsystems, discard the carrier factor.

    Subspace codes compress with the isometry and renormalize by the
    in-code probability.  The noiseless subsystem projects onto its j
    sector, reshapes into carrier and multiplicity factors, and traces the
    carrier out.
    """
    if rho_phys.dim != 2 ** encoding.n:
        raise ValueError(f"physical state dim {rho_phys.dim} does not match n = {encoding.n}")
    if encoding.kind in ("dfs_j0", "dephasing_m_sector"):
        reduced = encoding.isometry.conj().T @ rho_phys.matrix @ encoding.isometry
    else:
        blocks = decompose(encoding.n).blocks_with_j(encoding.j)
        width = encoding.j.twice + 1
        count = len(blocks)
        sector = np.hstack([b.isometry for b in blocks])
        inside = (sector.conj().T @ rho_phys.matrix @ sector).reshape(
            count, width, count, width)
        reduced = np.trace(inside, axis1=1, axis2=3)
    probability = float(np.trace(reduced).real)
    if probability < 1e-12:
        raise DecodingError("state has no support on the code space")
    reduced = reduced / probability
    return DensityOperator(0.5 * (reduced + reduced.conj().T))


def swap_qubits_matrix(n: int, a: int, b: int) -> np.ndarray:
    """Permutation matrix exchanging qubits a and b (1-based, qubit 1 = MSB)."""
    if not (1 <= a <= n and 1 <= b <= n) or a == b:
        raise ValueError(f"need two distinct qubit labels in 1..{n}, got ({a}, {b})")
    pa, pb = n - a, n - b  # bit positions from the LSB
    idx = np.arange(2 ** n)
    differ = ((idx >> pa) & 1) ^ ((idx >> pb) & 1)
    swapped = idx ^ ((differ << pa) | (differ << pb))
    m = np.zeros((2 ** n, 2 ** n), dtype=complex)
    m[swapped, idx] = 1.0
    return m


@dataclass(frozen=True, eq=False)
class ExchangeAction:
    """Logical action of a qubit transposition, plus how much leaves the code."""

    matrix: np.ndarray  # logical_dim x logical_dim, Hermitian
    leakage: float


def exchange_logical_action(a: int, b: int, encoding: LogicalEncoding) -> ExchangeAction:
    """Compress SWAP_ab into the logical space of the 4-qubit j=0 code.

    The reported leakage is the Frobenius norm of (I - P_code) SWAP V,
    i.e. how much of the swapped code space escapes the code.
    """
    if encoding.kind != "dfs_j0" or encoding.n != 4:
        raise ValueError("exchange gates are defined for the 4-qubit j=0 code")
    swap = swap_qubits_matrix(4, a, b)
    v = encoding.isometry
    image = swap @ v
    logical = v.conj().T @ image
    leakage = float(np.linalg.norm(image - v @ logical))
    return ExchangeAction(matrix=logical, leakage=leakage)


def dfs_logical_paulis(encoding: LogicalEncoding) -> tuple[np.ndarray, np.ndarray]:
    """(Z_L, X_L) for the 4-qubit j=0 code, built from exchange gates.

    SWAP_12 compresses to -Z_L exactly; the traceless, Z-orthogonal part
    of SWAP_23's compression is proportional to X_L.  X_L is normalized to
    square to the identity and signed so its (0, 1) entry is positive.
    """
    z = -exchange_logical_action(1, 2, encoding).matrix
    raw = exchange_logical_action(2, 3, encoding).matrix
    x = raw - 0.5 * np.trace(raw) * np.eye(2) - 0.5 * np.trace(raw @ z) * z
    x = x / sqrt(0.5 * np.trace(x @ x.conj().T).real)
    if x[0, 1].real < 0:
        x = -x
    return z, x


@dataclass(frozen=True)
class RateRow:
    n: int
    classical_rate: float
    quantum_rate: float
    dephasing_quantum_rate: float


@dataclass(frozen=True)
class RateTable:
    rows: tuple[RateRow, ...]


def rate_table(n_max: int) -> RateTable:
    """Exact finite-n communication rates, in (qu)bits per transmitted qubit.

    classical: log2(block count) / n; quantum: log2(largest multiplicity)
    over n; dephasing quantum: log2(largest total-m sector) / n.  Pure
    integer combinatorics, so n up to 64 costs nothing.
    """
    if not 1 <= n_max <= MAX_RATE_QUBITS:
        raise ValueError(f"n_max must be in 1..{MAX_RATE_QUBITS}, got {n_max}")
    rows = []
    for n in range(1, n_max + 1):
        classical = log2(total_irrep_count(n)) / n
        quantum = log2(most_repeated_irrep(n)[1]) / n
        dephasing = log2(comb(n, n // 2)) / n
        rows.append(RateRow(n, classical, quantum, dephasing))
    return RateTable(tuple(rows))


def classical_rate_asymptote(n: int) -> float:
    """Large-n approximation 1 - log2(n)/(2n) of the classical rate."""
    return 1.0 - log2(n) / (2 * n)


def logical_bell_chsh_trials(rng: RandomSource, rotation_trials: int) -> np.ndarray:
    """Per-trial CHSH values for a logical Bell pair split across two parties.

    The shared state is (|0_L 0_L> + |1_L 1_L>)/sqrt2 on eight qubits, one
    4-qubit code per party.  Each trial draws independent Haar rotations
    for the two quadruplets; logical observables commute with collective
    rotations, so every trial individually sits at the Tsirelson point.
    """
    if rotation_trials < 1:
        raise ValueError(f"trial count must be positive, got {rotation_trials}")
    enc = dfs_encoding_4qubit()
    v = enc.isometry
    z, x = dfs_logical_paulis(enc)
    zp = v @ z @ v.conj().T
    xp = v @ x @ v.conj().T
    b0 = (zp + xp) / sqrt(2.0)
    b1 = (zp - xp) / sqrt(2.0)
    # the 256-dim pair state, stored as a 16x16 coefficient matrix
    pair = (np.outer(v[:, 0], v[:, 0]) + np.outer(v[:, 1], v[:, 1])) / sqrt(2.0)

    def correlation(state: np.ndarray, a_op: np.ndarray, b_op: np.ndarray) -> float:
        return float(np.trace(state.conj().T @ a_op @ state @ b_op.T).real)

    values = np.empty(rotation_trials)
    for t in range(rotation_trials):
        ua = collective_rotation(haar_random_su2(rng), 4)
        ub = collective_rotation(haar_random_su2(rng), 4)
        rotated = ua @ pair @ ub.T
        values[t] = (correlation(rotated, zp, b0) + correlation(rotated, zp, b1)
                     + correlation(rotated, xp, b0) - correlation(rotated, xp, b1))
    return values


def logical_bell_chsh(rng: RandomSource, rotation_trials: int) -> float:
    """Mean CHSH value over rotation trials; 2*sqrt(2) for the logical pair."""
    return float(logical_bell_chsh_trials(rng, rotation_trials).mean())
