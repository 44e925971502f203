"""Decohering channels induced by averaging over unknown frame rotations.

The full-SU(2) twirl is evaluated algebraically from the irrep
decomposition: each carrier space is replaced by its maximally mixed state
while coherence between equal-j multiplicity labels survives, and all
cross-j coherence vanishes.  The Monte Carlo variant averages explicit
Haar samples and exists as an independent check of that block structure.
Collective dephasing (a shared axis but no full frame) only kills
coherence between different total-m sectors.

Channels are represented behaviorally: construction caches the block
data, ``apply`` is a pure function, and no superoperator matrix is ever
materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Literal

import numpy as np

from .core import (DensityOperator, MAX_QUBITS, RandomSource, haar_random_su2_batch,
                   trace_distance)
from .irreps import IrrepDecomposition, decompose

_MC_ENTRY_BUDGET = 4_000_000  # max batched matrix entries per Monte Carlo chunk


def _qubit_count(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim != 2 ** n:
        raise ValueError(f"dimension {dim} is not a power of two")
    return n


@dataclass(frozen=True, eq=False)
class TwirlChannel:
    """Trace-preserving, idempotent frame-averaging channel on n qubits."""

    n: int
    kind: Literal["full_su2", "u1_dephasing"]
    decomposition: IrrepDecomposition | None = None

    @staticmethod
    def full_su2(n: int) -> "TwirlChannel":
        return TwirlChannel(n=n, kind="full_su2", decomposition=decompose(n))

    @staticmethod
    def u1_dephasing(n: int) -> "TwirlChannel":
        if not 1 <= n <= MAX_QUBITS:
            raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
        return TwirlChannel(n=n, kind="u1_dephasing")

    @property
    def dim(self) -> int:
        return 2 ** self.n

    @cached_property
    def _sector_mask(self) -> np.ndarray:
        """Boolean mask keeping entries within a single total-m sector."""
        weights = np.bitwise_count(np.arange(self.dim, dtype=np.uint64))
        return weights[:, None] == weights[None, :]

    def apply(self, rho: DensityOperator) -> DensityOperator:
        if self.kind == "full_su2":
            return twirl_su2_exact(rho, self)
        return twirl_u1_dephasing(rho, self)


def twirl_su2_exact(rho: DensityOperator, channel: TwirlChannel) -> DensityOperator:
    """Average rho over identical rotations of every qubit, in closed form.

    In the coupled basis the output carries, for each pair of equal-j
    blocks (r, r'), the multiplicity matrix element
    (2j+1)^-1 sum_m <j,m,r|rho|j,m,r'> spread uniformly over the carrier
    diagonal; everything between different j values is set to zero.
    """
    if channel.kind != "full_su2":
        raise ValueError(f"expected a full_su2 channel, got {channel.kind}")
    if rho.dim != channel.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, channel {channel.dim}")
    d = channel.decomposition
    w = d.coupling_matrix
    coupled = w.conj().T @ rho.matrix @ w
    out = np.zeros_like(coupled)
    offset = 0
    index = 0
    while index < len(d.blocks):
        j = d.blocks[index].j
        count = d.multiplicity_table[j]
        width = j.twice + 1
        size = count * width
        sector = coupled[offset:offset + size, offset:offset + size]
        mult = np.trace(sector.reshape(count, width, count, width), axis1=1, axis2=3)
        out[offset:offset + size, offset:offset + size] = np.kron(mult, np.eye(width)) / width
        offset += size
        index += count
    result = w @ out @ w.conj().T
    return DensityOperator(0.5 * (result + result.conj().T))


def twirl_su2_monte_carlo(rho: DensityOperator, samples: int,
                          rng: RandomSource) -> DensityOperator:
    """Average U rho U^dag over explicit Haar samples of collective rotations.

    Sampling is chunked but deterministic for a given source; the result is
    renormalized to unit trace to absorb accumulated rounding.
    """
    if samples < 1:
        raise ValueError(f"sample count must be positive, got {samples}")
    n = _qubit_count(rho.dim)
    acc = np.zeros((rho.dim, rho.dim), dtype=complex)
    remaining = samples
    chunk_cap = max(1, _MC_ENTRY_BUDGET // (rho.dim * rho.dim))
    while remaining:
        k = min(remaining, chunk_cap)
        gs = haar_random_su2_batch(rng, k)
        us = gs
        for _ in range(n - 1):
            rows = us.shape[1]
            us = np.einsum("kab,kcd->kacbd", us, gs).reshape(k, rows * 2, rows * 2)
        acc += np.einsum("kab,bc,kdc->ad", us, rho.matrix, us.conj(), optimize=True)
        remaining -= k
    out = acc / samples
    out /= np.trace(out).real
    return DensityOperator(0.5 * (out + out.conj().T))


def twirl_u1_dephasing(rho: DensityOperator, channel: TwirlChannel) -> DensityOperator:
    """Project onto total-m sectors: sum_m P_m rho P_m.

    Coherence between different total-m eigenspaces is erased; each sector
    passes through untouched.
    """
    if channel.kind != "u1_dephasing":
        raise ValueError(f"expected a u1_dephasing channel, got {channel.kind}")
    if rho.dim != channel.dim:
        raise ValueError(f"dimension mismatch: state {rho.dim}, channel {channel.dim}")
    return DensityOperator(np.where(channel._sector_mask, rho.matrix, 0.0))


def channel_fixed_point_check(rho: DensityOperator, channel: TwirlChannel,
                              tol: float) -> bool:
    """True iff rho is a fixed point of the channel within tol (trace distance)."""
    return trace_distance(channel.apply(rho), rho) <= tol
