"""Dense complex linear algebra for multi-qubit states.

Conventions used throughout the package:

* qubit 1 is the leftmost (most significant) tensor factor, so the
  computational basis state |b1 b2 .. bn> sits at integer index b1b2..bn
  read in binary;
* everything is double precision; wrapper types check their defining
  invariants at construction time and hold read-only arrays, so values can
  be shared freely between concurrent workers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ATOL = 1e-10
MAX_QUBITS = 12


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_complex_array(values, ndim: int) -> np.ndarray:
    a = np.array(values, dtype=complex)
    if a.ndim != ndim:
        raise ValueError(f"expected a {ndim}-dimensional array, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("array has non-finite entries")
    return a


class RandomSource:
    """Deterministic stream of randomness backed by a counter-based generator.

    The same seed always reproduces the same stream.  ``split`` derives
    independent child sources keyed by index, which is how concurrent
    workers are expected to obtain their own streams.
    """

    def __init__(self, seed: int, spawn_key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self.spawn_key = tuple(int(k) for k in spawn_key)
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        self.generator = np.random.Generator(np.random.Philox(sequence))

    def split(self, children: int) -> list["RandomSource"]:
        """Derive ``children`` independent sources; child i is reproducible."""
        return [RandomSource(self.seed, self.spawn_key + (i,)) for i in range(children)]

    def normal(self, size=None):
        return self.generator.standard_normal(size)

    def uniform(self, size=None):
        return self.generator.random(size)

    def sample_index(self, probabilities) -> int:
        """Sample an index from a probability vector (clipped, renormalized)."""
        p = np.clip(np.asarray(probabilities, dtype=float), 0.0, None)
        return int(self.generator.choice(len(p), p=p / p.sum()))

    def __repr__(self):
        return f"RandomSource(seed={self.seed}, spawn_key={self.spawn_key})"


@dataclass(frozen=True, eq=False)
class GroupElement:
    """A 2x2 special-unitary matrix."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex_array(self.matrix, 2)
        if m.shape != (2, 2):
            raise ValueError(f"group element must be 2x2, got {m.shape}")
        if np.abs(m @ m.conj().T - np.eye(2)).max() > ATOL:
            raise ValueError("matrix is not unitary")
        if abs(np.linalg.det(m) - 1.0) > ATOL:
            raise ValueError("determinant is not 1")
        object.__setattr__(self, "matrix", _readonly(m))

    @staticmethod
    def identity() -> "GroupElement":
        return GroupElement(np.eye(2))


def haar_random_su2_batch(rng: RandomSource, size: int) -> np.ndarray:
    """Vectorized Haar sampling on SU(2); returns an array of shape (size, 2, 2).

    A uniformly random unit quaternion (w, x, y, z) is mapped to
    w*I + i*(x*sx + y*sy + z*sz), which is exactly Haar distributed.
    """
    q = np.atleast_2d(rng.normal((size, 4)))
    norms = np.linalg.norm(q, axis=1)
    while np.any(norms < 1e-12):  # probability zero, but keep the map total
        bad = norms < 1e-12
        q[bad] = rng.normal((int(bad.sum()), 4))
        norms = np.linalg.norm(q, axis=1)
    w, x, y, z = (q / norms[:, None]).T
    out = np.empty((size, 2, 2), dtype=complex)
    out[:, 0, 0] = w + 1j * z
    out[:, 0, 1] = y + 1j * x
    out[:, 1, 0] = -y + 1j * x
    out[:, 1, 1] = w - 1j * z
    return out


def haar_random_su2(rng: RandomSource) -> GroupElement:
    """Draw one SU(2) element from the Haar measure."""
    return GroupElement(haar_random_su2_batch(rng, 1)[0])


@dataclass(frozen=True, eq=False)
class StateVector:
    """A normalized pure state on a finite-dimensional space."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = _as_complex_array(self.amplitudes, 1)
        norm = np.linalg.norm(a)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state vector norm {norm} is not 1")
        object.__setattr__(self, "amplitudes", _readonly(a))

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @staticmethod
    def normalized(values) -> "StateVector":
        a = _as_complex_array(values, 1)
        norm = np.linalg.norm(a)
        if norm < 1e-12:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(a / norm)

    @staticmethod
    def basis(dim: int, index: int) -> "StateVector":
        a = np.zeros(dim, dtype=complex)
        a[index] = 1.0
        return StateVector(a)

    @staticmethod
    def from_bits(bits: str) -> "StateVector":
        """Computational basis state from a bit string, qubit 1 leftmost."""
        return StateVector.basis(2 ** len(bits), int(bits, 2))

    def evolve(self, unitary) -> "StateVector":
        return StateVector(np.asarray(unitary) @ self.amplitudes)

    def overlap(self, other: "StateVector") -> complex:
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def expectation(self, operator) -> complex:
        return complex(np.vdot(self.amplitudes, np.asarray(operator) @ self.amplitudes))

    def to_density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()))


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """A Hermitian, positive-semidefinite, unit-trace operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _as_complex_array(self.matrix, 2)
        if m.shape[0] != m.shape[1]:
            raise ValueError(f"density operator must be square, got {m.shape}")
        if np.abs(m - m.conj().T).max() > ATOL:
            raise ValueError("matrix is not Hermitian")
        tr = np.trace(m)
        if abs(tr - 1.0) > ATOL:
            raise ValueError(f"trace {tr} is not 1")
        if np.linalg.eigvalsh(m).min() < -ATOL:
            raise ValueError("matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @staticmethod
    def pure(state: StateVector) -> "DensityOperator":
        return state.to_density()

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityOperator":
        return DensityOperator(np.eye(dim) / dim)

    def evolve(self, unitary) -> "DensityOperator":
        u = np.asarray(unitary)
        return DensityOperator(u @ self.matrix @ u.conj().T)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the composite row index is i_a * rows(b) + i_b."""
    out = np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))
    if not np.all(np.isfinite(out)):
        raise ValueError("tensor product has non-finite entries")
    return out


def collective_rotation(g: GroupElement, n: int) -> np.ndarray:
    """The n-fold tensor power g (x) g (x) ... (x) g applied to n qubits."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValueError(f"qubit count must be in 1..{MAX_QUBITS}, got {n}")
    out = np.array(g.matrix)
    for _ in range(n - 1):
        out = np.kron(out, g.matrix)
    return out


def partial_trace(rho: DensityOperator, keep, dims) -> DensityOperator:
    """Trace out every tensor factor not listed in ``keep``.

    ``dims`` lists the dimension of each factor, leftmost first; ``keep``
    holds 0-based factor indices.  Kept factors stay in their original
    order, and the trace of the result equals the trace of the input.
    """
    dims = [int(d) for d in dims]
    if int(np.prod(dims)) != rho.dim:
        raise ValueError(f"factor dimensions {dims} do not multiply to {rho.dim}")
    keep = sorted(set(int(k) for k in keep))
    if keep and not (0 <= keep[0] and keep[-1] < len(dims)):
        raise ValueError(f"keep indices {keep} out of range for {len(dims)} factors")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    for i in sorted(set(range(len(dims))) - set(keep), reverse=True):
        t = np.trace(t, axis1=i, axis2=i + n)
        n -= 1
    kept_dim = int(np.prod([dims[k] for k in keep])) if keep else 1
    return DensityOperator(t.reshape(kept_dim, kept_dim))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, in [0, 1].

    For a pure sigma = |psi><psi| this reduces to <psi|rho|psi>.
    """
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    root = _psd_sqrt(rho.matrix)
    w = np.linalg.eigvalsh(root @ sigma.matrix @ root)
    # eigenvalues below the solver's noise floor would be inflated by the
    # square root; they carry no information, so drop them
    w[w < rho.dim * np.finfo(float).eps * max(w.max(), 0.0)] = 0.0
    value = float(np.sqrt(w).sum() ** 2)
    return min(max(value, 0.0), 1.0)


def trace_distance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """Half the sum of absolute eigenvalues of rho - sigma, in [0, 1]."""
    if rho.dim != sigma.dim:
        raise ValueError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    w = np.linalg.eigvalsh(rho.matrix - sigma.matrix)
    return min(max(0.5 * float(np.abs(w).sum()), 0.0), 1.0)


def random_state_vector(rng: RandomSource, dim: int) -> StateVector:
    """Haar-random pure state (complex Gaussian vector, normalized)."""
    return StateVector.normalized(rng.normal(dim) + 1j * rng.normal(dim))


def random_density(rng: RandomSource, dim: int, rank: int | None = None) -> DensityOperator:
    """Random mixed state from the Ginibre ensemble, optionally rank-limited."""
    rank = dim if rank is None else rank
    g = rng.normal((dim, rank)) + 1j * rng.normal((dim, rank))
    m = g @ g.conj().T
    return DensityOperator(m / np.trace(m).real)
