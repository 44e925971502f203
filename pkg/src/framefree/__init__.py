"""Communication without a shared reference frame, simulated end to end.

The package models the loss of a common frame as averaging over collective
rotations, decomposes the n-qubit rotation action into invariant blocks,
and builds the protocols that ride on that structure: perfect classical
messaging, decoherence-free and noiseless-subsystem qubit codes, logical
Bell tests, and a two-photon optical realization of the two-qubit case.
"""

from .core import (ATOL, DensityOperator, GroupElement, MAX_QUBITS, RandomSource,
                   StateVector, collective_rotation, fidelity, haar_random_su2,
                   haar_random_su2_batch, partial_trace, random_density,
                   random_state_vector, tensor, trace_distance)
from .irreps import (CouplingPath, HalfInteger, IrrepBlock, IrrepDecomposition,
                     block_projector, clebsch_gordan, decompose, enumerate_paths,
                     half, multiplicity, total_irrep_count)
from .twirl import (TwirlChannel, channel_fixed_point_check, twirl_su2_exact,
                    twirl_su2_monte_carlo, twirl_u1_dephasing)
from .protocols import (CodeBook, CodeBookEntry, DecodingError, ExchangeAction,
                        LogicalEncoding, Message, RateRow, RateTable,
                        block_outcome_probabilities, build_classical_codebook,
                        classical_rate_asymptote, classical_round_trip,
                        decode_logical, dephasing_sector_encoding, dfs_basis_4qubit,
                        dfs_encoding_4qubit, dfs_logical_paulis, encode_logical,
                        exchange_logical_action, helstrom_success_probability,
                        logical_bell_chsh, logical_bell_chsh_trials,
                        most_repeated_irrep, noiseless_subsystem_plan, rate_table,
                        swap_qubits_matrix)
from .optics import (DetectionDistribution, OpticalProtocolResult, OpticalState,
                     apply_mode_transform, beam_splitter, detect, lift_two_qubit,
                     polarization_rotation, prepare_bell, run_optical_protocol)

__version__ = "0.1.0"
