"""Transfer-tensor kinetics for cavity polariton models."""

from .numerics import (NumericsError, hermitian_eig, matrix_exponential, null_space,
                       pseudoinverse, unvec, vec)
from .models import (DensityMatrix, ModelError, ModelSpec, build_operators, hamiltonian,
                     initial_state, liouvillian, tls_observable, tls_state)
from .maps import (DynamicalMapSeries, MapError, Trajectory, check_cptp, converge_fock,
                   dynamical_maps, markovian_maps, observable_trajectory, partial_trace_cavity,
                   propagate_exact)
from .ttm import (TTMError, TransferTensorSeries, read_series, tensor_sum, transfer_tensors,
                  ttm_propagate, write_series, z_transform)
from .kinetics import (KineticsError, KineticsReport, RelaxationMatrix, ResonanceScan, analyse,
                       analytic_damped_cosine_tau, lifetime, moments,
                       normalized_relaxation_matrix, relaxation_matrix, resonance_scan,
                       steady_state)

__version__ = "0.1.0"
