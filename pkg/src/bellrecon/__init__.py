"""Control pipeline for Bell pairs under Heisenberg self-distortion.

Modules
-------
qstate         two-qubit states, bases, fidelity, trace distance, concurrence
dynamics       Hamiltonian, distortion, reconstruction pulse
measurement    discrimination sets, Helstrom probabilities, invariance subgroup
repreparation  pulse-generated gates and repreparation words
ratapprox      rational approximation of the coupling under finite knowledge
pipeline       end-to-end chain and fidelity surfaces
cli            command-line front end
"""
from .qstate import (
    BELL,
    COMPUTATIONAL,
    Basis,
    DensityMatrix,
    PureState,
    Unitary4,
    change_basis,
    concurrence,
    fidelity_pure,
    make_initial,
    rotated,
    trace_distance,
)
from .dynamics import (
    ControlParams,
    HamiltonianParams,
    distort_analytic,
    evolve_oracle,
    fidelity_do_nothing,
    hamiltonian_matrix,
    reconstruct,
    reconstruction_pulse,
)

__version__ = "0.1.0"
