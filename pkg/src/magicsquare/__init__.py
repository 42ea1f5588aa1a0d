"""Magic Square game over cavity-coupled quantum-dot spin qubits."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    SuccessTable,
    classical_optimum,
    referee_best_response,
    success_table,
    sweep,
    threshold_theta,
)
from .cavity import CavityParams, coupling_check, phases, spin_photon_gate  # noqa: E402
from .game import (  # noqa: E402
    EXTENDED,
    EXTENDED_NO_FIRST_SWAP,
    REFERENCE,
    Backend,
    RoundInput,
    extended_circuit,
    initial_state,
    outcome_distribution,
    round_success,
)
from .gates import DEFAULT_CONVENTION, Convention, make_gate, resolve_convention  # noqa: E402
from .qcore import (  # noqa: E402
    GateMatrix,
    StateVector,
    embed_apply,
    equal_up_to_global_phase,
    marginal_distribution,
    tensor_product,
)
