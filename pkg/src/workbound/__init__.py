"""Average-work benchmarks for one device across several preparations and
Hamiltonian settings: exact commuting-device limits, their brute-force
verification, and the incompatible implementations that beat them."""

from .operators import (
    BlochVector,
    BoundedHamiltonian,
    DensityState,
    HermitianOperator,
    PureState,
    ValidationError,
    bloch_to_state,
    density_from_matrix,
    eigen_decompose,
    gibbs_state,
    relative_entropy,
    state_to_bloch,
    von_neumann_entropy,
)
from .thermo import (
    ProtocolResult,
    ProtocolSpec,
    ergotropy,
    free_energy,
    max_work_bound,
    run_cutoff_protocol,
)
from .task import (
    MinimalTaskInstance,
    SourceConstraint,
    WorkTask,
    minimal_work_task,
    pairwise_max_energy,
    solve_minimal_source,
    task_average,
    validate_task,
)
from .commuting import (
    BenchmarkResult,
    CommutingDevice,
    LawEvaluation,
    OracleResult,
    classical_benchmark,
    commuting_lower_bound,
    law_bound,
    law_upper_max,
    oracle_max,
    rotated_residual,
    two_point_device,
)
from .advantage import (
    AdvantageReport,
    advantage,
    minimal_visibility_threshold,
    one_setting_envelope,
    optimize_advantage,
    quantum_value,
    saturating_hamiltonian,
)
from .alignment import (
    AlignmentResult,
    BlochDirectionFamily,
    best_alignment,
    equatorial_family,
    equatorial_threshold,
    hierarchy_benchmark,
    hierarchy_threshold,
    minimal_pair_family,
    sphere_alignment_montecarlo,
)

__version__ = "0.1.0"
