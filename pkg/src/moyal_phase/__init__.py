"""Phase-space quantum mechanics on a grid.

Wigner functions, Moyal characteristic functions and density matrices with
exact conversions between them; three interchangeable time-evolution engines
(phase-space Moyal, density-matrix Liouville, Schroedinger reference); and a
truncated-Fock realization of the Weyl algebra with von Neumann's idempotent.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    DEFAULT_GRID,
    GridSpec1D,
    Moments,
    PhaseGridSpec,
    PotentialSpec,
    Wavefunction,
    make_cat,
    make_fock,
    make_gaussian,
    moments_from_wigner,
)
from .dynamics import (  # noqa: E402
    ComparisonReport,
    EvolutionConfig,
    compare_evolutions,
    evolve_density,
    evolve_moyal,
    schrodinger_oracle,
)
from .errors import (  # noqa: E402
    GridMismatch,
    GridTooSmall,
    InvalidParameter,
    MoyalPhaseError,
    NonHermitianInput,
    SupportOverflow,
    TruncationRange,
    UnstableStep,
)
from .transforms import (  # noqa: E402
    CharacteristicFunction,
    DensityMatrix,
    WignerFunction,
    characteristic_from_wavefunction,
    characteristic_from_wigner,
    density_from_wavefunction,
    rho_from_wigner,
    wigner_from_characteristic,
    wigner_from_density,
    wigner_from_wavefunction,
)
