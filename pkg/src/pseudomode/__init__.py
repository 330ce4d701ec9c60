"""Pseudomode reduction of Kerr-coupled bosonic mode networks."""
from .drive import (
    DriveSpec,
    StiffPumpReduction,
    collapse_diagnostic,
    displacement_amplitude,
    lamb_shift,
    lamb_shift_terms,
    spectral_density,
    stiff_pump_reduce,
)
from .exceptions import (
    ChannelUndefinedError,
    ConvergenceError,
    DivergenceError,
    EmptySectorError,
    IllPosedFitError,
    InstabilityError,
    NumericalError,
    PoleProximityError,
    PseudomodeError,
    ValidationError,
)
from .memory import (
    PoleResidueSet,
    PseudomodeSystem,
    RationalFitter,
    TrajectoryPair,
    equivalence_report,
    fit_error_bound,
    fit_rational,
    kernel_eval,
    self_energy_eval,
    solve_pseudomode,
    solve_volterra,
)
from .model import (
    Coupling,
    CouplingKind,
    Mode,
    ModeNetwork,
    SectorBasis,
    diagonal_energy,
    enumerate_sector,
    matrix_element,
    transition_frequencies,
)
from .reduction import (
    ChannelCase,
    ReducedChannel,
    local_template,
    reduce_channel,
    reduce_four_mode,
    reduce_four_wave_parent,
    reduce_three_mode,
    reduce_two_mode,
)
from .resolvent import (
    ChainResolvent,
    chain_eigenvalues,
    continued_fraction_self_energy,
    dressed_poles_chain,
    dressed_poles_local,
    projected_green,
)

__version__ = "0.1.0"
