"""Spin transfer functions of excitation-conserving chains coupled to spin baths."""

__version__ = "0.1.0"

from .model import (
    BathSpec,
    ChainSpec,
    HeterogeneityError,
    HomogeneousBath,
    SpecError,
    effective_bath_coupling,
    homogenize,
    hopping_matrix,
)
from .spectra import DressedSpectrum, SpectralData, dress, eigendecompose, engineered_couplings
from .dynamics import (
    PeakNotFound,
    TransferSeries,
    bare_transfer,
    exact_transfer,
    first_peak,
    global_peak,
    strong_coupling_approx,
    weak_correction,
)
from .oracle import FullSectorHamiltonian, build_full, inhomogeneity_deviation, oracle_transfer
from .optimize import SearchProblem, SearchResult, objective, search
