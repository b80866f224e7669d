"""Numerical laboratory for random quasi-one-dimensional operators.

Model families of disordered quasi-1D operators (discrete/continuous
Schroedinger, point interactions, unitary Anderson, scattering zippers,
extended CMV), Lyapunov-spectrum estimation from transfer-matrix cocycles,
Lie-closure certification of the algebraic localization criteria, and
finite-volume spectral statistics.
"""

from . import errors, liecheck, lyapunov, matkit, models, randsrc, spectra
from .errors import Quasi1dError
from .liecheck import (
    DisorderInterval,
    LieClosureReport,
    check_lemma_spN,
    disorder_interval,
    lie_closure,
    log_transfer_identity,
    norm_X,
    zipper_lie_closure,
)
from .lyapunov import (
    CocycleStream,
    LyapunovSpectrum,
    holder_diag,
    lyap_spectrum,
    oseledets_probe,
    wedge_oracle,
)
from .matkit import (
    GroupTag,
    canonical_basis,
    cayley_realify,
    expm,
    group_residual,
    logm_principal,
    qr_pos,
    wedge_power,
)
from .models import (
    ContinuousQuasi1D,
    DiscreteQuasi1D,
    Energy,
    ExtendedCMV,
    PointInteractions,
    ScatteringZipper,
    TransferSample,
    UnitaryAnderson,
    Unimodular,
    build_extended_cmv,
    build_finite_discrete,
    continuous_transfer,
    discrete_transfer,
    phi_map,
    point_interaction_transfer,
    scattering_matrix,
    unitary_anderson_transfer,
    zipper_transfer,
)
from .randsrc import (
    Bernoulli01,
    DisorderLaw,
    FiniteSupport,
    SeedSpec,
    TwoPoint,
    UniformInterval,
    draw_site_vector,
    haar_unitary,
)
from .spectra import (
    IdsCurve,
    WegnerTable,
    eigensolve_sym,
    eigenmode_decay,
    ids_estimate,
    spectrum_coverage,
    thouless_residual,
    transport_probe,
    wegner_probe,
)

__version__ = "0.1.0"
