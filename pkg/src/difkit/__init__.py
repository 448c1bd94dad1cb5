"""difkit: analytic discretized-influence-functional coefficients for open
quantum systems, with the spectral-density decompositions, exponential-sum
fitting, and quadrature oracles needed to produce and validate them."""

from .model import (
    HBAR_OVER_KB_K_PS,
    BathTerm,
    DiscretePath,
    DivergentIntegralError,
    ExponentialBath,
    LorentzianTerm,
    MeierTannor,
    MultiLorentzDrude,
    PhysicalContext,
    PowerLawExpCutoff,
    SpectralDensity,
    TanhLorentzDrude,
    bath_from_json,
    bath_to_json,
    debye,
    eval_spectral_density,
    odd_extension,
    reorganization_energy,
    spectral_density_from_config,
    spectral_density_to_config,
)
from .quadrature import (
    QuadratureConfig,
    QuadratureConvergenceError,
    QuadratureResult,
    Rectangle,
    Triangle,
    integrate_double,
    integrate_finite,
    integrate_semi_infinite,
)
from .bath_response import (
    AlphaGrid,
    alpha_exponential,
    alpha_exponential_grid,
    alpha_quadrature,
    alpha_quadrature_grid,
    compare_alpha,
    read_alpha_csv,
    reconstruct_spectral_density,
    write_alpha_csv,
)
from .decompose import (
    DecompositionReport,
    PadeParameters,
    PoleCollisionError,
    alpha_power_law,
    bose_function_pade,
    decompose,
    decompose_meier_tannor,
    decompose_multi_lorentz_drude,
    decompose_tanh_lorentz_drude,
    pade_parameters,
    polygamma,
    tanh_half_pade,
)
from .expfit import (
    FitInitializationError,
    FitReport,
    fit_exponential_bath,
    fit_quality_vs_spectrum,
)
from .eta import (
    STRANG,
    TROTTER,
    BenchmarkReport,
    EtaTable,
    benchmark_eta,
    build_eta_table,
    eta_generic_quadrature,
    eta_spectral_oracle,
    eta_strang_analytic,
    eta_trotter_analytic,
    eta_trotter_interior_sweep,
    influence_phase,
    quapi_counter_term,
    read_eta_csv,
    write_eta_csv,
)

__version__ = "0.1.0"
