"""Exact Delzant-polytope geometry, joint spectra of quantum toric systems and their inversion."""

__version__ = "0.1.0"

from .bargmann import admissible_indices, bijection_check, oracle_spectrum
from .delzant import (
    DelzantPolytope,
    ValidationReport,
    canonical,
    check_prequantizable,
    construction_data,
    from_facets,
    half_form_vector,
    polytope_equal,
    require_delzant,
    unimodular_image,
    validate_delzant,
)
from .inverse import ReconstructionConfig, convergence_report, isomorphic, limit_polytope
from .lattice import HPolytope, hausdorff_distance, lattice_points, polytope_volume
from .quantum import (
    DeformationSeries,
    Polynomial,
    SpectrumCloud,
    apply_deformation,
    inject_noise,
    metaplectic_spectrum,
    model_spectrum,
    orbit_average,
    quantum_dimension,
    weyl_report,
)
