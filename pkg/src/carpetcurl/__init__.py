"""Exact-arithmetic generalized Sierpinski carpets and curl closability checks."""

from .carpet import (
    CarpetSpec,
    CellGrid,
    Hole,
    NonOddReciprocal,
    Prefractal,
    RatioOutOfRange,
    SpecError,
    StageBeyondSpec,
    TailDiverges,
    TailInterval,
    cell_grid,
    enumerate_holes,
    enumerate_squares,
    gap_height,
    prefractal_measure,
    region_measure,
    side_length,
    square_count,
    tail_measure_bounds,
    validate_spec,
)
from .fields import (
    AffinePatch,
    PCScalarField,
    PCVectorField,
    PiecewiseAffineField,
    ProductVectorField,
    affine_field,
    constant_field,
    coordinate_field,
    curl,
    dirichlet_energy,
    gradient,
    l2_norm_sq,
    overlay,
    sup_norm,
)
from .forms import (
    GammaDensity,
    OneForm,
    ProductField,
    TwoForm,
    build_cutoff_form,
    d0,
    d1,
    gamma,
    inner_one,
    inner_two,
    multiply,
    multiply_two,
    norm_sq_one,
    norm_sq_two,
    verify_wedge_approximation,
    wedge,
)
from .report import VerificationReport, report_to_csv, report_to_json
from .witness import (
    CellNeighborhood,
    LocalConstancyViolated,
    StripSet,
    Tent,
    build_cell_field,
    build_flattened,
    build_neighborhoods,
    build_ramp,
    build_staircase,
    build_strips,
    build_tent_field,
    build_tents,
    build_witness,
    check_local_constancy,
    verify_witness_sequence,
)

__version__ = "0.1.0"
