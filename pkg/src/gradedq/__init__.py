"""Exact symbolic calculus on graded charts.

Graded-commutative polynomials over rational coefficients, multivector
fields with their bracket calculus, higher derived brackets and
Maurer-Cartan residuals, and a Courant/Dirac front end, all exact.
"""

from .galg import Chart, ChartError, GPoly
from .gcore import antisym_sign, koszul_sign, perm_parity, shift_iso_sign, shuffles
from .mvf import CoframeElement, MVF, eval_coframe, restrict, sn_bracket
from .linfty import (
    MVFSpace,
    ShiftedSpace,
    StructureMaps,
    TableSpace,
    blended_compat_residual,
    jacobiator,
    mc_residual,
    shift_pack,
    shift_unpack,
)
from .vderive import (
    CPair,
    DerivedFamily,
    VAlgebraSplit,
    combined_maps,
    combined_mc_residual,
    derived_bracket,
    derived_mc_residual,
    structure_maps,
    valgebra_check,
)
from .qgeom import (
    DeformationDatum,
    InternalInvariantError,
    QField,
    SubmanifoldSpec,
    build_I,
    build_P,
    coiso_deform_check,
    coisotropic_check,
    graph_coframes,
    graph_substitution,
    is_homological,
    maclaurin_expand,
    q_deform_check,
    simul_deform_check,
    valgebra_split,
    x_field,
)
from .courant import (
    CourantData,
    anchor_apply,
    build_pi,
    build_theta,
    classical_dorfman,
    courant_axioms_check,
    dirac_check,
    dirac_deform_check,
    dorfman,
    pairing,
    poisson_bracket,
    section,
    standard_courant,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
