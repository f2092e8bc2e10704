"""Numerical laboratory for the semilinear fourth-order heat equation
u_t + bilap(u) = |u|^p + f(x) on the exterior of the unit ball, under six
boundary-condition families.

Subpackages:
    closed_forms  exact weights, exponents, the explicit supersolution
    grids         radial grid, stencils, quadrature, power-law fits
    boundaries    ghost closures for the six boundary pairs
    solver        IMEX evolution, blow-up detection, weak residuals
    testfns       cut-offs, test-function families, estimate verification
    experiments   phase diagrams, decay sweeps, lifespan scaling, records
    cli           command-line front end
"""

__version__ = "0.1.0"

from .closed_forms import (BiharmonicWeight, DomainError, ExponentSet,
                           HarmonicWeight, Supersolution,
                           check_supersolution_boundary_signs,
                           compute_exponents, forcing_in_class,
                           make_supersolution, boundary_weight)
from .grids import (FitResult, RadialField, RadialGrid, annulus_quadrature,
                    fit_power_law, radial_bilaplacian, radial_laplacian)
from .boundaries import (BoundaryCondition, assemble_closure,
                         far_field_decay_check)
from .solver import (ProblemSpec, RadialRule, SimOutcome, measure_lifespan,
                     sign_functional, simulate, weak_residual)
from .testfns import (CutoffSpec, LifespanCutoff, TestFunctionSpec,
                      catalog_for, eval_cutoff, ikeda_bound, lemma_integral,
                      verify_lemma, verify_lifespan_cutoff_bounds)
