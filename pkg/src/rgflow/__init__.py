"""rgflow: running-coupling evaluation through transcendental closed forms.

The flow equation dx/dt = -beta0 x**2 (1 + c1 x + ...) reduces, order by
order, to generalizations of Lambert's equation once the series factor is
replaced by a (nearly) diagonal Pade approximant.  This package provides

* the polynomial / partial-fraction algebra behind the reduction,
* Pade approximant construction,
* the real branches of Lambert W,
* Lagrange-Buermann series engines for the generalized equations,
* loop-order solvers (one through five-plus loops) with oracle fallbacks,
* independent ODE and root-solve oracles, and
* the ``rgflow`` command line tool.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    DerivativeVanishes,
    DomainError,
    IllConditioned,
    LandauPole,
    MultiRootWarning,
    NegativeBase,
    NoBracket,
    NoConvergence,
    NoSolution,
    PoleEncountered,
    RepeatedRoots,
    RgflowError,
    SingularPade,
    StiffnessBudget,
)
from .inversion import (  # noqa: F401
    GeneralizedLambertEquation,
    SeriesSolution,
    four_loop_series,
    generic_series,
    lagrange_invert,
    pochhammer,
    solve_offset_lambert,
)
from .lambertw import (  # noqa: F401
    MINUS_ONE,
    PRINCIPAL,
    BranchId,
    lambert_w,
    w_series_coefficient,
    w_series_sum,
)
from .oracle import OdeSettings, ode_run, root_solve  # noqa: F401
from .pade import PadeApproximant, pade, pade_for_loop_order  # noqa: F401
from .polyalg import (  # noqa: F401
    PartialFractionForm,
    Polynomial,
    RationalFunction,
    RootSet,
    antiderivative_logform,
    partial_fractions,
    poly_divide,
    poly_roots,
)
from .running import (  # noqa: F401
    BetaFunction,
    Diagnostics,
    PadeReducedBeta,
    RunResult,
    ScaleSpec,
    available_methods,
    flow_logform,
    iterative_solution,
    lambda_from_reference,
    solve_four_loop,
    solve_generic,
    solve_one_loop,
    solve_three_loop,
    solve_two_loop,
    solve_with_diagnostics,
)
