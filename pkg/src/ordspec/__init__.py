"""ordspec: right pre-orders on groups, lattice-group term actions, and
finite Stone duality, with exact arithmetic throughout."""

from .cones import (
    BallCone,
    BudgetError,
    CmpResult,
    ConeError,
    EnumConstraints,
    LexFlagCone,
    Sign,
    ball_cone_from_zvec_cone,
    check_axioms,
    cone_from_json,
    cone_leq,
    cone_leq_certificate,
    enumerate_ball_cones,
    is_abelian_cone,
    is_normal,
    is_representable_cone,
    lexflag_family,
    normal_interior,
    refine_to_order,
)
from .fnl import FinSuppFn, PointPrime, SupportSubgroup
from .groups import GroupElement, GroupError, PoGroup
from .stone import (
    FinDistLattice,
    FinPoset,
    FiniteSpace,
    birkhoff_roundtrip_report,
    conp_lattice_of_fn_truncation,
    downset_lattice,
    prime_ideals,
    stone_dual,
    verify_spectral,
)
from .terms import (
    MeetJoinNF,
    OutOfScopeError,
    ParseError,
    PrimeOracle,
    eval_action,
    normal_form,
    parse_term,
    prime_of_cone,
    roundtrip_report,
    seek_separating_cone,
    stabilizer_contains,
    term_to_str,
)

__version__ = "0.1.0"
