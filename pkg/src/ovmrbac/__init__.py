"""Orthogonal variability models under role-based access control."""

from .errors import (
    AlreadyAssigned,
    CardinalityInvalid,
    ConstraintConflict,
    DuplicateElement,
    DuplicateId,
    ElementInUse,
    GroupExists,
    InvalidName,
    NoPermissions,
    NotAssigned,
    NotFound,
    NotGranted,
    OvmRbacError,
    ParseError,
    SelfConstraint,
    StructuralViolation,
    UnknownOperation,
    UnknownRole,
    UnknownUser,
    VariantAlreadyBound,
)
from .model import (
    AltGroup,
    Constraint,
    ConstraintKind,
    Dependency,
    EndpointRef,
    Model,
    Universe,
    VariabilityKind,
    VariationPoint,
    Variant,
    Violation,
    add_alt_group,
    add_constraint,
    add_dependency,
    add_man_vp,
    add_opt_vp,
    add_variant,
    check_structure,
    list_alt_groups,
    list_constraints,
    list_dependencies,
    list_variants,
    list_vps,
    new_empty_model,
    remove_alt_group,
    remove_constraint,
    remove_dependency,
    remove_man_vp,
    remove_opt_vp,
    remove_variant,
    validate_model,
)
from .rbac import (
    Category,
    Decision,
    ObjectId,
    OPERATION_CATALOG,
    Permission,
    Policy,
    add_role,
    add_user,
    assign_user,
    category_object,
    check_access,
    deassign_user,
    grant_permission2,
    new_empty_policy,
    parse_object_id,
    revoke_permission,
    role_permissions,
)
from .session import (
    ANY_OPERATION,
    OperationFilter,
    OpRequest,
    Outcome,
    OutcomeStatus,
    READ_LIKE,
    Session,
    ViewModel,
    derive_view,
    exact_operation,
    execute,
    user_view,
)
from .model_io import export_dot, load_model, load_policy, save_model, save_policy

__version__ = "0.1.0"
