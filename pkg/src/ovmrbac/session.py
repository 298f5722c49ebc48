"""Access-mediated model editing and permission-derived views.

Every mutation request is funneled through ``execute``: the request is
mapped to its access-control operation id and target object, the access
check runs first (so a denied caller learns nothing about model structure
from precondition errors), and only on Allow is the guarded model operation
applied. The session log records one entry per request, whatever the
outcome.

Views project a model down to the elements a role's permissions admit.
A visible relation carries its member variants along (a variant is just a
name, so nothing extra leaks), while a referenced variation point that no
permission admits appears as an opaque stub: its name is shown, its
mandatory/optional kind withheld.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping

from . import model as ovm
from .errors import NoPermissions, OvmRbacError, UnknownUser
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
)
from .rbac import (
    Category,
    Decision,
    ObjectId,
    Permission,
    Policy,
    READ_LIKE_OPERATIONS,
    alt_group_object,
    assigned_roles,
    category_members,
    category_object,
    check_access,
    constraint_object,
    dependency_object,
    element_object_ids,
    role_permissions,
    variant_object,
    vp_object,
)

# The mutation requests a session accepts; read access is served by
# check_access and the view derivations instead.
REQUEST_OPS: tuple[str, ...] = (
    "addManVP",
    "addOptVP",
    "removeManVP",
    "removeOptVP",
    "addVariant",
    "removeVariant",
    "addDependency",
    "removeDependency",
    "addAltGroup",
    "removeAltGroup",
    "addConstraint",
    "removeConstraint",
)


@dataclass(frozen=True)
class OpRequest:
    """One mutation request: an operation name plus its positional payload.

    Requests are validated on construction (operation name, payload arity,
    element-name well-formedness), so ``execute`` never has to fail: every
    constructible request yields an Outcome.
    """

    op: str
    args: tuple

    def __post_init__(self) -> None:
        if self.op not in REQUEST_OPS:
            raise ValueError(f"unknown request operation {self.op!r}")
        object.__setattr__(self, "args", _validated_args(self.op, self.args))

    def render(self) -> str:
        parts = []
        for arg in self.args:
            if isinstance(arg, frozenset):
                parts.append("{" + ", ".join(sorted(arg)) + "}")
            elif isinstance(arg, EndpointRef):
                parts.append(f"{arg.universe.value}:{arg.name}")
            elif isinstance(arg, Enum):
                parts.append(arg.value)
            else:
                parts.append(str(arg))
        return f"{self.op}({', '.join(parts)})"


def _validated_args(op: str, args: tuple) -> tuple:
    def need(count: int) -> None:
        if len(args) != count:
            raise ValueError(f"{op} takes {count} argument(s), got {len(args)}")

    if op in ("addManVP", "addOptVP", "removeManVP", "removeOptVP",
              "addVariant", "removeVariant", "removeAltGroup"):
        need(1)
        return (ovm.check_name(args[0]),)
    if op == "addDependency":
        need(3)
        if not isinstance(args[2], VariabilityKind):
            raise ValueError("dependency kind must be a VariabilityKind")
        return (ovm.check_name(args[0]), ovm.check_name(args[1]), args[2])
    if op == "removeDependency":
        need(2)
        return (ovm.check_name(args[0]), ovm.check_name(args[1]))
    if op == "addAltGroup":
        need(4)
        members, min_card, max_card, vp = args
        members = frozenset(ovm.check_name(m) for m in members)
        if not isinstance(min_card, int) or not isinstance(max_card, int):
            raise ValueError("group cardinalities must be integers")
        return (members, min_card, max_card, ovm.check_name(vp))
    # addConstraint / removeConstraint
    need(3)
    kind, source, target = args
    if not isinstance(kind, ConstraintKind):
        raise ValueError("constraint kind must be a ConstraintKind")
    if not isinstance(source, EndpointRef) or not isinstance(target, EndpointRef):
        raise ValueError("constraint endpoints must be EndpointRef values")
    return (kind, source, target)


def add_man_vp_request(name: str) -> OpRequest:
    return OpRequest("addManVP", (name,))


def add_opt_vp_request(name: str) -> OpRequest:
    return OpRequest("addOptVP", (name,))


def remove_man_vp_request(name: str) -> OpRequest:
    return OpRequest("removeManVP", (name,))


def remove_opt_vp_request(name: str) -> OpRequest:
    return OpRequest("removeOptVP", (name,))


def add_variant_request(name: str) -> OpRequest:
    return OpRequest("addVariant", (name,))


def remove_variant_request(name: str) -> OpRequest:
    return OpRequest("removeVariant", (name,))


def add_dependency_request(variant: str, vp: str, kind: VariabilityKind) -> OpRequest:
    return OpRequest("addDependency", (variant, vp, kind))


def remove_dependency_request(variant: str, vp: str) -> OpRequest:
    return OpRequest("removeDependency", (variant, vp))


def add_alt_group_request(
    variants, min_card: int, max_card: int, vp: str
) -> OpRequest:
    return OpRequest("addAltGroup", (frozenset(variants), min_card, max_card, vp))


def remove_alt_group_request(vp: str) -> OpRequest:
    return OpRequest("removeAltGroup", (vp,))


def add_constraint_request(
    kind: ConstraintKind, source: EndpointRef, target: EndpointRef
) -> OpRequest:
    return OpRequest("addConstraint", (kind, source, target))


def remove_constraint_request(
    kind: ConstraintKind, source: EndpointRef, target: EndpointRef
) -> OpRequest:
    return OpRequest("removeConstraint", (kind, source, target))


def resolve_request(request: OpRequest, model: Model) -> tuple[str, ObjectId]:
    """Map a request onto its (operation id, target object) for the check.

    Additions of variation points, variants, and dependencies target the
    category the new element will join, exactly as the example policy
    grants them. Removals target the element id; category grants still
    cover it through dynamic membership. Alt-group and constraint requests
    target their element id, which is fully determined by the request
    arguments, so per-element grants can scope creation as well.
    """
    op, args = request.op, request.args
    if op == "addManVP":
        return "add_Variation_Point", category_object(Category.MAN_VP)
    if op == "addOptVP":
        return "add_Variation_Point", category_object(Category.OPT_VP)
    if op in ("removeManVP", "removeOptVP"):
        return "remove_Variation_Point", vp_object(args[0])
    if op == "addVariant":
        return "add_Variant", category_object(Category.VARIANT)
    if op == "removeVariant":
        return "remove_Variant", variant_object(args[0])
    if op == "addDependency":
        _, _, kind = args
        if kind is VariabilityKind.MANDATORY:
            return "writeManDep", category_object(Category.MAN)
        return "writeOptDep", category_object(Category.OPT)
    if op == "removeDependency":
        variant, vp = args
        dep = next(
            (d for d in model.dependencies if d.variant == variant and d.vp == vp),
            None,
        )
        kind = dep.kind if dep is not None else VariabilityKind.OPTIONAL
        rbac_op = (
            "writeManDep" if kind is VariabilityKind.MANDATORY else "writeOptDep"
        )
        return rbac_op, dependency_object(variant, vp)
    if op == "addAltGroup":
        return "add_AltGroup", alt_group_object(args[3])
    if op == "removeAltGroup":
        return "remove_AltGroup", alt_group_object(args[0])
    if op in ("addConstraint", "removeConstraint"):
        kind, source, target = args
        rbac_op = "add_Constraint" if op == "addConstraint" else "remove_Constraint"
        return rbac_op, constraint_object(kind, source, target)
    raise ValueError(f"unknown request operation {op!r}")


def apply_request(request: OpRequest, model: Model) -> Model:
    """Run the guarded model operation a request names."""
    op, args = request.op, request.args
    if op == "addManVP":
        return ovm.add_man_vp(model, args[0])
    if op == "addOptVP":
        return ovm.add_opt_vp(model, args[0])
    if op == "removeManVP":
        return ovm.remove_man_vp(model, args[0])
    if op == "removeOptVP":
        return ovm.remove_opt_vp(model, args[0])
    if op == "addVariant":
        return ovm.add_variant(model, args[0])
    if op == "removeVariant":
        return ovm.remove_variant(model, args[0])
    if op == "addDependency":
        return ovm.add_dependency(model, *args)
    if op == "removeDependency":
        return ovm.remove_dependency(model, *args)
    if op == "addAltGroup":
        members, min_card, max_card, vp = args
        return ovm.add_alt_group(model, members, min_card, max_card, vp)
    if op == "removeAltGroup":
        return ovm.remove_alt_group(model, args[0])
    if op == "addConstraint":
        return ovm.add_constraint(model, *args)
    if op == "removeConstraint":
        return ovm.remove_constraint(model, *args)
    raise ValueError(f"unknown request operation {op!r}")


class OutcomeStatus(Enum):
    APPLIED = "applied"
    DENIED = "denied"
    REJECTED = "rejected"


@dataclass(frozen=True)
class Outcome:
    status: OutcomeStatus
    model: Model | None = None
    error: OvmRbacError | None = None

    @property
    def applied(self) -> bool:
        return self.status is OutcomeStatus.APPLIED

    def render(self) -> str:
        if self.status is OutcomeStatus.REJECTED:
            return f"rejected: {type(self.error).__name__}: {self.error}"
        return self.status.value


@dataclass(frozen=True)
class LogEntry:
    request: OpRequest
    decision: Decision
    outcome: Outcome

    def render(self) -> str:
        return (
            f"{self.request.render()} decision={self.decision.value} "
            f"outcome={self.outcome.render()}"
        )


@dataclass
class Session:
    """A single user's editing session over one model/policy snapshot pair.

    Single-writer by contract: callers serialize execute() calls. The log
    is append-only, one entry per execute call.
    """

    user: str
    model: Model
    policy: Policy
    log: list[LogEntry] = field(default_factory=list)


def execute(session: Session, request: OpRequest) -> Outcome:
    """Check access, then apply; the model never changes on Deny or Reject."""
    rbac_op, target = resolve_request(request, session.model)
    decision = check_access(
        session.policy, session.model, session.user, rbac_op, target
    )
    if decision is Decision.DENY:
        outcome = Outcome(OutcomeStatus.DENIED)
    else:
        try:
            new_model = apply_request(request, session.model)
        except OvmRbacError as exc:
            outcome = Outcome(OutcomeStatus.REJECTED, error=exc)
        else:
            session.model = new_model
            outcome = Outcome(OutcomeStatus.APPLIED, model=new_model)
    session.log.append(LogEntry(request, decision, outcome))
    return outcome


# --- views ---------------------------------------------------------------------


@dataclass(frozen=True)
class OperationFilter:
    """Keeps permissions whose operation matches: any, read-like, or exact."""

    mode: str  # "any" | "read" | "exact"
    operation: str | None = None

    def allows(self, operation: str) -> bool:
        if self.mode == "any":
            return True
        if self.mode == "read":
            return operation in READ_LIKE_OPERATIONS
        return operation == self.operation


ANY_OPERATION = OperationFilter("any")
READ_LIKE = OperationFilter("read")


def exact_operation(operation: str) -> OperationFilter:
    return OperationFilter("exact", operation)


@dataclass(frozen=True, eq=True)
class ViewModel:
    """A role-specific projection of a model.

    Shaped like a model, plus the names of variation points that visible
    relations reference without any permission admitting them (stubs), and
    per-element provenance: which permissions admitted each element. A view
    makes no well-formedness claim of its own; it is an induced
    substructure of a valid model.
    """

    variation_points: frozenset[VariationPoint] = frozenset()
    variants: frozenset[Variant] = frozenset()
    dependencies: frozenset[Dependency] = frozenset()
    alt_groups: frozenset[AltGroup] = frozenset()
    constraints: frozenset[Constraint] = frozenset()
    vp_stubs: frozenset[str] = frozenset()
    provenance: Mapping[str, frozenset[Permission]] = field(default_factory=dict)

    def element_ids(self) -> frozenset[str]:
        """Canonical ids of every visible element (stubs excluded)."""
        ids: set[str] = set()
        for point in self.variation_points:
            ids.add(vp_object(point.name).text)
        for variant in self.variants:
            ids.add(variant_object(variant.name).text)
        for dep in self.dependencies:
            ids.add(dependency_object(dep.variant, dep.vp).text)
        for group in self.alt_groups:
            ids.add(alt_group_object(group.vp).text)
        for constraint in self.constraints:
            ids.add(
                constraint_object(
                    constraint.kind, constraint.source, constraint.target
                ).text
            )
        return frozenset(ids)


def _admitted_objects(
    permissions: frozenset[Permission], model: Model
) -> dict[ObjectId, set[Permission]]:
    present = element_object_ids(model)
    admitted: dict[ObjectId, set[Permission]] = {}
    for perm in permissions:
        if perm.object.is_category:
            covered = category_members(model, perm.object.category)
        elif perm.object in present:
            covered = {perm.object}
        else:
            covered = set()  # dangling element grant: inert
        for obj in covered:
            admitted.setdefault(obj, set()).add(perm)
    return admitted


def _build_view(
    admitted: dict[ObjectId, set[Permission]], model: Model
) -> ViewModel:
    points: set[VariationPoint] = set()
    variants: set[Variant] = set()
    dependencies: set[Dependency] = set()
    groups: set[AltGroup] = set()
    constraints: set[Constraint] = set()
    provenance: dict[str, set[Permission]] = {}

    def admit(obj_text: str, perms: set[Permission]) -> None:
        provenance.setdefault(obj_text, set()).update(perms)

    for obj, perms in admitted.items():
        parsed = obj.parts()
        if parsed.kind == "vp":
            kind = ovm.vp_kind(model, parsed.fields[0])
            points.add(VariationPoint(parsed.fields[0], kind))
        elif parsed.kind == "variant":
            variants.add(Variant(parsed.fields[0]))
        elif parsed.kind == "dep":
            variant, vp = parsed.fields
            dep = next(
                d
                for d in model.dependencies
                if d.variant == variant and d.vp == vp
            )
            dependencies.add(dep)
        elif parsed.kind == "altgroup":
            groups.add(next(g for g in model.alt_groups if g.vp == parsed.fields[0]))
        elif parsed.kind == "constraint":
            ckind, source, target = parsed.fields
            constraints.add(Constraint(ckind, source, target))
        admit(obj.text, perms)

    # Visible relations carry their variant endpoints along; variation-point
    # endpoints that no permission admits become stubs with the kind hidden.
    referenced_vps: set[str] = set()

    def pull_variant(name: str, perms: set[Permission]) -> None:
        variants.add(Variant(name))
        admit(variant_object(name).text, perms)

    for dep in dependencies:
        perms = provenance[dependency_object(dep.variant, dep.vp).text]
        pull_variant(dep.variant, perms)
        referenced_vps.add(dep.vp)
    for group in groups:
        perms = provenance[alt_group_object(group.vp).text]
        for member in group.variants:
            pull_variant(member, perms)
        referenced_vps.add(group.vp)
    for constraint in constraints:
        perms = provenance[
            constraint_object(
                constraint.kind, constraint.source, constraint.target
            ).text
        ]
        for ref in (constraint.source, constraint.target):
            if ref.universe is Universe.VARIANT:
                pull_variant(ref.name, perms)
            else:
                referenced_vps.add(ref.name)

    visible_vp_names = {p.name for p in points}
    stubs = frozenset(referenced_vps - visible_vp_names)
    return ViewModel(
        variation_points=frozenset(points),
        variants=frozenset(variants),
        dependencies=frozenset(dependencies),
        alt_groups=frozenset(groups),
        constraints=frozenset(constraints),
        vp_stubs=stubs,
        provenance={k: frozenset(v) for k, v in provenance.items()},
    )


def derive_view(
    policy: Policy,
    model: Model,
    role: str,
    op_filter: OperationFilter = ANY_OPERATION,
) -> ViewModel:
    """The information set a role's permissions admit, as a model projection.

    The role must be known and must have permissions assigned; a known role
    with an empty permission set raises NoPermissions as a distinct signal.
    """
    permissions = role_permissions(policy, role)
    if not permissions:
        raise NoPermissions(f"role {role!r} has no permissions assigned")
    surviving = frozenset(p for p in permissions if op_filter.allows(p.operation))
    return _build_view(_admitted_objects(surviving, model), model)


def union_views(first: ViewModel, second: ViewModel) -> ViewModel:
    provenance: dict[str, frozenset[Permission]] = dict(first.provenance)
    for key, perms in second.provenance.items():
        provenance[key] = provenance.get(key, frozenset()) | perms
    points = first.variation_points | second.variation_points
    visible_vp_names = {p.name for p in points}
    return ViewModel(
        variation_points=points,
        variants=first.variants | second.variants,
        dependencies=first.dependencies | second.dependencies,
        alt_groups=first.alt_groups | second.alt_groups,
        constraints=first.constraints | second.constraints,
        vp_stubs=(first.vp_stubs | second.vp_stubs) - visible_vp_names,
        provenance=provenance,
    )


def user_view(
    policy: Policy,
    model: Model,
    user: str,
    op_filter: OperationFilter = ANY_OPERATION,
) -> ViewModel:
    """Union of the views of every role assigned to the user."""
    if user not in policy.users:
        raise UnknownUser(f"user {user!r} is not registered")
    view = ViewModel()
    for role in sorted(assigned_roles(policy, user)):
        try:
            role_view = derive_view(policy, model, role, op_filter)
        except NoPermissions:
            continue
        view = union_views(view, role_view)
    return view
