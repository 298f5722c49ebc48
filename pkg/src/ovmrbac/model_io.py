"""Deterministic JSON persistence for models and policies, plus DOT export.

Documents are UTF-8 JSON with sorted keys and sorted list entries, so saving
the same value always yields the same bytes. Loading validates structure:
a document that parses but violates a structural invariant is rejected with
StructuralViolation naming the invariant. Excludes constraints are stored
once per unordered pair and re-closed to both directions on load.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import OvmRbacError, ParseError, StructuralViolation
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
    check_structure,
    list_alt_groups,
    list_constraints,
    list_dependencies,
    list_variants,
)
from .rbac import Permission, Policy, parse_object_id
from .session import ViewModel


def _endpoint_to_json(ref: EndpointRef) -> dict[str, str]:
    return {"universe": ref.universe.value, "name": ref.name}


def _canonical_excludes(constraint: Constraint) -> Constraint:
    reverse = constraint.reversed()
    if reverse.sort_key() < constraint.sort_key():
        return reverse
    return constraint


def model_to_document(model: Model) -> dict[str, Any]:
    constraints = []
    seen: set[Constraint] = set()
    for constraint in list_constraints(model):
        if constraint.kind is ConstraintKind.EXCLUDES:
            constraint = _canonical_excludes(constraint)
            if constraint in seen:
                continue
            seen.add(constraint)
        constraints.append(
            {
                "kind": constraint.kind.value,
                "from": _endpoint_to_json(constraint.source),
                "to": _endpoint_to_json(constraint.target),
            }
        )
    return {
        "variation_points": [
            {"name": point.name, "kind": point.kind.value}
            for point in sorted(model.variation_points, key=lambda p: (p.name, p.kind.value))
        ],
        "variants": list_variants(model),
        "dependencies": [
            {"variant": d.variant, "vp": d.vp, "kind": d.kind.value}
            for d in list_dependencies(model)
        ],
        "alt_groups": [
            {
                "vp": g.vp,
                "min": g.min_card,
                "max": g.max_card,
                "variants": sorted(g.variants),
            }
            for g in list_alt_groups(model)
        ],
        "constraints": constraints,
    }


def save_model(model: Model) -> str:
    return json.dumps(model_to_document(model), indent=2, sort_keys=True) + "\n"


def _load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise ParseError(message)


def _endpoint_from_json(data: Any, where: str) -> EndpointRef:
    _expect(isinstance(data, dict), f"{where}: endpoint must be an object")
    try:
        universe = Universe(data.get("universe"))
    except ValueError:
        raise ParseError(f"{where}: unknown universe {data.get('universe')!r}") from None
    name = data.get("name")
    _expect(isinstance(name, str), f"{where}: endpoint name must be a string")
    return EndpointRef(universe, name)


def _enum_value(enum_cls, raw, where: str):
    try:
        return enum_cls(raw)
    except ValueError:
        raise ParseError(f"{where}: unknown value {raw!r}") from None


def load_model(text: str) -> Model:
    """Parse a model document; reject structural-invariant violations."""
    data = _load_json(text)
    _expect(isinstance(data, dict), "model document must be a JSON object")
    for key in ("variation_points", "variants", "dependencies", "alt_groups",
                "constraints"):
        _expect(isinstance(data.get(key, []), list), f"{key} must be a list")
    try:
        points = set()
        for entry in data.get("variation_points", []):
            _expect(isinstance(entry, dict), "variation_points entries must be objects")
            kind = _enum_value(VariabilityKind, entry.get("kind"), "variation_points")
            points.add(VariationPoint(entry.get("name"), kind))
        variants = set()
        for name in data.get("variants", []):
            _expect(isinstance(name, str), "variants entries must be strings")
            variants.add(Variant(name))
        dependencies = set()
        for entry in data.get("dependencies", []):
            _expect(isinstance(entry, dict), "dependencies entries must be objects")
            kind = _enum_value(VariabilityKind, entry.get("kind"), "dependencies")
            dependencies.add(Dependency(entry.get("variant"), entry.get("vp"), kind))
        groups = set()
        for entry in data.get("alt_groups", []):
            _expect(isinstance(entry, dict), "alt_groups entries must be objects")
            members = entry.get("variants", [])
            _expect(isinstance(members, list), "alt_groups variants must be a list")
            _expect(
                isinstance(entry.get("min"), int) and isinstance(entry.get("max"), int),
                "alt_groups cardinalities must be integers",
            )
            groups.add(
                AltGroup(
                    frozenset(members), entry["min"], entry["max"], entry.get("vp")
                )
            )
        constraints = set()
        for entry in data.get("constraints", []):
            _expect(isinstance(entry, dict), "constraints entries must be objects")
            kind = _enum_value(ConstraintKind, entry.get("kind"), "constraints")
            source = _endpoint_from_json(entry.get("from"), "constraints")
            target = _endpoint_from_json(entry.get("to"), "constraints")
            constraint = Constraint(kind, source, target)
            constraints.add(constraint)
            if kind is ConstraintKind.EXCLUDES:
                constraints.add(constraint.reversed())
    except ParseError:
        raise
    except OvmRbacError as exc:
        raise StructuralViolation(str(exc)) from None
    model = Model(
        variation_points=frozenset(points),
        variants=frozenset(variants),
        dependencies=frozenset(dependencies),
        alt_groups=frozenset(groups),
        constraints=frozenset(constraints),
    )
    violations = check_structure(model)
    if violations:
        raise StructuralViolation(str(violations[0]))
    return model


def policy_to_document(policy: Policy) -> dict[str, Any]:
    grouped: dict[tuple[str, str], list[str]] = {}
    for perm, role in policy.permission_assignments:
        grouped.setdefault((role, perm.operation), []).append(perm.object.text)
    grants = [
        {"objects": sorted(objects), "operation": operation, "role": role}
        for (role, operation), objects in sorted(grouped.items())
    ]
    return {
        "users": sorted(policy.users),
        "roles": sorted(policy.roles),
        "operations": sorted(policy.operations),
        "user_assignments": [
            {"user": user, "role": role}
            for user, role in sorted(policy.user_assignments)
        ],
        "grants": grants,
    }


def save_policy(policy: Policy) -> str:
    return json.dumps(policy_to_document(policy), indent=2, sort_keys=True) + "\n"


def load_policy(text: str) -> Policy:
    """Parse a policy document; every reference must name a registered id."""
    data = _load_json(text)
    _expect(isinstance(data, dict), "policy document must be a JSON object")
    for key in ("user_assignments", "grants"):
        _expect(isinstance(data.get(key, []), list), f"{key} must be a list")
    for key in ("users", "roles", "operations"):
        _expect(isinstance(data.get(key, []), list), f"{key} must be a list")
        for value in data.get(key, []):
            _expect(isinstance(value, str), f"{key} entries must be strings")
    users = frozenset(data.get("users", []))
    roles = frozenset(data.get("roles", []))
    operations = frozenset(data.get("operations", []))

    assignments = set()
    for entry in data.get("user_assignments", []):
        _expect(isinstance(entry, dict), "user_assignments entries must be objects")
        user, role = entry.get("user"), entry.get("role")
        _expect(isinstance(user, str) and isinstance(role, str),
                "user_assignments entries need user and role strings")
        if user not in users:
            raise StructuralViolation(f"assignment names unregistered user {user!r}")
        if role not in roles:
            raise StructuralViolation(f"assignment names unregistered role {role!r}")
        assignments.add((user, role))

    grants = set()
    for entry in data.get("grants", []):
        _expect(isinstance(entry, dict), "grants entries must be objects")
        operation, role = entry.get("operation"), entry.get("role")
        _expect(isinstance(operation, str) and isinstance(role, str),
                "grants entries need operation and role strings")
        if role not in roles:
            raise StructuralViolation(f"grant names unregistered role {role!r}")
        if operation not in operations:
            raise StructuralViolation(
                f"grant names unregistered operation {operation!r}"
            )
        objects = entry.get("objects", [])
        _expect(isinstance(objects, list), "grant objects must be a list")
        for text in objects:
            _expect(isinstance(text, str), "grant objects must be strings")
            grants.add((Permission(parse_object_id(text), operation), role))

    return Policy(
        users=users,
        roles=roles,
        operations=operations,
        user_assignments=frozenset(assignments),
        permission_assignments=frozenset(grants),
    )


# --- DOT export -------------------------------------------------------------


def _quote(identifier: str) -> str:
    escaped = identifier.replace("\\", "\\\\").replace('"', '\\"')
    return f'"{escaped}"'


def _vp_node(name: str, kind: VariabilityKind | None, stub: bool = False) -> str:
    attrs = [f'label="VP\\n{name}"', "shape=triangle"]
    if kind is VariabilityKind.OPTIONAL:
        attrs.append("style=dashed")
    if stub:
        attrs.append("color=gray")
        attrs.append("fontcolor=gray")
    return f"  {_quote('vp:' + name)} [{', '.join(attrs)}];"


def _variant_node(name: str) -> str:
    return f"  {_quote('variant:' + name)} [label=\"V\\n{name}\", shape=box];"


def export_dot(model: Model, view: ViewModel | None = None) -> str:
    """Render the model (or a view of it) in the OVM shape conventions.

    Variation points are triangles, variants boxes; mandatory dependencies
    are solid edges, optional ones dashed; group edges carry the selection
    cardinality; requires is a dashed directed edge, excludes one dashed
    bidirectional edge per unordered pair. Views omit invisible elements
    and grey out stub variation points.
    """
    if view is None:
        points = model.variation_points
        variants = model.variants
        dependencies = model.dependencies
        groups = model.alt_groups
        constraints = model.constraints
        stubs: frozenset[str] = frozenset()
    else:
        points = view.variation_points
        variants = view.variants
        dependencies = view.dependencies
        groups = view.alt_groups
        constraints = view.constraints
        stubs = view.vp_stubs

    lines = ["digraph ovm {"]
    for point in sorted(points, key=lambda p: p.name):
        lines.append(_vp_node(point.name, point.kind))
    for name in sorted(stubs):
        lines.append(_vp_node(name, None, stub=True))
    for variant in sorted(variants, key=lambda v: v.name):
        lines.append(_variant_node(variant.name))

    for dep in sorted(dependencies, key=lambda d: (d.variant, d.vp)):
        style = "solid" if dep.kind is VariabilityKind.MANDATORY else "dashed"
        lines.append(
            f"  {_quote('variant:' + dep.variant)} -> {_quote('vp:' + dep.vp)} "
            f"[style={style}];"
        )
    for group in sorted(groups, key=lambda g: g.vp):
        label = f"[{group.min_card}..{group.max_card}]"
        for member in sorted(group.variants):
            lines.append(
                f"  {_quote('variant:' + member)} -> {_quote('vp:' + group.vp)} "
                f'[style=dashed, label="{label}"];'
            )

    drawn_excludes: set[Constraint] = set()
    for constraint in sorted(constraints, key=Constraint.sort_key):
        source = f"{constraint.source.universe.value}:{constraint.source.name}"
        target = f"{constraint.target.universe.value}:{constraint.target.name}"
        if constraint.kind is ConstraintKind.REQUIRES:
            lines.append(
                f"  {_quote(source)} -> {_quote(target)} "
                f'[style=dashed, label="requires"];'
            )
        else:
            canonical = _canonical_excludes(constraint)
            if canonical in drawn_excludes:
                continue
            drawn_excludes.add(canonical)
            src = f"{canonical.source.universe.value}:{canonical.source.name}"
            dst = f"{canonical.target.universe.value}:{canonical.target.name}"
            lines.append(
                f"  {_quote(src)} -> {_quote(dst)} "
                f'[style=dashed, dir=both, label="excludes"];'
            )
    lines.append("}")
    return "\n".join(lines) + "\n"
