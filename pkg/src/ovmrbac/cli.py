"""Command-line front end: validate, apply, grant, assign, check, view, render.

Exit codes: 0 success (or Allow), 1 Deny / violations found / empty view,
2 usage, parse, or I/O error, 3 operation rejected by a model precondition.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import fixture, model_io, rbac
from .errors import (
    NoPermissions,
    OvmRbacError,
    ParseError,
    StructuralViolation,
    UnknownRole,
    UnknownUser,
)
from .model import (
    ConstraintKind,
    EndpointRef,
    Model,
    Universe,
    VariabilityKind,
    validate_model,
)
from .rbac import Decision, ObjectId, check_access, role_permissions
from .session import (
    ANY_OPERATION,
    OperationFilter,
    OpRequest,
    OutcomeStatus,
    READ_LIKE,
    Session,
    ViewModel,
    derive_view,
    exact_operation,
    execute,
    user_view,
)

EXIT_OK = 0
EXIT_DENIED = 1
EXIT_USAGE = 2
EXIT_REJECTED = 3


def _fail(message: str, code: int = EXIT_USAGE) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _parse_endpoint(text: str) -> EndpointRef:
    universe, sep, name = text.partition(":")
    if not sep or universe not in ("variant", "vp"):
        raise ValueError(
            f"endpoint {text!r} must look like variant:<name> or vp:<name>"
        )
    return EndpointRef(Universe(universe), name)


def _parse_kind(text: str) -> VariabilityKind:
    try:
        return VariabilityKind(text)
    except ValueError:
        raise ValueError(f"kind must be mandatory or optional, got {text!r}") from None


def request_from_args(op: str, raw: list[str]) -> OpRequest:
    """Build a request from command-line strings, validating arity."""
    def need(count: int, usage: str) -> None:
        if len(raw) != count:
            raise ValueError(f"--op {op} expects {usage}")

    if op in ("addManVP", "addOptVP", "removeManVP", "removeOptVP",
              "addVariant", "removeVariant", "removeAltGroup"):
        need(1, "one name argument")
        return OpRequest(op, (raw[0],))
    if op == "addDependency":
        need(3, "VARIANT VP KIND")
        return OpRequest(op, (raw[0], raw[1], _parse_kind(raw[2])))
    if op == "removeDependency":
        need(2, "VARIANT VP")
        return OpRequest(op, (raw[0], raw[1]))
    if op == "addAltGroup":
        if len(raw) < 5:
            raise ValueError("--op addAltGroup expects VP MIN MAX VARIANT VARIANT...")
        try:
            min_card, max_card = int(raw[1]), int(raw[2])
        except ValueError:
            raise ValueError("group cardinalities must be integers") from None
        return OpRequest(op, (frozenset(raw[3:]), min_card, max_card, raw[0]))
    if op in ("addConstraint", "removeConstraint"):
        need(3, "KIND FROM TO (endpoints as variant:<name> or vp:<name>)")
        try:
            kind = ConstraintKind(raw[0])
        except ValueError:
            raise ValueError(
                f"constraint kind must be requires or excludes, got {raw[0]!r}"
            ) from None
        return OpRequest(op, (kind, _parse_endpoint(raw[1]), _parse_endpoint(raw[2])))
    raise ValueError(f"unknown operation {op!r}")


def _parse_filter(text: str) -> OperationFilter:
    if text == "any":
        return ANY_OPERATION
    if text == "read":
        return READ_LIKE
    if text.startswith("op:"):
        return exact_operation(text[3:])
    raise ValueError(f"filter must be any, read, or op:<id>, got {text!r}")


def _view_document(view: ViewModel) -> dict:
    # a view is model-shaped; reuse the model encoder for the shared part
    doc = model_io.model_to_document(
        Model(
            variation_points=view.variation_points,
            variants=view.variants,
            dependencies=view.dependencies,
            alt_groups=view.alt_groups,
            constraints=view.constraints,
        )
    )
    doc["vp_stubs"] = sorted(view.vp_stubs)
    doc["provenance"] = {
        element: [
            {"object": p.object.text, "operation": p.operation}
            for p in sorted(perms, key=rbac.Permission.sort_key)
        ]
        for element, perms in sorted(view.provenance.items())
    }
    return doc


def cmd_init_example(args: argparse.Namespace) -> int:
    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "model.json").write_text(
            model_io.save_model(fixture.build_example_model()), encoding="utf-8"
        )
        (out_dir / "policy.json").write_text(
            model_io.save_policy(fixture.build_example_policy()), encoding="utf-8"
        )
    except OSError as exc:
        return _fail(f"cannot write to {out_dir}: {exc.strerror}")
    if args.explain:
        print(fixture.explain_normalization(), end="")
    print(f"wrote {out_dir / 'model.json'} and {out_dir / 'policy.json'}")
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    model = model_io.load_model(_read(args.model))
    violations = validate_model(model)
    for violation in violations:
        print(violation)
    return EXIT_OK if not violations else EXIT_DENIED


def cmd_apply(args: argparse.Namespace) -> int:
    model = model_io.load_model(_read(args.model))
    policy = model_io.load_policy(_read(args.policy))
    try:
        request = request_from_args(args.op[0], args.op[1:])
    except (ValueError, OvmRbacError) as exc:
        return _fail(str(exc))
    session = Session(user=args.user, model=model, policy=policy)
    outcome = execute(session, request)
    print(session.log[-1].render())
    if outcome.status is OutcomeStatus.DENIED:
        return EXIT_DENIED
    if outcome.status is OutcomeStatus.REJECTED:
        return EXIT_REJECTED
    Path(args.model).write_text(
        model_io.save_model(session.model), encoding="utf-8"
    )
    return EXIT_OK


def cmd_grant(args: argparse.Namespace) -> int:
    policy = model_io.load_policy(_read(args.policy))
    try:
        objects = [ObjectId(text) for text in args.objects]
        policy = rbac.grant_permission2(policy, objects, args.op, args.role)
    except (UnknownRole, OvmRbacError) as exc:
        return _fail(str(exc))
    Path(args.policy).write_text(model_io.save_policy(policy), encoding="utf-8")
    print(f"granted {args.op} on {len(args.objects)} object(s) to {args.role}")
    return EXIT_OK


def cmd_assign(args: argparse.Namespace) -> int:
    policy = model_io.load_policy(_read(args.policy))
    try:
        policy = rbac.assign_user(policy, args.user, args.role)
    except OvmRbacError as exc:
        return _fail(str(exc))
    Path(args.policy).write_text(model_io.save_policy(policy), encoding="utf-8")
    print(f"assigned {args.user} to {args.role}")
    return EXIT_OK


def cmd_check(args: argparse.Namespace) -> int:
    model = model_io.load_model(_read(args.model))
    policy = model_io.load_policy(_read(args.policy))
    obj = ObjectId(args.object)
    decision = check_access(policy, model, args.user, args.op, obj)
    print("Allow" if decision is Decision.ALLOW else "Deny")
    return EXIT_OK if decision is Decision.ALLOW else EXIT_DENIED


def cmd_view(args: argparse.Namespace) -> int:
    model = model_io.load_model(_read(args.model))
    policy = model_io.load_policy(_read(args.policy))
    try:
        op_filter = _parse_filter(args.filter)
    except ValueError as exc:
        return _fail(str(exc))
    try:
        if args.role is not None:
            permissions = sorted(
                role_permissions(policy, args.role), key=rbac.Permission.sort_key
            )
            view = derive_view(policy, model, args.role, op_filter)
        else:
            permissions = sorted(
                {
                    perm
                    for role in rbac.assigned_roles(policy, args.user)
                    for perm in role_permissions(policy, role)
                },
                key=rbac.Permission.sort_key,
            )
            view = user_view(policy, model, args.user, op_filter)
    except NoPermissions as exc:
        return _fail(str(exc), EXIT_DENIED)
    except (UnknownRole, UnknownUser) as exc:
        return _fail(str(exc))
    document = {
        "subject": args.role if args.role is not None else args.user,
        "filter": args.filter,
        "permissions": [
            {"object": p.object.text, "operation": p.operation} for p in permissions
        ],
        "view": _view_document(view),
    }
    print(json.dumps(document, indent=2, sort_keys=True))
    if args.dot is not None:
        Path(args.dot).write_text(model_io.export_dot(model, view), encoding="utf-8")
    return EXIT_OK


def cmd_render(args: argparse.Namespace) -> int:
    model = model_io.load_model(_read(args.model))
    print(model_io.export_dot(model), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ovmrbac",
        description="Variability models under role-based access control.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("init-example", help="write the bundled example documents")
    p.add_argument("out_dir")
    p.add_argument("--explain", action="store_true",
                   help="print the normalization table")
    p.set_defaults(func=cmd_init_example)

    p = sub.add_parser("validate", help="report model violations, one per line")
    p.add_argument("model")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("apply", help="run one access-checked model operation")
    p.add_argument("model")
    p.add_argument("policy")
    p.add_argument("--user", required=True)
    p.add_argument("--op", nargs="+", required=True, metavar=("OP", "ARG"),
                   help="operation name followed by its arguments")
    p.set_defaults(func=cmd_apply)

    p = sub.add_parser("grant", help="grant an operation on objects to a role")
    p.add_argument("policy")
    p.add_argument("--objects", nargs="+", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--role", required=True)
    p.set_defaults(func=cmd_grant)

    p = sub.add_parser("assign", help="assign a role to a user")
    p.add_argument("policy")
    p.add_argument("--user", required=True)
    p.add_argument("--role", required=True)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("check", help="print the access decision for one request")
    p.add_argument("model")
    p.add_argument("policy")
    p.add_argument("--user", required=True)
    p.add_argument("--op", required=True)
    p.add_argument("--object", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("view", help="derive a role- or user-specific view")
    p.add_argument("model")
    p.add_argument("policy")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--role")
    group.add_argument("--user")
    p.add_argument("--filter", default="any",
                   help="any, read, or op:<operation id>")
    p.add_argument("--dot", help="also write a DOT rendering to this path")
    p.set_defaults(func=cmd_view)

    p = sub.add_parser("render", help="print the model as DOT graph text")
    p.add_argument("model")
    p.set_defaults(func=cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, StructuralViolation) as exc:
        return _fail(str(exc))
    except OvmRbacError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
