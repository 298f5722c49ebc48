"""Exception taxonomy shared by the model, policy, and persistence layers."""

from __future__ import annotations


class OvmRbacError(Exception):
    """Base class for every error raised by this package."""


class InvalidName(OvmRbacError):
    """An element or registry name violates the naming rules."""


# --- variability-model operation failures ---------------------------------

class DuplicateElement(OvmRbacError):
    """The name to be added is already present in its universe."""


class NotFound(OvmRbacError):
    """The referenced element or relation does not exist."""


class ElementInUse(OvmRbacError):
    """Removal blocked: the element still participates in a relation.

    ``blockers`` lists every dependency, group, or constraint that holds
    the element in place.
    """

    def __init__(self, message: str, blockers: tuple[str, ...] = ()):
        super().__init__(message)
        self.blockers = blockers


class VariantAlreadyBound(OvmRbacError):
    """The variant already has a variability dependency (relation or group)."""


class CardinalityInvalid(OvmRbacError):
    """Alternative-group cardinalities violate min <= max <= group size >= 2."""


class SelfConstraint(OvmRbacError):
    """A constraint may not relate an element to itself."""


class ConstraintConflict(OvmRbacError):
    """The ordered endpoint pair is already claimed by a constraint set."""


class GroupExists(OvmRbacError):
    """The variation point already owns an alternative group."""


# --- policy operation failures ---------------------------------------------

class DuplicateId(OvmRbacError):
    """The user or role id is already registered."""


class UnknownUser(OvmRbacError):
    """The user id is not registered."""


class UnknownRole(OvmRbacError):
    """The role id is not registered."""


class UnknownOperation(OvmRbacError):
    """The operation id is not registered."""


class AlreadyAssigned(OvmRbacError):
    """The (user, role) pair is already in the assignment relation."""


class NotAssigned(OvmRbacError):
    """The (user, role) pair is not in the assignment relation."""


class NotGranted(OvmRbacError):
    """No matching permission assignment exists to revoke."""


class NoPermissions(OvmRbacError):
    """The role is known but has no permissions assigned."""


# --- persistence failures ---------------------------------------------------

class ParseError(OvmRbacError):
    """A document or identifier could not be parsed; message carries position."""


class StructuralViolation(OvmRbacError):
    """A loaded document describes a state violating a structural invariant."""
