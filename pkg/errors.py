#!/usr/bin/env python3
"""
Exception hierarchy shared by all gptkit modules.
"""

from typing import List, Optional


class GptkitError(Exception):
    """Base class for every error raised by gptkit."""


class ConfigurationError(GptkitError):
    """Bad environment configuration."""


class InputError(GptkitError):
    """A user-supplied document or argument is unusable."""


class ParseError(InputError):
    """Malformed rational or document."""


class SchemaError(InputError):
    """Document does not follow the expected structure."""


class UnknownReferenceError(InputError):
    """A name refers to no measurement, state or context."""


class ValidationError(GptkitError):
    """A theory or behavior violates its invariants."""

    def __init__(self, message: str, violations: Optional[List[str]] = None):
        super().__init__(message)
        self.violations = list(violations or [])


class MixtureError(InputError):
    """Mixture weights are negative, unnormalized or refer to unknown states."""


class NonUniformOutcomesError(InputError):
    """A formula needs a single outcome count but the theory mixes several."""


class NotRegularError(GptkitError):
    """Some measurement outcome has no eigenstate."""


class GuardExceededError(GptkitError):
    """An enumeration or search would exceed its configured limit."""


class InfeasibleError(GptkitError):
    """An optimization was asked of an infeasible system."""

    def __init__(self, message: str, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class UnboundedError(GptkitError):
    """The objective is unbounded over the feasible set."""


class IncompleteRulesError(InputError):
    """Disturbance rules do not cover every measurement and pure state."""


class InconsistentRulesError(GptkitError):
    """Disturbance rules map equivalent mixtures to different states."""


class DecompositionError(InputError):
    """Ontic decompositions do not reproduce the operational states."""


class IntransitiveError(GptkitError):
    """A congruence relation used as a partition is not transitive."""


class MarginalMismatchError(InputError):
    """Input distributions disagree on shared marginals."""


class ZeroDenominatorError(GptkitError):
    """A conditional construction divides by a zero probability."""


class MissingContextError(InputError):
    """A behavior lacks a context the evaluation needs."""


class PartnerMismatchError(InputError):
    """Configurations offered as partners are not the expected orbit."""
