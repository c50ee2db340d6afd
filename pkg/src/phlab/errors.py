"""Exception taxonomy for the pseudohermitian laboratory.

Every failure mode that geometry code can hit maps to one of these classes so
callers (and the CLI harness) can report actionable diagnostics instead of
bare linear-algebra errors.
"""
from __future__ import annotations


class PhlabError(Exception):
    """Base class for all laboratory errors."""


class InvalidArgument(PhlabError, ValueError):
    """Caller passed data that violates an interface contract."""


class DomainError(PhlabError):
    """A point (or a stencil/trajectory around it) left the chart domain."""


class DegenerateContact(PhlabError):
    """The contact condition fails: the Reeb solve is singular at the point."""


class NotStrictlyPseudoconvex(PhlabError):
    """The Levi form is not positive definite at the point."""


class AxiomSystemDegenerate(PhlabError):
    """The connection axiom system lost rank; no unique solution exists."""


class InconsistentAxioms(PhlabError):
    """The connection axiom system is overdetermined-inconsistent: the
    least-squares residual exceeds tolerance."""


class TrajectoryLeftDomain(DomainError):
    """An integrated curve exited the chart; carries the exit state."""

    def __init__(self, message: str, state=None):
        super().__init__(message)
        self.state = state


class NotHorizontal(InvalidArgument):
    """A vector required to lie in the maximal complex distribution does not."""


class PreconditionFailed(PhlabError):
    """A check was invoked on a model that does not satisfy its hypothesis
    (for example, a constant-curvature comparison on a model whose sectional
    curvature actually varies)."""


class NoisyExtrapolation(UserWarning):
    """A small-radius extrapolation had a fit residual above the trust level."""
