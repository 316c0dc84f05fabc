"""Exception hierarchy shared across the toolkit."""


class FormbenchError(Exception):
    """Base class for all toolkit errors."""


class PoolError(FormbenchError):
    """Malformed or invariant-violating field pool input."""


class SamplingError(FormbenchError):
    """Invalid sampling request (pool too small, bad range)."""


class RenderError(FormbenchError):
    """Form rendering failure (unknown style, empty field list)."""


class ScenarioError(FormbenchError):
    """Malformed or invariant-violating test scenario."""


class MutationError(FormbenchError):
    """Requested mutation is inapplicable to the given form/script."""


class DialectError(FormbenchError):
    """Unknown script dialect or missing emitter/checker/runner."""


class InfrastructureError(FormbenchError):
    """Environment failure distinct from a script failure: unreachable
    browser endpoint, missing checker binary, server not started."""
