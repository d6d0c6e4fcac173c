"""Exception types shared across the package."""


class CombBlochError(Exception):
    """Base class for all package errors."""

    category = "error"


class ConfigError(CombBlochError):
    """Invalid, missing, or inconsistent configuration input."""

    category = "config"


class IntegrationFailureError(CombBlochError):
    """The integrator produced a non-finite state.

    Carries enough context (time, step, pulse index) to reproduce the
    failing step.
    """

    category = "integration"

    def __init__(self, message, *, time_s=None, step_s=None, pulse_index=None):
        parts = [message]
        if pulse_index is not None:
            parts.append(f"pulse_index={pulse_index}")
        if time_s is not None:
            parts.append(f"t={time_s!r} s")
        if step_s is not None:
            parts.append(f"h={step_s!r} s")
        super().__init__(" ".join(parts))
        self.time_s = time_s
        self.step_s = step_s
        self.pulse_index = pulse_index


class SpanGuardError(CombBlochError):
    """A brute-force run was refused because its span exceeds the guard."""

    category = "integration"


class InvariantViolationError(CombBlochError):
    """A state or result violated a physical invariant (trace, Hermiticity,
    positivity, bounds)."""

    category = "invariant"
