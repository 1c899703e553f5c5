"""Exception types raised by the toolkit."""


class ControlError(ValueError):
    """Base class for every error raised by digictl."""


class PoleHit(ControlError):
    pass


class DomainMismatch(ControlError):
    pass


class Degenerate(ControlError):
    pass


class ImproperPlant(ControlError):
    pass


class RepeatedPoleUnsupported(ControlError):
    pass


class BandViolation(ControlError):
    pass


class NyquistViolation(ControlError):
    pass


class NoSolution(ControlError):
    pass


class ConstraintViolated(ControlError):
    """A design precondition failed; ``constraint`` names which one."""

    def __init__(self, constraint, message):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint


class NegativeGain(ControlError):
    pass


class UnstableLoop(ControlError):
    def __init__(self, poles):
        self.poles = list(poles)
        listed = ", ".join(f"{p.real:.6g}{p.imag:+.6g}j" for p in self.poles)
        super().__init__(f"closed loop has poles outside the unit circle: {listed}")


class NotSettled(ControlError):
    pass
