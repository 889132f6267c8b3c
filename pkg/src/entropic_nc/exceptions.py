"""Exception hierarchy. Every error derives from ``ContextualityError`` (a ValueError)."""


class ContextualityError(ValueError):
    pass


class ZeroVector(ContextualityError):
    pass


class CyclicityViolation(ContextualityError):
    """Adjacent directions ``v_i`` and ``v_{i+1}`` are not orthogonal.

    ``pair`` holds the 1-based indices of the offending pair, e.g. ``(5, 1)``.
    """

    def __init__(self, index, overlap, n=5):
        self.index = index
        self.pair = (index, index % n + 1)
        self.overlap = overlap
        super().__init__(
            f"directions v{self.pair[0]} and v{self.pair[1]} are not orthogonal: "
            f"|<v{self.pair[0]}|v{self.pair[1]}>| = {overlap:.3e}"
        )


class DegenerateState(ContextualityError):
    pass


class InvalidDistribution(ContextualityError):
    pass


class OutOfRange(ContextualityError):
    pass


class ExclusivityViolation(ContextualityError):
    pass


class MalformedTargets(ContextualityError):
    pass


class ConfigError(ContextualityError):
    pass
