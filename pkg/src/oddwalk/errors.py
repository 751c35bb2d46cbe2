"""Exception hierarchy shared by all modules."""


class ChainError(ValueError):
    """Base class for invalid inputs or unusable chain instances."""


class InfeasibleParameters(ChainError):
    pass


class StateCapExceeded(ChainError):
    def __init__(self, cap: int):
        super().__init__(
            f"state space exceeds the cap of {cap} states; "
            "raise --max-states or choose a smaller instance"
        )
        self.cap = cap


class NotATransition(ChainError):
    def __init__(self, x: int, y: int):
        super().__init__(f"({x}, {y}) is not a transition of the chain")
        self.edge = (x, y)


class DetailedBalanceError(ChainError):
    pass


class MissingSelfLoop(ChainError):
    def __init__(self, state: int):
        super().__init__(f"state {state} has no self-loop (P(x,x) = 0)")
        self.state = state


class WalkError(ChainError):
    pass


class HypothesisViolation(ChainError):
    """A theorem hypothesis needed by a walk construction does not hold."""


class SolverError(RuntimeError):
    pass
