class ResourceRefusal(RuntimeError):
    """A request that would exceed a configured resource budget."""


class EdgeBudgetExceeded(ResourceRefusal):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"enumeration needs {required} interior edges, budget is {budget}")


class MemoryBudgetExceeded(ResourceRefusal):
    def __init__(self, required: int, budget: int, advice: str = ""):
        self.required = required
        self.budget = budget
        msg = f"run needs ~{required / 2**30:.2f} GiB, budget is {budget / 2**30:.2f} GiB"
        super().__init__(f"{msg}; {advice}" if advice else msg)


class EstimationError(ValueError):
    """Not enough usable data to fit an estimator."""
