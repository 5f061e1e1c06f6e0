"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument is outside the domain an operation accepts."""


class ResourceLimitError(RuntimeError):
    """A requested table or enumeration exceeds the configured budget."""


# Default memory budget for sieved tables and coefficient arrays.
DEFAULT_MEMORY_BUDGET = 3 * 1024**3


def check_budget(n_bytes: int, what: str, budget: int | None = None) -> None:
    budget = DEFAULT_MEMORY_BUDGET if budget is None else budget
    if n_bytes > budget:
        raise ResourceLimitError(
            f"{what} needs ~{n_bytes / 1024**2:.0f} MiB, budget is {budget / 1024**2:.0f} MiB"
        )
