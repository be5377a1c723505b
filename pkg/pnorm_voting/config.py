import os
from dataclasses import dataclass
from typing import Mapping, Optional

from pnorm_voting.core import ElectionError

MAX_COMMITTEES_ENV = "PNORM_VOTING_MAX_COMMITTEES"
CHUNK_SIZE_ENV = "PNORM_VOTING_CHUNK_SIZE"


@dataclass(frozen=True)
class Settings:
    """Tunables shared by the solvers.

    Attributes:
        max_committees: Largest C(n, k) that exact enumeration will visit.
        chunk_size: Number of committees evaluated per numpy batch.
        tolerance: Relative tolerance under which two finite-p scores are
            re-checked instead of trusted.
        exact_power_limit: Largest integer p for which near ties are settled
            with exact integer power sums.
    """

    max_committees: int = 10 ** 7
    chunk_size: int = 4096
    tolerance: float = 1e-12
    exact_power_limit: int = 64


def _positive_int(environ: Mapping[str, str], name: str, default: int) -> int:
    raw = environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw.replace("_", ""))
    except ValueError:
        raise ElectionError(f"{name} must be an integer, got {raw!r}.")
    if value < 1:
        raise ElectionError(f"{name} must be positive, got {value}.")
    return value


def load_settings(environ: Optional[Mapping[str, str]] = None) -> Settings:
    """Builds settings from the environment.

    Args:
        environ (optional): Mapping to read from. Defaults to `os.environ`.

    Returns:
        Settings with environment overrides applied.

    Raises:
        ElectionError: An override is not a positive integer.
    """
    if environ is None:
        environ = os.environ
    defaults = Settings()
    return Settings(
        max_committees=_positive_int(
            environ, MAX_COMMITTEES_ENV, defaults.max_committees
        ),
        chunk_size=_positive_int(environ, CHUNK_SIZE_ENV, defaults.chunk_size),
    )
