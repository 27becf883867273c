import os

from .exceptions import CapacityError

#: Default ceiling on r**n for any operation that enumerates the cube.
DEFAULT_MAX_POINTS = 2**22
MAX_POINTS_ENV = "LOCALTAIL_MAX_POINTS"

IDENTITY_RTOL = 1e-10
INEQUALITY_SLACK = 1e-9


def max_points():
    raw = os.environ.get(MAX_POINTS_ENV)
    if raw is None or raw.strip() == "":
        return DEFAULT_MAX_POINTS
    return int(raw)


def check_capacity(r, n, limit=None):
    """Raise :class:`CapacityError` if ``r**n`` exceeds the point budget."""
    limit = max_points() if limit is None else limit
    size = r**n
    if size > limit:
        raise CapacityError(
            f"enumerating {r}^{n} = {size} points exceeds the limit of {limit} "
            f"(set {MAX_POINTS_ENV} to raise it)"
        )
    return size
