"""shuttlesim"""
try:
    from importlib.metadata import version as _version, PackageNotFoundError
except ImportError:
    from pkg_resources import get_distribution, \
        DistributionNotFound as PackageNotFoundError

    def _version(name):
        return get_distribution(name).version


__docformat__ = 'restructuredtext en'


try:
    __version__ = _version(__name__)
except PackageNotFoundError:
    # package is not installed
    __version__ = 'UNKNOWN'


from . import core  # noqa: F401
from . import schedule  # noqa: F401
from . import engine  # noqa: F401
from . import algorithms  # noqa: F401
from . import oracle  # noqa: F401
from . import generators  # noqa: F401
from . import bench  # noqa: F401
from . import utils  # noqa: F401
