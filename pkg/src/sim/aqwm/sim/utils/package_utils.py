import logging
from importlib.metadata import PackageNotFoundError, version

LOG = logging.getLogger(__name__)

DISTRIBUTION = "aqwm-sim"


def get_version() -> str:
    """Installed version of the simulator, empty when running from a plain checkout"""
    try:
        return str(version(DISTRIBUTION))
    except PackageNotFoundError:
        LOG.debug("%s is not installed, no version available", DISTRIBUTION)
        return ""
