"""Federated identity provisioning gateway: attribute mapping, entitlement
parsing, idempotent backend provisioning and a login workflow simulator."""

from fedprov._core import *  # noqa: F401,F403
from fedprov._core import __version__  # noqa: F401
