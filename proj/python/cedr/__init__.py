from ._cedr import *  # noqa: F401,F403
