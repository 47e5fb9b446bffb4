from ._wrinklelab import *  # noqa: F401,F403
