try:
    from ._ddbst import *  # noqa: F401,F403
    from ._ddbst import __version__  # noqa: F401
except ImportError:  # in-tree build: the extension sits next to this package
    from _ddbst import *  # type: ignore  # noqa: F401,F403
    from _ddbst import __version__  # type: ignore  # noqa: F401
