#  Copyright (c) 2026. The LifecycleLib authors
#  This file is part of the LifecycleLib project which is released under the MIT license.

from importlib.metadata import version

from semantic_version_check import version_check


def test_version() -> None:
    __version__ = version("lifecyclelib")
    assert version_check(__version__)
