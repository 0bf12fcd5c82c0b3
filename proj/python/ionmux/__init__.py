"""Multiplexed ion-photon entanglement rate model (C++ core)."""

import os as _os

_here = _os.path.dirname(__file__)
if "IONMUX_PRESET_DIR" not in _os.environ and _os.path.isdir(_os.path.join(_here, "presets")):
    _os.environ["IONMUX_PRESET_DIR"] = _os.path.join(_here, "presets")

from ._ionmux import *  # noqa: E402,F401,F403
from ._ionmux import __version__  # noqa: E402,F401
