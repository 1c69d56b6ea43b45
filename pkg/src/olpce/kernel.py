"""Episode-engine selection: compiled extension when available, pure Python
otherwise.  Set OLPCE_PURE_PYTHON=1 to force the fallback."""

from __future__ import annotations

import os

if os.environ.get("OLPCE_PURE_PYTHON", "") not in ("", "0"):
    from . import _episode_py as engine
else:
    try:
        from . import _episode_kernel as engine  # type: ignore[no-redef]
    except ImportError:
        from . import _episode_py as engine  # type: ignore[no-redef]

IS_COMPILED: bool = bool(engine.IS_COMPILED)

price = engine.price
run_ce_m1 = engine.run_ce_m1
run_threshold_m1 = engine.run_threshold_m1

FAST_KINDS = {
    "MultisecretaryBeta": 0,
    "GapMultisecretary": 1,
    "TwoPointConsumption": 2,
    "UnitSquareShifted": 3,
}
