"""Kernel selection: compiled extension when available, pure Python otherwise.

Both backends expose the same functions with the same floating-point
behavior; ``KERNEL_BACKEND`` says which one won.  Set GROVERSIM_PURE_PYTHON=1
to force the fallback.  Import the backends directly
(``groversim._kernels``, ``groversim._kernels_py``) to compare them side
by side, as ``benchmarks/compare_kernels.py`` does.
"""
from __future__ import annotations

import os

if os.environ.get("GROVERSIM_PURE_PYTHON") == "1":
    from . import _kernels_py as _impl

    KERNEL_BACKEND = "python"
else:
    try:
        from . import _kernels as _impl

        KERNEL_BACKEND = "compiled"
    except ImportError:  # extension not built; fall back to the reference twin
        from . import _kernels_py as _impl

        KERNEL_BACKEND = "python"

ud_steps = _impl.ud_steps
best_of_steps = _impl.best_of_steps
run_until_turnover = _impl.run_until_turnover
apply_sp_on_demand = _impl.apply_sp_on_demand
apply_ent_on_demand = _impl.apply_ent_on_demand
apply_int_on_demand = _impl.apply_int_on_demand
