"""Kernel dispatch: compiled extension when available, pure Python otherwise.

Set SUBMINIMAL_PURE=1 to force the fallback even when the extension is
built; BACKEND records which implementation won.
"""

import os

from subminimal.kernels.ops import (
    OP_AND,
    OP_BBOX,
    OP_BOT,
    OP_BOX,
    OP_IMP,
    OP_NEG,
    OP_OR,
    OP_TOP,
    OP_VAR,
)

if os.environ.get("SUBMINIMAL_PURE") == "1":
    from subminimal.kernels import pure as _impl

    BACKEND = "pure"
else:
    try:
        from subminimal.kernels import _core as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:
        from subminimal.kernels import pure as _impl

        BACKEND = "pure"

eval_prop = _impl.eval_prop
eval_modal = _impl.eval_modal
find_refuting_valuation_prop = _impl.find_refuting_valuation_prop
find_refuting_valuation_modal = _impl.find_refuting_valuation_modal
locality_violation = _impl.locality_violation
ns4_table_violation = _impl.ns4_table_violation
lift_table = _impl.lift_table
translation_gap = _impl.translation_gap
en_holds = _impl.en_holds
rn_holds = _impl.rn_holds
search_order_onto = _impl.search_order_onto
search_positive_morphism = _impl.search_positive_morphism

__all__ = [
    "BACKEND",
    "OP_AND",
    "OP_BBOX",
    "OP_BOT",
    "OP_BOX",
    "OP_IMP",
    "OP_NEG",
    "OP_OR",
    "OP_TOP",
    "OP_VAR",
    "eval_prop",
    "eval_modal",
    "find_refuting_valuation_prop",
    "find_refuting_valuation_modal",
    "locality_violation",
    "ns4_table_violation",
    "lift_table",
    "translation_gap",
    "en_holds",
    "rn_holds",
    "search_order_onto",
    "search_positive_morphism",
]
