"""Subminimal logics of negation: semantics, filtration, duality, companions.

The library works with four logics ordered by strength (N, NeF, CoPC,
MPC), their Kripke-style N-frame semantics on finite posets, model
filtrations, the finite algebra/frame duality, the Delta antichain of
posets, and the bimodal NS4/CoS4 companions under the extended Godel
translation.
"""

__version__ = "0.1.0"

from subminimal.kernels import BACKEND

__all__ = ["BACKEND", "__version__"]
