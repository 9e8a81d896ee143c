"""L-functions of Dirichlet characters and of level-one eigenforms."""

from .dirichlet import (LValue, L_derivative, completed_L, dirichlet_L, hurwitz_zeta,
                        hurwitz_zeta_derivative, riemann_zeta, root_number)
from .modular import (EigenformQExpansion, eigenform_qexpansion, modular_L,
                      root_number_for, twisted_root_number)

__all__ = [
    "LValue", "L_derivative", "completed_L", "dirichlet_L", "hurwitz_zeta",
    "hurwitz_zeta_derivative", "riemann_zeta", "root_number",
    "EigenformQExpansion", "eigenform_qexpansion", "modular_L", "root_number_for",
    "twisted_root_number",
]
