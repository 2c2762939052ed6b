"""Physical constants and default model parameters (atomic units).

Everything internal runs in Hartree atomic units.  Human-facing config
accepts the barrier height in eV and the gap in nm; conversions live here.
"""

import math

HARTREE_EV = 27.211386          # 1 hartree in eV
BOHR_NM = 0.0529177211          # 1 bohr in nm

# Mid-infrared drive, ~1.6 um.
OMEGA_DEFAULT = 0.0285

# Single-photon field scale of the cavity mode, sqrt(2) * 1e-8 a.u.
FIELD_SCALE_DEFAULT = math.sqrt(2.0) * 1e-8

# Metal-vacuum-metal junction defaults: 5 eV work function, 3 nm gap.
DELTA_U_EV_DEFAULT = 5.0
GAP_NM_DEFAULT = 3.0


def ev_to_hartree(e_ev: float) -> float:
    return e_ev / HARTREE_EV


def nm_to_bohr(d_nm: float) -> float:
    return d_nm / BOHR_NM
