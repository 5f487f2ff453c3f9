"""Pure-numpy implementation of the hot grid kernel.

Same contract as the compiled variant in ``_kernels_cy``; see
:mod:`.kernels` for selection.  Group quantities are broadcast against the
flux grid, so memory scales as ``n_groups * n_points``.
"""

import numpy as np

BACKEND = "numpy"


def susceptibility_grid(flux, counts, delta, current, g_bare, gamma_phi, omega, eps_coef):
    """Summed complex qubit susceptibility over a flux grid.

    For each group ``g`` and flux point ``x``::

        eps    = eps_coef * current[g] * x
        E      = sqrt(delta[g]**2 + eps**2)
        det    = E - omega
        g_eps2 = (delta[g]/E * g_bare[g])**2
        S(x)  += counts[g] * g_eps2 * (gamma_phi[g] - 1j*det)
                 / (gamma_phi[g]**2 + det**2)

    ``eps_coef`` is ``2*Phi0/hbar``.  ``gamma_phi[g] == 0`` selects the purely
    dispersive response ``-1j * counts*g_eps2/det`` (caller must keep
    ``det != 0`` there).  Returns a complex128 array over the grid.
    """
    x = np.asarray(flux, dtype=np.float64)[None, :]
    delta = np.asarray(delta, dtype=np.float64)[:, None]
    gamma = np.asarray(gamma_phi, dtype=np.float64)[:, None]
    eps = eps_coef * np.asarray(current, dtype=np.float64)[:, None] * x
    energy = np.hypot(delta, eps)
    det = energy - omega
    g_eps2 = (delta / energy * np.asarray(g_bare, dtype=np.float64)[:, None]) ** 2
    weight = np.asarray(counts, dtype=np.float64)[:, None] * g_eps2 / (
        gamma**2 + det**2
    )
    return np.sum(weight * gamma, axis=0) - 1j * np.sum(weight * det, axis=0)
