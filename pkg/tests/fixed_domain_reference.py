"""Independent fixed-domain reference solver used as a test oracle.

Solves the two-species reaction-diffusion system on a frozen interval
(0, l) with homogeneous Dirichlet ends by the method of lines: standard
second-order Laplacian in space, SciPy's implicit BDF integrator in time
with tight tolerances.  Shares no time-stepping code with the production
front-fixed integrator.
"""

import numpy as np
from scipy.integrate import solve_ivp


def solve_fixed_domain(params, nl, u0, v0, l, t_end, rtol=1e-10, atol=1e-12):
    """Return (u, v) samples at t_end on the same n+1 node grid as u0/v0."""
    n = len(u0) - 1
    dx = l / n

    def rhs(_t, w):
        u = w[: n - 1]
        v = w[n - 1:]
        uu = np.concatenate(([0.0], u, [0.0]))
        vv = np.concatenate(([0.0], v, [0.0]))
        lap_u = (uu[:-2] - 2.0 * uu[1:-1] + uu[2:]) / dx ** 2
        lap_v = (vv[:-2] - 2.0 * vv[1:-1] + vv[2:]) / dx ** 2
        du = params.d1 * lap_u - params.a * u + nl.H(v)
        dv = params.d2 * lap_v - params.b * v + nl.G(u)
        return np.concatenate((du, dv))

    w0 = np.concatenate((u0[1:n], v0[1:n]))
    sol = solve_ivp(rhs, (0.0, t_end), w0, method="BDF", rtol=rtol, atol=atol)
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    u[1:n] = sol.y[: n - 1, -1]
    v[1:n] = sol.y[n - 1:, -1]
    return u, v
