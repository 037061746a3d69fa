"""Pure-Python Numerov kernels (fallback for the compiled core).

Both kernels integrate ``u'' = g u`` on a uniform mesh given the Numerov
weights ``f = 1 - h^2 g / 12``.  The recursion is

    f[i+1] u[i+1] = (12 - 10 f[i]) u[i] - f[i-1] u[i-1]
"""

import numpy as np

RESCALE_AT = 1e150


def shoot(f, u0, u1):
    """Return ``(u[-1], sign_changes)`` without storing the trajectory."""
    f = f.tolist() if hasattr(f, "tolist") else list(f)
    n = len(f)
    up, uc = float(u0), float(u1)
    nodes = 0
    last_sign = (uc > 0) - (uc < 0) or (up > 0) - (up < 0)
    fp, fc = f[0], f[1]
    for i in range(1, n - 1):
        fn = f[i + 1]
        un = ((12.0 - 10.0 * fc) * uc - fp * up) / fn
        if un > RESCALE_AT or un < -RESCALE_AT:
            uc /= RESCALE_AT
            un /= RESCALE_AT
        sign = (un > 0) - (un < 0)
        if sign:
            if last_sign and sign != last_sign:
                nodes += 1
            last_sign = sign
        up, uc = uc, un
        fp, fc = fc, fn
    return uc, nodes


def profile(f, u0, u1):
    """Full trajectory; earlier samples are rescaled along with the tail."""
    fl = f.tolist() if hasattr(f, "tolist") else list(f)
    n = len(fl)
    u = [0.0] * n
    u[0], u[1] = float(u0), float(u1)
    for i in range(1, n - 1):
        un = ((12.0 - 10.0 * fl[i]) * u[i] - fl[i - 1] * u[i - 1]) / fl[i + 1]
        if un > RESCALE_AT or un < -RESCALE_AT:
            for j in range(i + 1):
                u[j] /= RESCALE_AT
            un /= RESCALE_AT
        u[i + 1] = un
    return np.asarray(u)
