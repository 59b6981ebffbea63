"""Pure-Python adaptive stepping kernel for the radial profile system.

This is the reference implementation of the hot loop; ydecay._stepper_cy is a
line-for-line Cython translation of the same arithmetic (same operation
order, no fast-math), selected at import time when available.

The integrated state is (V, V') with V = v^m.  Two coordinate modes:

* linear mode, x = r, state (V, P) with P = dV/dr:
      dV/dr = P
      dP/dr = -(n-1)/r * P - V^(1/m-1) * (cA*V + cB*r*P)
  where cA = m*alpha/(n-1) and cB = beta/(n-1);

* log mode, x = s = ln r, state (V, Q) with Q = dV/ds = r*P:
      dV/ds = Q
      dQ/ds = (2-n)*Q - V^(1/m-1) * r^2 * (cA*V + cB*Q).
  In this form both components decay with the same power of r, so pure
  relative error control stays well conditioned along the tail.

Dormand-Prince 5(4) pair with FSAL, relative error control, and a hard cap on
the step in log-radius units (hmax_cap) that keeps the stored nodes dense
enough for the cubic-Hermite dense output downstream.
"""

import math

# Dormand-Prince 5(4) tableau.
_C2 = 1.0 / 5.0
_C3 = 3.0 / 10.0
_C4 = 4.0 / 5.0
_C5 = 8.0 / 9.0

_A21 = 1.0 / 5.0
_A31 = 3.0 / 40.0
_A32 = 9.0 / 40.0
_A41 = 44.0 / 45.0
_A42 = -56.0 / 15.0
_A43 = 32.0 / 9.0
_A51 = 19372.0 / 6561.0
_A52 = -25360.0 / 2187.0
_A53 = 64448.0 / 6561.0
_A54 = -212.0 / 729.0
_A61 = 9017.0 / 3168.0
_A62 = -355.0 / 33.0
_A63 = 46732.0 / 5247.0
_A64 = 49.0 / 176.0
_A65 = -5103.0 / 18656.0

_B1 = 35.0 / 384.0
_B3 = 500.0 / 1113.0
_B4 = 125.0 / 192.0
_B5 = -2187.0 / 6784.0
_B6 = 11.0 / 84.0

_E1 = 71.0 / 57600.0
_E3 = -71.0 / 16695.0
_E4 = 71.0 / 1920.0
_E5 = -17253.0 / 339200.0
_E6 = 22.0 / 525.0
_E7 = -1.0 / 40.0

def _pow(x, e):
    # Python's float ** raises OverflowError where C pow returns inf; the
    # kernels must agree, and the stepper treats inf as a rejected stage.
    try:
        return x**e
    except OverflowError:
        return math.inf


STATUS_OK = 0
STATUS_POSITIVITY = 1
STATUS_UNDERFLOW = 2

_MAX_STEPS = 5_000_000


def integrate_region(n, m, alpha, beta, log_coord, x0, x_end, y0, y1, rtol, h0, hmax_cap):
    """Advance the profile from x0 to x_end in one coordinate mode.

    (y0, y1) is (V, P) in linear mode and (V, Q) in log mode.  Returns

        (xs, Vs, Ps, dPs, status, h_last, naccept, nreject, nfev)

    where the node lists exclude the initial point, Ps/dPs are the physical
    P = (v^m)' and dP/dr at the accepted nodes, and h_last is the step size
    in effect at exit (for seeding a follow-on region).
    """
    inv_m = 1.0 / m
    em1 = inv_m - 1.0
    cm1 = n - 1.0
    two_minus_n = 2.0 - n
    cA = m * alpha / cm1
    cB = beta / cm1

    xs = []
    Vs = []
    Ps = []
    dPs = []

    x = x0
    V = y0
    U = y1  # P in linear mode, Q in log mode

    # k1 at the launch point.
    if log_coord:
        r = math.exp(x)
        k1V = U
        k1U = two_minus_n * U - _pow(V, em1) * (r * r) * (cA * V + cB * U)
    else:
        k1V = U
        k1U = -cm1 * U / x - _pow(V, em1) * (cA * V + cB * x * U)
    nfev = 1

    h = h0
    status = STATUS_OK
    naccept = 0
    nreject = 0
    just_rejected = False
    positivity_hit = False

    for _ in range(_MAX_STEPS):
        # Cap the step: constant in log mode, proportional to r in linear
        # mode (equivalent log-radius density either way).
        hmax = hmax_cap if log_coord else hmax_cap * x
        if h > hmax:
            h = hmax
        last = False
        if x + h >= x_end:
            h = x_end - x
            last = True
            if h <= 1e-12 * max(abs(x_end), 1e-30):
                # Already at the endpoint to round-off: snap and record.
                x = x_end
                if log_coord:
                    r = math.exp(x)
                    Ps.append(U / r)
                    dPs.append((k1U - U) / (r * r))
                else:
                    Ps.append(U)
                    dPs.append(k1U)
                xs.append(x)
                Vs.append(V)
                break
        if h <= 1e-14 * max(abs(x), abs(x_end)):
            status = STATUS_POSITIVITY if positivity_hit else STATUS_UNDERFLOW
            break

        bad = 0  # 1 -> non-positive V at a stage, 2 -> non-finite stage

        # Stage 2
        Vt = V + h * (_A21 * k1V)
        Ut = U + h * (_A21 * k1U)
        if Vt <= 0.0:
            bad = 1
        elif not (math.isfinite(Vt) and math.isfinite(Ut)):
            bad = 2
        else:
            xt = x + _C2 * h
            if log_coord:
                r = math.exp(xt)
                k2V = Ut
                k2U = two_minus_n * Ut - _pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
            else:
                k2V = Ut
                k2U = -cm1 * Ut / xt - _pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        # Stage 3
        if bad == 0:
            Vt = V + h * (_A31 * k1V + _A32 * k2V)
            Ut = U + h * (_A31 * k1U + _A32 * k2U)
            if Vt <= 0.0:
                bad = 1
            elif not (math.isfinite(Vt) and math.isfinite(Ut)):
                bad = 2
            else:
                xt = x + _C3 * h
                if log_coord:
                    r = math.exp(xt)
                    k3V = Ut
                    k3U = two_minus_n * Ut - _pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k3V = Ut
                    k3U = -cm1 * Ut / xt - _pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        # Stage 4
        if bad == 0:
            Vt = V + h * (_A41 * k1V + _A42 * k2V + _A43 * k3V)
            Ut = U + h * (_A41 * k1U + _A42 * k2U + _A43 * k3U)
            if Vt <= 0.0:
                bad = 1
            elif not (math.isfinite(Vt) and math.isfinite(Ut)):
                bad = 2
            else:
                xt = x + _C4 * h
                if log_coord:
                    r = math.exp(xt)
                    k4V = Ut
                    k4U = two_minus_n * Ut - _pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k4V = Ut
                    k4U = -cm1 * Ut / xt - _pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        # Stage 5
        if bad == 0:
            Vt = V + h * (_A51 * k1V + _A52 * k2V + _A53 * k3V + _A54 * k4V)
            Ut = U + h * (_A51 * k1U + _A52 * k2U + _A53 * k3U + _A54 * k4U)
            if Vt <= 0.0:
                bad = 1
            elif not (math.isfinite(Vt) and math.isfinite(Ut)):
                bad = 2
            else:
                xt = x + _C5 * h
                if log_coord:
                    r = math.exp(xt)
                    k5V = Ut
                    k5U = two_minus_n * Ut - _pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k5V = Ut
                    k5U = -cm1 * Ut / xt - _pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        # Stage 6 (at x + h)
        if bad == 0:
            Vt = V + h * (_A61 * k1V + _A62 * k2V + _A63 * k3V + _A64 * k4V + _A65 * k5V)
            Ut = U + h * (_A61 * k1U + _A62 * k2U + _A63 * k3U + _A64 * k4U + _A65 * k5U)
            if Vt <= 0.0:
                bad = 1
            elif not (math.isfinite(Vt) and math.isfinite(Ut)):
                bad = 2
            else:
                xt = x + h
                if log_coord:
                    r = math.exp(xt)
                    k6V = Ut
                    k6U = two_minus_n * Ut - _pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k6V = Ut
                    k6U = -cm1 * Ut / xt - _pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        # 5th-order solution and its derivative (FSAL stage 7).
        if bad == 0:
            Vn = V + h * (_B1 * k1V + _B3 * k3V + _B4 * k4V + _B5 * k5V + _B6 * k6V)
            Un = U + h * (_B1 * k1U + _B3 * k3U + _B4 * k4U + _B5 * k5U + _B6 * k6U)
            if Vn <= 0.0:
                bad = 1
            elif not (math.isfinite(Vn) and math.isfinite(Un)):
                bad = 2
            else:
                xt = x + h
                if log_coord:
                    r = math.exp(xt)
                    k7V = Un
                    k7U = two_minus_n * Un - _pow(Vn, em1) * (r * r) * (cA * Vn + cB * Un)
                else:
                    k7V = Un
                    k7U = -cm1 * Un / xt - _pow(Vn, em1) * (cA * Vn + cB * xt * Un)

        if bad != 0:
            nfev += 6  # count attempted stage work uniformly
            if bad == 1:
                positivity_hit = True
            h *= 0.5
            just_rejected = True
            nreject += 1
            continue
        nfev += 6

        # Embedded error estimate, pure relative control per component.
        eV = h * (_E1 * k1V + _E3 * k3V + _E4 * k4V + _E5 * k5V + _E6 * k6V + _E7 * k7V)
        eU = h * (_E1 * k1U + _E3 * k3U + _E4 * k4U + _E5 * k5U + _E6 * k6U + _E7 * k7U)
        err = 0.0
        if eV != 0.0:
            scV = rtol * max(abs(V), abs(Vn))
            if scV <= 0.0:
                err = math.inf
            else:
                err += (eV / scV) ** 2
        if err != math.inf and eU != 0.0:
            scU = rtol * max(abs(U), abs(Un))
            if scU <= 0.0:
                err = math.inf
            else:
                err += (eU / scU) ** 2
        if err != math.inf:
            err = math.sqrt(0.5 * err)

        if err <= 1.0:
            x = x_end if last else x + h
            V = Vn
            U = Un
            k1V = k7V
            k1U = k7U
            naccept += 1
            # Store the node with physical P and dP/dr.
            if log_coord:
                r = math.exp(x)
                Ps.append(U / r)
                dPs.append((k1U - U) / (r * r))
            else:
                Ps.append(U)
                dPs.append(k1U)
            xs.append(x)
            Vs.append(V)
            if last:
                break
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * err ** -0.2
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            if just_rejected and fac > 1.0:
                fac = 1.0
            just_rejected = False
            h *= fac
        else:
            fac = 0.9 * err ** -0.2 if err != math.inf else 0.1
            if fac < 0.1:
                fac = 0.1
            h *= fac
            just_rejected = True
            nreject += 1
    else:
        status = STATUS_UNDERFLOW

    return xs, Vs, Ps, dPs, status, h, naccept, nreject, nfev
