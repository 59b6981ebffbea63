# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled stepping kernel: line-for-line translation of _stepper_py.

Same Dormand-Prince 5(4) arithmetic in the same operation order; compiled
with -O2 (no fast-math) so trajectories match the pure-Python kernel to the
last few ulps.
"""

from libc.math cimport exp, fabs, isfinite, pow, sqrt

cdef double _C2 = 1.0 / 5.0
cdef double _C3 = 3.0 / 10.0
cdef double _C4 = 4.0 / 5.0
cdef double _C5 = 8.0 / 9.0

cdef double _A21 = 1.0 / 5.0
cdef double _A31 = 3.0 / 40.0
cdef double _A32 = 9.0 / 40.0
cdef double _A41 = 44.0 / 45.0
cdef double _A42 = -56.0 / 15.0
cdef double _A43 = 32.0 / 9.0
cdef double _A51 = 19372.0 / 6561.0
cdef double _A52 = -25360.0 / 2187.0
cdef double _A53 = 64448.0 / 6561.0
cdef double _A54 = -212.0 / 729.0
cdef double _A61 = 9017.0 / 3168.0
cdef double _A62 = -355.0 / 33.0
cdef double _A63 = 46732.0 / 5247.0
cdef double _A64 = 49.0 / 176.0
cdef double _A65 = -5103.0 / 18656.0

cdef double _B1 = 35.0 / 384.0
cdef double _B3 = 500.0 / 1113.0
cdef double _B4 = 125.0 / 192.0
cdef double _B5 = -2187.0 / 6784.0
cdef double _B6 = 11.0 / 84.0

cdef double _E1 = 71.0 / 57600.0
cdef double _E3 = -71.0 / 16695.0
cdef double _E4 = 71.0 / 1920.0
cdef double _E5 = -17253.0 / 339200.0
cdef double _E6 = 22.0 / 525.0
cdef double _E7 = -1.0 / 40.0

STATUS_OK = 0
STATUS_POSITIVITY = 1
STATUS_UNDERFLOW = 2

cdef long _MAX_STEPS = 5000000

cdef double _INF = float("inf")


def integrate_region(int n, double m, double alpha, double beta, int log_coord,
                     double x0, double x_end, double y0, double y1,
                     double rtol, double h0, double hmax_cap):
    """See ydecay._stepper_py.integrate_region; identical contract."""
    cdef double inv_m = 1.0 / m
    cdef double em1 = inv_m - 1.0
    cdef double cm1 = n - 1.0
    cdef double two_minus_n = 2.0 - n
    cdef double cA = m * alpha / cm1
    cdef double cB = beta / cm1

    xs = []
    Vs = []
    Ps = []
    dPs = []

    cdef double x = x0
    cdef double V = y0
    cdef double U = y1
    cdef double r, k1V, k1U, k2V, k2U, k3V, k3U, k4V, k4U, k5V, k5U, k6V, k6U, k7V, k7U
    cdef double Vt, Ut, xt, Vn, Un, eV, eU, err, scV, scU, fac, h, hmax
    cdef int status, bad, last_flag
    cdef long naccept = 0, nreject = 0, nfev, step_i
    cdef bint just_rejected = False, positivity_hit = False, finished = False

    k2V = k2U = k3V = k3U = k4V = k4U = k5V = k5U = k6V = k6U = k7V = k7U = 0.0
    Vn = Un = 0.0

    if log_coord:
        r = exp(x)
        k1V = U
        k1U = two_minus_n * U - pow(V, em1) * (r * r) * (cA * V + cB * U)
    else:
        k1V = U
        k1U = -cm1 * U / x - pow(V, em1) * (cA * V + cB * x * U)
    nfev = 1

    h = h0
    status = 0

    for step_i in range(_MAX_STEPS):
        hmax = hmax_cap if log_coord else hmax_cap * x
        if h > hmax:
            h = hmax
        last_flag = 0
        if x + h >= x_end:
            h = x_end - x
            last_flag = 1
            if h <= 1e-12 * max(fabs(x_end), 1e-30):
                x = x_end
                if log_coord:
                    r = exp(x)
                    Ps.append(U / r)
                    dPs.append((k1U - U) / (r * r))
                else:
                    Ps.append(U)
                    dPs.append(k1U)
                xs.append(x)
                Vs.append(V)
                finished = True
                break
        if h <= 1e-14 * max(fabs(x), fabs(x_end)):
            status = 1 if positivity_hit else 2
            break

        bad = 0

        Vt = V + h * (_A21 * k1V)
        Ut = U + h * (_A21 * k1U)
        if Vt <= 0.0:
            bad = 1
        elif not (isfinite(Vt) and isfinite(Ut)):
            bad = 2
        else:
            xt = x + _C2 * h
            if log_coord:
                r = exp(xt)
                k2V = Ut
                k2U = two_minus_n * Ut - pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
            else:
                k2V = Ut
                k2U = -cm1 * Ut / xt - pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        if bad == 0:
            Vt = V + h * (_A31 * k1V + _A32 * k2V)
            Ut = U + h * (_A31 * k1U + _A32 * k2U)
            if Vt <= 0.0:
                bad = 1
            elif not (isfinite(Vt) and isfinite(Ut)):
                bad = 2
            else:
                xt = x + _C3 * h
                if log_coord:
                    r = exp(xt)
                    k3V = Ut
                    k3U = two_minus_n * Ut - pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k3V = Ut
                    k3U = -cm1 * Ut / xt - pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        if bad == 0:
            Vt = V + h * (_A41 * k1V + _A42 * k2V + _A43 * k3V)
            Ut = U + h * (_A41 * k1U + _A42 * k2U + _A43 * k3U)
            if Vt <= 0.0:
                bad = 1
            elif not (isfinite(Vt) and isfinite(Ut)):
                bad = 2
            else:
                xt = x + _C4 * h
                if log_coord:
                    r = exp(xt)
                    k4V = Ut
                    k4U = two_minus_n * Ut - pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k4V = Ut
                    k4U = -cm1 * Ut / xt - pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        if bad == 0:
            Vt = V + h * (_A51 * k1V + _A52 * k2V + _A53 * k3V + _A54 * k4V)
            Ut = U + h * (_A51 * k1U + _A52 * k2U + _A53 * k3U + _A54 * k4U)
            if Vt <= 0.0:
                bad = 1
            elif not (isfinite(Vt) and isfinite(Ut)):
                bad = 2
            else:
                xt = x + _C5 * h
                if log_coord:
                    r = exp(xt)
                    k5V = Ut
                    k5U = two_minus_n * Ut - pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k5V = Ut
                    k5U = -cm1 * Ut / xt - pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        if bad == 0:
            Vt = V + h * (_A61 * k1V + _A62 * k2V + _A63 * k3V + _A64 * k4V + _A65 * k5V)
            Ut = U + h * (_A61 * k1U + _A62 * k2U + _A63 * k3U + _A64 * k4U + _A65 * k5U)
            if Vt <= 0.0:
                bad = 1
            elif not (isfinite(Vt) and isfinite(Ut)):
                bad = 2
            else:
                xt = x + h
                if log_coord:
                    r = exp(xt)
                    k6V = Ut
                    k6U = two_minus_n * Ut - pow(Vt, em1) * (r * r) * (cA * Vt + cB * Ut)
                else:
                    k6V = Ut
                    k6U = -cm1 * Ut / xt - pow(Vt, em1) * (cA * Vt + cB * xt * Ut)

        if bad == 0:
            Vn = V + h * (_B1 * k1V + _B3 * k3V + _B4 * k4V + _B5 * k5V + _B6 * k6V)
            Un = U + h * (_B1 * k1U + _B3 * k3U + _B4 * k4U + _B5 * k5U + _B6 * k6U)
            if Vn <= 0.0:
                bad = 1
            elif not (isfinite(Vn) and isfinite(Un)):
                bad = 2
            else:
                xt = x + h
                if log_coord:
                    r = exp(xt)
                    k7V = Un
                    k7U = two_minus_n * Un - pow(Vn, em1) * (r * r) * (cA * Vn + cB * Un)
                else:
                    k7V = Un
                    k7U = -cm1 * Un / xt - pow(Vn, em1) * (cA * Vn + cB * xt * Un)

        if bad != 0:
            nfev += 6
            if bad == 1:
                positivity_hit = True
            h *= 0.5
            just_rejected = True
            nreject += 1
            continue
        nfev += 6

        eV = h * (_E1 * k1V + _E3 * k3V + _E4 * k4V + _E5 * k5V + _E6 * k6V + _E7 * k7V)
        eU = h * (_E1 * k1U + _E3 * k3U + _E4 * k4U + _E5 * k5U + _E6 * k6U + _E7 * k7U)
        err = 0.0
        if eV != 0.0:
            scV = rtol * max(fabs(V), fabs(Vn))
            if scV <= 0.0:
                err = _INF
            else:
                err += (eV / scV) ** 2
        if err != _INF and eU != 0.0:
            scU = rtol * max(fabs(U), fabs(Un))
            if scU <= 0.0:
                err = _INF
            else:
                err += (eU / scU) ** 2
        if err != _INF:
            err = sqrt(0.5 * err)

        if err <= 1.0:
            x = x_end if last_flag else x + h
            V = Vn
            U = Un
            k1V = k7V
            k1U = k7U
            naccept += 1
            if log_coord:
                r = exp(x)
                Ps.append(U / r)
                dPs.append((k1U - U) / (r * r))
            else:
                Ps.append(U)
                dPs.append(k1U)
            xs.append(x)
            Vs.append(V)
            if last_flag:
                finished = True
                break
            if err == 0.0:
                fac = 5.0
            else:
                fac = 0.9 * pow(err, -0.2)
                if fac > 5.0:
                    fac = 5.0
                elif fac < 0.2:
                    fac = 0.2
            if just_rejected and fac > 1.0:
                fac = 1.0
            just_rejected = False
            h *= fac
        else:
            fac = 0.9 * pow(err, -0.2) if err != _INF else 0.1
            if fac < 0.1:
                fac = 0.1
            h *= fac
            just_rejected = True
            nreject += 1
    else:
        status = 2

    if finished:
        status = 0

    return xs, Vs, Ps, dPs, status, h, naccept, nreject, nfev
