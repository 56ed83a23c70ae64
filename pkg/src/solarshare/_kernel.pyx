# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled simulation loop; see ``_kernel_py.py`` for the reference twin."""

import numpy as np
from libc.math cimport expm1, fabs




cdef inline double _interp(double[::1] ts, double[::1] vs, double t) noexcept nogil:
    cdef Py_ssize_t n = ts.shape[0]
    cdef Py_ssize_t lo_i, hi_i, mid, j
    cdef double t0, v0, v1, v, lo, hi
    if t <= ts[0]:
        return vs[0]
    if t >= ts[n - 1]:
        return vs[n - 1]
    # bisect_right(ts, t) - 1
    lo_i = 0
    hi_i = n
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        if t < ts[mid]:
            hi_i = mid
        else:
            lo_i = mid + 1
    j = lo_i - 1
    t0 = ts[j]
    v0 = vs[j]
    v1 = vs[j + 1]
    v = v0 + (v1 - v0) * ((t - t0) / (ts[j + 1] - t0))
    if v0 <= v1:
        lo = v0
        hi = v1
    else:
        lo = v1
        hi = v0
    if v < lo:
        v = lo
    if v > hi:
        v = hi
    return v


cdef inline bint _classify(double soc, bint prev, double threshold, double hysteresis,
                           bint first) noexcept nogil:
    if first or hysteresis == 0.0:
        return soc >= threshold
    if prev:
        return not soc < threshold - hysteresis
    return soc >= threshold + hysteresis


def simulate(
    prof1, prof2, double p_load1, double p_load2, batt1, batt2,
    double threshold, double hysteresis, double dt, double start_time,
    Py_ssize_t n_steps, bint replay,
    double ambient, double heat_coeff, double relax_rate,
):
    cdef double[::1] ts1 = np.ascontiguousarray(prof1[0], dtype=np.float64)
    cdef double[::1] vs1 = np.ascontiguousarray(prof1[1], dtype=np.float64)
    cdef double[::1] cs1 = np.ascontiguousarray(prof1[2], dtype=np.float64)
    cdef double[::1] tp1 = np.ascontiguousarray(prof1[3], dtype=np.float64)
    cdef double[::1] ts2 = np.ascontiguousarray(prof2[0], dtype=np.float64)
    cdef double[::1] vs2 = np.ascontiguousarray(prof2[1], dtype=np.float64)
    cdef double[::1] cs2 = np.ascontiguousarray(prof2[2], dtype=np.float64)
    cdef double[::1] tp2 = np.ascontiguousarray(prof2[3], dtype=np.float64)
    cdef double cap1 = batt1[0], r1 = batt1[1], vn1 = batt1[2], soc1 = batt1[3]
    cdef double cap2 = batt2[0], r2 = batt2[1], vn2 = batt2[2], soc2 = batt2[3]
    cdef double temp1 = ambient, temp2 = ambient
    cdef double relax = -expm1(-relax_rate * dt)
    cdef bint suff1 = False, suff2 = False, first
    cdef bint s12, s21, l1, l2, clamp1, clamp2
    cdef int scenario
    cdef double t, t_end, pv1, pv2, own1, don1, own2, don2, net1, net2
    cdef double i1, i2, v1, v2
    cdef Py_ssize_t k

    out_arr = np.empty((n_steps, 20), dtype=np.float64)
    cdef double[:, ::1] out = out_arr

    with nogil:
        for k in range(n_steps):
            t = start_time + <double>k * dt / 3600.0
            t_end = start_time + <double>(k + 1) * dt / 3600.0

            pv1 = _interp(ts1, vs1, t) * _interp(ts1, cs1, t)
            pv2 = _interp(ts2, vs2, t) * _interp(ts2, cs2, t)

            first = k == 0
            suff1 = _classify(soc1, suff1, threshold, hysteresis, first)
            suff2 = _classify(soc2, suff2, threshold, hysteresis, first)
            s12 = suff1 and not suff2
            s21 = suff2 and not suff1
            l1 = (suff1 and suff2) or s21
            l2 = (suff1 and suff2) or s12
            if suff1:
                scenario = 2 if suff2 else 1
            else:
                scenario = 4 if suff2 else 3

            own1 = p_load1 if (l1 and not s21) else 0.0
            don1 = p_load2 if s12 else 0.0
            own2 = p_load2 if (l2 and not s12) else 0.0
            don2 = p_load1 if s21 else 0.0
            net1 = pv1 - (own1 + don1)
            net2 = pv2 - (own2 + don2)

            i1 = net1 / vn1
            soc1 = soc1 + i1 * dt / 3600.0 / cap1 * 100.0
            clamp1 = False
            if soc1 < 0.0:
                soc1 = 0.0
                clamp1 = True
            elif soc1 > 100.0:
                soc1 = 100.0
                clamp1 = True
            i2 = net2 / vn2
            soc2 = soc2 + i2 * dt / 3600.0 / cap2 * 100.0
            clamp2 = False
            if soc2 < 0.0:
                soc2 = 0.0
                clamp2 = True
            elif soc2 > 100.0:
                soc2 = 100.0
                clamp2 = True

            v1 = vn1 - (-i1 if -i1 > 0.0 else 0.0) * r1
            if v1 < 0.0:
                v1 = 0.0
            v2 = vn2 - (-i2 if -i2 > 0.0 else 0.0) * r2
            if v2 < 0.0:
                v2 = 0.0

            if replay:
                temp1 = _interp(ts1, tp1, t_end)
                temp2 = _interp(ts2, tp2, t_end)
            else:
                temp1 = temp1 + (ambient + heat_coeff * fabs(i1) - temp1) * relax
                temp2 = temp2 + (ambient + heat_coeff * fabs(i2) - temp2) * relax

            out[k, 0] = t_end
            out[k, 1] = soc1
            out[k, 2] = soc2
            out[k, 3] = v1
            out[k, 4] = v2
            out[k, 5] = i1
            out[k, 6] = i2
            out[k, 7] = temp1
            out[k, 8] = temp2
            out[k, 9] = pv1
            out[k, 10] = pv2
            out[k, 11] = p_load1 if l1 else 0.0
            out[k, 12] = p_load2 if l2 else 0.0
            out[k, 13] = s12
            out[k, 14] = s21
            out[k, 15] = l1
            out[k, 16] = l2
            out[k, 17] = scenario
            out[k, 18] = clamp1
            out[k, 19] = clamp2
    return out_arr
