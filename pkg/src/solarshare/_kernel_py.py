"""Pure-Python simulation loop; reference twin of ``_kernel.pyx``.

Both files must keep the same floating-point operation order so that the
compiled and interpreted backends emit bit-identical telemetry.
"""

import math
from bisect import bisect_right

import numpy as np

NCOLS = 20


def _interp(ts, vs, t):
    n = len(ts)
    if t <= ts[0]:
        return vs[0]
    if t >= ts[n - 1]:
        return vs[n - 1]
    j = bisect_right(ts, t) - 1
    t0 = ts[j]
    v0 = vs[j]
    v1 = vs[j + 1]
    v = v0 + (v1 - v0) * ((t - t0) / (ts[j + 1] - t0))
    if v0 <= v1:
        lo, hi = v0, v1
    else:
        lo, hi = v1, v0
    if v < lo:
        v = lo
    if v > hi:
        v = hi
    return v


def _classify(soc, prev, threshold, hysteresis, first):
    if first or hysteresis == 0.0:
        return soc >= threshold
    if prev:
        return not soc < threshold - hysteresis
    return soc >= threshold + hysteresis


def simulate(
    prof1, prof2, p_load1, p_load2, batt1, batt2,
    threshold, hysteresis, dt, start_time, n_steps, replay,
    ambient, heat_coeff, relax_rate,
):
    """Run ``n_steps`` fixed steps; returns an ``(n_steps, 20)`` float array.

    ``prof*`` are ``(times, volts, amps, temps)`` sequences and ``batt*`` are
    ``(capacity_ah, resistance_ohm, voltage_v, initial_soc)``.
    """
    ts1, vs1, cs1, tp1 = [list(map(float, c)) for c in prof1]
    ts2, vs2, cs2, tp2 = [list(map(float, c)) for c in prof2]
    cap1, r1, vn1, soc1 = map(float, batt1)
    cap2, r2, vn2, soc2 = map(float, batt2)
    temp1 = ambient
    temp2 = ambient
    suff1 = suff2 = False
    relax = -math.expm1(-relax_rate * dt)
    out = np.empty((n_steps, NCOLS), dtype=np.float64)

    for k in range(n_steps):
        t = start_time + k * dt / 3600.0
        t_end = start_time + (k + 1) * dt / 3600.0

        pv1 = _interp(ts1, vs1, t) * _interp(ts1, cs1, t)
        pv2 = _interp(ts2, vs2, t) * _interp(ts2, cs2, t)

        first = k == 0
        suff1 = _classify(soc1, suff1, threshold, hysteresis, first)
        suff2 = _classify(soc2, suff2, threshold, hysteresis, first)
        s12 = suff1 and not suff2
        s21 = suff2 and not suff1
        l1 = suff1 and suff2 or s21
        l2 = suff1 and suff2 or s12
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
            temp1 = temp1 + (ambient + heat_coeff * abs(i1) - temp1) * relax
            temp2 = temp2 + (ambient + heat_coeff * abs(i2) - temp2) * relax

        row = out[k]
        row[0] = t_end
        row[1] = soc1
        row[2] = soc2
        row[3] = v1
        row[4] = v2
        row[5] = i1
        row[6] = i2
        row[7] = temp1
        row[8] = temp2
        row[9] = pv1
        row[10] = pv2
        row[11] = p_load1 if l1 else 0.0
        row[12] = p_load2 if l2 else 0.0
        row[13] = s12
        row[14] = s21
        row[15] = l1
        row[16] = l2
        row[17] = scenario
        row[18] = clamp1
        row[19] = clamp2
    return out
