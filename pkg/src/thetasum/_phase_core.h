/* Exact 128-bit fixed-point phase kernels.
 *
 * A phase is stored as theta = (k^2 Y + k T) mod 2^128, representing the
 * turn count theta / 2^128 in [0, 1).  The top two bits pick the quadrant,
 * the next 53 bits give the angle inside it, so cos/sin are only ever
 * evaluated on [0, pi/2).
 */
#ifndef THETASUM_PHASE_CORE_H
#define THETASUM_PHASE_CORE_H

#include <math.h>
#include <stdint.h>

typedef unsigned __int128 ts_u128;

#define TS_HALF_PI 1.57079632679489661923
#define TS_TWO_M53 1.1102230246251565404e-16

static inline void ts_unit(uint64_t hi, double *c, double *s)
{
    unsigned q = (unsigned)(hi >> 62);
    uint64_t m = (hi & 0x3FFFFFFFFFFFFFFFULL) >> 9;
    double phi = TS_HALF_PI * ((double)m * TS_TWO_M53);
    double cc = cos(phi), ss = sin(phi);
    switch (q) {
    case 0: *c = cc; *s = ss; break;
    case 1: *c = -ss; *s = cc; break;
    case 2: *c = -cc; *s = -ss; break;
    default: *c = ss; *s = -cc; break;
    }
}

static inline uint64_t ts_theta_hi(ts_u128 Y, ts_u128 T, uint64_t k)
{
    ts_u128 kk = (ts_u128)k * (ts_u128)k;
    ts_u128 th = kk * Y + (ts_u128)k * T;
    return (uint64_t)(th >> 64);
}

static inline ts_u128 ts_join(uint64_t hi, uint64_t lo)
{
    return ((ts_u128)hi << 64) | (ts_u128)lo;
}

/* Neumaier-compensated sums of e^{2 pi i theta_k} (k + shift)^{-s} over
 * consecutive chunks of `chunk` terms starting at k = a, last index b.
 * Writes 3 doubles per chunk: re, im, sum of |term|. */
static void ts_chunk_sums(uint64_t yhi, uint64_t ylo, uint64_t thi, uint64_t tlo,
                          int64_t a, int64_t b, double s, double shift,
                          int64_t chunk, double *out)
{
    ts_u128 Y = ts_join(yhi, ylo), T = ts_join(thi, tlo);
    int64_t idx = 0;
    for (int64_t start = a; start <= b; start += chunk, idx++) {
        int64_t stop = start + chunk - 1;
        if (stop > b) stop = b;
        double sr = 0.0, cr = 0.0, si = 0.0, ci = 0.0, sa = 0.0;
        for (int64_t k = start; k <= stop; k++) {
            double c, sn, w, tr, ti, u;
            ts_unit(ts_theta_hi(Y, T, (uint64_t)k), &c, &sn);
            w = (s == 0.0) ? 1.0 : pow((double)k + shift, -s);
            tr = c * w;
            ti = sn * w;
            u = sr + tr;
            cr += (fabs(sr) >= fabs(tr)) ? (sr - u) + tr : (tr - u) + sr;
            sr = u;
            u = si + ti;
            ci += (fabs(si) >= fabs(ti)) ? (si - u) + ti : (ti - u) + si;
            si = u;
            sa += w;
        }
        out[3 * idx] = sr + cr;
        out[3 * idx + 1] = si + ci;
        out[3 * idx + 2] = sa;
    }
}

static void ts_units(uint64_t yhi, uint64_t ylo, uint64_t thi, uint64_t tlo,
                     int64_t a, int64_t b, double *cs, double *sn)
{
    ts_u128 Y = ts_join(yhi, ylo), T = ts_join(thi, tlo);
    for (int64_t k = a; k <= b; k++)
        ts_unit(ts_theta_hi(Y, T, (uint64_t)k), cs + (k - a), sn + (k - a));
}

#endif
