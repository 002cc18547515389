"""Spectral factorization helpers for polynomial completion and phase finding.

All polynomial arithmetic is in the Chebyshev basis, where bounded
polynomials keep O(1) coefficients. Root work happens in the variable
u = 2x^2 - 1 (every polynomial factored here is even), via colleague
matrices; above degree 60 the roots are polished to extended precision with
an Aberth iteration, since clustering near the unit circle is the known
failure mode. Coefficient assembly stays in double precision throughout:
downstream verification decides whether a result is accepted.

mpmath coefficient vectors are plain Python lists of mpc; they only appear
in the layer-stripping support routines.
"""
from __future__ import annotations

import numpy as np
from numpy.polynomial import chebyshev as cheb
import mpmath as mp

from .errors import CompletionError

MP_DEGREE_THRESHOLD = 60


def strip_dps(degree: int) -> int:
    """Digits for extended-precision layer stripping; grows with the degree."""
    return max(50, 30 + int(1.2 * degree))


def polish_dps(degree: int) -> int:
    """Digits for extended-precision root polishing."""
    return max(50, 30 + degree // 4)


def trim_tail(c: np.ndarray, rel: float = 1e-15) -> np.ndarray:
    """Drop trailing coefficients below rel * max|c|."""
    c = np.asarray(c)
    scale = np.abs(c).max() if c.size else 0.0
    if scale == 0.0:
        return c[:1]
    keep = c.size
    while keep > 1 and abs(c[keep - 1]) <= rel * scale:
        keep -= 1
    return c[:keep]


def cheb_div_linear(b, u0):
    """Divide a Chebyshev series by (x - u0); returns (quotient, remainder).

    Works for any scalar type supporting arithmetic (floats, complex, mp).
    """
    n = len(b) - 1
    zero = b[0] * 0
    if n < 1:
        return [zero], b[0]
    if n == 1:
        q0 = b[1]
        return [q0], b[0] + u0 * q0
    q = [zero] * n
    q[n - 1] = 2 * b[n]
    for j in range(n - 1, 1, -1):
        nxt = q[j + 1] if j + 1 < n else zero
        q[j - 1] = 2 * b[j] + 2 * u0 * q[j] - nxt
    q2 = q[2] if n >= 3 else zero
    q[0] = b[1] + u0 * q[1] - q2 / 2
    r = b[0] - q[1] / 2 + u0 * q[0]
    return q, r


def divide_one_minus_x2(v: np.ndarray) -> tuple[np.ndarray, float]:
    """Divide by (1 - x^2) in the Chebyshev basis; returns (quotient, |remainder|)."""
    g, r = cheb.chebdiv(v, np.array([0.5, 0.0, -0.5]))
    rem = float(np.abs(r).max()) if np.asarray(r).size else 0.0
    return g, rem


def even_part_to_u(c: np.ndarray) -> np.ndarray:
    """Map an even Chebyshev series in x to a series in u = 2x^2 - 1.

    T_{2j}(x) = T_j(2x^2 - 1), so the u-coefficients are the even-index ones.
    """
    return np.asarray(c)[::2].copy()


def u_series_to_t(ub: np.ndarray) -> np.ndarray:
    """Convert sum_j ub[j] U_j(x) into a Chebyshev-T series."""
    n = len(ub)
    out = np.zeros(n, dtype=complex)
    for j in range(n):
        bj = ub[j]
        if bj == 0:
            continue
        for i in range(j, -1, -2):
            out[i] += bj * (1.0 if i > 0 else 0.5) * 2.0
    return out


def pick_conjugate_half(roots: np.ndarray, im_tol: float = 1e-7):
    """One representative per conjugate pair; real roots are paired up.

    Returns a list S such that S together with its conjugates reproduces the
    whole multiset. Real roots must occur an even number of times, which is
    guaranteed for polynomials that are nonnegative on the real line.
    """
    upper, lower, real = [], [], []
    for r in np.atleast_1d(roots):
        t = im_tol * (1.0 + abs(r))
        if r.imag > t:
            upper.append(r)
        elif r.imag < -t:
            lower.append(r)
        else:
            real.append(r.real)
    if len(upper) != len(lower):
        raise CompletionError(
            f"conjugate pairing failed: {len(upper)} upper vs {len(lower)} lower roots"
        )
    real.sort()
    if len(real) % 2:
        raise CompletionError(
            "odd number of real roots; the factored polynomial is not sign-definite"
        )
    reps = list(upper)
    for i in range(0, len(real), 2):
        reps.append(complex(0.5 * (real[i] + real[i + 1]), 0.0))
    return reps


def _interleave_by_magnitude(values):
    """Mild Leja-style ordering to keep partial products tame."""
    vals = sorted(values, key=abs)
    out = []
    lo, hi = 0, len(vals) - 1
    while lo <= hi:
        out.append(vals[lo])
        lo += 1
        if lo <= hi:
            out.append(vals[hi])
            hi -= 1
    return out


def _u_roots(gu: np.ndarray, dps: int | None) -> np.ndarray:
    """Roots of a u-series by colleague matrix, optionally polished in mp."""
    scale = np.abs(gu).max()
    roots = cheb.chebroots(gu / scale)
    if dps is not None and len(roots):
        with mp.workdps(dps):
            polished = aberth_polish(to_mp_list(gu / scale), roots)
        roots = np.array([complex(z) for z in polished])
    return roots


def complementary_q(p_cheb: np.ndarray, dps: int | None = None) -> np.ndarray:
    """Complementary series Q with P P* + (1-x^2) Q Q* = 1.

    P is a complex Chebyshev series of exact degree d; the returned Q has
    degree d-1. Raises CompletionError when the factorization cannot be
    carried out.
    """
    p = np.asarray(p_cheb, dtype=complex)
    d = len(p) - 1
    v = -cheb.chebmul(p, p.conj())
    v[0] += 1.0
    if np.abs(v.imag).max() > 1e-10:
        raise CompletionError("1 - P P* has a non-real coefficient")
    v = v.real
    g, rem = divide_one_minus_x2(v)
    if rem > 1e-8 * max(1.0, np.abs(v).max()):
        raise CompletionError(f"(1 - x^2) does not divide 1 - P P* (remainder {rem:.2e})")
    g = trim_tail(g, 1e-15)
    odd_mass = np.abs(g[1::2]).max() if g.size > 1 else 0.0
    if odd_mass > 1e-9 * max(1.0, np.abs(g).max()):
        raise CompletionError("1 - P P* is not even")
    gu = even_part_to_u(g)

    # structural root at u = -1 (x = 0) for even-degree P
    mu = 0
    scale = np.abs(gu).max()
    while len(gu) > 1 and abs(cheb.chebval(-1.0, gu)) < 1e-8 * scale:
        q_, _ = cheb_div_linear(list(gu), -1.0)
        gu = np.asarray(q_)
        mu += 1
        if mu > d:
            raise CompletionError("runaway deflation at u = -1")

    reps = []
    if len(gu) > 1:
        roots_u = _u_roots(gu, dps)
        xs2 = (roots_u + 1.0) / 2.0
        reps = pick_conjugate_half(xs2)

    q = np.array([1.0 + 0j])
    for x2 in _interleave_by_magnitude(reps):
        q = cheb.chebmul(q, np.array([0.5 - x2, 0.0, 0.5]))
    for _ in range(mu):
        q = cheb.chebmulx(q)

    if len(q) - 1 != d - 1:
        raise CompletionError(
            f"complementary degree {len(q) - 1} != {d - 1}; root pairing inconsistent"
        )

    # overall positive scale from a real sample point away from the roots
    x0 = 1.37
    gval = cheb.chebval(x0, g)
    qval = cheb.chebval(x0, q)
    denom = abs(qval) ** 2
    if denom < 1e-280 or gval <= 0:
        raise CompletionError("degenerate sample while scaling the complementary series")
    return q * np.sqrt(gval / denom)


def complete_real(pr_cheb: np.ndarray, dps: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Imaginary part and complementary series for a real bounded P_R.

    Solves P_R^2 + P_I^2 + (1-x^2) Q^2 = 1 with real Chebyshev series P_I, Q
    by factoring F = 1 - P_R^2 on the unit circle: with x = (z + 1/z)/2 the
    lifted polynomial in z^2 has one inside-disk root per root of F written
    in u = 2x^2 - 1, namely w = u -/+ 2 sqrt(x^2 (x^2 - 1)).
    """
    pr = np.asarray(pr_cheb, dtype=float)
    d = len(pr) - 1
    f = -cheb.chebmul(pr, pr)
    f[0] += 1.0
    odd_mass = np.abs(f[1::2]).max() if f.size > 1 else 0.0
    if odd_mass > 1e-10 * max(1.0, np.abs(f).max()):
        raise CompletionError("1 - P_R^2 is not even; P_R lacks definite parity")
    fu = even_part_to_u(f)

    if len(fu) == 1:
        val = float(fu[0])
        if val < -1e-12:
            raise CompletionError("1 - P_R^2 is negative")
        return np.array([np.sqrt(max(val, 0.0))]), np.array([0.0])

    roots_u = _u_roots(fu, dps)
    ws = _paired_factor_roots(roots_u)

    # positive scale so that |g|^2 = F on the circle
    ks = []
    for t in (0.41, 1.13, 1.87, 2.63):
        z2 = np.exp(2j * t)
        mag2 = np.abs(np.prod(z2 - ws)) ** 2
        fv = cheb.chebval(np.cos(t), f)
        if mag2 < 1e-280:
            continue
        ks.append(fv / mag2)
    if not ks:
        raise CompletionError("all scaling samples fell on roots")
    k = float(np.median(ks))
    # a wrong branch or half gives O(1) disagreement; root noise stays tiny,
    # and the reconstruction check downstream is the accuracy authority
    if k <= 0 or (max(ks) - min(ks)) > 1e-3 * abs(k) + 1e-12:
        raise CompletionError(f"inconsistent circle factorization scale {ks}")

    # Laurent coefficients of g(z) = sqrt(K) z^{-d} prod (z^2 - w_j) by FFT
    m = 1
    while m < 4 * d + 8:
        m *= 2
    theta = 2 * np.pi * np.arange(m) / m
    vals = np.full(m, np.sqrt(k), dtype=complex) * np.exp(-1j * d * theta)
    z2 = np.exp(2j * theta)
    for w in ws:
        vals *= z2 - w
    gl = np.fft.fft(vals) / m

    def coeff(l):
        return gl[l % m]

    # symmetric part -> P_I (T-series), antisymmetric part -> Q (U-series)
    pi_c = np.zeros(d + 1)
    pi_c[0] = coeff(0).real
    dust = abs(coeff(0).imag)
    ub = np.zeros(d, dtype=complex)
    for kk in range(1, d + 1):
        sym = coeff(kk) + coeff(-kk)
        asym = coeff(kk) - coeff(-kk)
        pi_c[kk] = sym.real
        ub[kk - 1] = asym
        dust = max(dust, abs(sym.imag), abs(asym.imag))
    if dust > 1e-7:
        raise CompletionError(f"factor is not real (imaginary dust {dust:.2e})")
    q_c = u_series_to_t(ub).real
    return pi_c, q_c


def _inside_branch(u):
    """Inside-disk root of z^2: w = u -/+ 2 sqrt(x^2 (x^2 - 1)), x^2 = (u+1)/2."""
    x2 = (u + 1.0) / 2.0
    s = np.sqrt(complex(x2 * x2 - x2))
    w1, w2 = u + 2 * s, u - 2 * s
    return w1 if abs(w1) <= abs(w2) else w2


def _paired_factor_roots(roots_u: np.ndarray, im_tol: float = 1e-8) -> np.ndarray:
    """Inside-disk factor roots with conjugate closure enforced structurally.

    Conjugate u-pairs emit exactly (w, conj(w)); that keeps the spectral
    factor real even when both branch magnitudes sit on the unit circle and
    an independent per-root pick could break the symmetry. Real u-roots have
    a real inside branch (interior tangencies are excluded upstream).
    """
    upper, lower, real = [], [], []
    for u in np.atleast_1d(roots_u):
        t = im_tol * (1.0 + abs(u))
        if u.imag > t:
            upper.append(u)
        elif u.imag < -t:
            lower.append(u)
        else:
            real.append(u)
    if len(upper) != len(lower):
        raise CompletionError(
            f"conjugate pairing failed: {len(upper)} upper vs {len(lower)} lower roots"
        )
    ws = []
    lower_left = list(lower)
    for u in upper:
        j = min(range(len(lower_left)), key=lambda k: abs(np.conj(lower_left[k]) - u))
        lower_left.pop(j)
        w = _inside_branch(u)
        ws.extend([w, np.conj(w)])
    for u in real:
        w = _inside_branch(complex(u.real, 0.0))
        if abs(w.imag) > 1e-6 * (1.0 + abs(w)):
            raise CompletionError(
                "real factor root fell on the unit circle; the polynomial "
                "touches 1 inside the interval"
            )
        ws.append(complex(w.real, 0.0))
    return np.asarray(ws)


# ---------------------------------------------------------------------------
# mpmath support (root polishing and layer stripping)
# ---------------------------------------------------------------------------

def to_mp_list(c) -> list:
    out = []
    for x in np.atleast_1d(np.asarray(c, dtype=complex)):
        out.append(mp.mpc(x.real, x.imag))
    return out


def from_mp_list(c) -> np.ndarray:
    return np.array([complex(x) for x in c])


def mp_chebmul(a: list, b: list) -> list:
    out = [mp.mpc(0)] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai == 0:
            continue
        for j, bj in enumerate(b):
            t = ai * bj / 2
            out[i + j] += t
            out[abs(i - j)] += t
    return out


def mp_chebmulx(a: list) -> list:
    out = [mp.mpc(0)] * (len(a) + 1)
    out[1] += a[0]
    for k in range(1, len(a)):
        out[k + 1] += a[k] / 2
        out[k - 1] += a[k] / 2
    return out


def mp_cheb_one_minus_x2(a: list) -> list:
    """(1 - x^2) * a, kept O(len a)."""
    out = [mp.mpc(0)] * (len(a) + 2)
    for k, ak in enumerate(a):
        if ak == 0:
            continue
        out[k] += ak / 2
        out[k + 2] -= ak / 4
        out[abs(k - 2)] -= ak / 4
    return out


def mp_chebadd(a: list, b: list) -> list:
    n = max(len(a), len(b))
    out = [mp.mpc(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, x in enumerate(b):
        out[i] += x
    return out


def mp_chebval(coeffs: list, x):
    """Clenshaw evaluation; works for complex mp arguments."""
    n = len(coeffs)
    if n == 1:
        return coeffs[0] + 0 * x
    b1 = mp.mpc(0)
    b2 = mp.mpc(0)
    two_x = 2 * x
    for k in range(n - 1, 0, -1):
        b1, b2 = coeffs[k] + two_x * b1 - b2, b1
    return coeffs[0] + x * b1 - b2


def mp_chebder(coeffs: list) -> list:
    """Derivative of a T-series, returned as a T-series (T_k' = k U_{k-1})."""
    n = len(coeffs) - 1
    if n <= 0:
        return [mp.mpc(0)]
    ub = [k * coeffs[k] for k in range(1, n + 1)]
    out = [mp.mpc(0)] * n
    for j, bj in enumerate(ub):
        if bj == 0:
            continue
        for i in range(j, -1, -2):
            out[i] += bj * (2 if i > 0 else 1)
    return out


def complementary_q_mp(p_cheb: np.ndarray, dps: int) -> list:
    """Extended-precision complementary series, assembled fully in mp.

    Needed when the layer stripping must see a pair consistent to far below
    double precision (its truncation errors can grow by ~2x per level).
    Returns an mp coefficient list of length d.
    """
    with mp.workdps(dps):
        p = to_mp_list(p_cheb)
        d = len(p) - 1
        pstar = [mp.conj(x) for x in p]
        v = [-x for x in mp_chebmul(p, pstar)]
        v[0] += 1
        q1, r1 = cheb_div_linear(v, mp.mpf(1))
        g, r2 = cheb_div_linear(q1, mp.mpf(-1))
        g = [-x for x in g]
        if max(abs(r1), abs(r2)) > mp.mpf(1e-8):
            raise CompletionError("(1 - x^2) does not divide 1 - P P* (mp)")
        for k in range(1, len(g), 2):
            g[k] = mp.mpc(0)
        g = [mp.mpc(x.real, 0) for x in g]
        gu = g[::2]
        mu = 0
        scale = max(abs(x) for x in gu)
        while len(gu) > 1 and abs(mp_chebval(gu, mp.mpf(-1))) < mp.mpf(1e-8) * scale:
            gu, _ = cheb_div_linear(gu, mp.mpf(-1))
            mu += 1
            if mu > d:
                raise CompletionError("runaway deflation at u = -1 (mp)")

        reps = []
        if len(gu) > 1:
            gu_f = from_mp_list(gu)
            sc = np.abs(gu_f).max()
            roots0 = cheb.chebroots(gu_f / sc)
            roots = aberth_polish([x / sc for x in gu], roots0)
            xs2_f = np.array([complex((u + 1) / 2) for u in roots])
            order = pick_conjugate_half(xs2_f)
            reps = _match_representatives(order, [(u + 1) / 2 for u in roots])

        q = [mp.mpc(1)]
        for x2 in reps:
            q = mp_chebmul(q, [mp.mpf(1) / 2 - x2, mp.mpc(0), mp.mpc(1) / 2])
        for _ in range(mu):
            q = mp_chebmulx(q)
        if len(q) - 1 != d - 1:
            raise CompletionError(
                f"complementary degree {len(q) - 1} != {d - 1} (mp)"
            )
        x0 = mp.mpf("1.37")
        gval = mp_chebval(g, x0).real
        qv = mp_chebval(q, x0)
        denom = abs(qv) ** 2
        if denom == 0 or gval <= 0:
            raise CompletionError("degenerate sample while scaling (mp)")
        s = mp.sqrt(gval / denom)
        return [x * s for x in q]


def _match_representatives(order: list, roots: list) -> list:
    """Map double-precision representatives back onto the mp root list."""
    reps = []
    used = [False] * len(roots)
    for rep in order:
        if abs(rep.imag) > 0:
            best, bi = None, -1
            for i, r in enumerate(roots):
                if used[i]:
                    continue
                dd = abs(complex(r) - rep)
                if best is None or dd < best:
                    best, bi = dd, i
            used[bi] = True
            reps.append(roots[bi])
        else:
            cands = sorted(
                (i for i in range(len(roots)) if not used[i]),
                key=lambda i: abs(complex(roots[i]) - rep),
            )[:2]
            for i in cands:
                used[i] = True
            reps.append(sum(roots[i] for i in cands) / len(cands))
    return reps


def aberth_polish(coeffs: list, roots0: np.ndarray, max_iter: int = 25) -> list:
    """Refine all roots of a T-series simultaneously in mp precision.

    Stops at the configured tolerance or once the steps stall at the rounding
    floor (near-multiple roots cannot do better than ~sqrt of the precision).
    """
    der = mp_chebder(coeffs)
    zs = [mp.mpc(complex(r)) for r in np.atleast_1d(roots0)]
    n = len(zs)
    tol = mp.mpf(10) ** (-(mp.mp.dps - 6))
    prev = None
    for it in range(max_iter):
        moved = mp.mpf(0)
        vals = [mp_chebval(coeffs, z) for z in zs]
        ders = [mp_chebval(der, z) for z in zs]
        for i in range(n):
            if ders[i] == 0:
                zs[i] += mp.mpf(10) ** (-mp.mp.dps // 2)
                continue
            w = vals[i] / ders[i]
            s = mp.mpc(0)
            for j in range(n):
                if j != i:
                    dz = zs[i] - zs[j]
                    if dz != 0:
                        s += 1 / dz
            denom = 1 - w * s
            step = w / denom if denom != 0 else w
            zs[i] -= step
            moved = max(moved, abs(step) / (1 + abs(zs[i])))
        if moved < tol:
            break
        # allow slow linear phases on clusters; only stop once genuinely
        # stalled at the attainable floor
        if it >= 6 and prev is not None and moved > prev / 2:
            break
        prev = moved
    return zs
