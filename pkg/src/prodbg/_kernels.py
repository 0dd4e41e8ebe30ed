"""Numeric kernels for spectra, suspiciousness formulas and mutant kill statistics.

Every kernel has a numba implementation and a pure-numpy fallback with the
same floating point operation order, so both produce identical results.
Set ``PRODBG_DISABLE_JIT=1`` to force the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

FORMULAS = ("tarantula", "ochiai", "jaccard", "barinel", "op2", "dstar", "kulczynski")
FORMULA_CODE = {name: i for i, name in enumerate(FORMULAS)}


def _jit_disabled() -> bool:
    return os.environ.get("PRODBG_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes")


# -- pure numpy ---------------------------------------------------------------

class numpy_impl:
    @staticmethod
    def spectrum_counts(cov, failed):
        cov = np.asarray(cov, dtype=np.bool_)
        failed = np.asarray(failed, dtype=np.bool_)
        passed = ~failed
        ef = cov[failed].sum(axis=0, dtype=np.int64)
        ep = cov[passed].sum(axis=0, dtype=np.int64)
        nf = np.int64(failed.sum()) - ef
        np_ = np.int64(passed.sum()) - ep
        return ep, ef, np_, nf

    @staticmethod
    def formula_scores(ep, ef, np_, nf, code):
        ep = np.asarray(ep, dtype=np.float64)
        ef = np.asarray(ef, dtype=np.float64)
        np_ = np.asarray(np_, dtype=np.float64)
        nf = np.asarray(nf, dtype=np.float64)
        out = np.zeros(ep.shape, dtype=np.float64)

        def div(a, b):
            a, b = np.broadcast_arrays(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))
            r = np.zeros(a.shape, dtype=np.float64)
            np.divide(a, b, out=r, where=b != 0)
            return r

        F = ef + nf
        P = ep + np_
        if code == 0:
            a = div(ef, F)
            b = div(ep, P)
            out = div(a, a + b)
        elif code == 1:
            out = div(ef, np.sqrt(F * (ef + ep)))
        elif code == 2:
            out = div(ef, F + ep)
        elif code == 3:
            den = ep + ef
            out = np.where(den != 0, 1.0 - div(ep, den), 0.0)
        elif code == 4:
            out = ef - ep / (P + 1.0)
        elif code == 5:
            out = div(ef * ef, ep + nf)
        elif code == 6:
            out = div(ef, nf + ep)
        else:
            raise ValueError(f"unknown formula code {code}")
        return np.asarray(out, dtype=np.float64)

    @staticmethod
    def kill_stats(kill, failed):
        kill = np.asarray(kill, dtype=np.bool_)
        failed = np.asarray(failed, dtype=np.bool_)
        if kill.shape[0] == 0:
            z = np.zeros(0, dtype=np.int64)
            return z, z.copy()
        kf = kill[:, failed].sum(axis=1, dtype=np.int64)
        kp = kill[:, ~failed].sum(axis=1, dtype=np.int64)
        return kf, kp

    @staticmethod
    def metallaxis(kf, kp, origin, n_clauses, n_failed):
        kf = np.asarray(kf, dtype=np.float64)
        kp = np.asarray(kp, dtype=np.float64)
        den = np.sqrt(float(n_failed) * (kf + kp))
        s = np.zeros(kf.shape, dtype=np.float64)
        np.divide(kf, den, out=s, where=den != 0)
        out = np.zeros(n_clauses, dtype=np.float64)
        if len(s):
            np.maximum.at(out, np.asarray(origin, dtype=np.int64), s)
        return out

    @staticmethod
    def muse(f2p, p2f, origin, n_clauses, n_failed, n_passed):
        f2p = np.asarray(f2p, dtype=np.float64)
        p2f = np.asarray(p2f, dtype=np.float64)
        origin = np.asarray(origin, dtype=np.int64)
        f2p_total = f2p.sum()
        p2f_total = p2f.sum()
        alpha = 0.0
        if p2f_total != 0 and n_passed != 0 and n_failed != 0:
            alpha = (f2p_total / n_failed) * (n_passed / p2f_total)
        term_f = f2p / n_failed if n_failed != 0 else np.zeros_like(f2p)
        term_p = alpha * p2f / n_passed if n_passed != 0 else np.zeros_like(p2f)
        per = term_f - term_p
        sums = np.zeros(n_clauses, dtype=np.float64)
        counts = np.zeros(n_clauses, dtype=np.int64)
        if len(per):
            np.add.at(sums, origin, per)
            np.add.at(counts, origin, 1)
        out = np.zeros(n_clauses, dtype=np.float64)
        np.divide(sums, counts, out=out, where=counts != 0)
        return out

    @staticmethod
    def min_ranks(rank_pos, truth_mask):
        """rank_pos[i, c] = 1-based position of clause c in ranking i."""
        rank_pos = np.asarray(rank_pos, dtype=np.int64)
        truth_mask = np.asarray(truth_mask, dtype=np.bool_)
        big = np.iinfo(np.int64).max
        masked = np.where(truth_mask, rank_pos, big)
        return masked.min(axis=1)


# -- numba ----------------------------------------------------------------------

def _build_numba():
    from numba import njit

    @njit(cache=True, nogil=True)
    def spectrum_counts(cov, failed):
        t, c = cov.shape
        ep = np.zeros(c, dtype=np.int64)
        ef = np.zeros(c, dtype=np.int64)
        n_fail = 0
        for i in range(t):
            if failed[i]:
                n_fail += 1
            for j in range(c):
                if cov[i, j]:
                    if failed[i]:
                        ef[j] += 1
                    else:
                        ep[j] += 1
        n_pass = t - n_fail
        np_ = np.empty(c, dtype=np.int64)
        nf = np.empty(c, dtype=np.int64)
        for j in range(c):
            np_[j] = n_pass - ep[j]
            nf[j] = n_fail - ef[j]
        return ep, ef, np_, nf

    @njit(cache=True, nogil=True)
    def _div(a, b):
        if b != 0.0:
            return a / b
        return 0.0

    @njit(cache=True, nogil=True)
    def formula_scores(ep, ef, np_, nf, code):
        n = ep.shape[0]
        out = np.zeros(n, dtype=np.float64)
        for j in range(n):
            e_p = float(ep[j])
            e_f = float(ef[j])
            n_p = float(np_[j])
            n_f = float(nf[j])
            F = e_f + n_f
            P = e_p + n_p
            if code == 0:
                a = _div(e_f, F)
                b = _div(e_p, P)
                out[j] = _div(a, a + b)
            elif code == 1:
                out[j] = _div(e_f, np.sqrt(F * (e_f + e_p)))
            elif code == 2:
                out[j] = _div(e_f, F + e_p)
            elif code == 3:
                den = e_p + e_f
                out[j] = 1.0 - _div(e_p, den) if den != 0.0 else 0.0
            elif code == 4:
                out[j] = e_f - e_p / (P + 1.0)
            elif code == 5:
                out[j] = _div(e_f * e_f, e_p + n_f)
            else:
                out[j] = _div(e_f, n_f + e_p)
        return out

    @njit(cache=True, nogil=True)
    def kill_stats(kill, failed):
        m, t = kill.shape
        kf = np.zeros(m, dtype=np.int64)
        kp = np.zeros(m, dtype=np.int64)
        for i in range(m):
            for j in range(t):
                if kill[i, j]:
                    if failed[j]:
                        kf[i] += 1
                    else:
                        kp[i] += 1
        return kf, kp

    @njit(cache=True, nogil=True)
    def metallaxis(kf, kp, origin, n_clauses, n_failed):
        out = np.zeros(n_clauses, dtype=np.float64)
        for i in range(kf.shape[0]):
            den = np.sqrt(float(n_failed) * (float(kf[i]) + float(kp[i])))
            s = float(kf[i]) / den if den != 0.0 else 0.0
            if s > out[origin[i]]:
                out[origin[i]] = s
        return out

    @njit(cache=True, nogil=True)
    def muse(f2p, p2f, origin, n_clauses, n_failed, n_passed):
        m = f2p.shape[0]
        f2p_total = 0.0
        p2f_total = 0.0
        for i in range(m):
            f2p_total += float(f2p[i])
            p2f_total += float(p2f[i])
        alpha = 0.0
        if p2f_total != 0.0 and n_passed != 0 and n_failed != 0:
            alpha = (f2p_total / n_failed) * (n_passed / p2f_total)
        sums = np.zeros(n_clauses, dtype=np.float64)
        counts = np.zeros(n_clauses, dtype=np.int64)
        for i in range(m):
            tf = float(f2p[i]) / n_failed if n_failed != 0 else 0.0
            tp = alpha * float(p2f[i]) / n_passed if n_passed != 0 else 0.0
            sums[origin[i]] += tf - tp
            counts[origin[i]] += 1
        out = np.zeros(n_clauses, dtype=np.float64)
        for c in range(n_clauses):
            if counts[c] != 0:
                out[c] = sums[c] / counts[c]
        return out

    @njit(cache=True, nogil=True)
    def min_ranks(rank_pos, truth_mask):
        r, c = rank_pos.shape
        out = np.empty(r, dtype=np.int64)
        for i in range(r):
            best = np.iinfo(np.int64).max
            for j in range(c):
                if truth_mask[i, j] and rank_pos[i, j] < best:
                    best = rank_pos[i, j]
            out[i] = best
        return out

    class numba_impl:
        pass

    for fn in (spectrum_counts, formula_scores, kill_stats, metallaxis, muse, min_ranks):
        setattr(numba_impl, fn.__name__, staticmethod(fn))
    return numba_impl


try:
    numba_impl = _build_numba()
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is optional
    numba_impl = None
    HAVE_NUMBA = False


def backend():
    """The kernel implementation selected by the environment."""
    if HAVE_NUMBA and not _jit_disabled():
        return numba_impl
    return numpy_impl


def backend_name() -> str:
    return "numba" if backend() is numba_impl else "numpy"


def spectrum_counts(cov, failed):
    cov = np.ascontiguousarray(cov, dtype=np.bool_)
    failed = np.ascontiguousarray(failed, dtype=np.bool_)
    if cov.ndim != 2:
        cov = cov.reshape(len(failed), -1)
    return backend().spectrum_counts(cov, failed)


def formula_scores(ep, ef, np_, nf, formula: str):
    if formula not in FORMULA_CODE:
        raise ValueError(f"unknown formula {formula!r}; choose from {', '.join(FORMULAS)}")
    arrs = [np.ascontiguousarray(a, dtype=np.int64).reshape(-1) for a in (ep, ef, np_, nf)]
    return backend().formula_scores(*arrs, FORMULA_CODE[formula])


def kill_stats(kill, failed):
    failed = np.ascontiguousarray(failed, dtype=np.bool_)
    kill = np.ascontiguousarray(kill, dtype=np.bool_)
    if kill.ndim != 2:
        kill = kill.reshape(-1, len(failed))
    return backend().kill_stats(kill, failed)


def metallaxis(kf, kp, origin, n_clauses: int, n_failed: int):
    return backend().metallaxis(np.ascontiguousarray(kf, dtype=np.int64),
                                np.ascontiguousarray(kp, dtype=np.int64),
                                np.ascontiguousarray(origin, dtype=np.int64),
                                int(n_clauses), int(n_failed))


def muse(f2p, p2f, origin, n_clauses: int, n_failed: int, n_passed: int):
    return backend().muse(np.ascontiguousarray(f2p, dtype=np.int64),
                          np.ascontiguousarray(p2f, dtype=np.int64),
                          np.ascontiguousarray(origin, dtype=np.int64),
                          int(n_clauses), int(n_failed), int(n_passed))


def min_ranks(rank_pos, truth_mask):
    return backend().min_ranks(np.ascontiguousarray(rank_pos, dtype=np.int64),
                               np.ascontiguousarray(truth_mask, dtype=np.bool_))
