# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled search kernel.

Transliteration of _pykernel.Engine; see that module for the design
notes. Any behavioral change must land in both files: the two backends
share one PCG32 stream and must execute floating-point operations in the
same order so traces match bit for bit. The extension is built without
contraction (-ffp-contract=off) for that reason.
"""

import numpy as np

from libc.math cimport isfinite

ctypedef unsigned long long u64
ctypedef unsigned int u32

cdef double _INV32 = 1.0 / 4294967296.0
cdef u64 _PCG_MULT = 6364136223846793005ULL

MOVE_EPS = 1e-9
LIMIT_EPS = 1e-9
cdef double _MOVE_EPS = 1e-9
cdef double _LIMIT_EPS = 1e-9


cdef class Engine:
    cdef const double[:, ::1] c
    cdef const double[::1] w
    cdef const double[::1] r
    cdef readonly int n
    cdef readonly int k
    cdef u64 state
    cdef readonly unsigned long long inc
    cdef const double[::1] closing
    cdef double dlimit
    cdef const double[::1] deadline
    cdef readonly double big_cutoff
    cdef readonly double big_penalty
    cdef double half_big
    cdef readonly bint has_big
    cdef readonly bint limits

    cdef int[:, ::1] seq
    cdef int[::1] rlen
    cdef double[:, ::1] comp
    cdef double[:, ::1] wsuf
    cdef int[::1] cli_route
    cdef int[::1] cli_pos
    cdef int[::1] scr1
    cdef int[::1] scr2
    cdef int[::1] order_buf
    cdef int[::1] removed_buf
    cdef int[::1] flag_buf

    def __init__(
        self,
        travel,
        weights,
        service,
        k,
        rng_state,
        rng_inc,
        closing,
        duration_limit,
        deadlines,
        big_cutoff,
        big_penalty,
    ):
        cdef int i, j
        self.c = np.ascontiguousarray(travel, dtype=np.float64)
        self.w = np.ascontiguousarray(weights, dtype=np.float64)
        self.r = np.ascontiguousarray(service, dtype=np.float64)
        self.n = self.w.shape[0] - 1
        self.k = int(k)
        self.state = <u64> rng_state
        self.inc = <u64> rng_inc
        self.closing = np.ascontiguousarray(closing, dtype=np.float64)
        self.dlimit = float(duration_limit)
        self.deadline = np.ascontiguousarray(deadlines, dtype=np.float64)
        self.big_cutoff = float(big_cutoff)
        self.big_penalty = float(big_penalty)
        self.half_big = 0.5 * self.big_cutoff
        self.has_big = False
        for i in range(self.n + 1):
            for j in range(self.n + 1):
                if self.c[i, j] >= self.big_cutoff:
                    self.has_big = True
        self.limits = isfinite(self.dlimit) != 0
        for i in range(1, self.n + 1):
            if isfinite(self.deadline[i]):
                self.limits = True
        self.seq = np.zeros((self.k, self.n + 1), dtype=np.intc)
        self.rlen = np.zeros(self.k, dtype=np.intc)
        self.comp = np.zeros((self.k, self.n + 2), dtype=np.float64)
        self.wsuf = np.zeros((self.k, self.n + 3), dtype=np.float64)
        self.cli_route = np.zeros(self.n + 1, dtype=np.intc)
        self.cli_pos = np.zeros(self.n + 1, dtype=np.intc)
        self.scr1 = np.zeros(self.n + 2, dtype=np.intc)
        self.scr2 = np.zeros(self.n + 2, dtype=np.intc)
        self.order_buf = np.zeros(self.n + 1, dtype=np.intc)
        self.removed_buf = np.zeros(self.n + 1, dtype=np.intc)
        self.flag_buf = np.zeros(self.n + 1, dtype=np.intc)

    # -- PCG32 ------------------------------------------------------------

    cdef inline u32 _next32(self):
        cdef u64 old = self.state
        self.state = old * _PCG_MULT + self.inc
        cdef u32 xorshifted = <u32> (((old >> 18) ^ old) >> 27)
        cdef u32 rot = <u32> (old >> 59)
        return (xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))

    def uniform(self):
        return self._next32() * _INV32

    cdef inline u32 _randbelow(self, u32 bound):
        cdef u32 threshold = <u32> ((<u64> 4294967296ULL - bound) % bound)
        cdef u32 r
        while True:
            r = self._next32()
            if r >= threshold:
                return r % bound

    def rng_state(self):
        return self.state

    # -- forbidden-arc penalty bookkeeping -----------------------------------

    cdef inline int _ind(self, double value):
        return 1 if value >= self.big_cutoff else 0

    cdef int _flips(self, int ridx, int lo, int hi, double dt):
        if hi < lo:
            return 0
        if -self.half_big < dt < self.half_big:
            return 0  # too small to carry anything across the cutoff
        cdef double cutoff = self.big_cutoff
        if dt > 0.0:
            return self._count_range(ridx, lo, hi, cutoff - dt, cutoff)
        return -self._count_range(ridx, lo, hi, cutoff, cutoff - dt)

    cdef int _count_range(self, int ridx, int lo, int hi, double a, double b):
        cdef int la = lo, ha = hi, lb = lo, hb = hi, mid, first_a
        while la <= ha:
            mid = (la + ha) >> 1
            if self.comp[ridx, mid] >= a:
                ha = mid - 1
            else:
                la = mid + 1
        first_a = la
        while lb <= hb:
            mid = (lb + hb) >> 1
            if self.comp[ridx, mid] >= b:
                hb = mid - 1
            else:
                lb = mid + 1
        return lb - first_a

    # -- state maintenance -------------------------------------------------

    cdef void _rebuild(self, int ridx):
        cdef int m = self.rlen[ridx]
        cdef int idx, v, prev
        cdef double t = 0.0
        cdef double acc = 0.0
        prev = 0
        self.comp[ridx, 0] = 0.0
        for idx in range(1, m + 1):
            v = self.seq[ridx, idx - 1]
            t = t + self.c[prev, v] + self.r[v]
            self.comp[ridx, idx] = t
            prev = v
            self.cli_route[v] = ridx
            self.cli_pos[v] = idx
        self.wsuf[ridx, m + 1] = 0.0
        for idx in range(m, 0, -1):
            acc = acc + self.w[self.seq[ridx, idx - 1]]
            self.wsuf[ridx, idx] = acc

    def set_routes(self, routes):
        cdef int ridx = 0, i, v
        for route in routes:
            i = 0
            for v in route:
                self.seq[ridx, i] = v
                i += 1
            self.rlen[ridx] = i
            ridx += 1
        for ridx in range(self.k):
            self._rebuild(ridx)

    def get_routes(self):
        cdef int ridx, i
        out = []
        for ridx in range(self.k):
            out.append([self.seq[ridx, i] for i in range(self.rlen[ridx])])
        return out

    def build_initial(self):
        """Uniform shuffle, then deal clients round-robin over the K routes."""
        cdef int i, j, t, v, tmp
        for i in range(self.n):
            self.order_buf[i] = i + 1
        for i in range(self.n - 1, 0, -1):
            j = <int> self._randbelow(<u32> (i + 1))
            tmp = self.order_buf[i]
            self.order_buf[i] = self.order_buf[j]
            self.order_buf[j] = tmp
        for i in range(self.k):
            self.rlen[i] = 0
        for t in range(self.n):
            v = self.order_buf[t]
            self.seq[t % self.k, self.rlen[t % self.k]] = v
            self.rlen[t % self.k] += 1
        for i in range(self.k):
            self._rebuild(i)

    def total_cost(self):
        cdef double acc = 0.0
        cdef int pen = 0
        cdef int ridx, t
        cdef double ct
        cdef double cutoff = self.big_cutoff
        for ridx in range(self.k):
            for t in range(1, self.rlen[ridx] + 1):
                ct = self.comp[ridx, t]
                acc += self.w[self.seq[ridx, t - 1]] * ct
                if ct >= cutoff:
                    pen += 1
        return acc + pen * self.big_penalty

    # -- variant limits ----------------------------------------------------

    cdef bint _route_ok_row(self, int ridx):
        cdef int i
        for i in range(self.rlen[ridx]):
            self.scr2[i] = self.seq[ridx, i]
        return self._route_ok_arr(self.scr2, self.rlen[ridx])

    cdef bint _route_ok_arr(self, int[::1] buf, int m):
        cdef double t = 0.0
        cdef int prev = 0, i, v
        for i in range(m):
            v = buf[i]
            t += self.c[prev, v] + self.r[v]
            if t > self.deadline[v] + _LIMIT_EPS:
                return False
            prev = v
        if isfinite(self.dlimit):
            if t + self.closing[prev] > self.dlimit + _LIMIT_EPS:
                return False
        return True

    cdef bint _relocate_move_ok(self, int cli, int r1, int t, int r2, int ins_idx):
        """Limits rule: reject iff an affected route was fine and breaks."""
        cdef int i, a_i, m1 = self.rlen[r1], m2
        # candidate for r1 with cli removed (and re-inserted when r2 == r1)
        a_i = 0
        for i in range(m1):
            if i != t - 1:
                self.scr1[a_i] = self.seq[r1, i]
                a_i += 1
        if r2 == r1:
            for i in range(a_i, ins_idx, -1):
                self.scr1[i] = self.scr1[i - 1]
            self.scr1[ins_idx] = cli
            a_i += 1
            if self._route_ok_row(r1) and not self._route_ok_arr(self.scr1, a_i):
                return False
            return True
        if self._route_ok_row(r1) and not self._route_ok_arr(self.scr1, a_i):
            return False
        m2 = self.rlen[r2]
        for i in range(m2):
            self.scr1[i] = self.seq[r2, i]
        for i in range(m2, ins_idx, -1):
            self.scr1[i] = self.scr1[i - 1]
        self.scr1[ins_idx] = cli
        if self._route_ok_row(r2) and not self._route_ok_arr(self.scr1, m2 + 1):
            return False
        return True

    # -- neighborhood moves --------------------------------------------------

    def relocate(self):
        """Scan clients in random order; for each, find its cheapest
        reinsertion anywhere; apply the first strictly improving one."""
        cdef int n = self.n
        cdef int i, j, tmp, oi, cli, r1, m1, t, prev, nxt, r2, g0, x0, u, x, g, m2
        cdef int ind_own, pen_rem, pen, best_r2, best_idx, ins_idx, q
        cdef double w_cli, r_cli, dt_rem, drem, tu, arrive, dt_ins, dins, tot
        cdef double best_total, wx
        for i in range(n):
            self.order_buf[i] = i + 1
        for i in range(n - 1, 0, -1):
            j = <int> self._randbelow(<u32> (i + 1))
            tmp = self.order_buf[i]
            self.order_buf[i] = self.order_buf[j]
            self.order_buf[j] = tmp
        for oi in range(n):
            cli = self.order_buf[oi]
            r1 = self.cli_route[cli]
            m1 = self.rlen[r1]
            if m1 == 1:
                continue  # moving it would empty the route
            t = self.cli_pos[cli]
            w_cli = self.w[cli]
            r_cli = self.r[cli]
            prev = self.seq[r1, t - 2] if t > 1 else 0
            if t < m1:
                nxt = self.seq[r1, t]
                dt_rem = self.c[prev, nxt] - (
                    self.c[prev, cli] + r_cli + self.c[cli, nxt]
                )
                drem = dt_rem * self.wsuf[r1, t + 1] - w_cli * self.comp[r1, t]
            else:
                dt_rem = 0.0
                drem = -w_cli * self.comp[r1, t]
            if self.has_big:
                ind_own = self._ind(self.comp[r1, t])
                pen_rem = self._flips(r1, t + 1, m1, dt_rem) - ind_own
            else:
                ind_own = 0
                pen_rem = 0

            best_total = -_MOVE_EPS
            best_r2 = -1
            best_idx = -1
            for r2 in range(self.k):
                if r2 == r1:
                    # anchors are original positions of the shortened route
                    for g0 in range(0, m1 + 1):
                        if g0 == t:
                            continue
                        x0 = g0 + 1
                        if x0 == t:
                            x0 = t + 1
                        u = self.seq[r1, g0 - 1] if g0 > 0 else 0
                        tu = self.comp[r1, g0] + dt_rem if g0 > t else self.comp[r1, g0]
                        arrive = tu + self.c[u, cli] + r_cli
                        if x0 <= m1:
                            x = self.seq[r1, x0 - 1]
                            wx = (
                                self.wsuf[r1, x0] - w_cli
                                if x0 <= t
                                else self.wsuf[r1, x0]
                            )
                            dt_ins = (
                                self.c[u, cli] + r_cli + self.c[cli, x] - self.c[u, x]
                            )
                            dins = w_cli * arrive + dt_ins * wx
                        else:
                            dt_ins = 0.0
                            dins = w_cli * arrive
                        tot = drem + dins
                        if self.has_big:
                            if g0 < t:
                                pen = self._flips(
                                    r1, g0 + 1, t - 1, dt_ins
                                ) + self._flips(r1, t + 1, m1, dt_rem + dt_ins)
                            else:
                                pen = self._flips(
                                    r1, t + 1, g0, dt_rem
                                ) + self._flips(r1, g0 + 1, m1, dt_rem + dt_ins)
                            pen += self._ind(arrive) - ind_own
                            tot = tot + pen * self.big_penalty
                        if tot < best_total:
                            ins_idx = g0 if g0 < t else g0 - 1
                            if not self.limits or self._relocate_move_ok(
                                cli, r1, t, r2, ins_idx
                            ):
                                best_total = tot
                                best_r2 = r2
                                best_idx = ins_idx
                else:
                    m2 = self.rlen[r2]
                    for g in range(0, m2 + 1):
                        u = self.seq[r2, g - 1] if g > 0 else 0
                        tu = self.comp[r2, g]
                        arrive = tu + self.c[u, cli] + r_cli
                        if g < m2:
                            x = self.seq[r2, g]
                            dt_ins = (
                                self.c[u, cli] + r_cli + self.c[cli, x] - self.c[u, x]
                            )
                            dins = w_cli * arrive + dt_ins * self.wsuf[r2, g + 1]
                        else:
                            dt_ins = 0.0
                            dins = w_cli * arrive
                        tot = drem + dins
                        if self.has_big:
                            pen = (
                                pen_rem
                                + self._ind(arrive)
                                + self._flips(r2, g + 1, m2, dt_ins)
                            )
                            tot = tot + pen * self.big_penalty
                        if tot < best_total:
                            if not self.limits or self._relocate_move_ok(
                                cli, r1, t, r2, g
                            ):
                                best_total = tot
                                best_r2 = r2
                                best_idx = g
            if best_r2 >= 0:
                # pop position t from r1, insert into best_r2 at best_idx
                m1 = self.rlen[r1]
                for q in range(t - 1, m1 - 1):
                    self.seq[r1, q] = self.seq[r1, q + 1]
                self.rlen[r1] = m1 - 1
                m2 = self.rlen[best_r2]
                for q in range(m2, best_idx, -1):
                    self.seq[best_r2, q] = self.seq[best_r2, q - 1]
                self.seq[best_r2, best_idx] = cli
                self.rlen[best_r2] = m2 + 1
                self._rebuild(r1)
                if best_r2 != r1:
                    self._rebuild(best_r2)
                return True
        return False

    def two_opt_star(self):
        """Exchange route tails between two routes; first improvement.

        Cut positions include the depot end (empty head) and the route end
        (empty tail), but never both at once for the same new route."""
        if self.k < 2:
            return False
        cdef int a, b, ma, mb, i, j, va, vb, first_a, first_b, pen, q, la, lb
        cdef double delta, dt_a, dt_b
        cdef bint ok
        for a in range(self.k - 1):
            ma = self.rlen[a]
            for b in range(a + 1, self.k):
                mb = self.rlen[b]
                for i in range(0, ma + 1):
                    va = self.seq[a, i - 1] if i > 0 else 0
                    for j in range(0, mb + 1):
                        if (i == 0 and j == mb) or (j == 0 and i == ma):
                            continue  # would empty a route
                        vb = self.seq[b, j - 1] if j > 0 else 0
                        delta = 0.0
                        pen = 0
                        if j < mb:
                            first_b = self.seq[b, j]
                            dt_b = (
                                self.comp[a, i]
                                + self.c[va, first_b]
                                - (self.comp[b, j] + self.c[vb, first_b])
                            )
                            delta += dt_b * self.wsuf[b, j + 1]
                            if self.has_big:
                                pen += self._flips(b, j + 1, mb, dt_b)
                        if i < ma:
                            first_a = self.seq[a, i]
                            dt_a = (
                                self.comp[b, j]
                                + self.c[vb, first_a]
                                - (self.comp[a, i] + self.c[va, first_a])
                            )
                            delta += dt_a * self.wsuf[a, i + 1]
                            if self.has_big:
                                pen += self._flips(a, i + 1, ma, dt_a)
                        if self.has_big:
                            delta = delta + pen * self.big_penalty
                        if delta < -_MOVE_EPS:
                            if self.limits:
                                # candidate a: head_a + tail_b, candidate b: head_b + tail_a
                                for q in range(i):
                                    self.scr1[q] = self.seq[a, q]
                                for q in range(j, mb):
                                    self.scr1[i + q - j] = self.seq[b, q]
                                ok = True
                                if self._route_ok_row(a) and not self._route_ok_arr(
                                    self.scr1, i + mb - j
                                ):
                                    ok = False
                                if ok:
                                    for q in range(j):
                                        self.scr1[q] = self.seq[b, q]
                                    for q in range(i, ma):
                                        self.scr1[j + q - i] = self.seq[a, q]
                                    if self._route_ok_row(b) and not self._route_ok_arr(
                                        self.scr1, j + ma - i
                                    ):
                                        ok = False
                                if not ok:
                                    continue
                            # apply: swap tails via scratch copies
                            la = ma - i
                            lb = mb - j
                            for q in range(la):
                                self.scr1[q] = self.seq[a, i + q]
                            for q in range(lb):
                                self.scr2[q] = self.seq[b, j + q]
                            for q in range(lb):
                                self.seq[a, i + q] = self.scr2[q]
                            for q in range(la):
                                self.seq[b, j + q] = self.scr1[q]
                            self.rlen[a] = i + lb
                            self.rlen[b] = j + la
                            self._rebuild(a)
                            self._rebuild(b)
                            return True
        return False

    def perturb(self, p):
        """Remove p random distinct clients at once, then greedily reinsert
        them in removal order, each at its cheapest position. Keeps K routes
        non-empty by forcing empty routes to be refilled when the remaining
        insertions only just cover them."""
        cdef int n = self.n
        cdef int p_eff = p if p < n - 1 else n - 1
        if p_eff <= 0:
            return
        cdef int t, j, tmp, ridx, keep, i, v, idx, cli, remaining, empties
        cdef int r2, m2, g, u, x, best_ok_r, best_ok_g, best_any_r, best_any_g, q
        cdef bint force_empty
        cdef double w_cli, r_cli, arrive, dt_ins, dins, best_ok, best_any
        cdef int pen
        for i in range(n):
            self.order_buf[i] = i + 1
        for t in range(p_eff):
            j = t + <int> self._randbelow(<u32> (n - t))
            tmp = self.order_buf[t]
            self.order_buf[t] = self.order_buf[j]
            self.order_buf[j] = tmp
            self.removed_buf[t] = self.order_buf[t]
        for i in range(n + 1):
            self.flag_buf[i] = 0
        for t in range(p_eff):
            self.flag_buf[self.removed_buf[t]] = 1
        for ridx in range(self.k):
            keep = 0
            for i in range(self.rlen[ridx]):
                v = self.seq[ridx, i]
                if not self.flag_buf[v]:
                    self.seq[ridx, keep] = v
                    keep += 1
            self.rlen[ridx] = keep
            self._rebuild(ridx)
        for idx in range(p_eff):
            cli = self.removed_buf[idx]
            remaining = p_eff - idx
            empties = 0
            for ridx in range(self.k):
                if self.rlen[ridx] == 0:
                    empties += 1
            force_empty = empties >= remaining
            w_cli = self.w[cli]
            r_cli = self.r[cli]
            best_ok = np.inf
            best_ok_r = -1
            best_ok_g = -1
            best_any = np.inf
            best_any_r = -1
            best_any_g = -1
            for r2 in range(self.k):
                m2 = self.rlen[r2]
                if force_empty and m2 > 0:
                    continue
                for g in range(0, m2 + 1):
                    u = self.seq[r2, g - 1] if g > 0 else 0
                    arrive = self.comp[r2, g] + self.c[u, cli] + r_cli
                    if g < m2:
                        x = self.seq[r2, g]
                        dt_ins = (
                            self.c[u, cli] + r_cli + self.c[cli, x] - self.c[u, x]
                        )
                        dins = w_cli * arrive + dt_ins * self.wsuf[r2, g + 1]
                    else:
                        dt_ins = 0.0
                        dins = w_cli * arrive
                    if self.has_big:
                        pen = self._ind(arrive) + self._flips(r2, g + 1, m2, dt_ins)
                        dins = dins + pen * self.big_penalty
                    if dins < best_any:
                        best_any = dins
                        best_any_r = r2
                        best_any_g = g
                    if self.limits and dins < best_ok:
                        for q in range(m2):
                            self.scr1[q] = self.seq[r2, q]
                        for q in range(m2, g, -1):
                            self.scr1[q] = self.scr1[q - 1]
                        self.scr1[g] = cli
                        if not (
                            self._route_ok_row(r2)
                            and not self._route_ok_arr(self.scr1, m2 + 1)
                        ):
                            best_ok = dins
                            best_ok_r = r2
                            best_ok_g = g
            if self.limits and best_ok_r >= 0:
                r2 = best_ok_r
                g = best_ok_g
            else:
                r2 = best_any_r
                g = best_any_g
            m2 = self.rlen[r2]
            for q in range(m2, g, -1):
                self.seq[r2, q] = self.seq[r2, q - 1]
            self.seq[r2, g] = cli
            self.rlen[r2] = m2 + 1
            self._rebuild(r2)
