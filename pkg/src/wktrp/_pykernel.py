"""Pure-Python search kernel (fallback backend).

Keep in lockstep with _speedups.pyx: both backends must consume the same
PCG32 stream and perform floating-point operations in the same order so a
run produces identical move sequences, costs and traces on either one.

Internal state per engine:
  seq[r]    route r as a list of client ids (no depot)
  comp[r]   completion times, comp[r][0] = 0, 1-based positions
  wsuf[r]   suffix weight sums, wsuf[r][t] = weights from position t on,
            wsuf[r][m+1] = 0
  cli_route / cli_pos   location of every client (positions 1-based)

Arc costs arrive with +inf already replaced by a finite BIG value that
dwarfs any true path length. ``total_cost`` charges ``big_penalty`` per
client whose completion time reaches ``big_cutoff`` (which happens iff a
forbidden arc lies on its depot path), and every move delta accounts for
those penalty flips exactly, so the search steers away from forbidden
arcs even through zero-weight clients. Completion times are nondecreasing
along a route and sit either far below or far above the cutoff, so the
flips caused by shifting a block of completions are counted with a
binary search; the count is exact because a shift small enough to be
ambiguous cannot cross the gap around the cutoff.
"""

from __future__ import annotations

import math

_M64 = (1 << 64) - 1
_M32 = (1 << 32) - 1
_PCG_MULT = 6364136223846793005
_INV32 = 1.0 / 4294967296.0

MOVE_EPS = 1e-9
LIMIT_EPS = 1e-9


class Engine:
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
        self.c = [list(map(float, row)) for row in travel]
        self.w = list(map(float, weights))
        self.r = list(map(float, service))
        self.n = len(self.w) - 1
        self.k = int(k)
        self.state = int(rng_state) & _M64
        self.inc = int(rng_inc) & _M64
        self.closing = list(map(float, closing))
        self.dlimit = float(duration_limit)
        self.deadline = list(map(float, deadlines))
        self.big_cutoff = float(big_cutoff)
        self.big_penalty = float(big_penalty)
        self.half_big = 0.5 * self.big_cutoff
        self.has_big = any(v >= self.big_cutoff for row in self.c for v in row)
        self.limits = math.isfinite(self.dlimit) or any(
            math.isfinite(d) for d in self.deadline[1:]
        )
        self.seq = [[] for _ in range(self.k)]
        self.comp = [[0.0] for _ in range(self.k)]
        self.wsuf = [[0.0, 0.0] for _ in range(self.k)]
        self.cli_route = [0] * (self.n + 1)
        self.cli_pos = [0] * (self.n + 1)

    # -- PCG32 ------------------------------------------------------------

    def _next32(self):
        old = self.state
        self.state = (old * _PCG_MULT + self.inc) & _M64
        xorshifted = (((old >> 18) ^ old) >> 27) & _M32
        rot = old >> 59
        return ((xorshifted >> rot) | (xorshifted << ((32 - rot) & 31))) & _M32

    def uniform(self):
        return self._next32() * _INV32

    def _randbelow(self, bound):
        threshold = ((1 << 32) - bound) % bound
        while True:
            r = self._next32()
            if r >= threshold:
                return r % bound

    def rng_state(self):
        return self.state

    # -- forbidden-arc penalty bookkeeping -----------------------------------

    def _ind(self, value):
        return 1 if value >= self.big_cutoff else 0

    def _flips(self, comp_r, lo, hi, dt):
        """Signed change in the number of penalized positions among the
        1-based positions lo..hi when their completions shift by dt."""
        if hi < lo:
            return 0
        if -self.half_big < dt < self.half_big:
            return 0  # too small to carry anything across the cutoff
        cutoff = self.big_cutoff
        if dt > 0.0:
            return self._count_range(comp_r, lo, hi, cutoff - dt, cutoff)
        return -self._count_range(comp_r, lo, hi, cutoff, cutoff - dt)

    @staticmethod
    def _count_range(comp_r, lo, hi, a, b):
        """#positions p in [lo, hi] with a <= comp_r[p] < b; comp_r is
        nondecreasing over the range."""
        la, ha = lo, hi
        while la <= ha:
            mid = (la + ha) >> 1
            if comp_r[mid] >= a:
                ha = mid - 1
            else:
                la = mid + 1
        first_a = la
        lb, hb = lo, hi
        while lb <= hb:
            mid = (lb + hb) >> 1
            if comp_r[mid] >= b:
                hb = mid - 1
            else:
                lb = mid + 1
        return lb - first_a

    # -- state maintenance -------------------------------------------------

    def _rebuild(self, ridx):
        seq_r = self.seq[ridx]
        m = len(seq_r)
        c = self.c
        rr = self.r
        w = self.w
        comp_r = [0.0] * (m + 1)
        t = 0.0
        prev = 0
        for idx in range(1, m + 1):
            v = seq_r[idx - 1]
            t = t + c[prev][v] + rr[v]
            comp_r[idx] = t
            prev = v
            self.cli_route[v] = ridx
            self.cli_pos[v] = idx
        wsuf_r = [0.0] * (m + 2)
        acc = 0.0
        for idx in range(m, 0, -1):
            acc = acc + w[seq_r[idx - 1]]
            wsuf_r[idx] = acc
        self.comp[ridx] = comp_r
        self.wsuf[ridx] = wsuf_r

    def set_routes(self, routes):
        self.seq = [list(route) for route in routes]
        for ridx in range(self.k):
            self._rebuild(ridx)

    def get_routes(self):
        return [list(route) for route in self.seq]

    def build_initial(self):
        """Uniform shuffle, then deal clients round-robin over the K routes."""
        order = list(range(1, self.n + 1))
        for i in range(self.n - 1, 0, -1):
            j = self._randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        self.seq = [[] for _ in range(self.k)]
        for t, v in enumerate(order):
            self.seq[t % self.k].append(v)
        for ridx in range(self.k):
            self._rebuild(ridx)

    def total_cost(self):
        acc = 0.0
        pen = 0
        w = self.w
        cutoff = self.big_cutoff
        for ridx in range(self.k):
            seq_r = self.seq[ridx]
            comp_r = self.comp[ridx]
            for t in range(1, len(seq_r) + 1):
                ct = comp_r[t]
                acc += w[seq_r[t - 1]] * ct
                if ct >= cutoff:
                    pen += 1
        return acc + pen * self.big_penalty

    # -- variant limits ----------------------------------------------------

    def _route_ok(self, seq_list):
        c = self.c
        rr = self.r
        dl = self.deadline
        t = 0.0
        prev = 0
        for v in seq_list:
            t += c[prev][v] + rr[v]
            if t > dl[v] + LIMIT_EPS:
                return False
            prev = v
        if math.isfinite(self.dlimit):
            if t + self.closing[prev] > self.dlimit + LIMIT_EPS:
                return False
        return True

    def _move_ok(self, changes):
        """Reject only moves that break a route that was fine before."""
        for ridx, new_seq in changes:
            if self._route_ok(self.seq[ridx]) and not self._route_ok(new_seq):
                return False
        return True

    def _relocate_changed(self, cli, r1, t, r2, ins_idx):
        removed = self.seq[r1][: t - 1] + self.seq[r1][t:]
        if r2 == r1:
            cand = list(removed)
            cand.insert(ins_idx, cli)
            return [(r1, cand)]
        cand2 = list(self.seq[r2])
        cand2.insert(ins_idx, cli)
        return [(r1, removed), (r2, cand2)]

    # -- neighborhood moves --------------------------------------------------

    def relocate(self):
        """Scan clients in random order; for each, find its cheapest
        reinsertion anywhere; apply the first strictly improving one."""
        n = self.n
        c = self.c
        rr = self.r
        w = self.w
        order = list(range(1, n + 1))
        for i in range(n - 1, 0, -1):
            j = self._randbelow(i + 1)
            order[i], order[j] = order[j], order[i]
        for oi in range(n):
            cli = order[oi]
            r1 = self.cli_route[cli]
            seq_1 = self.seq[r1]
            m1 = len(seq_1)
            if m1 == 1:
                continue  # moving it would empty the route
            t = self.cli_pos[cli]
            comp_1 = self.comp[r1]
            wsuf_1 = self.wsuf[r1]
            w_cli = w[cli]
            r_cli = rr[cli]
            c_cli = c[cli]
            prev = seq_1[t - 2] if t > 1 else 0
            if t < m1:
                nxt = seq_1[t]
                dt_rem = c[prev][nxt] - (c[prev][cli] + r_cli + c_cli[nxt])
                drem = dt_rem * wsuf_1[t + 1] - w_cli * comp_1[t]
            else:
                dt_rem = 0.0
                drem = -w_cli * comp_1[t]
            if self.has_big:
                ind_own = self._ind(comp_1[t])
                pen_rem = self._flips(comp_1, t + 1, m1, dt_rem) - ind_own
            else:
                ind_own = 0
                pen_rem = 0

            best_total = -MOVE_EPS
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
                        u = seq_1[g0 - 1] if g0 > 0 else 0
                        tu = comp_1[g0] + dt_rem if g0 > t else comp_1[g0]
                        arrive = tu + c[u][cli] + r_cli
                        if x0 <= m1:
                            x = seq_1[x0 - 1]
                            wx = wsuf_1[x0] - w_cli if x0 <= t else wsuf_1[x0]
                            dt_ins = c[u][cli] + r_cli + c_cli[x] - c[u][x]
                            dins = w_cli * arrive + dt_ins * wx
                        else:
                            dt_ins = 0.0
                            dins = w_cli * arrive
                        tot = drem + dins
                        if self.has_big:
                            if g0 < t:
                                pen = self._flips(
                                    comp_1, g0 + 1, t - 1, dt_ins
                                ) + self._flips(comp_1, t + 1, m1, dt_rem + dt_ins)
                            else:
                                pen = self._flips(
                                    comp_1, t + 1, g0, dt_rem
                                ) + self._flips(comp_1, g0 + 1, m1, dt_rem + dt_ins)
                            pen += self._ind(arrive) - ind_own
                            tot = tot + pen * self.big_penalty
                        if tot < best_total:
                            ins_idx = g0 if g0 < t else g0 - 1
                            if not self.limits or self._move_ok(
                                self._relocate_changed(cli, r1, t, r2, ins_idx)
                            ):
                                best_total = tot
                                best_r2 = r2
                                best_idx = ins_idx
                else:
                    seq_2 = self.seq[r2]
                    m2 = len(seq_2)
                    comp_2 = self.comp[r2]
                    wsuf_2 = self.wsuf[r2]
                    for g in range(0, m2 + 1):
                        u = seq_2[g - 1] if g > 0 else 0
                        tu = comp_2[g]
                        arrive = tu + c[u][cli] + r_cli
                        if g < m2:
                            x = seq_2[g]
                            dt_ins = c[u][cli] + r_cli + c_cli[x] - c[u][x]
                            dins = w_cli * arrive + dt_ins * wsuf_2[g + 1]
                        else:
                            dt_ins = 0.0
                            dins = w_cli * arrive
                        tot = drem + dins
                        if self.has_big:
                            pen = (
                                pen_rem
                                + self._ind(arrive)
                                + self._flips(comp_2, g + 1, m2, dt_ins)
                            )
                            tot = tot + pen * self.big_penalty
                        if tot < best_total:
                            if not self.limits or self._move_ok(
                                self._relocate_changed(cli, r1, t, r2, g)
                            ):
                                best_total = tot
                                best_r2 = r2
                                best_idx = g
            if best_r2 >= 0:
                self.seq[r1].pop(t - 1)
                self.seq[best_r2].insert(best_idx, cli)
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
        c = self.c
        for a in range(self.k - 1):
            seq_a = self.seq[a]
            ma = len(seq_a)
            comp_a = self.comp[a]
            wsuf_a = self.wsuf[a]
            for b in range(a + 1, self.k):
                seq_b = self.seq[b]
                mb = len(seq_b)
                comp_b = self.comp[b]
                wsuf_b = self.wsuf[b]
                for i in range(0, ma + 1):
                    va = seq_a[i - 1] if i > 0 else 0
                    for j in range(0, mb + 1):
                        if (i == 0 and j == mb) or (j == 0 and i == ma):
                            continue  # would empty a route
                        vb = seq_b[j - 1] if j > 0 else 0
                        delta = 0.0
                        pen = 0
                        if j < mb:
                            first_b = seq_b[j]
                            dt_b = (
                                comp_a[i]
                                + c[va][first_b]
                                - (comp_b[j] + c[vb][first_b])
                            )
                            delta += dt_b * wsuf_b[j + 1]
                            if self.has_big:
                                pen += self._flips(comp_b, j + 1, mb, dt_b)
                        if i < ma:
                            first_a = seq_a[i]
                            dt_a = (
                                comp_b[j]
                                + c[vb][first_a]
                                - (comp_a[i] + c[va][first_a])
                            )
                            delta += dt_a * wsuf_a[i + 1]
                            if self.has_big:
                                pen += self._flips(comp_a, i + 1, ma, dt_a)
                        if self.has_big:
                            delta = delta + pen * self.big_penalty
                        if delta < -MOVE_EPS:
                            if self.limits:
                                new_a = seq_a[:i] + seq_b[j:]
                                new_b = seq_b[:j] + seq_a[i:]
                                if not self._move_ok([(a, new_a), (b, new_b)]):
                                    continue
                            tail_a = seq_a[i:]
                            tail_b = seq_b[j:]
                            self.seq[a] = seq_a[:i] + tail_b
                            self.seq[b] = seq_b[:j] + tail_a
                            self._rebuild(a)
                            self._rebuild(b)
                            return True
        return False

    def perturb(self, p):
        """Remove p random distinct clients at once, then greedily reinsert
        them in removal order, each at its cheapest position. Keeps K routes
        non-empty by forcing empty routes to be refilled when the remaining
        insertions only just cover them."""
        n = self.n
        p_eff = min(p, n - 1)
        if p_eff <= 0:
            return
        arr = list(range(1, n + 1))
        removed = []
        for t in range(p_eff):
            j = t + self._randbelow(n - t)
            arr[t], arr[j] = arr[j], arr[t]
            removed.append(arr[t])
        removed_set = set(removed)
        for ridx in range(self.k):
            self.seq[ridx] = [v for v in self.seq[ridx] if v not in removed_set]
            self._rebuild(ridx)
        c = self.c
        rr = self.r
        w = self.w
        for idx in range(p_eff):
            cli = removed[idx]
            remaining = p_eff - idx
            empties = 0
            for ridx in range(self.k):
                if not self.seq[ridx]:
                    empties += 1
            force_empty = empties >= remaining
            w_cli = w[cli]
            r_cli = rr[cli]
            c_cli = c[cli]
            best_ok = math.inf
            best_ok_r = -1
            best_ok_g = -1
            best_any = math.inf
            best_any_r = -1
            best_any_g = -1
            for r2 in range(self.k):
                seq_2 = self.seq[r2]
                m2 = len(seq_2)
                if force_empty and m2 > 0:
                    continue
                comp_2 = self.comp[r2]
                wsuf_2 = self.wsuf[r2]
                for g in range(0, m2 + 1):
                    u = seq_2[g - 1] if g > 0 else 0
                    arrive = comp_2[g] + c[u][cli] + r_cli
                    if g < m2:
                        x = seq_2[g]
                        dt_ins = c[u][cli] + r_cli + c_cli[x] - c[u][x]
                        dins = w_cli * arrive + dt_ins * wsuf_2[g + 1]
                    else:
                        dt_ins = 0.0
                        dins = w_cli * arrive
                    if self.has_big:
                        pen = self._ind(arrive) + self._flips(
                            comp_2, g + 1, m2, dt_ins
                        )
                        dins = dins + pen * self.big_penalty
                    if dins < best_any:
                        best_any = dins
                        best_any_r = r2
                        best_any_g = g
                    if self.limits and dins < best_ok:
                        cand = list(seq_2)
                        cand.insert(g, cli)
                        if self._move_ok([(r2, cand)]):
                            best_ok = dins
                            best_ok_r = r2
                            best_ok_g = g
            if self.limits and best_ok_r >= 0:
                tgt, gap = best_ok_r, best_ok_g
            else:
                tgt, gap = best_any_r, best_any_g
            self.seq[tgt].insert(gap, cli)
            self._rebuild(tgt)
