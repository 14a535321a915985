"""Compiled per-tick kernels backing the engine.

These mirror the module-level reference implementations (geometry, vision,
estimation, behavior, kinematics) op for op; tests pin the two paths
together on random worlds.  Everything here is sequential and
deterministic: the only randomness flows through the per-robot splitmix64
states passed in, advanced in ascending robot order.
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

TWO_PI = 2.0 * math.pi

# occlusion policy codes
XRAY, OMID, CENTER, COMPLID = 0, 1, 2, 3
# estimator codes
EST_ORACLE, EST_HYBRID, EST_VERTICAL = 0, 1, 2
# faulty-interaction rule codes
RULE_AVOID, RULE_HALF_FORCE, RULE_HALF_TIME = 0, 1, 2
# classification codes
CLS_NONE, CLS_NOMINAL, CLS_FAULTY = 0, 1, 2

MIN_VISIBLE_WIDTH = 1e-12

_U_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_U_M1 = np.uint64(0xBF58476D1CE4E5B9)
_U_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0

# corner order matches geometry.rect_corners (counterclockwise from front-left)
_CORNER_SX = (1.0, -1.0, -1.0, 1.0)
_CORNER_SY = (1.0, 1.0, -1.0, -1.0)


@njit(cache=True, inline="always")
def _wrap(a):
    if -math.pi < a <= math.pi:
        return a
    w = (a + math.pi) % TWO_PI
    if w <= 0.0:
        w += TWO_PI
    return w - math.pi


@njit(cache=True, inline="always")
def _rng_float(states, i):
    s = states[i] + _U_GOLDEN
    states[i] = s
    z = (s ^ (s >> _S30)) * _U_M1
    z = (z ^ (z >> _S27)) * _U_M2
    z = z ^ (z >> _S31)
    return np.float64(z >> _S11) * _INV53


@njit(cache=True, inline="always")
def _rng_randint(states, i, lo, hi):
    return lo + int(_rng_float(states, i) * (hi - lo))


@njit(cache=True)
def sense_tick(pos, psi, hl, hw, body_l, body_w, height, eps_match,
               r_sense, policy, estimator, read_relh,
               vis, b_l, b_r, a_l, a_r, est_r, est_b, est_th, relh):
    """Detection, occlusion handling, and center estimation for all robots.

    Fills the per-pair visibility mask and measurement arrays from the
    start-of-tick pose snapshot.
    """
    n = pos.shape[0]
    dist = np.empty(n)
    order = np.empty(n, np.int64)
    anch = np.empty(n)
    lo_w = np.empty(n)
    hi_w = np.empty(n)
    d_lo = np.empty(n)
    d_hi = np.empty(n)
    seg_lo = np.empty(n)
    seg_hi = np.empty(n)

    for i in range(n):
        ox = pos[i, 0]
        oy = pos[i, 1]
        m = 0
        for j in range(n):
            vis[i, j] = False
            if j == i:
                continue
            dist[j] = math.hypot(pos[j, 0] - ox, pos[j, 1] - oy)
            if dist[j] <= r_sense:
                order[m] = j
                m += 1
        # sort candidates by (distance, id): occluders precede their targets
        for a in range(1, m):
            key = order[a]
            kd = dist[key]
            b = a - 1
            while b >= 0 and (dist[order[b]] > kd
                              or (dist[order[b]] == kd and order[b] > key)):
                order[b + 1] = order[b]
                b -= 1
            order[b + 1] = key

        for a in range(m):
            j = order[a]
            anchor = math.atan2(pos[j, 1] - oy, pos[j, 0] - ox)
            ch = math.cos(psi[j])
            sh = math.sin(psi[j])
            off_lo = math.inf
            off_hi = -math.inf
            dc_lo = 0.0
            dc_hi = 0.0
            for c in range(4):
                bx = _CORNER_SX[c] * hl
                by = _CORNER_SY[c] * hw
                cx = pos[j, 0] + bx * ch - by * sh
                cy = pos[j, 1] + bx * sh + by * ch
                off = _wrap(math.atan2(cy - oy, cx - ox) - anchor)
                dc = math.hypot(cx - ox, cy - oy)
                if off < off_lo:
                    off_lo = off
                    dc_lo = dc
                if off > off_hi:
                    off_hi = off
                    dc_hi = dc
            anch[j] = anchor
            lo_w[j] = anchor + off_lo
            hi_w[j] = anchor + off_hi
            d_lo[j] = dc_lo
            d_hi[j] = dc_hi

        for a in range(m):
            j = order[a]
            detected = True
            if policy != XRAY and a > 0:
                base_lo = lo_w[j]
                base_hi = hi_w[j]
                base_c = 0.5 * (base_lo + base_hi)
                if policy == OMID:
                    for b in range(a):
                        k = order[b]
                        kc = 0.5 * (lo_w[k] + hi_w[k])
                        shift = base_c + _wrap(kc - base_c) - kc
                        if lo_w[k] + shift < base_hi and hi_w[k] + shift > base_lo:
                            detected = False
                            break
                elif policy == CENTER:
                    for b in range(a):
                        k = order[b]
                        # rebase the center ray next to the occluder's arc
                        kc = 0.5 * (lo_w[k] + hi_w[k])
                        ray = kc + _wrap(anch[j] - kc)
                        if lo_w[k] <= ray <= hi_w[k]:
                            detected = False
                            break
                else:  # COMPLID: visible unless fully covered
                    nseg = 0
                    for b in range(a):
                        k = order[b]
                        kc = 0.5 * (lo_w[k] + hi_w[k])
                        shift = base_c + _wrap(kc - base_c) - kc
                        s_lo = lo_w[k] + shift
                        s_hi = hi_w[k] + shift
                        if s_lo < base_lo:
                            s_lo = base_lo
                        if s_hi > base_hi:
                            s_hi = base_hi
                        if s_hi > s_lo:
                            seg_lo[nseg] = s_lo
                            seg_hi[nseg] = s_hi
                            nseg += 1
                    for x in range(1, nseg):
                        klo = seg_lo[x]
                        khi = seg_hi[x]
                        y = x - 1
                        while y >= 0 and seg_lo[y] > klo:
                            seg_lo[y + 1] = seg_lo[y]
                            seg_hi[y + 1] = seg_hi[y]
                            y -= 1
                        seg_lo[y + 1] = klo
                        seg_hi[y + 1] = khi
                    cursor = base_lo
                    gap = False
                    for x in range(nseg):
                        if seg_lo[x] - cursor > MIN_VISIBLE_WIDTH:
                            gap = True
                            break
                        if seg_hi[x] > cursor:
                            cursor = seg_hi[x]
                    if not gap:
                        gap = base_hi - cursor > MIN_VISIBLE_WIDTH
                    detected = gap
            if not detected:
                continue

            vis[i, j] = True
            raw_center = 0.5 * (lo_w[j] + hi_w[j]) - psi[i]
            shift = _wrap(raw_center) - raw_center
            bl = lo_w[j] - psi[i] + shift
            br = hi_w[j] - psi[i] + shift
            alpha_l = 2.0 * math.atan(height / (2.0 * d_lo[j]))
            alpha_r = 2.0 * math.atan(height / (2.0 * d_hi[j]))
            b_l[i, j] = bl
            b_r[i, j] = br
            a_l[i, j] = alpha_l
            a_r[i, j] = alpha_r
            est_th[i, j] = hi_w[j] - lo_w[j]
            if read_relh:
                relh[i, j] = _wrap(psi[j] - psi[i])
            if estimator == EST_ORACLE:
                est_r[i, j] = dist[j]
                est_b[i, j] = _wrap(anch[j] - psi[i])
            else:
                r_l = 0.5 * height / math.tan(0.5 * alpha_l)
                r_r = 0.5 * height / math.tan(0.5 * alpha_r)
                lx = r_l * math.cos(bl)
                ly = r_l * math.sin(bl)
                rx = r_r * math.cos(br)
                ry = r_r * math.sin(br)
                span = math.hypot(rx - lx, ry - ly)
                r_mid = math.hypot(0.5 * (lx + rx), 0.5 * (ly + ry))
                corr = 0.0
                if estimator == EST_HYBRID:
                    if abs(span - body_l) <= eps_match:
                        corr = 0.5 * body_w
                    elif abs(span - body_w) <= eps_match:
                        corr = 0.5 * body_l
                est_r[i, j] = r_mid + corr
                est_b[i, j] = 0.5 * (bl + br)


@njit(cache=True)
def behavior_tick(use_pg, use_align, rule, p_faulty,
                  r_d, k_f, k3, k1, k2, u_fwd, u_max, w_lim,
                  pmin, pmax, gmin, gmax, u_min_per_tick, theta_min,
                  vis, vis_prev, est_r, est_b, est_th,
                  prev_r, prev_b, prev_th, relh,
                  cls, paused, timer, was_paused, rng_states,
                  eff_faulty, fp_acc, cmd_u, cmd_w):
    """State machine, classification, force aggregation, and motion control.

    Alignment averages the unit vectors of non-faulty neighbors' relative
    headings (the idealized orientation reading), skipping exactly aligned
    ones.  fp_acc accumulates (false positives, completed pause cycles)
    over nominal observers.
    """
    n = vis.shape[0]
    for i in range(n):
        if use_pg:
            if timer[i] <= 0:
                if paused[i]:
                    if not eff_faulty[i]:
                        cnt = 0
                        for j in range(n):
                            if cls[i, j] == CLS_FAULTY and not eff_faulty[j]:
                                cnt += 1
                        fp_acc[0] += cnt
                        fp_acc[1] += 1
                    paused[i] = False
                    timer[i] = _rng_randint(rng_states, i, gmin, gmax)
                else:
                    paused[i] = True
                    timer[i] = _rng_randint(rng_states, i, pmin, pmax)
                    for j in range(n):
                        cls[i, j] = CLS_NONE
            for j in range(n):
                if vis_prev[i, j] and not vis[i, j]:
                    cls[i, j] = CLS_NONE

        if use_pg and paused[i]:
            if was_paused[i]:
                for j in range(n):
                    if vis_prev[i, j] and vis[i, j]:
                        px = prev_r[i, j] * math.cos(prev_b[i, j])
                        py = prev_r[i, j] * math.sin(prev_b[i, j])
                        cx = est_r[i, j] * math.cos(est_b[i, j])
                        cy = est_r[i, j] * math.sin(est_b[i, j])
                        du = math.hypot(cx - px, cy - py)
                        dth = (est_th[i, j] - prev_th[i, j]) / est_th[i, j]
                        below = du <= u_min_per_tick and abs(dth) <= theta_min
                        c = cls[i, j]
                        if c == CLS_NONE:
                            cls[i, j] = CLS_FAULTY if below else CLS_NOMINAL
                        elif c == CLS_FAULTY and not below:
                            cls[i, j] = CLS_NOMINAL
            cmd_u[i] = 0.0
            cmd_w[i] = 0.0
            was_paused[i] = True
        else:
            fx = 0.0
            fy = 0.0
            ax = 0.0
            ay = 0.0
            n_align = 0
            for j in range(n):
                if not vis[i, j]:
                    continue
                faulty = False
                if use_pg:
                    if cls[i, j] == CLS_NONE:
                        cls[i, j] = CLS_NOMINAL
                    faulty = cls[i, j] == CLS_FAULTY
                r = est_r[i, j]
                b = est_b[i, j]
                if faulty:
                    if rule == RULE_HALF_FORCE:
                        mag = 0.5 * (r - r_d) / (r * r)
                    elif rule == RULE_HALF_TIME:
                        if _rng_float(rng_states, i) < p_faulty:
                            mag = (r - r_d) / (r * r) if r < r_d else 0.0
                        else:
                            mag = k_f * (r - r_d) / (r * r)
                    else:
                        mag = (r - r_d) / (r * r) if r < r_d else 0.0
                    fx += mag * math.cos(b)
                    fy += mag * math.sin(b)
                else:
                    mag = k_f * (r - r_d) / (r * r)
                    fx += mag * math.cos(b)
                    fy += mag * math.sin(b)
                    if use_align:
                        h = relh[i, j]
                        if h != 0.0:
                            ax += math.cos(h)
                            ay += math.sin(h)
                            n_align += 1
            if use_align and n_align > 0:
                fx += k3 * (ax / n_align)
                fy += k3 * (ay / n_align)
            u = k1 * fx + u_fwd
            if u < 0.0:
                u = 0.0
            elif u > u_max:
                u = u_max
            w = k2 * fy
            if w < -w_lim:
                w = -w_lim
            elif w > w_lim:
                w = w_lim
            cmd_u[i] = u
            cmd_w[i] = w
            was_paused[i] = False

        if use_pg:
            timer[i] -= 1


@njit(cache=True)
def integrate_tick(pos, psi, cmd_u, cmd_w, dt):
    """Forward-Euler unicycle step; position uses the pre-update heading."""
    n = pos.shape[0]
    for i in range(n):
        pos[i, 0] += cmd_u[i] * dt * math.cos(psi[i])
        pos[i, 1] += cmd_u[i] * dt * math.sin(psi[i])
        psi[i] = _wrap(psi[i] + cmd_w[i] * dt)


@njit(cache=True)
def resolve_collisions_tick(pos, psi, hl, hw, immovable, max_sweeps):
    """Separate overlapping rectangle pairs along the minimum-translation
    axis; immovable robots pass their share to the other body.  Returns the
    number of sweeps that moved something (max_sweeps if the budget ran
    out)."""
    n = pos.shape[0]
    reach = 2.0 * math.hypot(hl, hw)
    reach2 = reach * reach
    used = 0
    for _ in range(max_sweeps):
        moved = False
        for i in range(n):
            for j in range(i + 1, n):
                dx = pos[j, 0] - pos[i, 0]
                dy = pos[j, 1] - pos[i, 1]
                if dx * dx + dy * dy > reach2:
                    continue
                if immovable[i] and immovable[j]:
                    continue
                best = math.inf
                bax = 0.0
                bay = 0.0
                separated = False
                for src in range(2):
                    h = psi[i] if src == 0 else psi[j]
                    c = math.cos(h)
                    s = math.sin(h)
                    for axis in range(2):
                        ux = c if axis == 0 else -s
                        uy = s if axis == 0 else c
                        min_a = math.inf
                        max_a = -math.inf
                        min_b = math.inf
                        max_b = -math.inf
                        for cc in range(4):
                            bx = _CORNER_SX[cc] * hl
                            by = _CORNER_SY[cc] * hw
                            ci = math.cos(psi[i])
                            si = math.sin(psi[i])
                            p = ((pos[i, 0] + bx * ci - by * si) * ux
                                 + (pos[i, 1] + bx * si + by * ci) * uy)
                            if p < min_a:
                                min_a = p
                            if p > max_a:
                                max_a = p
                            cj = math.cos(psi[j])
                            sj = math.sin(psi[j])
                            q = ((pos[j, 0] + bx * cj - by * sj) * ux
                                 + (pos[j, 1] + bx * sj + by * cj) * uy)
                            if q < min_b:
                                min_b = q
                            if q > max_b:
                                max_b = q
                        depth = min(max_a, max_b) - max(min_a, min_b)
                        if depth <= 0.0:
                            separated = True
                            break
                        if depth < best:
                            best = depth
                            bax = ux
                            bay = uy
                    if separated:
                        break
                if separated:
                    continue
                sign = 1.0 if dx * bax + dy * bay >= 0.0 else -1.0
                mx = sign * best * bax
                my = sign * best * bay
                if immovable[i]:
                    pos[j, 0] += mx
                    pos[j, 1] += my
                elif immovable[j]:
                    pos[i, 0] -= mx
                    pos[i, 1] -= my
                else:
                    pos[i, 0] -= 0.5 * mx
                    pos[i, 1] -= 0.5 * my
                    pos[j, 0] += 0.5 * mx
                    pos[j, 1] += 0.5 * my
                moved = True
        if not moved:
            break
        used += 1
    return used


@njit(cache=True)
def component_count(pos, r_sense):
    """Connected components of the sensing graph (center distance edges)."""
    n = pos.shape[0]
    parent = np.arange(n)
    for i in range(n):
        for j in range(i + 1, n):
            if math.hypot(pos[j, 0] - pos[i, 0], pos[j, 1] - pos[i, 1]) <= r_sense:
                ri = i
                while parent[ri] != ri:
                    parent[ri] = parent[parent[ri]]
                    ri = parent[ri]
                rj = j
                while parent[rj] != rj:
                    parent[rj] = parent[parent[rj]]
                    rj = parent[rj]
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)
    count = 0
    for i in range(n):
        if parent[i] == i:
            count += 1
    return count
