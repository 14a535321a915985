"""Independent brute-force oracles used to cross-check the implementation.

Everything here recomputes from first principles (ray sampling, point
sampling, BFS) without touching the code paths under test.
"""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi


def corner_bearing_extent(ox, oy, cx, cy, heading, hl, hw):
    """(lo, hi) world-angle extent of a rectangle seen from (ox, oy),
    unwrapped around the bearing of its center."""
    anchor = math.atan2(cy - oy, cx - ox)
    c, s = math.cos(heading), math.sin(heading)
    lo, hi = math.inf, -math.inf
    for sx, sy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
        px = cx + sx * hl * c - sy * hw * s
        py = cy + sx * hl * s + sy * hw * c
        off = math.atan2(py - oy, px - ox) - anchor
        off = (off + math.pi) % TWO_PI
        if off <= 0.0:
            off += TWO_PI
        off -= math.pi
        lo = min(lo, off)
        hi = max(hi, off)
    return anchor + lo, anchor + hi


class RayOracle:
    """Ray-sampled visibility of every in-range robot from one observer.

    For each of n_rays uniformly spaced world angles the visible robot is
    the in-range robot whose arc contains the angle, nearest by
    (center distance, id) -- the simulator's depth model, recomputed here
    from scratch.
    """

    def __init__(self, poses, observer, r_sense, hl, hw, n_rays=10_000):
        n = len(poses)
        ox, oy, _ = poses[observer]
        self.n_rays = n_rays
        self.observer = observer
        self.dists = np.full(n, np.inf)
        self.arcs = {}
        for j in range(n):
            if j == observer:
                continue
            cx, cy, h = poses[j]
            self.dists[j] = math.hypot(cx - ox, cy - oy)
            self.arcs[j] = corner_bearing_extent(ox, oy, cx, cy, h, hl, hw)
        self.in_range = {j for j in range(n)
                         if j != observer and self.dists[j] <= r_sense}

        angles = -math.pi + TWO_PI * np.arange(n_rays) / n_rays
        winners = np.full(n_rays, -1, dtype=int)
        best = np.full(n_rays, np.inf)
        self.rays_in_arc = {}
        for j in sorted(self.in_range):
            lo, hi = self.arcs[j]
            inside = (angles - lo) % TWO_PI <= (hi - lo)
            self.rays_in_arc[j] = int(inside.sum())
            better = inside & (self.dists[j] < best)
            winners[better] = j
            best[better] = self.dists[j]
        self.winners = winners
        self._poses = poses
        self._origin = (ox, oy)

    def rays_seeing(self, j) -> int:
        return int((self.winners == j).sum())

    def rays_covered(self, j) -> int:
        return self.rays_in_arc[j] - self.rays_seeing(j)

    def center_ray_clear(self, j) -> bool:
        """Exact (unsampled) test of the ray to j's center."""
        ox, oy = self._origin
        cx, cy, _ = self._poses[j]
        cray = math.atan2(cy - oy, cx - ox)
        for k in self.in_range:
            if k == j or (self.dists[k], k) >= (self.dists[j], j):
                continue
            klo, khi = self.arcs[k]
            if (cray - klo) % TWO_PI <= khi - klo:
                return False
        return True


def sample_interval_coverage(base, occluders, n_samples=10_000):
    """Width of base covered by no occluder, by midpoint sampling."""
    lo, hi = base
    ts = lo + (hi - lo) * (np.arange(n_samples) + 0.5) / n_samples
    free = np.ones(n_samples, dtype=bool)
    for olo, ohi in occluders:
        rel = (ts - olo) % TWO_PI
        free &= ~(rel <= (ohi - olo))
    return free.mean() * (hi - lo)


def bfs_component_count(positions, r_sense):
    """Connected components by plain breadth-first search."""
    pos = np.asarray(positions, dtype=float)
    n = pos.shape[0]
    seen = [False] * n
    comps = 0
    for start in range(n):
        if seen[start]:
            continue
        comps += 1
        queue = [start]
        seen[start] = True
        while queue:
            a = queue.pop()
            for b in range(n):
                if not seen[b] and math.hypot(*(pos[b] - pos[a])) <= r_sense:
                    seen[b] = True
                    queue.append(b)
    return comps


def random_scene(rng, n_robots, area, hl, hw):
    """Non-overlapping random poses as (x, y, heading) tuples.

    Overlap is prevented by a conservative bounding-circle test so the
    scene generator shares no geometry code with the simulator.
    """
    poses = []
    guard = 2.05 * math.hypot(hl, hw)
    while len(poses) < n_robots:
        x = rng.uniform(-area / 2, area / 2)
        y = rng.uniform(-area / 2, area / 2)
        if all(math.hypot(x - px, y - py) > guard for px, py, _ in poses):
            poses.append((x, y, rng.uniform(-math.pi, math.pi)))
    return poses
