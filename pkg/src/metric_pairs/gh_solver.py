"""Gromov-Hausdorff solvers: compact and truncated distances, approximation
and rough-isometry search, isometry detection, convergence verification.

Distances are reported as brackets [lo, hi]: hi is carried by an explicit
gluing certificate, lo by exhausted bisection, and no operation claims an
exact real. Witness selection is lexicographic-first everywhere (variables in
a fixed order, values ascending), which makes every result reproducible.

Feasibility of a cap assignment (does some admissible gluing place each point
within its cap of its assigned partner?) is decided by a pairwise condition:
caps s, s' on point pairs (u, v), (u', v') are jointly realizable iff

    |d_X(u, u') - d_Y(v, v')| <= s + s'   for every pair of capped edges.

Replacing the last Y-segment of any alternating path by the within-X distance
shows longer crossings never beat this two-edge condition, so it is exactly
the no-shortcut test of the shortest-path closure; certificates are still
materialized (and re-validated) through glue_from_constraints.
"""

import os
from dataclasses import dataclass

import numpy as np

from .errors import (
    ChainLengthMismatch,
    LengthMismatch,
    NonPositiveEpsilon,
    PreconditionViolated,
    ResolutionTooCoarse,
    SizeLimitExceeded,
)
from .gluing import check_eps_admissible, glue_from_constraints
from .hausdorff import hausdorff_of_matrix, pair_hausdorff, tuple_hausdorff
from .metric_core import ball

DEFAULT_ASSIGNMENT_BUDGET = 10_000_000
_MAX_POINTS = 62  # bitmask domains live in a single int


def _budget_limit(budget):
    if budget is not None:
        return int(budget)
    env = os.environ.get("METRIC_PAIRS_BUDGET")
    return int(env) if env else DEFAULT_ASSIGNMENT_BUDGET


class _Budget:
    __slots__ = ("left", "limit")

    def __init__(self, limit):
        self.limit = limit
        self.left = limit

    def tick(self, n=1):
        self.left -= n
        if self.left < 0:
            raise SizeLimitExceeded(self.limit)


@dataclass(frozen=True)
class ApproximationPair:
    """Maps f: X -> Y and g: Y -> X witnessing an eps-approximation."""

    f: tuple
    g: tuple
    eps: float


@dataclass(frozen=True)
class DistanceBracket:
    """lo <= true infimum <= hi, with hi - lo at most the requested resolution."""

    lo: float
    hi: float
    resolution: float
    certificate: object = None  # CrossMetric carrying the hi side, when available
    lo_reason: str = ""
    witness: object = None

    def __post_init__(self):
        if not (self.lo <= self.hi + 1e-12):
            raise ValueError(f"bracket inverted: [{self.lo}, {self.hi}]")
        if self.hi - self.lo > self.resolution + 1e-12:
            raise ValueError(
                f"bracket wider than resolution: [{self.lo}, {self.hi}] vs {self.resolution}"
            )

    def contains_zero(self):
        return self.lo <= 0.0 <= self.hi


@dataclass(frozen=True)
class RoughIsometryWitness:
    """A partial map on the closed R-ball of A with distortion below eps."""

    f: dict
    eps: float
    radius: float


@dataclass(frozen=True)
class ConvergenceSchedule:
    eps_seq: tuple
    radius_seq: tuple

    def __post_init__(self):
        e, r = self.eps_seq, self.radius_seq
        if len(e) != len(r) or not e:
            raise LengthMismatch("schedules must be nonempty and of equal length")
        if any(x <= 0 for x in e) or any(x <= 0 for x in r):
            raise PreconditionViolated("schedule entries must be positive")
        if any(a <= b for a, b in zip(e, e[1:])):
            raise PreconditionViolated("eps_seq must be strictly decreasing")
        if any(a >= b for a, b in zip(r, r[1:])):
            raise PreconditionViolated("radius_seq must be strictly increasing")


def _mask_bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


class _VarSystem:
    """Shared machinery for cap-assignment searches over two spaces.

    Each variable assigns a partner across the gluing: side 0 variables map a
    left point to a right point, side 1 the reverse. ``cls`` indexes the cap
    budget the variable's edge consumes. The mismatch of an ordered variable
    pair at values (p, q) is |d_L - d_R| of the induced point pairs; the four
    family tensors below hold those mismatches for every combination.
    """

    def __init__(self, dl, dr, tol, budget):
        nl, nr = len(dl), len(dr)
        if nl > _MAX_POINTS or nr > _MAX_POINTS:
            raise SizeLimitExceeded(_MAX_POINTS)
        self.dl, self.dr, self.tol = dl, dr, tol
        self.nl, self.nr = nl, nr
        self.budget = budget
        # d_ll[x1, x2, y1, y2] = |d_L(x1, x2) - d_R(y1, y2)|   (two side-0 vars)
        self.d_ll = np.abs(dl[:, :, None, None] - dr[None, None, :, :])
        # d_lr[x, y, p, q] = |d_L(x, q) - d_R(p, y)|   (side 0 before side 1)
        self.d_lr = np.abs(dl[:, None, None, :] - dr.T[None, :, :, None])
        self.vars = []  # (side, src, cls, domain_mask)
        self.meta = []  # (kind, key) labels for witness extraction

    def add_var(self, side, src, cls, domain, kind, key):
        mask = 0
        for v in domain:
            mask |= 1 << int(v)
        self.vars.append((side, int(src), int(cls), mask))
        self.meta.append((kind, key))

    def finalize(self):
        self.nvars = len(self.vars)
        self.domlists = [sorted(_mask_bits(m)) for (_, _, _, m) in self.vars]
        self.pos_of = [{p: k for k, p in enumerate(dom)} for dom in self.domlists]
        # per ordered var pair: the smallest achievable mismatch over both domains
        self.pair_min = np.zeros((self.nvars, self.nvars))
        for i in range(self.nvars):
            for j in range(i + 1, self.nvars):
                block = self._delta_block(i, j)
                self.pair_min[i, j] = block.min()

    def _delta_block(self, i, j):
        """Mismatch matrix of ordered pair (i, j) over their domains: rows p, cols q."""
        si, srci, _, _ = self.vars[i]
        sj, srcj, _, _ = self.vars[j]
        di, dj = self.domlists[i], self.domlists[j]
        if si == 0 and sj == 0:
            return self.d_ll[srci, srcj][np.ix_(di, dj)]
        if si == 1 and sj == 1:
            return self.d_ll[:, :, srci, srcj][np.ix_(di, dj)]
        if si == 0 and sj == 1:
            return self.d_lr[srci, srcj][np.ix_(di, dj)]
        return self.d_lr[srcj, srci][np.ix_(dj, di)].T

    def class_floor(self, n_classes):
        """Entrywise lower bound on any assignment's per-class-pair mismatch maxima."""
        floor = np.zeros((n_classes, n_classes))
        for i in range(self.nvars):
            ci = self.vars[i][2]
            for j in range(i + 1, self.nvars):
                cj = self.vars[j][2]
                a, b = min(ci, cj), max(ci, cj)
                floor[a, b] = max(floor[a, b], self.pair_min[i, j])
        return np.maximum(floor, floor.T)


class _MaskSearch(_VarSystem):
    """Assignment search at fixed caps, with bitmask forward checking.

    ``feasible`` returns some satisfying assignment using deterministic
    most-constrained-first variable selection (much faster at refuting, and
    the verdict cannot depend on order); ``first_witness`` explores variables
    in their fixed order with values ascending, so the assignment it returns
    is the lexicographically first one. Threshold masks are cached per
    (family, theta), which matters in sweeps that revisit thresholds.
    """

    def _packed(self, fam, theta):
        cache = getattr(self, "_tensor_cache", None)
        if cache is None:
            cache = self._tensor_cache = {}
        key = (fam, theta)
        if key not in cache:
            w_l = np.array([1 << q for q in range(self.nl)], dtype=np.int64)
            w_r = np.array([1 << q for q in range(self.nr)], dtype=np.int64)
            if fam == "ll":
                cache[key] = (self.d_ll <= theta).astype(np.int64) @ w_r
            elif fam == "rr":
                cache[key] = (self.d_ll <= theta).transpose(2, 3, 0, 1).astype(np.int64) @ w_l
            elif fam == "lr":
                cache[key] = (self.d_lr <= theta).astype(np.int64) @ w_l
            else:  # rl
                cache[key] = (self.d_lr <= theta).transpose(1, 0, 3, 2).astype(np.int64) @ w_r
        return cache[key]

    def _rows(self, i, j, theta):
        """Allowed-value bitmasks of var j per raw value of var i."""
        cache = getattr(self, "_row_cache", None)
        if cache is None:
            cache = self._row_cache = {}
        key = (i, j, theta)
        if key not in cache:
            si, srci = self.vars[i][0], self.vars[i][1]
            sj, srcj = self.vars[j][0], self.vars[j][1]
            fam = {(0, 0): "ll", (1, 1): "rr", (0, 1): "lr", (1, 0): "rl"}[(si, sj)]
            cache[key] = self._packed(fam, theta)[srci, srcj].tolist()
        return cache[key]

    def _build_masks(self, budgets):
        v = self.nvars
        caps = [budgets[c] for (_, _, c, _) in self.vars]
        for i in range(v):
            for j in range(i + 1, v):
                if self.pair_min[i, j] > caps[i] + caps[j] + self.tol:
                    return None  # some pair is already impossible at these caps
        masks = [[None] * v for _ in range(v)]
        for i in range(v):
            for j in range(v):
                if i != j:
                    masks[i][j] = self._rows(i, j, caps[i] + caps[j] + self.tol)
        return masks

    def _components(self, masks):
        """Variables linked by a binding constraint; saturated pairs decouple.

        Splitting matters: caps that leave one class unconstrained would
        otherwise multiply every refutation of the other class by the full
        product of untouched domains.
        """
        v = self.nvars
        parent = list(range(v))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        full = [m for (_, _, _, m) in self.vars]
        for i in range(v):
            di = self.domlists[i]
            for j in range(i + 1, v):
                rows = masks[i][j]
                if any((rows[p] & full[j]) != full[j] for p in di):
                    ri, rj = find(i), find(j)
                    if ri != rj:
                        parent[ri] = rj
        groups = {}
        for i in range(v):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values(), key=lambda g: g[0])

    def _ac3(self, comp, doms, masks):
        """Arc-consistency fixpoint on one component; False on a wipeout."""
        queue = [(i, j) for i in comp for j in comp if i != j]
        while queue:
            i, j = queue.pop()
            row = masks[i][j]
            dom_j = doms[j]
            new = 0
            for p in _mask_bits(doms[i]):
                if row[p] & dom_j:
                    new |= 1 << p
            if new != doms[i]:
                if new == 0:
                    return False
                doms[i] = new
                queue.extend((i2, i) for i2 in comp if i2 != i)
        return True

    def _solve_component(self, comp, masks, lexicographic):
        """Assignment for one component, or None; deterministic either way.

        Lexicographic mode fixes the variable order (first-witness semantics);
        otherwise the most constrained variable is assigned first, which
        refutes infeasible caps far faster and cannot change the verdict.
        """
        tick = self.budget.tick
        doms0 = {i: self.vars[i][3] for i in comp}
        if not self._ac3(comp, doms0, masks):
            return None
        out = {}

        def rec(doms, todo):
            if not todo:
                return True
            if lexicographic:
                level = todo[0]
            else:
                level = min(todo, key=lambda i: (doms[i].bit_count(), i))
            rest = [j for j in todo if j != level]
            row = masks[level]
            for p in _mask_bits(doms[level]):
                tick()
                nxt = dict(doms)
                ok = True
                for j in rest:
                    nd = nxt[j] & row[j][p]
                    if nd == 0:
                        ok = False
                        break
                    nxt[j] = nd
                if ok:
                    out[level] = p
                    if rec(nxt, rest):
                        return True
            return False

        if rec(doms0, list(comp)):
            return out
        return None

    def _assemble(self, masks, lexicographic):
        out = [None] * self.nvars
        for comp in self._components(masks):
            got = self._solve_component(comp, masks, lexicographic)
            if got is None:
                return None
            for i, p in got.items():
                out[i] = p
        return out

    def feasible(self, budgets):
        """Some satisfying assignment at these caps, or None (fast refutation)."""
        masks = self._build_masks(budgets)
        if masks is None:
            return None
        return self._assemble(masks, lexicographic=False)

    def first_witness(self, budgets):
        """The lexicographically first satisfying assignment, or None."""
        masks = self._build_masks(budgets)
        if masks is None:
            return None
        return self._assemble(masks, lexicographic=True)

    def pair_delta(self, i, vi, j, vj):
        si, srci = self.vars[i][0], self.vars[i][1]
        sj, srcj = self.vars[j][0], self.vars[j][1]
        if si == 0 and sj == 0:
            return float(self.d_ll[srci, srcj, vi, vj])
        if si == 1 and sj == 1:
            return float(self.d_ll[vi, vj, srci, srcj])
        if si == 0 and sj == 1:
            return float(self.d_lr[srci, srcj, vi, vj])
        return float(self.d_lr[srcj, srci, vj, vi])

    def class_maxima(self, values, n_classes):
        """Exact per-class-pair mismatch maxima of one full assignment."""
        m = [[0.0] * n_classes for _ in range(n_classes)]
        cls = [c for (_, _, c, _) in self.vars]
        for i in range(self.nvars):
            for j in range(i + 1, self.nvars):
                d = self.pair_delta(i, values[i], j, values[j])
                a, b = cls[i], cls[j]
                if d > m[a][b]:
                    m[a][b] = m[b][a] = d
        return m


def _lp_min_total(m):
    """Minimize sum(t) subject to t_i + t_j >= m[i][j] (including i = j), t >= 0.

    ``m`` is a symmetric nested list. Returns (value, point). Closed forms
    cover up to three cap classes; larger systems fall back to scipy's LP.
    """
    c = len(m)
    if c == 1:
        half = m[0][0] / 2.0
        return half, [half]
    if c == 2:
        b0, b1 = m[0][0] / 2.0, m[1][1] / 2.0
        val = m[0][1] if m[0][1] > b0 + b1 else b0 + b1
        return val, [b0, val - b0]
    if c == 3:
        b0, b1, b2 = m[0][0] / 2.0, m[1][1] / 2.0, m[2][2] / 2.0
        w01 = m[0][1] - b0 - b1
        w02 = m[0][2] - b0 - b2
        w12 = m[1][2] - b1 - b2
        if w01 < 0.0:
            w01 = 0.0
        if w02 < 0.0:
            w02 = 0.0
        if w12 < 0.0:
            w12 = 0.0
        if w01 <= w02 + w12 and w02 <= w01 + w12 and w12 <= w01 + w02:
            u0 = (w01 + w02 - w12) / 2.0
            u1 = (w01 + w12 - w02) / 2.0
            u2 = (w02 + w12 - w01) / 2.0
        elif w01 >= w02 and w01 >= w12:
            u2 = 0.0
            u0 = w02
            u1 = w12 if w12 > w01 - w02 else w01 - w02
        elif w02 >= w01 and w02 >= w12:
            u1 = 0.0
            u0 = w01
            u2 = w12 if w12 > w02 - w01 else w02 - w01
        else:
            u0 = 0.0
            u1 = w01
            u2 = w02 if w02 > w12 - w01 else w12 - w01
        t = [b0 + u0, b1 + u1, b2 + u2]
        return t[0] + t[1] + t[2], t
    from scipy.optimize import linprog

    rows, rhs = [], []
    for i in range(c):
        for j in range(i, c):
            row = [0.0] * c
            row[i] += 1.0
            row[j] += 1.0
            rows.append([-x for x in row])
            rhs.append(-float(m[i][j]))
    res = linprog(c=[1.0] * c, A_ub=rows, b_ub=rhs, bounds=[(0, None)] * c, method="highs")
    if not res.success:
        raise RuntimeError(f"cap LP failed: {res.message}")
    return float(res.fun), [float(x) for x in res.x]


class _LpSearch(_VarSystem):
    """Assignment search minimizing the total cap budget across several classes.

    Tracks the per-class-pair mismatch maxima of the partial assignment and
    prunes once their LP-minimal total exceeds the target.
    """

    def prepare(self):
        v = self.nvars
        # delta_rows[j][i][qpos] = list over i's value positions (for j < i)
        self.delta_rows = [[None] * v for _ in range(v)]
        for j in range(v):
            for i in range(j + 1, v):
                self.delta_rows[j][i] = self._delta_block(j, i).tolist()

    def feasible(self, total, n_classes):
        v = self.nvars
        tol = self.tol
        cls = [c for (_, _, c, _) in self.vars]
        # necessary caps at this total: cross-class pairs cannot exceed T,
        # same-class pairs 2T; forward-check domains against them
        masks = [[None] * v for _ in range(v)]
        for i in range(v):
            for j in range(i + 1, v):
                if self.pair_min[i, j] > (2 * total if cls[i] == cls[j] else total) + tol:
                    return None
        for i in range(v):
            di = self.domlists[i]
            for j in range(i + 1, v):
                theta = (2 * total if cls[i] == cls[j] else total) + tol
                block = self._delta_block(i, j) <= theta
                weights = np.array([1 << q for q in self.domlists[j]], dtype=np.int64)
                packed = block.astype(np.int64) @ weights
                masks[i][j] = {p: int(m) for p, m in zip(di, packed)}
        out_pos = [0] * v
        out = [None] * v
        tick = self.budget.tick
        rows = self.delta_rows
        pos_of = self.pos_of
        doms0 = [m for (_, _, _, m) in self.vars]
        m0 = [[0.0] * n_classes for _ in range(n_classes)]

        def rec(level, doms, m):
            if level == v:
                val, point = _lp_min_total(m)
                return point if val <= total + tol else None
            ci = cls[level]
            col = [rows[j][level][out_pos[j]] for j in range(level)]
            row_masks = masks[level]
            for p in _mask_bits(doms[level]):
                tick()
                pos = pos_of[level][p]
                m2 = [r[:] for r in m]
                grew = False
                for j in range(level):
                    d = col[j][pos]
                    cj = cls[j]
                    if d > m2[cj][ci]:
                        m2[cj][ci] = m2[ci][cj] = d
                        grew = True
                if grew:
                    val, _ = _lp_min_total(m2)
                    if val > total + tol:
                        continue
                nxt = list(doms)
                wiped = False
                for j in range(level + 1, v):
                    nd = nxt[j] & row_masks[j][p]
                    if nd == 0:
                        wiped = True
                        break
                    nxt[j] = nd
                if wiped:
                    continue
                out[level] = p
                out_pos[level] = pos
                point = rec(level + 1, nxt, m2)
                if point is not None:
                    return point
            return None

        point = rec(0, doms0, m0)
        if point is None:
            return None
        return list(out), point


def _pair_vars(system, pair_l, pair_r, ball_l=None, ball_r=None, cls_space=0, cls_subset=1):
    """Standard variable layout: f on the left (or a ball), g on the right,
    then subset maps both ways. Fixed order keeps witnesses lexicographic."""
    nl, nr = system.nl, system.nr
    dom_l = range(nl) if ball_l is None else ball_l.indices
    dom_r = range(nr) if ball_r is None else ball_r.indices
    for x in dom_l:
        system.add_var(0, x, cls_space, range(nr), "f", x)
    for y in dom_r:
        system.add_var(1, y, cls_space, range(nl), "g", y)
    for a in pair_l.a.indices:
        system.add_var(0, a, cls_subset, pair_r.a.indices, "alpha", a)
    for b in pair_r.a.indices:
        system.add_var(1, b, cls_subset, pair_l.a.indices, "beta", b)


def _witness_dict(system, values, caps):
    w = {"f": {}, "g": {}, "alpha": {}, "beta": {}}
    for (kind, key), val in zip(system.meta, values):
        w[kind][key] = int(val)  # keys are point indices, or (level, index) for tuples
    w["caps"] = [float(c) for c in caps]
    return w


def _certificate(left, right, system, values, caps):
    edges = []
    for (side, src, cls, _), val in zip(system.vars, values):
        i, j = (src, val) if side == 0 else (val, src)
        edges.append((i, j, caps[cls]))
    return glue_from_constraints(left, right, edges, pseudo=True)


def _check_resolution(resolution, *spaces):
    if resolution <= 0:
        raise PreconditionViolated("resolution must be positive", resolution)
    scale = max(s.diameter for s in spaces)
    if scale > 0 and resolution > scale:
        raise ResolutionTooCoarse(f"resolution {resolution} exceeds the diameter scale {scale}")


def _space_key(space):
    return (len(space), space.labels, space.dist.tobytes())


def _swap_for_canonical_order(pair_p, pair_q):
    """Definitionally symmetric solvers compute in one canonical argument
    order and mirror the result, so swapped calls return identical numbers."""
    key_p = (_space_key(pair_p.space), pair_p.a.indices)
    key_q = (_space_key(pair_q.space), pair_q.a.indices)
    return key_p > key_q


def _mirror_bracket(bracket):
    witness = bracket.witness
    if witness is not None and "f" in witness:
        witness = dict(witness)
        witness["f"], witness["g"] = witness["g"], witness["f"]
        witness["alpha"], witness["beta"] = witness["beta"], witness["alpha"]
    return DistanceBracket(
        lo=bracket.lo,
        hi=bracket.hi,
        resolution=bracket.resolution,
        certificate=bracket.certificate.transposed() if bracket.certificate else None,
        lo_reason=bracket.lo_reason,
        witness=witness,
    )


def gh_compact_pair(pair_p, pair_q, resolution, budget=None):
    """Bracket the compact pair distance: inf over gluings of d_H(X,Y) + d_H(A,B).

    Feasibility of a total budget is swept over splits (t1, t2 = T - t1); the
    sweep is exact because an assignment feasible anywhere on the line is
    feasible at t1 = (half its worst space-level mismatch), and those half
    values form the finite candidate set. The outer bisection refines the
    total to the requested resolution.
    """
    _check_resolution(resolution, pair_p.space, pair_q.space)
    if _swap_for_canonical_order(pair_p, pair_q):
        return _mirror_bracket(gh_compact_pair(pair_q, pair_p, resolution, budget))
    bud = _Budget(_budget_limit(budget))
    left, right = pair_p.space, pair_q.space
    tol = max(left.tol, right.tol)
    system = _MaskSearch(left.dist, right.dist, tol, bud)
    _pair_vars(system, pair_p, pair_q)
    system.finalize()

    cand = np.unique(np.concatenate([system.d_ll.ravel(), system.d_lr.ravel()])) / 2.0
    floor = system.class_floor(2)
    t1_min, t2_min, mixed_min = floor[0, 0] / 2, floor[1, 1] / 2, floor[0, 1]
    lo0 = max(mixed_min, t1_min + t2_min)
    cache = {}  # per split value: (largest infeasible t2, smallest feasible t2, its witness)

    def split_feasible(c, t2):
        bad, good, good_values = cache.get(c, (-1.0, np.inf, None))
        if t2 <= bad:
            return None
        if t2 >= good:
            return good_values
        values = system.feasible((c, t2))
        if values is None:
            cache[c] = (t2, good, good_values)
        else:
            cache[c] = (bad, t2, values)
        return values

    def total_feasible(total):
        if total + tol < lo0:
            return None
        lo_c, hi_c = t1_min - tol, total - t2_min + tol
        for c in cand[(cand >= lo_c) & (cand <= hi_c)]:
            values = split_feasible(float(c), total - float(c))
            if values is not None:
                return values
        return None

    def tighten(values, hi, best):
        # exact cost of the found assignment: often far below the tested total
        m = system.class_maxima(values, 2)
        caps = (m[0][0] / 2, max(m[1][1] / 2, m[0][1] - m[0][0] / 2))
        total = caps[0] + caps[1]
        if total < hi:
            return total, caps
        return hi, best

    scale = max(left.diameter, right.diameter)
    t_lo = lo0
    t_hi, best = np.inf, None
    values = total_feasible(lo0)
    if values is not None:
        t_hi, best = tighten(values, t_hi, best)
    else:
        probe = max(scale, lo0 + resolution)
        values = total_feasible(probe)
        while values is None:  # pseudo caps at half the diameter always glue
            probe = 2 * probe + resolution
            values = total_feasible(probe)
        t_hi, best = tighten(values, t_hi, best)
        while t_hi - t_lo > resolution / 2:
            mid = (t_hi + t_lo) / 2
            values = total_feasible(mid)
            if values is None:
                t_lo = mid
            else:
                t_hi, best = tighten(values, min(t_hi, mid), best)
    caps = best
    values = system.first_witness(caps)
    cert = _certificate(left, right, system, values, caps)
    achieved = pair_hausdorff(cert, pair_p, pair_q)
    hi = achieved + 2 * tol
    lo = min(t_lo, hi)
    return DistanceBracket(
        lo=float(lo),
        hi=float(hi),
        resolution=float(resolution),
        certificate=cert,
        lo_reason=f"no cap split glued below a total of {t_lo:.9g}",
        witness=_witness_dict(system, values, caps),
    )


def gh_compact_tuple(tuple_t, tuple_u, resolution, budget=None):
    """Bracket the compact tuple distance: one cap class per chain level.

    With more than one free split coordinate the exact one-dimensional sweep
    does not generalize, so feasibility of a total is decided by assignment
    search with an LP bound on the per-class caps (equivalent, and exact).
    """
    if tuple_t.depth != tuple_u.depth:
        raise ChainLengthMismatch(f"{tuple_t.depth} vs {tuple_u.depth}")
    _check_resolution(resolution, tuple_t.space, tuple_u.space)
    key_t = (_space_key(tuple_t.space), tuple(ref.indices for ref in tuple_t.chain))
    key_u = (_space_key(tuple_u.space), tuple(ref.indices for ref in tuple_u.chain))
    if key_t > key_u:
        return _mirror_bracket(gh_compact_tuple(tuple_u, tuple_t, resolution, budget))
    bud = _Budget(_budget_limit(budget))
    left, right = tuple_t.space, tuple_u.space
    tol = max(left.tol, right.tol)
    n_cls = tuple_t.depth + 1
    system = _LpSearch(left.dist, right.dist, tol, bud)
    for x in range(len(left)):
        system.add_var(0, x, 0, range(len(right)), "f", x)
    for y in range(len(right)):
        system.add_var(1, y, 0, range(len(left)), "g", y)
    for k in range(tuple_t.depth):
        for a in tuple_t.chain[k].indices:
            system.add_var(0, a, k + 1, tuple_u.chain[k].indices, "alpha", (k, a))
        for b in tuple_u.chain[k].indices:
            system.add_var(1, b, k + 1, tuple_t.chain[k].indices, "beta", (k, b))
    system.finalize()
    system.prepare()

    lo0, _ = _lp_min_total(system.class_floor(n_cls))
    hit = system.feasible(lo0, n_cls)
    if hit is not None:
        t_lo, best = lo0, hit
    else:
        scale = max(left.diameter, right.diameter)
        t_lo = lo0
        t_hi = max(n_cls * scale / 2, lo0 + resolution)
        best = system.feasible(t_hi, n_cls)
        while best is None:
            t_hi = 2 * t_hi + resolution
            best = system.feasible(t_hi, n_cls)
        while t_hi - t_lo > resolution / 2:
            mid = (t_hi + t_lo) / 2
            hit = system.feasible(mid, n_cls)
            if hit is None:
                t_lo = mid
            else:
                t_hi, best = mid, hit
    values, caps = best
    cert = _certificate(left, right, system, values, caps)
    achieved = tuple_hausdorff(cert, tuple_t, tuple_u)
    hi = achieved + 2 * tol
    lo = min(t_lo, hi)
    return DistanceBracket(
        lo=float(lo),
        hi=float(hi),
        resolution=float(resolution),
        certificate=cert,
        lo_reason=f"no cap vector glued below a total of {t_lo:.9g}",
        witness=_witness_dict(system, values, caps),
    )


def gh_truncated_pair(pair_p, pair_q, resolution, budget=None):
    """Bracket min(1/2, inf eps admitting an (eps; A, B)-admissible gluing).

    Feasibility at eps caps every assigned edge at eps, with map domains
    restricted to the closed (1/eps)-balls of the distinguished subsets;
    monotone bisection on eps, capped at 1/2.
    """
    _check_resolution(resolution, pair_p.space, pair_q.space)
    if _swap_for_canonical_order(pair_p, pair_q):
        return _mirror_bracket(gh_truncated_pair(pair_q, pair_p, resolution, budget))
    bud = _Budget(_budget_limit(budget))
    left, right = pair_p.space, pair_q.space
    tol = max(left.tol, right.tol)

    def build_system(eps):
        radius = 1.0 / eps
        ball_l = ball(left, pair_p.a, radius, "closed")
        ball_r = ball(right, pair_q.a, radius, "closed")
        system = _MaskSearch(left.dist, right.dist, tol, bud)
        _pair_vars(system, pair_p, pair_q, ball_l, ball_r, cls_space=0, cls_subset=0)
        system.finalize()
        return system

    cap = 0.5
    if not build_system(cap).feasible((cap,)):
        return DistanceBracket(
            lo=cap,
            hi=cap,
            resolution=float(resolution),
            certificate=None,
            lo_reason="no admissible gluing found at the 1/2 truncation cap",
            witness=None,
        )
    e_lo, e_hi = 0.0, cap
    while e_hi - e_lo > resolution / 2 and e_hi > tol:
        mid = (e_hi + e_lo) / 2
        if build_system(mid).feasible((mid,)):
            e_hi = mid
        else:
            e_lo = mid
    system = build_system(e_hi)
    values = system.first_witness((e_hi,))
    cert = _certificate(left, right, system, values, [e_hi])
    report = check_eps_admissible(cert, pair_p.a, pair_q.a, e_hi)
    witness = _witness_dict(system, values, [e_hi])
    witness["admissible"] = report.verdict
    return DistanceBracket(
        lo=float(e_lo),
        hi=float(e_hi),
        resolution=float(resolution),
        certificate=cert,
        lo_reason=f"no (eps; A, B)-admissible gluing found at eps = {e_lo:.9g}",
        witness=witness,
    )


def _le(value, bound, tol):
    # strict definitional inequalities are tested non-strictly with tolerance
    return value <= bound + tol


def approx_search(pair_p, pair_q, eps, budget=None):
    """First eps-approximation pair (f, g) in lexicographic order, or None.

    f is enumerated with row-by-row distortion pruning; for each complete f,
    g is enumerated with distortion, composition, and subset-image pruning.
    """
    if eps <= 0:
        raise NonPositiveEpsilon(f"eps must be positive, got {eps}")
    bud = _Budget(_budget_limit(budget))
    left, right = pair_p.space, pair_q.space
    dl, dr = left.dist, right.dist
    nl, nr = len(left), len(right)
    if nl > _MAX_POINTS or nr > _MAX_POINTS:
        raise SizeLimitExceeded(_MAX_POINTS)
    tol = max(left.tol, right.tol)
    a_idx, b_idx = pair_p.a.indices, pair_q.a.indices
    d_to_b = dr[:, b_idx].min(axis=1)
    d_to_a = dl[:, a_idx].min(axis=1)
    full_r = (1 << nr) - 1

    # distortion masks: f_pair[x1, x2, y1] = allowed-y2 bitmask
    ok_ll = np.abs(dl[:, :, None, None] - dr[None, None, :, :]) <= eps + tol
    weights_r = np.array([1 << q for q in range(nr)], dtype=np.int64)
    weights_l = np.array([1 << q for q in range(nl)], dtype=np.int64)
    f_pair = ok_ll.astype(np.int64) @ weights_r
    ok_rr = np.abs(dr[:, :, None, None] - dl[None, None, :, :]) <= eps + tol
    g_pair = ok_rr.astype(np.int64) @ weights_l

    f_unary = [full_r] * nl
    for a in a_idx:  # d(f(a), B) must stay below eps
        mask = 0
        for y in range(nr):
            if _le(d_to_b[y], eps, tol):
                mask |= 1 << y
        f_unary[a] = mask

    def search_g(f_vals):
        # image of A must come eps-close to every point of B
        img = sorted(set(f_vals[a] for a in a_idx))
        if not _le(float(dr[np.ix_(b_idx, img)].min(axis=1).max()), eps, tol):
            return None
        pre = [[] for _ in range(nr)]
        for x, y in enumerate(f_vals):
            pre[y].append(x)
        b_set = set(b_idx)
        unary = []
        for y in range(nr):
            mask = 0
            for q in range(nl):
                if y in b_set and not _le(d_to_a[q], eps, tol):
                    continue  # g must keep B within eps of A
                if all(_le(dl[q, x], eps, tol) for x in pre[y]) and _le(
                    dr[f_vals[q], y], eps, tol
                ):
                    mask |= 1 << q
            unary.append(mask)

        g_vals = [None] * nr

        def rec(y):
            if y == nr:
                img_g = sorted(set(g_vals[b] for b in b_idx))
                return _le(float(dl[np.ix_(a_idx, img_g)].min(axis=1).max()), eps, tol)
            dom = unary[y]
            for j in range(y):
                dom &= int(g_pair[y, j, g_vals[j]])
                if dom == 0:
                    return False
            for q in _mask_bits(dom):
                bud.tick()
                g_vals[y] = q
                if rec(y + 1):
                    return True
            g_vals[y] = None
            return False

        return tuple(g_vals) if rec(0) else None

    f_vals = [None] * nl

    def rec_f(x):
        if x == nl:
            return search_g(f_vals)
        dom = f_unary[x]
        for j in range(x):
            dom &= int(f_pair[x, j, f_vals[j]])
            if dom == 0:
                return None
        for p in _mask_bits(dom):
            bud.tick()
            f_vals[x] = p
            g = rec_f(x + 1)
            if g is not None:
                return g
        f_vals[x] = None
        return None

    g = rec_f(0)
    if g is None:
        return None
    return ApproximationPair(f=tuple(f_vals), g=g, eps=float(eps))


def validate_approximation(pair_p, pair_q, ap):
    """Names of the approximation clauses the witness fails (empty = valid)."""
    left, right = pair_p.space, pair_q.space
    dl, dr = left.dist, right.dist
    tol = max(left.tol, right.tol)
    eps = ap.eps
    f = np.asarray(ap.f, dtype=int)
    g = np.asarray(ap.g, dtype=int)
    failures = []
    if not _le(float(np.abs(dl - dr[np.ix_(f, f)]).max()), eps, tol):
        failures.append("distortion_f")
    if not _le(float(np.abs(dr - dl[np.ix_(g, g)]).max()), eps, tol):
        failures.append("distortion_g")
    if not _le(float(dl[np.arange(len(dl)), g[f]].max()), eps, tol):
        failures.append("g_after_f")
    if not _le(float(dr[np.arange(len(dr)), f[g]].max()), eps, tol):
        failures.append("f_after_g")
    a_idx, b_idx = pair_p.a.indices, pair_q.a.indices
    if not _le(hausdorff_of_matrix(dr, tuple(f[list(a_idx)]), b_idx), eps, tol):
        failures.append("subset_image_f")
    if not _le(hausdorff_of_matrix(dl, tuple(g[list(b_idx)]), a_idx), eps, tol):
        failures.append("subset_image_g")
    return failures


def min_approx_eps(pair_p, pair_q, resolution, budget=None):
    """Bisect the smallest eps at which approx_search succeeds."""
    _check_resolution(resolution, pair_p.space, pair_q.space)
    scale = max(pair_p.space.diameter, pair_q.space.diameter)
    tol = max(pair_p.space.tol, pair_q.space.tol)
    e_lo, e_hi = 0.0, max(scale + tol, resolution)
    best = approx_search(pair_p, pair_q, e_hi, budget)
    while best is None:  # constant maps succeed once eps reaches the diameter scale
        e_hi = 2 * e_hi + resolution
        best = approx_search(pair_p, pair_q, e_hi, budget)
    while e_hi - e_lo > resolution and e_hi > tol:
        mid = (e_hi + e_lo) / 2
        hit = approx_search(pair_p, pair_q, mid, budget)
        if hit is None:
            e_lo = mid
        else:
            e_hi, best = mid, hit
    return DistanceBracket(
        lo=float(e_lo),
        hi=float(e_hi),
        resolution=float(resolution),
        certificate=None,
        lo_reason=f"approximation search failed at eps = {e_lo:.9g}",
        witness={"f": list(best.f), "g": list(best.g), "eps": float(e_hi)},
    )


def complete_distortion_map(pair_p, pair_q, f, eps):
    """Extend a small-distortion map to a 3-eps approximation pair.

    Preimages are chosen lowest-index-first; points outside the image map
    through their nearest image point.
    """
    if eps <= 0:
        raise NonPositiveEpsilon(f"eps must be positive, got {eps}")
    left, right = pair_p.space, pair_q.space
    dl, dr = left.dist, right.dist
    tol = max(left.tol, right.tol)
    f = tuple(int(v) for v in f)
    if len(f) != len(left) or any(not 0 <= v < len(right) for v in f):
        raise PreconditionViolated("f must map every left index into the right space")
    fa = np.asarray(f, dtype=int)
    distortion = float(np.abs(dl - dr[np.ix_(fa, fa)]).max())
    if not _le(distortion, eps, tol):
        raise PreconditionViolated("distortion of f must stay below eps", distortion)
    image = sorted(set(f))
    gaps = dr[:, image].min(axis=1)
    if not _le(float(gaps.max()), eps, tol):
        y = int(gaps.argmax())
        raise PreconditionViolated("right space must be the eps-neighborhood of f's image", y)
    a_idx, b_idx = pair_p.a.indices, pair_q.a.indices
    d_fab = hausdorff_of_matrix(dr, tuple(fa[list(a_idx)]), b_idx)
    if not _le(d_fab, eps, tol):
        raise PreconditionViolated("d_H(f(A), B) must stay below eps", d_fab)

    preimage = {}
    for x, y in enumerate(f):  # ascending x, so ties keep the lowest preimage
        preimage.setdefault(y, x)
    h = []
    for y in range(len(right)):
        if y in preimage:
            h.append(preimage[y])
        else:
            nearest = image[int(dr[y, image].argmin())]
            h.append(preimage[nearest])
    result = ApproximationPair(f=f, g=tuple(h), eps=3.0 * eps)
    failures = validate_approximation(pair_p, pair_q, result)
    if failures:
        raise PreconditionViolated("completion failed validation", failures)
    return result


def rough_isometry_search(pair_p, pair_q, radius, eps, budget=None):
    """First map on the closed R-ball of A that is an eps-rough isometry
    toward the closed (R - eps)-ball of B, or None."""
    if not radius > eps > 0:
        raise PreconditionViolated("requires R > eps > 0", (radius, eps))
    bud = _Budget(_budget_limit(budget))
    left, right = pair_p.space, pair_q.space
    dl, dr = left.dist, right.dist
    tol = max(left.tol, right.tol)
    dom = ball(left, pair_p.a, radius, "closed").indices
    target = ball(right, pair_q.a, radius - eps, "closed")
    if target is None:
        return None
    tgt = target.indices
    b_idx = pair_q.a.indices
    d_to_b = dr[:, b_idx].min(axis=1)
    a_set = set(pair_p.a.indices)
    doms = []
    for u in dom:
        allowed = [y for y in tgt if (u not in a_set) or _le(d_to_b[y], eps, tol)]
        if not allowed:
            return None
        doms.append(allowed)
    vals = [None] * len(dom)

    def rec(k):
        if k == len(dom):
            img = sorted(set(vals))
            if not _le(float(dr[np.ix_(b_idx, img)].min(axis=1).max()), eps, tol):
                return False
            cover = float(dr[np.ix_(tgt, img)].min(axis=1).max())
            return _le(cover, eps, tol)
        u = dom[k]
        for y in doms[k]:
            bud.tick()
            if all(
                _le(abs(float(dl[u, dom[j]]) - float(dr[y, vals[j]])), eps, tol)
                for j in range(k)
            ):
                vals[k] = y
                if rec(k + 1):
                    return True
        vals[k] = None
        return False

    if not rec(0):
        return None
    return RoughIsometryWitness(
        f={int(u): int(v) for u, v in zip(dom, vals)}, eps=float(eps), radius=float(radius)
    )


def pair_isometry_search(pair_p, pair_q):
    """Distance-preserving bijection carrying A onto B, or None."""
    left, right = pair_p.space, pair_q.space
    if len(left) != len(right) or len(pair_p.a) != len(pair_q.a):
        return None
    dl, dr = left.dist, right.dist
    tol = max(left.tol, right.tol)
    n = len(left)
    a_set = set(pair_p.a.indices)
    b_set = set(pair_q.a.indices)
    perm = [None] * n
    used = [False] * n

    def rec(x):
        if x == n:
            return True
        targets = pair_q.a.indices if x in a_set else [y for y in range(n) if y not in b_set]
        for y in targets:
            if used[y]:
                continue
            if all(abs(float(dl[x, j]) - float(dr[y, perm[j]])) <= tol for j in range(x)):
                used[y] = True
                perm[x] = y
                if rec(x + 1):
                    return True
                used[y] = False
        perm[x] = None
        return False

    if rec(0):
        return tuple(perm)
    return None


def verify_convergence(seq, target, sched, resolution=1e-3, budget=None):
    """Check each pair of the sequence against the target at its scheduled
    (eps, radius), and bisect the smallest workable eps per index.

    A pair passes when some map on the closed radius-ball of its subset has
    distortion within eps, keeps the subset image eps-close in Hausdorff
    distance, and eps-covers the target's radius-ball.
    """
    if len(seq) != len(sched.eps_seq):
        raise LengthMismatch(f"{len(seq)} pairs vs {len(sched.eps_seq)} schedule entries")
    bud = _Budget(_budget_limit(budget))
    reports = []
    for pair_i, eps_i, r_i in zip(seq, sched.eps_seq, sched.radius_seq):
        left, right = pair_i.space, target.space
        dl, dr = left.dist, right.dist
        tol = max(left.tol, right.tol)
        dom = ball(left, pair_i.a, r_i, "closed").indices
        tgt_ball = ball(right, target.a, r_i, "closed")
        tgt = tgt_ball.indices if tgt_ball is not None else ()
        a_loc = [dom.index(a) for a in pair_i.a.indices]
        b_idx = target.a.indices

        def feasible(eps):
            vals = [None] * len(dom)

            def rec(k):
                if k == len(dom):
                    img_a = sorted(set(vals[i] for i in a_loc))
                    if not _le(hausdorff_of_matrix(dr, tuple(img_a), b_idx), eps, tol):
                        return False
                    img = sorted(set(vals))
                    if tgt and not _le(
                        float(dr[np.ix_(tgt, img)].min(axis=1).max()), eps, tol
                    ):
                        return False
                    return True
                u = dom[k]
                for y in range(len(right)):
                    bud.tick()
                    if all(
                        _le(abs(float(dl[u, dom[j]]) - float(dr[y, vals[j]])), eps, tol)
                        for j in range(k)
                    ):
                        vals[k] = y
                        if rec(k + 1):
                            return True
                vals[k] = None
                return False

            return rec(0)

        passed = feasible(eps_i)
        e_lo, e_hi = 0.0, eps_i if passed else max(left.diameter, right.diameter, eps_i)
        while not feasible(e_hi):
            e_hi = 2 * e_hi + resolution
        while e_hi - e_lo > resolution and e_hi > tol:
            mid = (e_hi + e_lo) / 2
            if feasible(mid):
                e_hi = mid
            else:
                e_lo = mid
        reports.append(
            {
                "eps": float(eps_i),
                "radius": float(r_i),
                "passed": bool(passed),
                "min_eps_lo": float(e_lo),
                "min_eps_hi": float(e_hi),
            }
        )
    return {"indices": reports, "all_passed": all(r["passed"] for r in reports)}
