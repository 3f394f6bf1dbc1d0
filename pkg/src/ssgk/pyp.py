"""Structural hierarchical Pitman-Yor process over the graphlet DAG.

One Chinese restaurant per level ``base_level+1 .. top``; the lowest level
has an explicit base distribution instead of a restaurant. A new table at
level ``m`` is labelled by seating a customer one level down (which yields a
parent graphlet ``g_i``) and then choosing a child ``g_j`` in proportion to
``w_ij``. Every table remembers that parent label, so removing the last
customer from a table also removes the matching customer one level down.

The state lives in flat numpy arrays so the seating kernels can be compiled.
Row ``r`` of every per-level array is restaurant ``r`` (level
``base_level + r``); row 0 is the explicit base and has no tables. Tables of
one label form a doubly linked list so that seating restricted to a label
only touches that label's tables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._jit import njit
from .catalog import GraphletDag
from .errors import ChainStateError, EstimationError
from .vectors import CountVector, Distribution

# planes of the int64 table array
LAB, CNT, PAR, NXT, PRV, FREE = range(6)
# planes of the per-label array
HEAD, CBL, TBL = range(3)
# planes of the per-level scalars
NFREE, NCUST, NTAB = range(3)


# -- kernels -------------------------------------------------------------------

@njit
def _pick(weights, n, u):
    """Index drawn from ``weights[:n]``; -1 when they are all zero."""
    total = 0.0
    for i in range(n):
        total += weights[i]
    if total <= 0.0:
        return -1
    target = u * total
    acc = 0.0
    last = -1
    for i in range(n):
        w = weights[i]
        if w > 0.0:
            acc += w
            last = i
            if acc > target:
                return i
    return last


@njit
def _refresh(upto, tabs, lab_arr, lvl, dth, pred, valid, sizes,
             ch_ptr, ch_idx, ch_w):
    """Recompute cached predictive vectors for rows ``valid+1 .. upto``."""
    r = valid[0] + 1
    while r <= upto:
        n_child = sizes[r]
        for j in range(n_child):
            pred[r, j] = 0.0
        # push row r-1 forward
        for i in range(sizes[r - 1]):
            p = pred[r - 1, i]
            if p != 0.0:
                for e in range(ch_ptr[r, i], ch_ptr[r, i + 1]):
                    pred[r, ch_idx[r, e]] += ch_w[r, e] * p
        d = dth[0, r]
        theta = dth[1, r]
        n = lvl[NCUST, r]
        t = lvl[NTAB, r]
        denom = theta + n
        scale = (theta + d * t) / denom
        for j in range(n_child):
            pred[r, j] = (lab_arr[CBL, r, j] - d * lab_arr[TBL, r, j]) / denom + scale * pred[r, j]
        r += 1
    if upto > valid[0]:
        valid[0] = upto


@njit
def _open_table(r, label, parent, tabs, lab_arr, lvl):
    k = lvl[NFREE, r] - 1
    tid = tabs[FREE, r, k]
    lvl[NFREE, r] = k
    tabs[LAB, r, tid] = label
    tabs[CNT, r, tid] = 0
    tabs[PAR, r, tid] = parent
    head = lab_arr[HEAD, r, label]
    tabs[NXT, r, tid] = head
    tabs[PRV, r, tid] = -1
    if head >= 0:
        tabs[PRV, r, head] = tid
    lab_arr[HEAD, r, label] = tid
    lab_arr[TBL, r, label] += 1
    lvl[NTAB, r] += 1
    return tid


@njit
def _close_table(r, tid, tabs, lab_arr, lvl):
    label = tabs[LAB, r, tid]
    nx = tabs[NXT, r, tid]
    pv = tabs[PRV, r, tid]
    if pv >= 0:
        tabs[NXT, r, pv] = nx
    else:
        lab_arr[HEAD, r, label] = nx
    if nx >= 0:
        tabs[PRV, r, nx] = pv
    tabs[LAB, r, tid] = -1
    tabs[FREE, r, lvl[NFREE, r]] = tid
    lvl[NFREE, r] += 1
    lab_arr[TBL, r, label] -= 1
    lvl[NTAB, r] -= 1


@njit
def _seat(r, tid, tabs, lab_arr, lvl):
    tabs[CNT, r, tid] += 1
    lab_arr[CBL, r, tabs[LAB, r, tid]] += 1
    lvl[NCUST, r] += 1


@njit
def _pick_table(r, label, d, u, tabs, lab_arr):
    """Table of ``label`` drawn with weight ``count - d``."""
    total = lab_arr[CBL, r, label] - d * lab_arr[TBL, r, label]
    target = u * total
    acc = 0.0
    tid = lab_arr[HEAD, r, label]
    last = tid
    while tid >= 0:
        acc += tabs[CNT, r, tid] - d
        last = tid
        if acc > target:
            return tid
        tid = tabs[NXT, r, tid]
    return last


@njit
def _insert_observed(r, label, uni, upos, tabs, lab_arr, lvl, dth, pred, valid, sizes,
                     par_ptr, par_idx, par_w, ch_ptr, ch_idx, ch_w, scratch):
    """Seat a customer whose dish is known to be ``label`` at restaurant ``r``.

    Returns 0 on success, -1 if ``label`` has probability zero.
    """
    while r >= 1:
        d = dth[0, r]
        theta = dth[1, r]
        _refresh(r - 1, tabs, lab_arr, lvl, dth, pred, valid, sizes, ch_ptr, ch_idx, ch_w)
        n_par = par_ptr[r, label + 1] - par_ptr[r, label]
        p0 = 0.0
        for e in range(n_par):
            w = par_w[r, par_ptr[r, label] + e] * pred[r - 1, par_idx[r, par_ptr[r, label] + e]]
            scratch[e] = w
            p0 += w
        old = lab_arr[CBL, r, label] - d * lab_arr[TBL, r, label]
        new = (theta + d * lvl[NTAB, r]) * p0
        if old + new <= 0.0:
            return -1
        u = uni[upos[0]]
        upos[0] += 1
        if valid[0] >= r:
            valid[0] = r - 1
        if u * (old + new) < old:
            tid = _pick_table(r, label, d, uni[upos[0]], tabs, lab_arr)
            upos[0] += 1
            _seat(r, tid, tabs, lab_arr, lvl)
            return 0
        e = _pick(scratch, n_par, uni[upos[0]])
        upos[0] += 1
        parent = par_idx[r, par_ptr[r, label] + e]
        tid = _open_table(r, label, parent, tabs, lab_arr, lvl)
        _seat(r, tid, tabs, lab_arr, lvl)
        r -= 1
        label = parent
    return 0


@njit
def _insert_free(top, uni, upos, tabs, lab_arr, lvl, dth, pred, valid, sizes,
                 ch_ptr, ch_idx, ch_w, scratch, pending):
    """Generative seating at restaurant ``top``; returns the drawn label."""
    r = top
    npend = 0
    label = -1
    while r >= 1:
        d = dth[0, r]
        theta = dth[1, r]
        n = lvl[NCUST, r]
        t = lvl[NTAB, r]
        old = n - d * t
        u = uni[upos[0]]
        upos[0] += 1
        if valid[0] >= r:
            valid[0] = r - 1
        if u * (theta + n) < old:
            for j in range(sizes[r]):
                scratch[j] = lab_arr[CBL, r, j] - d * lab_arr[TBL, r, j]
            label = _pick(scratch, sizes[r], uni[upos[0]])
            upos[0] += 1
            tid = _pick_table(r, label, d, uni[upos[0]], tabs, lab_arr)
            upos[0] += 1
            _seat(r, tid, tabs, lab_arr, lvl)
            break
        pending[npend] = r
        npend += 1
        r -= 1
    if r == 0:
        # explicit base
        for j in range(sizes[0]):
            scratch[j] = pred[0, j]
        label = _pick(scratch, sizes[0], uni[upos[0]])
        upos[0] += 1
    while npend > 0:
        npend -= 1
        r = pending[npend]
        parent = label
        lo = ch_ptr[r, parent]
        hi = ch_ptr[r, parent + 1]
        for e in range(hi - lo):
            scratch[e] = ch_w[r, lo + e]
        e = _pick(scratch, hi - lo, uni[upos[0]])
        upos[0] += 1
        label = ch_idx[r, lo + e]
        tid = _open_table(r, label, parent, tabs, lab_arr, lvl)
        _seat(r, tid, tabs, lab_arr, lvl)
    return label


@njit
def _delete(r, label, uni, upos, tabs, lab_arr, lvl, valid, sizes, scratch):
    """Remove one customer at restaurant ``r``; ``label < 0`` means any customer.

    The table is chosen with weight equal to its customer count. Returns the
    label removed at ``r`` or -1 if there was nothing to remove.
    """
    if label < 0:
        for j in range(sizes[r]):
            scratch[j] = lab_arr[CBL, r, j]
        label = _pick(scratch, sizes[r], uni[upos[0]])
        upos[0] += 1
        if label < 0:
            return -1
    if lab_arr[CBL, r, label] == 0:
        return -1
    first = label
    while r >= 1:
        target = uni[upos[0]] * lab_arr[CBL, r, label]
        upos[0] += 1
        tid = lab_arr[HEAD, r, label]
        acc = 0.0
        while True:
            acc += tabs[CNT, r, tid]
            if acc > target or tabs[NXT, r, tid] < 0:
                break
            tid = tabs[NXT, r, tid]
        tabs[CNT, r, tid] -= 1
        lab_arr[CBL, r, label] -= 1
        lvl[NCUST, r] -= 1
        if valid[0] >= r:
            valid[0] = r - 1
        if tabs[CNT, r, tid] > 0:
            break
        parent = tabs[PAR, r, tid]
        _close_table(r, tid, tabs, lab_arr, lvl)
        r -= 1
        label = parent
    return first


@njit
def _gibbs(obs, cursor, n_sweeps, avg_from, acc, uni, tabs, lab_arr, lvl, dth, pred,
           valid, sizes, par_ptr, par_idx, par_w, ch_ptr, ch_idx, ch_w, scratch):
    """Resumable Gibbs driver.

    ``cursor = (sweep, position, n_averaged)``; sweep 0 is the initial
    seating. Works until done or until fewer than ``reserve`` uniforms are
    left. Returns 1 when finished, 0 when it needs more uniforms, -1 on an
    impossible observation.
    """
    top = sizes.shape[0] - 1
    reserve = 4 * top + 4
    upos = np.zeros(1, dtype=np.int64)
    n_obs = obs.shape[0]
    while cursor[0] <= n_sweeps:
        while cursor[1] < n_obs:
            if uni.shape[0] - upos[0] < reserve:
                return 0
            label = obs[cursor[1]]
            if cursor[0] > 0:
                _delete(top, label, uni, upos, tabs, lab_arr, lvl, valid, sizes, scratch)
            if _insert_observed(top, label, uni, upos, tabs, lab_arr, lvl, dth, pred, valid,
                                sizes, par_ptr, par_idx, par_w, ch_ptr, ch_idx, ch_w,
                                scratch) < 0:
                return -1
            cursor[1] += 1
        if cursor[0] >= avg_from:
            _refresh(top, tabs, lab_arr, lvl, dth, pred, valid, sizes, ch_ptr, ch_idx, ch_w)
            for j in range(sizes[top]):
                acc[j] += pred[top, j]
            cursor[2] += 1
        cursor[0] += 1
        cursor[1] = 0
    return 1


# -- python-facing state ---------------------------------------------------------

@dataclass(frozen=True)
class Restaurant:
    """Read-only snapshot of one level's seating."""
    level: int
    tables: list  # (label, customer_count, parent_label)
    d: float
    theta: float

    @property
    def t(self) -> int:
        return len(self.tables)

    @property
    def n(self) -> int:
        return sum(c for _, c, _ in self.tables)


def _pad_rows(rows, fill, dtype):
    width = max(1, max(len(x) for x in rows))
    out = np.full((len(rows), width), fill, dtype=dtype)
    for r, x in enumerate(rows):
        out[r, :len(x)] = x
    return out


class HpypChain:
    """Seating state for levels ``base.level+1 .. top``.

    ``d`` and ``theta`` are scalars (same at every level) or sequences with
    one entry per restaurant, lowest level first.
    """

    def __init__(self, dag: GraphletDag, top: int, base: Distribution,
                 d=0.5, theta=1.0, seed: int = 0, capacity: int = 64):
        lo = base.level
        if not lo < top or not all(dag.covers(m) for m in range(lo, top)):
            raise ValueError(f"DAG must cover levels {lo}..{top}")
        if len(base) != dag.catalog.size(lo):
            raise ValueError("base distribution length does not match its level")
        self.dag = dag
        self.base_level = lo
        self.top = top
        self.rng = np.random.default_rng(seed)
        nr = top - lo
        d = np.broadcast_to(np.asarray(d, dtype=np.float64), (nr,))
        theta = np.broadcast_to(np.asarray(theta, dtype=np.float64), (nr,))
        if np.any(d < 0) or np.any(d >= 1) or np.any(theta <= -d):
            raise ValueError("need 0 <= d < 1 and theta > -d at every level")
        self.dth = np.zeros((2, nr + 1))
        self.dth[0, 1:] = d
        self.dth[1, 1:] = theta
        self.sizes = np.array([dag.catalog.size(m) for m in range(lo, top + 1)], dtype=np.int64)
        width = int(self.sizes.max())

        par_rows, par_w_rows, ch_rows, ch_w_rows = [[]], [[]], [[]], [[]]
        par_ptr = np.zeros((nr + 1, width + 1), dtype=np.int64)
        ch_ptr = np.zeros((nr + 1, width + 1), dtype=np.int64)
        for r in range(1, nr + 1):
            e = dag.transition(lo + r - 1)
            by_child = np.lexsort((e.parent, e.child))
            par_rows.append(e.parent[by_child])
            par_w_rows.append(e.w[by_child])
            par_ptr[r, 1:self.sizes[r] + 1] = np.cumsum(np.bincount(e.child, minlength=self.sizes[r]))
            par_ptr[r, self.sizes[r] + 1:] = par_ptr[r, self.sizes[r]]
            by_parent = np.lexsort((e.child, e.parent))
            ch_rows.append(e.child[by_parent])
            ch_w_rows.append(e.w[by_parent])
            ch_ptr[r, 1:self.sizes[r - 1] + 1] = np.cumsum(np.bincount(e.parent, minlength=self.sizes[r - 1]))
            ch_ptr[r, self.sizes[r - 1] + 1:] = ch_ptr[r, self.sizes[r - 1]]
        self.par_ptr, self.ch_ptr = par_ptr, ch_ptr
        self.par_idx = _pad_rows(par_rows, 0, np.int64)
        self.par_w = _pad_rows(par_w_rows, 0.0, np.float64)
        self.ch_idx = _pad_rows(ch_rows, 0, np.int64)
        self.ch_w = _pad_rows(ch_w_rows, 0.0, np.float64)

        self.pred = np.zeros((nr + 1, width))
        self.pred[0, :self.sizes[0]] = base.probs
        self.valid = np.zeros(1, dtype=np.int64)
        self.lab_arr = np.zeros((3, nr + 1, width), dtype=np.int64)
        self.lab_arr[HEAD] = -1
        self.lvl = np.zeros((3, nr + 1), dtype=np.int64)
        # customers seated through the API (or as data) rather than on behalf of a table above
        self.direct = np.zeros((nr + 1, width), dtype=np.int64)
        self.tabs = np.zeros((6, nr + 1, 0), dtype=np.int64)
        self.scratch = np.zeros(max(width, int(self.par_idx.shape[1]), 8))
        self.pending = np.zeros(nr + 1, dtype=np.int64)
        self._grow(capacity)

    # bookkeeping

    def _grow(self, need: int):
        cap = self.tabs.shape[2]
        if need <= cap:
            return
        new_cap = max(need, 2 * cap)
        tabs = np.zeros((6, self.tabs.shape[1], new_cap), dtype=np.int64)
        tabs[:, :, :cap] = self.tabs
        tabs[LAB, :, cap:] = -1
        for r in range(tabs.shape[1]):
            nf = self.lvl[NFREE, r]
            # new slots go under the existing free stack so old ids are reused first
            fresh = np.arange(new_cap - 1, cap - 1, -1, dtype=np.int64)
            tabs[FREE, r, :fresh.size] = fresh
            tabs[FREE, r, fresh.size:fresh.size + nf] = self.tabs[FREE, r, :nf]
            self.lvl[NFREE, r] = nf + fresh.size
        self.tabs = tabs

    def _row(self, level: int) -> int:
        r = level - self.base_level
        if not 1 <= r <= self.top - self.base_level:
            raise ValueError(f"level {level} has no restaurant "
                             f"(levels {self.base_level + 1}..{self.top})")
        return r

    def _uniforms(self, n: int) -> np.ndarray:
        return self.rng.random(n)

    def num_customers(self, level: int) -> int:
        return int(self.lvl[NCUST, self._row(level)])

    def num_direct(self, level: int) -> int:
        """Customers at ``level`` that :func:`delete_customer` may remove."""
        return int(self.direct[self._row(level)].sum())

    def num_tables(self, level: int) -> int:
        return int(self.lvl[NTAB, self._row(level)])

    def restaurant(self, level: int) -> Restaurant:
        r = self._row(level)
        ids = np.flatnonzero(self.tabs[LAB, r] >= 0)
        tables = [(int(self.tabs[LAB, r, i]), int(self.tabs[CNT, r, i]), int(self.tabs[PAR, r, i]))
                  for i in ids]
        return Restaurant(level, tables, float(self.dth[0, r]), float(self.dth[1, r]))

    def state_key(self) -> tuple:
        """Hashable description of the seating (tables sorted per level)."""
        return tuple(tuple(sorted(self.restaurant(m).tables))
                     for m in range(self.base_level + 1, self.top + 1))

    def check_consistency(self):
        """Raise :class:`ChainStateError` if the bookkeeping is inconsistent."""
        nr = self.top - self.base_level
        for r in range(1, nr + 1):
            live = self.tabs[LAB, r] >= 0
            labels = self.tabs[LAB, r][live]
            counts = self.tabs[CNT, r][live]
            size = int(self.sizes[r])
            if np.any(counts < 1):
                raise ChainStateError(f"row {r}: empty table left open")
            if live.sum() != self.lvl[NTAB, r] or counts.sum() != self.lvl[NCUST, r]:
                raise ChainStateError(f"row {r}: table/customer totals out of sync")
            if not np.array_equal(np.bincount(labels, counts, minlength=size)[:size],
                                  self.lab_arr[CBL, r, :size]):
                raise ChainStateError(f"row {r}: per-label customer counts out of sync")
            if not np.array_equal(np.bincount(labels, minlength=size)[:size],
                                  self.lab_arr[TBL, r, :size]):
                raise ChainStateError(f"row {r}: per-label table counts out of sync")
            # every customer is either direct or stands for exactly one table above
            expect = self.direct[r, :size].copy()
            if r < nr:
                above = self.tabs[LAB, r + 1] >= 0
                expect += np.bincount(self.tabs[PAR, r + 1][above], minlength=size)[:size]
            if not np.array_equal(expect, self.lab_arr[CBL, r, :size]):
                raise ChainStateError(
                    f"row {r}: customers do not match direct seats plus tables one level up")

    def predictive(self, level: int | None = None) -> Distribution:
        level = self.top if level is None else level
        if level == self.base_level:
            return Distribution(level, self.pred[0, :self.sizes[0]].copy())
        r = self._row(level)
        _refresh(r, self.tabs, self.lab_arr, self.lvl, self.dth, self.pred, self.valid,
                 self.sizes, self.ch_ptr, self.ch_idx, self.ch_w)
        return Distribution(level, self.pred[r, :self.sizes[r]].copy())


def _check_label(chain, level, label):
    size = chain.dag.catalog.size(level)
    if not (isinstance(label, (int, np.integer)) and 0 <= label < size):
        raise ValueError(f"invalid level-{level} graphlet ordinal {label!r}")


def insert_customer(chain: HpypChain, level: int, observed: int | None = None) -> int:
    """Seat one customer at ``level``; returns the label of its table."""
    r = chain._row(level)
    chain._grow(int(chain.lvl[NCUST].max()) + 1)
    uni = chain._uniforms(3 * r + 3)
    upos = np.zeros(1, dtype=np.int64)
    args = (chain.tabs, chain.lab_arr, chain.lvl, chain.dth, chain.pred, chain.valid, chain.sizes)
    if observed is None:
        label = int(_insert_free(r, uni, upos, *args, chain.ch_ptr, chain.ch_idx, chain.ch_w,
                                 chain.scratch, chain.pending))
    else:
        _check_label(chain, level, observed)
        if _insert_observed(r, int(observed), uni, upos, *args, chain.par_ptr, chain.par_idx,
                            chain.par_w, chain.ch_ptr, chain.ch_idx, chain.ch_w,
                            chain.scratch) < 0:
            raise ChainStateError(f"level-{level} graphlet {observed} has zero probability")
        label = int(observed)
    chain.direct[r, label] += 1
    return label


def delete_customer(chain: HpypChain, level: int, observed: int | None = None) -> int:
    """Remove one customer (of label ``observed`` if given); returns its label.

    Only customers seated by :func:`insert_customer` or as data qualify; the
    ones standing in for a table one level up leave with that table. The
    label is drawn in proportion to those customers, then a table of that
    label in proportion to its count, which at the top level is the same as
    picking a table with weight ``c_l``.
    """
    r = chain._row(level)
    size = int(chain.sizes[r])
    w = chain.direct[r, :size]
    if observed is None:
        if w.sum() == 0:
            held = " (all of them stand for tables one level up)" if chain.num_customers(level) else ""
            raise ChainStateError(f"no customers to remove at level {level}{held}")
        label = int(np.searchsorted(np.cumsum(w), chain._uniforms(1)[0] * w.sum(), side="right"))
    else:
        _check_label(chain, level, observed)
        label = int(observed)
        if w[label] == 0:
            raise ChainStateError(f"no customers of label {label} to remove at level {level}")
    uni = chain._uniforms(r + 2)
    upos = np.zeros(1, dtype=np.int64)
    _delete(r, label, uni, upos, chain.tabs, chain.lab_arr, chain.lvl, chain.valid,
            chain.sizes, chain.scratch)
    chain.direct[r, label] -= 1
    return label


def gibbs_fit(chain: HpypChain, counts: CountVector, sweeps: int = 100, burn_in: int = 50,
              seed: int = 0, average: int = 10) -> Distribution:
    """Seat one customer per observation at the top level, then resample.

    Each of the ``sweeps`` passes deletes and re-inserts every observation.
    The returned predictive is averaged over the last ``average`` sweeps
    that come after ``burn_in`` (the current state if there are none).
    """
    if counts.level != chain.top:
        raise ValueError(f"counts are level {counts.level}, chain top is {chain.top}")
    if counts.total <= 0:
        raise EstimationError(f"level-{counts.level} counts have zero total")
    if sweeps < 0 or not 0 <= burn_in <= max(sweeps, 0) or average < 1:
        raise ValueError("need sweeps >= 0, 0 <= burn_in <= sweeps, average >= 1")
    rng = np.random.default_rng(seed)
    chain.rng = rng
    obs = rng.permutation(np.repeat(np.arange(len(counts)), counts.counts))
    chain._grow(int(chain.lvl[NCUST].max()) + obs.size + 1)
    avg_from = max(burn_in + 1, sweeps - average + 1, 1)
    acc = np.zeros(int(chain.sizes[-1]))
    cursor = np.zeros(3, dtype=np.int64)
    chunk = max(4096, 8 * obs.size)
    while True:
        uni = rng.random(chunk)
        status = _gibbs(obs, cursor, sweeps, avg_from, acc, uni, chain.tabs, chain.lab_arr,
                        chain.lvl, chain.dth, chain.pred, chain.valid, chain.sizes,
                        chain.par_ptr, chain.par_idx, chain.par_w, chain.ch_ptr, chain.ch_idx,
                        chain.ch_w, chain.scratch)
        if status < 0:
            raise ChainStateError("an observed graphlet has zero base probability")
        if status == 1:
            break
    chain.direct[-1, :len(counts)] += counts.counts
    if cursor[2] == 0:
        return chain.predictive()
    return Distribution(chain.top, acc / cursor[2])


def predictive_distribution(chain: HpypChain, level: int | None = None) -> Distribution:
    """``sum_{tables of j}(c - d)/(theta + n) + (theta + d t)/(theta + n) * P0(j)``."""
    return chain.predictive(level)


def pyp_smooth(counts: CountVector, dag: GraphletDag, config, seed: int = 0,
               lower: CountVector | None = None) -> Distribution:
    """PYP feature vector for one graph's level-``k`` counts."""
    lo = config.base_level
    size = dag.catalog.size(lo)
    if lower is not None and lower.level == lo:
        if lower.total <= 0:
            raise EstimationError(f"level-{lo} counts have zero total")
        base = Distribution(lo, lower.counts / lower.total)
    elif size == 1:
        base = Distribution(lo, np.ones(1))
    else:
        raise ValueError(f"level-{lo} counts are required for the explicit base")
    chain = HpypChain(dag, counts.level, base, config.pyp_d, config.pyp_theta, seed=seed)
    return gibbs_fit(chain, counts, config.sweeps, config.burn_in, seed=seed,
                     average=config.average)
