"""Jitted inner loops shared by the configuration model and the sampler.

Everything here operates on plain arrays so numba can compile it once and the
public modules can stay readable.  Two union-find variants do the heavy
lifting:

* a site-level union-find that carries, per site, its cell offset relative to
  its component root in the universal cover of the torus.  Joining two sites
  that are already connected with a mismatched offset means the domain winds
  around the torus, which is how spanning is detected without ever unrolling
  the lattice;
* a second-level union-find over domains that walks the parity edges of the
  reduced graph and applies the same offset trick to detect graph components
  that wind around the torus.

The flip kernels answer "how do (N_z, |V|, |E|) change if this site takes that
label" without a global recount.  The component-count queries run up to three
breadth-first searches in lockstep and stop as soon as at most one group still
has an open frontier; separation is then proven because an exhausted search
has seen its whole component.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

_JIT = {"cache": True, "nogil": True}

Z_LABEL = 2


@dataclass
class WorkBuffers:
    """Reusable scratch arrays for the flip kernels (one set per chain)."""

    vstamp: np.ndarray
    vtree: np.ndarray
    queue: np.ndarray
    head: np.ndarray
    tail: np.ndarray
    stamp: np.ndarray

    @classmethod
    def for_sites(cls, n_sites: int) -> "WorkBuffers":
        return cls(
            vstamp=np.zeros(n_sites, dtype=np.int64),
            vtree=np.zeros(n_sites, dtype=np.int8),
            queue=np.zeros((3, n_sites), dtype=np.int64),
            head=np.zeros(3, dtype=np.int64),
            tail=np.zeros(3, dtype=np.int64),
            stamp=np.zeros(1, dtype=np.int64),
        )


@njit(**_JIT)
def _uf_find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        nxt = parent[i]
        parent[i] = root
        i = nxt
    return root


@njit(**_JIT)
def _uf_find_off(parent, offu, offv, i):
    """Find with path compression, returning (root, offset of i relative to root)."""
    root = i
    while parent[root] != root:
        root = parent[root]
    j = i
    accu = np.int64(0)
    accv = np.int64(0)
    while parent[j] != j:
        accu += offu[j]
        accv += offv[j]
        j = parent[j]
    j = i
    cu = accu
    cv = accv
    while parent[j] != j:
        su = offu[j]
        sv = offv[j]
        p = parent[j]
        parent[j] = root
        offu[j] = cu
        offv[j] = cv
        cu -= su
        cv -= sv
        j = p
    return root, accu, accv


@njit(**_JIT)
def _domain_summary(labels, bond_a, bond_b, bond_du, bond_dv):
    """Union same-label neighbours; flag domains that wind around the torus.

    Returns fully path-compressed ``parent`` (so ``parent[i]`` is the root of
    site ``i``), per-site cell offsets relative to the root, and per-root
    ``size`` and wrap flags.  Entries of ``size``/``wrapu``/``wrapv`` are only
    meaningful at root indices.
    """
    n = labels.size
    parent = np.arange(n)
    offu = np.zeros(n, dtype=np.int64)
    offv = np.zeros(n, dtype=np.int64)
    size = np.ones(n, dtype=np.int64)
    wrapu = np.zeros(n, dtype=np.bool_)
    wrapv = np.zeros(n, dtype=np.bool_)
    for j in range(bond_a.size):
        a = bond_a[j]
        b = bond_b[j]
        if labels[a] != labels[b]:
            continue
        ra, au, av = _uf_find_off(parent, offu, offv, a)
        rb, bu, bv = _uf_find_off(parent, offu, offv, b)
        # in the universal cover this bond asserts pos(b) = pos(a) + d
        wu = au + bond_du[j] - bu
        wv = av + bond_dv[j] - bv
        if ra == rb:
            if wu != 0:
                wrapu[ra] = True
            if wv != 0:
                wrapv[ra] = True
        elif size[ra] >= size[rb]:
            parent[rb] = ra
            offu[rb] = wu
            offv[rb] = wv
            size[ra] += size[rb]
            wrapu[ra] = wrapu[ra] or wrapu[rb]
            wrapv[ra] = wrapv[ra] or wrapv[rb]
        else:
            parent[ra] = rb
            offu[ra] = -wu
            offv[ra] = -wv
            size[rb] += size[ra]
            wrapu[rb] = wrapu[rb] or wrapu[ra]
            wrapv[rb] = wrapv[rb] or wrapv[ra]
    for i in range(n):
        _uf_find_off(parent, offu, offv, i)
    return parent, offu, offv, size, wrapu, wrapv


@njit(**_JIT)
def _crossing_from_domains(parent, offu, offv, wrapu, wrapv, labels,
                           bond_a, bond_b, bond_du, bond_dv):
    """Whether any parity-graph component winds around the torus.

    Parity edges join domain pairs coupled by an odd number of lattice bonds.
    Every bond of an odd pair enters as an offset relation, so two parallel
    bonds reaching around the torus expose the winding through a mismatch.  A
    component also winds when one of its member domains does, provided the
    component actually has an edge; an isolated vertex never crosses.
    """
    n = labels.size
    nb = bond_a.size
    ra_arr = np.empty(nb, dtype=np.int64)
    rb_arr = np.empty(nb, dtype=np.int64)
    d_u = np.empty(nb, dtype=np.int64)
    d_v = np.empty(nb, dtype=np.int64)
    key = np.empty(nb, dtype=np.int64)
    k = 0
    for j in range(nb):
        a = bond_a[j]
        b = bond_b[j]
        if labels[a] == labels[b]:
            continue
        ru = parent[a]
        rv = parent[b]
        du = offu[a] + bond_du[j] - offu[b]
        dv = offv[a] + bond_dv[j] - offv[b]
        if ru > rv:
            ru, rv = rv, ru
            du = -du
            dv = -dv
        ra_arr[k] = ru
        rb_arr[k] = rv
        d_u[k] = du
        d_v[k] = dv
        key[k] = ru * n + rv
        k += 1
    if k == 0:
        return False
    order = np.argsort(key[:k])
    p2 = np.arange(n)
    o2u = np.zeros(n, dtype=np.int64)
    o2v = np.zeros(n, dtype=np.int64)
    w2u = np.zeros(n, dtype=np.bool_)
    w2v = np.zeros(n, dtype=np.bool_)
    has_edge = np.zeros(n, dtype=np.bool_)
    i = 0
    while i < k:
        j0 = i
        kk = key[order[i]]
        while i < k and key[order[i]] == kk:
            i += 1
        if (i - j0) % 2 == 0:
            continue
        for t in range(j0, i):
            idx = order[t]
            ru2, au, av = _uf_find_off(p2, o2u, o2v, ra_arr[idx])
            rv2, bu, bv = _uf_find_off(p2, o2u, o2v, rb_arr[idx])
            wu = au + d_u[idx] - bu
            wv = av + d_v[idx] - bv
            if ru2 == rv2:
                if wu != 0:
                    w2u[ru2] = True
                if wv != 0:
                    w2v[ru2] = True
                has_edge[ru2] = True
            else:
                p2[rv2] = ru2
                o2u[rv2] = wu
                o2v[rv2] = wv
                w2u[ru2] = w2u[ru2] or w2u[rv2]
                w2v[ru2] = w2v[ru2] or w2v[rv2]
                has_edge[ru2] = True
    for i in range(n):
        if parent[i] != i:
            continue
        r2, _, _ = _uf_find_off(p2, o2u, o2v, i)
        if w2u[r2] or w2v[r2]:
            return True
        if has_edge[r2] and (wrapu[i] or wrapv[i]):
            return True
    return False


@njit(**_JIT)
def _graph_summary(labels, bond_a, bond_b, bond_du, bond_dv):
    """One-pass sample summary: (n_z, n_domains, n_inter, max_domain, spanning, crossing)."""
    n = labels.size
    parent, offu, offv, size, wrapu, wrapv = _domain_summary(
        labels, bond_a, bond_b, bond_du, bond_dv
    )
    n_z = np.int64(0)
    for i in range(n):
        if labels[i] == Z_LABEL:
            n_z += 1
    n_domains = np.int64(0)
    max_size = np.int64(0)
    spanning = False
    for i in range(n):
        if parent[i] == i:
            n_domains += 1
            if size[i] > max_size:
                max_size = size[i]
            if wrapu[i] or wrapv[i]:
                spanning = True
    n_inter = np.int64(0)
    for j in range(bond_a.size):
        if labels[bond_a[j]] != labels[bond_b[j]]:
            n_inter += 1
    crossing = _crossing_from_domains(
        parent, offu, offv, wrapu, wrapv, labels, bond_a, bond_b, bond_du, bond_dv
    )
    return n_z, n_domains, n_inter, max_size, spanning, crossing


@njit(**_JIT)
def _count_components(labels, neighbors, site, target, vstamp, vtree, queue, head, tail, stamp):
    """Number of distinct components of {label == target} \\ {site} touching site.

    Runs one BFS per distinct qualifying neighbour of ``site``, expanding them
    in lockstep and merging groups on contact.  Stops once all groups merged
    or at most one group still has an open frontier: an exhausted group has
    fully explored its component, which proves it separate from the rest.
    """
    seeds = np.empty(3, dtype=np.int64)
    k = 0
    for j in range(3):
        m = neighbors[site, j]
        if labels[m] != target or m == site:
            continue
        fresh = True
        for t in range(k):
            if seeds[t] == m:
                fresh = False
                break
        if fresh:
            seeds[k] = m
            k += 1
    if k <= 1:
        return k
    stamp[0] += 1
    mark = stamp[0]
    group = np.empty(3, dtype=np.int8)
    for t in range(k):
        group[t] = t
        vstamp[seeds[t]] = mark
        vtree[seeds[t]] = t
        queue[t, 0] = seeds[t]
        head[t] = 0
        tail[t] = 1
    n_groups = k
    while True:
        if n_groups == 1:
            return 1
        live0 = False
        live1 = False
        live2 = False
        for t in range(k):
            if head[t] < tail[t]:
                g = group[t]
                if g == 0:
                    live0 = True
                elif g == 1:
                    live1 = True
                else:
                    live2 = True
        n_live = (1 if live0 else 0) + (1 if live1 else 0) + (1 if live2 else 0)
        if n_live <= 1:
            return n_groups
        for t in range(k):
            if head[t] >= tail[t]:
                continue
            x = queue[t, head[t]]
            head[t] += 1
            gt = group[t]
            for j in range(3):
                y = neighbors[x, j]
                if y == site or labels[y] != target:
                    continue
                if vstamp[y] == mark:
                    gy = group[vtree[y]]
                    if gy != gt:
                        for s in range(k):
                            if group[s] == gy:
                                group[s] = gt
                        n_groups -= 1
                else:
                    vstamp[y] = mark
                    vtree[y] = np.int8(t)
                    queue[t, tail[t]] = y
                    tail[t] += 1


@njit(**_JIT)
def _flip_delta(labels, neighbors, site, new_label, vstamp, vtree, queue, head, tail, stamp):
    """Change in (N_z, |V|, |E|) if ``site`` switched to ``new_label``.

    |V| changes by (pieces the old domain falls apart into minus one) plus
    (one minus the new-label neighbour domains merged); |E| is re-evaluated on
    the three incident bonds only.
    """
    old = labels[site]
    if old == new_label:
        return np.int64(0), np.int64(0), np.int64(0)
    d_nz = np.int64(0)
    if new_label == Z_LABEL:
        d_nz += 1
    if old == Z_LABEL:
        d_nz -= 1
    d_e = np.int64(0)
    for j in range(3):
        m = neighbors[site, j]
        if labels[m] != new_label:
            d_e += 1
        if labels[m] != old:
            d_e -= 1
    c_old = _count_components(labels, neighbors, site, old, vstamp, vtree, queue, head, tail, stamp)
    c_new = _count_components(labels, neighbors, site, new_label, vstamp, vtree, queue, head, tail, stamp)
    return d_nz, np.int64(c_old - c_new), d_e


@njit(**_JIT)
def _metropolis_block(labels, neighbors, gen, log2_zfac, n_steps,
                      vstamp, vtree, queue, head, tail, stamp):
    """Run ``n_steps`` single-site Metropolis updates in place.

    Proposal: uniform site, uniform over the two other labels, which is
    symmetric; acceptance uses the exact log2 weight change, so the stationary
    distribution is the filter-outcome measure at the given deformation.
    Returns the acceptance count plus the accumulated change in
    (N_z, |V|, |E|), which lets callers track statistics incrementally and
    cross-check them against a recount.
    """
    n = labels.size
    n_accept = np.int64(0)
    acc_nz = np.int64(0)
    acc_v = np.int64(0)
    acc_e = np.int64(0)
    for _ in range(n_steps):
        site = gen.integers(0, n)
        old = labels[site]
        new = (old + 1 + gen.integers(0, 2)) % 3
        d_nz, d_v, d_e = _flip_delta(
            labels, neighbors, site, new, vstamp, vtree, queue, head, tail, stamp
        )
        dlog2 = np.float64(d_v - d_e)
        if d_nz != 0:
            dlog2 += d_nz * log2_zfac
        if dlog2 >= 0.0 or gen.random() < 2.0 ** dlog2:
            labels[site] = new
            n_accept += 1
            acc_nz += d_nz
            acc_v += d_v
            acc_e += d_e
    return n_accept, acc_nz, acc_v, acc_e


@njit(**_JIT)
def _sample_histogram(labels, neighbors, gen, log2_zfac, n_samples, steps_per_sample,
                      hist, vstamp, vtree, queue, head, tail, stamp):
    """Accumulate kept samples into a base-3 configuration histogram."""
    n = labels.size
    n_accept = np.int64(0)
    for _ in range(n_samples):
        acc, _, _, _ = _metropolis_block(
            labels, neighbors, gen, log2_zfac, steps_per_sample,
            vstamp, vtree, queue, head, tail, stamp,
        )
        n_accept += acc
        code = np.int64(0)
        p3 = np.int64(1)
        for i in range(n):
            code += labels[i] * p3
            p3 *= 3
        hist[code] += 1
    return n_accept


@njit(**_JIT)
def _enumerate_stats(n_sites, bond_a, bond_b):
    """(N_z, |V|, |E|) for every label configuration, indexed base-3, site 0 least significant."""
    n_conf = np.int64(1)
    for _ in range(n_sites):
        n_conf *= 3
    nz_out = np.empty(n_conf, dtype=np.int16)
    v_out = np.empty(n_conf, dtype=np.int16)
    e_out = np.empty(n_conf, dtype=np.int16)
    labels = np.empty(n_sites, dtype=np.int8)
    parent = np.empty(n_sites, dtype=np.int64)
    for code in range(n_conf):
        c = code
        n_z = np.int16(0)
        for i in range(n_sites):
            lab = np.int8(c % 3)
            labels[i] = lab
            c //= 3
            if lab == Z_LABEL:
                n_z += 1
        for i in range(n_sites):
            parent[i] = i
        n_inter = np.int16(0)
        n_dom = np.int16(n_sites)
        for j in range(bond_a.size):
            a = bond_a[j]
            b = bond_b[j]
            if labels[a] != labels[b]:
                n_inter += 1
                continue
            ra = _uf_find(parent, a)
            rb = _uf_find(parent, b)
            if ra != rb:
                parent[rb] = ra
                n_dom -= 1
        nz_out[code] = n_z
        v_out[code] = n_dom
        e_out[code] = n_inter
    return nz_out, v_out, e_out
