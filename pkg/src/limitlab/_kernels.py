"""Hot loops: counter-based random words, samplers, AP counting, enumeration.

Conventions shared by both backends
-----------------------------------
* Random words are addressed by ``(key, block, j)``: ``block`` is the sample
  index within a stream and ``j`` the draw index inside that sample.  Nothing
  is sequential across samples, so batches can be split arbitrarily.
* Bounded integers use power-of-two mask rejection (no modulo bias); each
  attempt consumes the next draw index of the sample.
* Uniform reals take the top 53 bits of a word.

The ``*_np`` functions are the pure-numpy twins of the ``@njit`` kernels and
must stay bit-identical to them.
"""

import numpy as np

from ._accel import njit, prange

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
BLOCK_SALT = np.uint64(0xD1B54A32D192ED03)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_TWO_M53 = 1.0 / 9007199254740992.0


# --------------------------------------------------------------------------
# random words


@njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(cache=True)
def block_key(key, block):
    return mix64(key ^ (np.uint64(block) * BLOCK_SALT))


@njit(cache=True)
def word(bkey, j):
    return mix64(bkey + (np.uint64(j) + _ONE) * GOLDEN)


@njit(cache=True)
def _bound_mask(m):
    # smallest 2^b - 1 >= m - 1
    x = np.uint64(m - 1)
    x |= x >> np.uint64(1)
    x |= x >> np.uint64(2)
    x |= x >> np.uint64(4)
    x |= x >> np.uint64(8)
    x |= x >> np.uint64(16)
    x |= x >> np.uint64(32)
    return x


@njit(cache=True)
def randbelow(bkey, j, m):
    """Uniform integer in [0, m); returns (value, next draw index)."""
    mask = _bound_mask(m)
    um = np.uint64(m)
    while True:
        r = word(bkey, j) & mask
        j += 1
        if r < um:
            return np.int64(r), j


@njit(cache=True)
def uniform01(bkey, j):
    return np.float64(word(bkey, j) >> _S11) * _TWO_M53


def mix64_np(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _S30)) * _M1
        z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def block_keys_np(key, blocks):
    blocks = np.asarray(blocks, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_np(np.uint64(key) ^ (blocks * BLOCK_SALT))


def words_np(bkeys, js):
    bkeys = np.asarray(bkeys, dtype=np.uint64)
    js = np.asarray(js, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return mix64_np(bkeys + (js + _ONE) * GOLDEN)


def randbelow_np(bkeys, js, m):
    """Vectorised ``randbelow`` over samples; ``js`` is updated in place."""
    bkeys = np.asarray(bkeys, dtype=np.uint64)
    m = np.broadcast_to(np.asarray(m, dtype=np.int64), bkeys.shape)
    mask = np.zeros(bkeys.shape, dtype=np.uint64)
    x = (m - 1).astype(np.uint64)
    for s in (1, 2, 4, 8, 16, 32):
        x |= x >> np.uint64(s)
    mask[:] = x
    out = np.empty(bkeys.shape, dtype=np.int64)
    todo = np.arange(bkeys.size)
    while todo.size:
        r = words_np(bkeys[todo], js[todo]) & mask[todo]
        js[todo] += 1
        ok = r < m[todo].astype(np.uint64)
        out[todo[ok]] = r[ok].astype(np.int64)
        todo = todo[~ok]
    return out


def uniform01_np(bkeys, js):
    return (words_np(bkeys, js) >> _S11).astype(np.float64) * _TWO_M53


# --------------------------------------------------------------------------
# samplers (single sample, numba) -- the batch kernels below inline these


@njit(cache=True)
def _lehmer_into(bkey, a):
    n = a.shape[0]
    j = 0
    for i in range(n):
        r, j = randbelow(bkey, j, n - i)
        a[i] = r + 1


@njit(cache=True)
def _bernoulli_into(bkey, p, x):
    for i in range(x.shape[0]):
        x[i] = 1 if uniform01(bkey, i) < p else 0


@njit(cache=True)
def _fixed_k_into(bkey, k, x, idx):
    n = x.shape[0]
    for i in range(n):
        idx[i] = i
        x[i] = 0
    j = 0
    for i in range(k):
        r, j = randbelow(bkey, j, n - i)
        t = idx[i]
        idx[i] = idx[i + r]
        idx[i + r] = t
        x[idx[i]] = 1


@njit(cache=True)
def _continuous_into(bkey, w):
    for i in range(w.shape[0]):
        w[i] = uniform01(bkey, i)


@njit(cache=True, parallel=True)
def lehmer_batch_nb(key, start, count, n):
    out = np.empty((count, n), dtype=np.int64)
    for s in prange(count):
        _lehmer_into(block_key(key, start + s), out[s])
    return out


@njit(cache=True, parallel=True)
def bernoulli_batch_nb(key, start, count, n, p):
    out = np.empty((count, n), dtype=np.uint8)
    for s in prange(count):
        _bernoulli_into(block_key(key, start + s), p, out[s])
    return out


@njit(cache=True, parallel=True)
def fixed_k_batch_nb(key, start, count, n, k):
    out = np.empty((count, n), dtype=np.uint8)
    for s in prange(count):
        idx = np.empty(n, dtype=np.int64)
        _fixed_k_into(block_key(key, start + s), k, out[s], idx)
    return out


@njit(cache=True, parallel=True)
def continuous_batch_nb(key, start, count, n):
    out = np.empty((count, n), dtype=np.float64)
    for s in prange(count):
        _continuous_into(block_key(key, start + s), out[s])
    return out


def lehmer_batch_np(key, start, count, n):
    bk = block_keys_np(key, np.arange(start, start + count, dtype=np.uint64))
    js = np.zeros(count, dtype=np.uint64)
    out = np.empty((count, n), dtype=np.int64)
    for i in range(n):
        out[:, i] = randbelow_np(bk, js, n - i) + 1
    return out


def bernoulli_batch_np(key, start, count, n, p):
    bk = block_keys_np(key, np.arange(start, start + count, dtype=np.uint64))
    js = np.arange(n, dtype=np.uint64)
    u = uniform01_np(bk[:, None], js[None, :])
    return (u < p).astype(np.uint8)


def fixed_k_batch_np(key, start, count, n, k):
    bk = block_keys_np(key, np.arange(start, start + count, dtype=np.uint64))
    js = np.zeros(count, dtype=np.uint64)
    idx = np.tile(np.arange(n, dtype=np.int64), (count, 1))
    rows = np.arange(count)
    out = np.zeros((count, n), dtype=np.uint8)
    for i in range(k):
        r = randbelow_np(bk, js, n - i)
        a = idx[rows, i].copy()
        b = idx[rows, i + r].copy()
        idx[rows, i] = b
        idx[rows, i + r] = a
        out[rows, b] = 1
    return out


def continuous_batch_np(key, start, count, n):
    bk = block_keys_np(key, np.arange(start, start + count, dtype=np.uint64))
    js = np.arange(n, dtype=np.uint64)
    return uniform01_np(bk[:, None], js[None, :])


# --------------------------------------------------------------------------
# statistics


@njit(cache=True)
def _aps_one(x):
    n = x.shape[0]
    h = (n - 1) // 2
    # tripled row: indices a + d and a + 2d never wrap, and the inner loop is branch-free
    xx = np.empty(3 * n, dtype=np.int64)
    for i in range(3 * n):
        xx[i] = x[i % n]
    c = 0
    for a in range(n):
        if x[a]:
            t = 0
            for d in range(1, h + 1):
                t += xx[a + d] & xx[a + 2 * d]
            c += t
    return c


@njit(cache=True)
def _aps_cont_one(w):
    n = w.shape[0]
    h = (n - 1) // 2
    c = 0.0
    for a in range(n):
        wa = w[a]
        for d in range(1, h + 1):
            b = (a + d) % n
            e = (a + 2 * d) % n
            c += wa * w[b] * w[e]
    return c


@njit(cache=True, parallel=True)
def count_aps_batch_nb(x):
    out = np.empty(x.shape[0], dtype=np.int64)
    for s in prange(x.shape[0]):
        out[s] = _aps_one(x[s])
    return out


@njit(cache=True, parallel=True)
def count_aps_cont_batch_nb(w):
    out = np.empty(w.shape[0], dtype=np.float64)
    for s in prange(w.shape[0]):
        out[s] = _aps_cont_one(w[s])
    return out


def count_aps_batch_np(x):
    x = np.asarray(x)
    n = x.shape[1]
    xb = x.astype(bool)
    out = np.zeros(x.shape[0], dtype=np.int64)
    for d in range(1, (n - 1) // 2 + 1):
        t = xb & np.roll(xb, -d, axis=1) & np.roll(xb, -2 * d, axis=1)
        out += t.sum(axis=1)
    return out


def count_aps_cont_batch_np(w):
    w = np.asarray(w, dtype=np.float64)
    n = w.shape[1]
    out = np.zeros(w.shape[0], dtype=np.float64)
    # same summation order as the numba kernel: a outer, d inner
    terms = np.empty((w.shape[0], n, (n - 1) // 2), dtype=np.float64)
    for d in range(1, (n - 1) // 2 + 1):
        terms[:, :, d - 1] = w * np.roll(w, -d, axis=1) * np.roll(w, -2 * d, axis=1)
    flat = terms.reshape(w.shape[0], -1)
    for c in range(flat.shape[1]):
        out += flat[:, c]
    return out


@njit(cache=True, parallel=True)
def descents_batch_nb(a):
    out = np.empty(a.shape[0], dtype=np.int64)
    for s in prange(a.shape[0]):
        c = 0
        for i in range(a.shape[1] - 1):
            if a[s, i] > a[s, i + 1]:
                c += 1
        out[s] = c
    return out


def descents_batch_np(a):
    a = np.asarray(a)
    return (a[:, :-1] > a[:, 1:]).sum(axis=1).astype(np.int64)


# fused sample+count kernels (numba only; the numpy path materialises chunks)


@njit(cache=True, parallel=True)
def mc_descents_nb(key, start, count, n):
    out = np.empty(count, dtype=np.int64)
    for s in prange(count):
        bkey = block_key(key, start + s)
        j = 0
        prev = 0
        c = 0
        for i in range(n):
            r, j = randbelow(bkey, j, n - i)
            if i > 0 and prev > r + 1:
                c += 1
            prev = r + 1
        out[s] = c
    return out


@njit(cache=True, parallel=True)
def mc_aps_nb(key, start, count, n, p):
    out = np.empty(count, dtype=np.int64)
    for s in prange(count):
        x = np.empty(n, dtype=np.uint8)
        _bernoulli_into(block_key(key, start + s), p, x)
        out[s] = _aps_one(x)
    return out


@njit(cache=True, parallel=True)
def mc_aps_fixed_k_nb(key, start, count, n, k):
    out = np.empty(count, dtype=np.int64)
    for s in prange(count):
        x = np.empty(n, dtype=np.uint8)
        idx = np.empty(n, dtype=np.int64)
        _fixed_k_into(block_key(key, start + s), k, x, idx)
        out[s] = _aps_one(x)
    return out


@njit(cache=True, parallel=True)
def mc_aps_continuous_nb(key, start, count, n):
    out = np.empty(count, dtype=np.float64)
    for s in prange(count):
        w = np.empty(n, dtype=np.float64)
        _continuous_into(block_key(key, start + s), w)
        out[s] = _aps_cont_one(w)
    return out


# --------------------------------------------------------------------------
# exhaustive enumeration over all 2^n subsets (joint histogram of |S| and A)


@njit(cache=True)
def _partners(n):
    """For each element e, the pairs (u, v) with {e, u, v} a 3-AP through e."""
    m = 3 * (n - 1) // 2
    part = np.empty((n, m, 2), dtype=np.int64)
    fill = np.zeros(n, dtype=np.int64)
    h = (n - 1) // 2
    for a in range(n):
        for d in range(1, h + 1):
            t0 = a
            t1 = (a + d) % n
            t2 = (a + 2 * d) % n
            part[t0, fill[t0], 0] = t1
            part[t0, fill[t0], 1] = t2
            fill[t0] += 1
            part[t1, fill[t1], 0] = t0
            part[t1, fill[t1], 1] = t2
            fill[t1] += 1
            part[t2, fill[t2], 0] = t0
            part[t2, fill[t2], 1] = t1
            fill[t2] += 1
    return part


@njit(cache=True)
def _ctz(v):
    c = 0
    while (v & 1) == 0:
        v >>= 1
        c += 1
    return c


@njit(cache=True, parallel=True)
def joint_hist_nb(n, nchunks):
    """hist[k, a] = #subsets with |S| = k and A(S) = a, via Gray code walk."""
    total = np.int64(1) << n
    amax = n * (n - 1) // 2
    part = _partners(n)
    m = part.shape[1]
    hists = np.zeros((nchunks, n + 1, amax + 1), dtype=np.int64)
    step = (total + nchunks - 1) // nchunks
    for c in prange(nchunks):
        lo = c * step
        hi = min(total, lo + step)
        if lo >= hi:
            continue
        x = np.zeros(n, dtype=np.uint8)
        g = lo ^ (lo >> 1)
        k = 0
        for i in range(n):
            if (g >> i) & 1:
                x[i] = 1
                k += 1
        a = _aps_one(x)
        hists[c, k, a] += 1
        for t in range(lo + 1, hi):
            e = _ctz(t)
            delta = 0
            for q in range(m):
                if x[part[e, q, 0]] and x[part[e, q, 1]]:
                    delta += 1
            if x[e]:
                x[e] = 0
                k -= 1
                a -= delta
            else:
                x[e] = 1
                k += 1
                a += delta
            hists[c, k, a] += 1
    out = np.zeros((n + 1, amax + 1), dtype=np.int64)
    for c in range(nchunks):
        out += hists[c]
    return out


def _mask_bits(masks, n):
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)[None, :]) & 1).astype(np.uint8)


def joint_hist_np(n, chunk=1 << 16):
    total = 1 << n
    amax = n * (n - 1) // 2
    out = np.zeros((n + 1, amax + 1), dtype=np.int64)
    for lo in range(0, total, chunk):
        masks = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        x = _mask_bits(masks, n)
        a = count_aps_batch_np(x)
        k = x.sum(axis=1, dtype=np.int64)
        np.add.at(out, (k, a), 1)
    return out


# --------------------------------------------------------------------------
# fixed-size enumeration (combinations in lexicographic order)


@njit(cache=True)
def fixed_k_hist_nb(n, k):
    amax = n * (n - 1) // 2
    hist = np.zeros(amax + 1, dtype=np.int64)
    if k == 0:
        hist[0] = 1
        return hist
    comb = np.arange(k)
    x = np.zeros(n, dtype=np.uint8)
    while True:
        for i in range(n):
            x[i] = 0
        for i in range(k):
            x[comb[i]] = 1
        hist[_aps_one(x)] += 1
        i = k - 1
        while i >= 0 and comb[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for j in range(i + 1, k):
            comb[j] = comb[j - 1] + 1
    return hist


def _combination_chunks(n, k, chunk=1 << 15):
    from itertools import combinations, islice

    it = combinations(range(n), k)
    while True:
        block = list(islice(it, chunk))
        if not block:
            return
        x = np.zeros((len(block), n), dtype=np.uint8)
        if k:
            idx = np.array(block, dtype=np.int64)
            x[np.arange(len(block))[:, None], idx] = 1
        yield x


def fixed_k_hist_np(n, k):
    amax = n * (n - 1) // 2
    hist = np.zeros(amax + 1, dtype=np.int64)
    for x in _combination_chunks(n, k):
        hist += np.bincount(count_aps_batch_np(x), minlength=amax + 1)
    return hist


# --------------------------------------------------------------------------
# exchangeable pair: per-subset sum of A(S') - A(S) over member/non-member swaps


@njit(cache=True)
def swap_totals_nb(n, k, total):
    """Rows (A(S), sum of A(S') - A(S) over all k(n-k) swaps), one per subset."""
    part = _partners(n)
    m = part.shape[1]
    out = np.empty((total, 2), dtype=np.int64)
    row = 0
    comb = np.arange(k)
    x = np.zeros(n, dtype=np.uint8)
    while True:
        for i in range(n):
            x[i] = 0
        for i in range(k):
            x[comb[i]] = 1
        a = _aps_one(x)
        tot = 0
        for u in range(n):
            if not x[u]:
                continue
            lost = 0
            for q in range(m):
                if x[part[u, q, 0]] and x[part[u, q, 1]]:
                    lost += 1
            x[u] = 0
            for v in range(n):
                if x[v] or v == u:
                    continue
                gained = 0
                for q in range(m):
                    if x[part[v, q, 0]] and x[part[v, q, 1]]:
                        gained += 1
                tot += gained - lost
            x[u] = 1
        out[row, 0] = a
        out[row, 1] = tot
        row += 1
        if k == 0:
            break
        i = k - 1
        while i >= 0 and comb[i] == n - k + i:
            i -= 1
        if i < 0:
            break
        comb[i] += 1
        for j in range(i + 1, k):
            comb[j] = comb[j - 1] + 1
    return out


def swap_totals_rows_np(x):
    """Same rows as :func:`swap_totals_nb` for an explicit batch of subsets."""
    n = x.shape[1]
    a = count_aps_batch_np(x)
    tot = np.zeros_like(a)
    for u in range(n):
        for v in range(n):
            if u == v:
                continue
            sel = (x[:, u] == 1) & (x[:, v] == 0)
            if not sel.any():
                continue
            y = x[sel].copy()
            y[:, u] = 0
            y[:, v] = 1
            tot[sel] += count_aps_batch_np(y) - a[sel]
    return np.stack([a, tot], axis=1)


@njit(cache=True, parallel=True)
def swap_totals_rows_nb(x):
    rows, n = x.shape
    part = _partners(n)
    m = part.shape[1]
    out = np.empty((rows, 2), dtype=np.int64)
    for r in prange(rows):
        y = x[r].copy()
        tot = 0
        for u in range(n):
            if not y[u]:
                continue
            lost = 0
            for q in range(m):
                if y[part[u, q, 0]] and y[part[u, q, 1]]:
                    lost += 1
            y[u] = 0
            for v in range(n):
                if y[v] or v == u:
                    continue
                gained = 0
                for q in range(m):
                    if y[part[v, q, 0]] and y[part[v, q, 1]]:
                        gained += 1
                tot += gained - lost
            y[u] = 1
        out[r, 0] = _aps_one(y)
        out[r, 1] = tot
    return out


def swap_totals_np(n, k):
    parts = [swap_totals_rows_np(x) for x in _combination_chunks(n, k)]
    return np.concatenate(parts, axis=0)


# --------------------------------------------------------------------------
# dependency graph of AP indicators


@njit(cache=True, parallel=True)
def max_degree_nb(n):
    h = (n - 1) // 2
    v = n * h
    el = np.empty((v, 3), dtype=np.int64)
    i = 0
    for a in range(n):
        for d in range(1, h + 1):
            el[i, 0] = a
            el[i, 1] = (a + d) % n
            el[i, 2] = (a + 2 * d) % n
            i += 1
    degs = np.zeros(v, dtype=np.int64)
    for p in prange(v):
        c = 0
        for q in range(v):
            if q == p:
                continue
            hit = False
            for s in range(3):
                for t in range(3):
                    if el[p, s] == el[q, t]:
                        hit = True
            if hit:
                c += 1
        degs[p] = c
    return degs


def max_degree_np(n, chunk=2048):
    h = (n - 1) // 2
    a = np.repeat(np.arange(n), h)
    d = np.tile(np.arange(1, h + 1), n)
    v = a.size
    m = np.zeros((v, n), dtype=np.float64)
    rows = np.arange(v)
    for off in (0, 1, 2):
        m[rows, (a + off * d) % n] = 1.0
    degs = np.empty(v, dtype=np.int64)
    for lo in range(0, v, chunk):
        inter = m[lo:lo + chunk] @ m.T
        degs[lo:lo + chunk] = (inter > 0).sum(axis=1) - 1
    return degs
