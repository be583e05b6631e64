"""Pure numpy implementations of the inner loops in ``_kernels.pyx``."""
import numpy as np

_CHUNK = 1 << 22


def apply_tables(entries, idx, base, codes, labels):
    T, N = entries.shape[0], idx.shape[0]
    m = idx.shape[1]
    weights = base ** np.arange(m - 1, -1, -1, dtype=np.int64)
    out = np.empty((T, N), dtype=np.int64)
    step = max(1, _CHUNK // max(1, N * m))
    total = float(base) ** m
    lut = None
    if total <= max(1 << 16, T * N):
        lut = np.full(int(total), -1, dtype=np.int64)
        lut[codes] = labels
    for t0 in range(0, T, step):
        vals = entries[t0:t0 + step][:, idx].astype(np.int64)
        enc = vals @ weights
        if lut is not None:
            out[t0:t0 + step] = lut[enc]
            continue
        pos = np.searchsorted(codes, enc)
        pos_c = np.minimum(pos, len(codes) - 1)
        hit = (pos < len(codes)) & (codes[pos_c] == enc)
        out[t0:t0 + step] = np.where(hit, labels[pos_c], -1)
    return out


def _canonical(labels):
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    order = np.argsort(np.argsort(first))
    return order[inv.ravel()].astype(np.int32)


def _close(trans, lab, queue):
    # ``lab`` is a fully-relabelled class array, updated in place on merges
    while queue:
        u, v = queue.pop()
        a = trans[:, u]
        b = trans[:, v]
        diff = lab[a] != lab[b]
        if not diff.any():
            continue
        pairs = np.unique(np.stack([a[diff], b[diff]], axis=1), axis=0)
        for x, y in pairs:
            lx, ly = lab[x], lab[y]
            if lx != ly:
                lab[lab == ly] = lx
                queue.append((int(x), int(y)))


def congruence_closure(trans, labels):
    n = trans.shape[1]
    lab = np.asarray(labels, dtype=np.int64).copy()
    queue = []
    first = {}
    for x in range(n):
        r = first.setdefault(int(lab[x]), x)
        if r != x:
            queue.append((r, x))
    _close(trans, lab, queue)
    return _canonical(lab)


def principal_congruences(trans):
    n = trans.shape[1]
    out = np.empty((n * (n - 1) // 2, n), dtype=np.int32)
    row = 0
    for x in range(n):
        for y in range(x + 1, n):
            lab = np.arange(n, dtype=np.int64)
            lab[y] = x
            _close(trans, lab, [(x, y)])
            out[row] = _canonical(lab)
            row += 1
    return out
