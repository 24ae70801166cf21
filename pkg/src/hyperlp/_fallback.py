"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""
import numpy as np

# entries expanded per chunk; bounds temporary memory to ~100 MB
_CHUNK_ENTRIES = 1 << 22


def tensor_step(y, state_key, indptr, comp_vertex, comp_weight, n, stride, out):
    """Accumulate one tensor-walk step of ``y`` into ``out`` (not zeroed here).

    State ``s`` (an ordered tuple encoded base ``n``) moves to
    ``(s % stride) * n + v`` for every completion ``v`` listed under its sorted
    multiset key, carrying ``weight * y[s]``.
    """
    support = np.flatnonzero(y)
    if support.size == 0:
        return
    keys = state_key[support]
    lo = indptr[keys]
    cnt = indptr[keys + 1] - lo
    ends = np.cumsum(cnt)
    start = 0
    while start < support.size:
        # largest stop with at most _CHUNK_ENTRIES expanded entries (at least one state)
        base_total = ends[start - 1] if start else 0
        stop = int(np.searchsorted(ends, base_total + _CHUNK_ENTRIES, side="right"))
        stop = max(stop, start + 1)
        c = cnt[start:stop]
        total = int(c.sum())
        if total:
            s = np.repeat(support[start:stop], c)
            offsets = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
            j = np.repeat(lo[start:stop], c) + offsets
            dest = (s % stride) * n + comp_vertex[j]
            out += np.bincount(dest, weights=comp_weight[j] * y[s], minlength=out.size)
        start = stop
