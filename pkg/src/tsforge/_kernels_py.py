"""Pure-Python phrase-pair kernel (fallback for the compiled ``_kernels``).

For an MT span whose tokens are all aligned, the only reference span that
can be both consistent and fully covered is its projection
``[min linked ref, max linked ref]``. For a fixed start ``i`` the projection
only grows with ``j``, so the reference tokens it spans are scanned
incrementally and the whole candidate set costs O(m * (m + r)).
"""


def _projections(mt_len, ref_len, links):
    ylo = [-1] * mt_len
    yhi = [-1] * mt_len
    rlo = [-1] * ref_len
    rhi = [-1] * ref_len
    for a, b in links:
        if ylo[a] < 0 or b < ylo[a]:
            ylo[a] = b
        if b > yhi[a]:
            yhi[a] = b
        if rlo[b] < 0 or a < rlo[b]:
            rlo[b] = a
        if a > rhi[b]:
            rhi[b] = a
    return ylo, yhi, rlo, rhi


def candidate_pairs(mt_len, ref_len, links):
    """All consistent, fully covered span pairs as inclusive ``(i, j, a, b)``."""
    ylo, yhi, rlo, rhi = _projections(mt_len, ref_len, links)
    out = []
    for i in range(mt_len):
        if ylo[i] < 0:
            continue
        lo = hi = -1
        back_lo = mt_len
        back_hi = -1
        for j in range(i, mt_len):
            if ylo[j] < 0:
                break
            new_lo = ylo[j] if lo < 0 or ylo[j] < lo else lo
            new_hi = yhi[j] if yhi[j] > hi else hi
            gap = False
            scan = range(new_lo, new_hi + 1) if lo < 0 else \
                list(range(new_lo, lo)) + list(range(hi + 1, new_hi + 1))
            for r in scan:
                if rlo[r] < 0:
                    gap = True
                    break
                if rlo[r] < back_lo:
                    back_lo = rlo[r]
                if rhi[r] > back_hi:
                    back_hi = rhi[r]
            # an unaligned ref token or a link leaving on the left persists for every larger j
            if gap or back_lo < i:
                break
            lo, hi = new_lo, new_hi
            if back_hi <= j:
                out.append((i, j, lo, hi))
    return out


def maximal_pairs(mt_len, ref_len, links):
    """Containment-maximal candidates, sorted by MT start.

    A candidate is dropped when another candidate's MT span contains it;
    the reference side then contains it too because projections are
    monotone under span inclusion.
    """
    best = {}
    for i, j, a, b in candidate_pairs(mt_len, ref_len, links):
        prev = best.get(i)
        if prev is None or j > prev[1]:
            best[i] = (i, j, a, b)
    out = []
    reach = -1
    for i in sorted(best):
        cand = best[i]
        if cand[1] > reach:
            out.append(cand)
            reach = cand[1]
    return out
