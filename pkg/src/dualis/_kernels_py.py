"""Pure-Python fraction-free Gauss-Jordan elimination on integer rows.

This is the fallback for the compiled ``_kernels`` extension and the
reference the benchmark compares it against.  Both expose the same
function with the same output.
"""

from math import gcd


def _content(row):
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            break
    return g


def echelon(rows, ncols):
    """Reduce integer rows to Gauss-Jordan form.

    ``rows`` is a list of integer lists of length ``ncols``.  Returns
    ``(reduced, pivots)`` where ``reduced`` holds one primitive integer row per
    pivot, pivot entries positive and every other pivot column zero, ordered by
    increasing pivot column.  Dividing each row by its pivot entry gives the
    reduced row-echelon form.
    """
    work = []
    for r in rows:
        d = {j: v for j, v in enumerate(r) if v}
        if d:
            g = _content(d)
            if g != 1:
                d = {j: v // g for j, v in d.items()}
            work.append(d)

    done = []
    pivots = []
    for col in range(ncols):
        if not work:
            break
        best = None
        for idx, r in enumerate(work):
            v = r.get(col)
            if v:
                key = (abs(v), len(r))
                if best is None or key < best[0]:
                    best = (key, idx)
        if best is None:
            continue
        p = work.pop(best[1])
        a = p[col]
        if a < 0:
            p = {j: -v for j, v in p.items()}
            a = -a
        for group in (work, done):
            for i, r in enumerate(group):
                b = r.get(col)
                if not b:
                    continue
                g = gcd(a, b)
                a1, b1 = a // g, b // g
                if a1 != 1:
                    r = {j: a1 * v for j, v in r.items()}
                for j, v in p.items():
                    w = r.get(j, 0) - b1 * v
                    if w:
                        r[j] = w
                    else:
                        r.pop(j, None)
                c = _content(r) if r else 1
                if c > 1:
                    r = {j: v // c for j, v in r.items()}
                group[i] = r
        work = [r for r in work if r]
        done.append(p)
        pivots.append(col)

    reduced = []
    for r in done:
        row = [0] * ncols
        for j, v in r.items():
            row[j] = v
        reduced.append(row)
    return reduced, pivots
