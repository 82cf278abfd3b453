"""Pure-Python versions of the modular hot loops.

These mirror ``_ckernels.pyx`` one-to-one and are used whenever the compiled
extension is unavailable (or ``NEUROGEO_PURE_PYTHON=1`` is set).
"""


def mul_packed(keys_a, coefs_a, keys_b, coefs_b, p):
    """Multiply two sparse polynomials with packed monomial keys over F_p."""
    acc = {}
    get = acc.get
    for ka, ca in zip(keys_a, coefs_a):
        for kb, cb in zip(keys_b, coefs_b):
            k = ka + kb
            acc[k] = (get(k, 0) + ca * cb) % p
    keys = []
    coefs = []
    for k, c in acc.items():
        if c:
            keys.append(k)
            coefs.append(c)
    return keys, coefs


def rref_mod_p(rows, ncols, p):
    """Reduced row echelon form over F_p.

    Returns ``(rank, pivots, reduced)`` where ``reduced`` holds the ``rank``
    nonzero rows, each normalized to a leading 1.
    """
    m = [[x % p for x in r] for r in rows]
    pivots = []
    rank = 0
    nrows = len(m)
    for c in range(ncols):
        if rank == nrows:
            break
        piv = None
        for i in range(rank, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        inv = pow(prow[c], p - 2, p)
        if inv != 1:
            prow = [(x * inv) % p for x in prow]
            m[rank] = prow
        for i in range(nrows):
            if i != rank:
                row = m[i]
                f = row[c]
                if f:
                    m[i] = [(x - f * y) % p for x, y in zip(row, prow)]
        pivots.append(c)
        rank += 1
    return rank, pivots, m[:rank]


def rank_mod_p(rows, ncols, p):
    """Rank over F_p by forward elimination only."""
    m = [[x % p for x in r] for r in rows]
    rank = 0
    nrows = len(m)
    for c in range(ncols):
        if rank == nrows:
            break
        piv = None
        for i in range(rank, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        prow = m[rank]
        inv = pow(prow[c], p - 2, p)
        for i in range(rank + 1, nrows):
            row = m[i]
            f = row[c]
            if f:
                f = (f * inv) % p
                m[i] = [(x - f * y) % p for x, y in zip(row, prow)]
        rank += 1
    return rank
