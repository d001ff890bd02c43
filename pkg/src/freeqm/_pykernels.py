"""Pure-Python twin of ``_ckernels``; same signatures, arbitrary-precision ints."""


def word_values(gens, exps, offsets, table, bound):
    n = len(offsets) - 1
    out = [0] * n
    for w in range(n):
        s = 0
        for p in range(offsets[w], offsets[w + 1]):
            s += table[gens[p]][exps[p] + bound]
        out[w] = s
    return out


def _product_value(gens, exps, offsets, table, bound, a, b):
    a0, a1 = offsets[a], offsets[a + 1]
    b0, b1 = offsets[b], offsets[b + 1]
    i = a1 - 1
    j = b0
    while i >= a0 and j < b1 and gens[i] == gens[j] and exps[i] + exps[j] == 0:
        i -= 1
        j += 1
    s = 0
    if i >= a0 and j < b1 and gens[i] == gens[j]:
        for p in range(a0, i):
            s += table[gens[p]][exps[p] + bound]
        s += table[gens[i]][exps[i] + exps[j] + bound]
        for p in range(j + 1, b1):
            s += table[gens[p]][exps[p] + bound]
    else:
        for p in range(a0, i + 1):
            s += table[gens[p]][exps[p] + bound]
        for p in range(j, b1):
            s += table[gens[p]][exps[p] + bound]
    return s


def coboundary_extremum(gens, exps, offsets, table, bound, left=None, right=None):
    """Largest ``|g(x) + g(y) - g(xy)|`` over word pairs.

    Words are packed as flat ``gens``/``exps`` arrays sliced by ``offsets``;
    ``table[g][e + bound]`` holds the scaled integer value of ``sigma_g(e)``.
    With ``left``/``right`` omitted every ordered pair is visited, otherwise
    only the pairs ``(left[p], right[p])``.  Returns ``(best_abs, signed, i, j)``
    with the first pair reaching the maximum.
    """
    gv = word_values(gens, exps, offsets, table, bound)
    n = len(offsets) - 1
    best, signed, bi, bj = -1, 0, -1, -1
    if left is None:
        pairs = ((a, b) for a in range(n) for b in range(n))
    else:
        pairs = zip(left, right)
    for a, b in pairs:
        a, b = int(a), int(b)
        c = gv[a] + gv[b] - _product_value(gens, exps, offsets, table, bound, a, b)
        if abs(c) > best:
            best, signed, bi, bj = abs(c), c, a, b
    return best, signed, bi, bj
