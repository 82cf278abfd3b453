# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled modular kernels: sparse packed-monomial products and row reduction.

Moduli must be below 2**63 so that a sum of two residues fits in 64 bits.
"""
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector
from libc.stdint cimport uint64_t

cdef extern from *:
    ctypedef unsigned long long u128 "unsigned __int128"


cdef inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) nogil:
    return <uint64_t>((<u128>a * <u128>b) % <u128>p)


cdef uint64_t powmod(uint64_t a, uint64_t e, uint64_t p) nogil:
    cdef uint64_t r = 1
    a = a % p
    while e:
        if e & 1:
            r = mulmod(r, a, p)
        a = mulmod(a, a, p)
        e >>= 1
    return r


def mul_packed(list keys_a, list coefs_a, list keys_b, list coefs_b, uint64_t p):
    cdef Py_ssize_t na = len(keys_a), nb = len(keys_b), i, j
    cdef vector[uint64_t] ka, ca, kb, cb
    ka.reserve(na); ca.reserve(na); kb.reserve(nb); cb.reserve(nb)
    for i in range(na):
        ka.push_back(keys_a[i]); ca.push_back(coefs_a[i])
    for j in range(nb):
        kb.push_back(keys_b[j]); cb.push_back(coefs_b[j])
    cdef unordered_map[uint64_t, uint64_t] acc
    acc.reserve(<size_t>(na * nb if na * nb < 4000000 else 4000000))
    cdef uint64_t key, v, ai, aci
    with nogil:
        for i in range(na):
            ai = ka[i]
            aci = ca[i]
            for j in range(nb):
                key = ai + kb[j]
                v = acc[key] + mulmod(aci, cb[j], p)
                if v >= p:
                    v -= p
                acc[key] = v
    keys = []
    coefs = []
    for item in acc:
        if item.second:
            keys.append(item.first)
            coefs.append(item.second)
    return keys, coefs


cdef int _eliminate(vector[vector[uint64_t]]& m, Py_ssize_t ncols, uint64_t p,
                    bint full, vector[Py_ssize_t]& pivots) nogil:
    cdef Py_ssize_t nrows = m.size(), rank = 0, c, i, piv, k
    cdef uint64_t inv, f, x
    for c in range(ncols):
        if rank == nrows:
            break
        piv = -1
        for i in range(rank, nrows):
            if m[i][c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            m[rank].swap(m[piv])
        inv = powmod(m[rank][c], p - 2, p)
        if full and inv != 1:
            for k in range(c, ncols):
                m[rank][k] = mulmod(m[rank][k], inv, p)
            inv = 1
        for i in range(rank + 1 if not full else 0, nrows):
            if i == rank or m[i][c] == 0:
                continue
            f = mulmod(m[i][c], inv, p)
            f = p - f
            for k in range(c, ncols):
                x = m[i][k] + mulmod(f, m[rank][k], p)
                if x >= p:
                    x -= p
                m[i][k] = x
        pivots.push_back(c)
        rank += 1
    return rank


cdef vector[vector[uint64_t]] _load(list rows, Py_ssize_t ncols, object p):
    cdef vector[vector[uint64_t]] m
    cdef vector[uint64_t] row
    m.reserve(len(rows))
    for r in rows:
        row.clear()
        row.reserve(ncols)
        for x in r:
            row.push_back(x % p)
        m.push_back(row)
    return m


def rref_mod_p(list rows, Py_ssize_t ncols, uint64_t p):
    cdef vector[vector[uint64_t]] m = _load(rows, ncols, p)
    cdef vector[Py_ssize_t] pivots
    cdef int rank
    with nogil:
        rank = _eliminate(m, ncols, p, True, pivots)
    reduced = [[m[i][k] for k in range(ncols)] for i in range(rank)]
    return rank, [pivots[i] for i in range(rank)], reduced


def rank_mod_p(list rows, Py_ssize_t ncols, uint64_t p):
    cdef vector[vector[uint64_t]] m = _load(rows, ncols, p)
    cdef vector[Py_ssize_t] pivots
    cdef int rank
    with nogil:
        rank = _eliminate(m, ncols, p, False, pivots)
    return rank
