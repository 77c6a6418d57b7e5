# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled text kernel: tokenize, singularize, greedy phrase matching.

Mirrors ``_pykernel`` exactly; the parity tests assert identical output.
"""

from cpython.unicode cimport Py_UNICODE_ISALNUM, PyUnicode_ReadChar

from ._rules import (
    ES_STEM_ENDINGS,
    IRREGULAR_SINGULARS,
    KEEP_S_ENDINGS,
    VES_SINGULARS,
)

KERNEL_NAME = "cython"

cdef dict _IRREGULAR = dict(IRREGULAR_SINGULARS)
cdef dict _VES = dict(VES_SINGULARS)
cdef tuple _ES_STEMS = tuple(ES_STEM_ENDINGS)
cdef tuple _KEEP_S = tuple(KEEP_S_ENDINGS)
cdef dict _SINGULAR_CACHE = {}


cpdef str singularize(str word):
    """Deterministic rule-based singular of a lowercase token."""
    cdef str w = word.lower()
    out = _SINGULAR_CACHE.get(w)
    if out is not None:
        return <str> out
    out = _IRREGULAR.get(w)
    if out is None:
        out = _VES.get(w)
    if out is None:
        if w.endswith("ies") and len(w) > 3:
            out = w[:-3] + "y"
        elif w.endswith("es") and len(w) > 2 and w[:-2].endswith(_ES_STEMS):
            out = w[:-2]
        elif w.endswith("s") and len(w) > 1 and not w.endswith(_KEEP_S):
            out = w[:-1]
        else:
            out = w
    _SINGULAR_CACHE[w] = out
    return <str> out


cpdef list tokenize_spans(str caption):
    """Token spans of a caption: ``(start, end, singular)`` triples."""
    cdef list tokens = []
    cdef Py_ssize_t n = len(caption)
    cdef Py_ssize_t i = 0, j
    while i < n:
        if Py_UNICODE_ISALNUM(PyUnicode_ReadChar(caption, i)):
            j = i + 1
            while j < n and Py_UNICODE_ISALNUM(PyUnicode_ReadChar(caption, j)):
                j += 1
            tokens.append((i, j, singularize(caption[i:j])))
            i = j
        else:
            i += 1
    return tokens


cpdef tuple extract(str caption, dict phrases, Py_ssize_t max_len):
    """Tokenize and match category phrases; see _pykernel.extract."""
    cdef list tokens = tokenize_spans(caption)
    cdef Py_ssize_t nt = len(tokens)
    cdef list found = []
    if nt == 0 or max_len <= 0:
        return tokens, found
    cdef list singulars = [t[2] for t in tokens]
    cdef bytearray taken = bytearray(nt)
    cdef Py_ssize_t length, i, k, limit
    cdef bint free
    cdef str key
    length = max_len if max_len < nt else nt
    while length > 0:
        i = 0
        limit = nt - length
        while i <= limit:
            free = True
            for k in range(i, i + length):
                if taken[k]:
                    free = False
                    break
            if not free:
                i += 1
                continue
            key = <str> singulars[i] if length == 1 else " ".join(singulars[i : i + length])
            category = phrases.get(key)
            if category is None:
                i += 1
                continue
            found.append((category, i, i + length - 1))
            for k in range(i, i + length):
                taken[k] = 1
            i += length
        length -= 1
    found.sort(key=_mention_start)
    return tokens, found


def _mention_start(mention):
    return mention[1]
