# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled convolution primitives.

Direct-loop kernels over float64 memoryviews, written so the innermost
loops run over contiguous output rows with hoisted kernel values. Same
contracts as gti.nn.backends.numpy_backend; gti.nn.backends picks
whichever is available at import time.
"""

import numpy as np

NAME = "cython"


def conv_out_hw(int h, int w, int kh, int kw, int stride, int padding):
    return (h + 2 * padding - kh) // stride + 1, (w + 2 * padding - kw) // stride + 1


def _padded(x, int padding):
    if padding == 0:
        return np.ascontiguousarray(x, dtype=np.float64)
    return np.ascontiguousarray(
        np.pad(np.asarray(x, dtype=np.float64),
               ((0, 0), (0, 0), (padding, padding), (padding, padding))))


cdef void _fwd(const double[:, :, :, ::1] xp, const double[:, :, :, ::1] k,
               int stride, double[:, :, :, ::1] y) noexcept nogil:
    cdef Py_ssize_t b = xp.shape[0], cin = xp.shape[1]
    cdef Py_ssize_t cout = k.shape[0], kh = k.shape[2], kw = k.shape[3]
    cdef Py_ssize_t oh = y.shape[2], ow = y.shape[3]
    cdef Py_ssize_t ib, oc, ic, p, q, i, j
    cdef double kv
    cdef const double* row
    cdef double* out_row
    for ib in range(b):
        for oc in range(cout):
            for ic in range(cin):
                for p in range(kh):
                    for q in range(kw):
                        kv = k[oc, ic, p, q]
                        if kv == 0.0:
                            continue
                        for i in range(oh):
                            row = &xp[ib, ic, i * stride + p, q]
                            out_row = &y[ib, oc, i, 0]
                            for j in range(ow):
                                out_row[j] += kv * row[j * stride]


cdef void _bwd_data(const double[:, :, :, ::1] dy, const double[:, :, :, ::1] k,
                    int stride, double[:, :, :, ::1] dxp) noexcept nogil:
    cdef Py_ssize_t b = dy.shape[0], cout = dy.shape[1]
    cdef Py_ssize_t oh = dy.shape[2], ow = dy.shape[3]
    cdef Py_ssize_t cin = k.shape[1], kh = k.shape[2], kw = k.shape[3]
    cdef Py_ssize_t ib, oc, ic, p, q, i, j
    cdef double kv
    cdef const double* dyrow
    cdef double* dxrow
    for ib in range(b):
        for oc in range(cout):
            for ic in range(cin):
                for p in range(kh):
                    for q in range(kw):
                        kv = k[oc, ic, p, q]
                        if kv == 0.0:
                            continue
                        for i in range(oh):
                            dyrow = &dy[ib, oc, i, 0]
                            dxrow = &dxp[ib, ic, i * stride + p, q]
                            for j in range(ow):
                                dxrow[j * stride] += kv * dyrow[j]


cdef void _bwd_kernel(const double[:, :, :, ::1] xp, const double[:, :, :, ::1] dy,
                      int stride, double[:, :, :, ::1] dk) noexcept nogil:
    cdef Py_ssize_t b = xp.shape[0], cin = xp.shape[1]
    cdef Py_ssize_t cout = dy.shape[1], oh = dy.shape[2], ow = dy.shape[3]
    cdef Py_ssize_t kh = dk.shape[2], kw = dk.shape[3]
    cdef Py_ssize_t ib, oc, ic, p, q, i, j
    cdef double acc
    cdef const double* row
    cdef const double* dyrow
    for ib in range(b):
        for oc in range(cout):
            for ic in range(cin):
                for p in range(kh):
                    for q in range(kw):
                        acc = 0.0
                        for i in range(oh):
                            row = &xp[ib, ic, i * stride + p, q]
                            dyrow = &dy[ib, oc, i, 0]
                            for j in range(ow):
                                acc += row[j * stride] * dyrow[j]
                        dk[oc, ic, p, q] += acc


def conv_fwd(x, kernel, int stride, int padding):
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    xp = _padded(x, padding)
    oh = (xp.shape[2] - kernel.shape[2]) // stride + 1
    ow = (xp.shape[3] - kernel.shape[3]) // stride + 1
    y = np.zeros((xp.shape[0], kernel.shape[0], oh, ow), dtype=np.float64)
    _fwd(xp, kernel, stride, y)
    return y


def conv_bwd_data(dy, kernel, int stride, int padding, in_hw):
    dy = np.ascontiguousarray(dy, dtype=np.float64)
    kernel = np.ascontiguousarray(kernel, dtype=np.float64)
    h, w = in_hw
    dxp = np.zeros((dy.shape[0], kernel.shape[1], h + 2 * padding, w + 2 * padding),
                   dtype=np.float64)
    _bwd_data(dy, kernel, stride, dxp)
    if padding:
        return np.ascontiguousarray(dxp[:, :, padding:padding + h, padding:padding + w])
    return dxp


def conv_bwd_kernel(x, dy, int stride, int padding, kernel_hw):
    dy = np.ascontiguousarray(dy, dtype=np.float64)
    xp = _padded(x, padding)
    dk = np.zeros((dy.shape[1], xp.shape[1], kernel_hw[0], kernel_hw[1]),
                  dtype=np.float64)
    _bwd_kernel(xp, dy, stride, dk)
    return dk
