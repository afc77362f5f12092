"""Vectorized NumPy convolution primitives (im2col / col2im)."""

from __future__ import annotations

import numpy as np

NAME = "numpy"


def conv_out_hw(h: int, w: int, kh: int, kw: int, stride: int, padding: int) -> tuple[int, int]:
    oh = (h + 2 * padding - kh) // stride + 1
    ow = (w + 2 * padding - kw) // stride + 1
    return oh, ow


def _im2col(x: np.ndarray, kh: int, kw: int, stride: int, padding: int) -> np.ndarray:
    b, c, h, w = x.shape
    oh, ow = conv_out_hw(h, w, kh, kw, stride, padding)
    if padding:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    cols = np.empty((b, c, kh, kw, oh, ow), dtype=np.float64)
    for i in range(kh):
        i_end = i + (oh - 1) * stride + 1
        for j in range(kw):
            j_end = j + (ow - 1) * stride + 1
            cols[:, :, i, j] = x[:, :, i:i_end:stride, j:j_end:stride]
    return cols.reshape(b, c * kh * kw, oh * ow)


def _col2im(cols: np.ndarray, in_hw: tuple[int, int], c: int, kh: int, kw: int,
            stride: int, padding: int) -> np.ndarray:
    b = cols.shape[0]
    h, w = in_hw
    oh, ow = conv_out_hw(h, w, kh, kw, stride, padding)
    cols = cols.reshape(b, c, kh, kw, oh, ow)
    xpad = np.zeros((b, c, h + 2 * padding, w + 2 * padding), dtype=np.float64)
    for i in range(kh):
        i_end = i + (oh - 1) * stride + 1
        for j in range(kw):
            j_end = j + (ow - 1) * stride + 1
            xpad[:, :, i:i_end:stride, j:j_end:stride] += cols[:, :, i, j]
    if padding:
        return xpad[:, :, padding:padding + h, padding:padding + w]
    return xpad


def conv_fwd(x: np.ndarray, kernel: np.ndarray, stride: int, padding: int) -> np.ndarray:
    b = x.shape[0]
    cout, cin, kh, kw = kernel.shape
    oh, ow = conv_out_hw(x.shape[2], x.shape[3], kh, kw, stride, padding)
    cols = _im2col(x, kh, kw, stride, padding)
    w2 = kernel.reshape(cout, cin * kh * kw)
    y = np.matmul(w2[None, :, :], cols)
    return y.reshape(b, cout, oh, ow)


def conv_bwd_data(dy: np.ndarray, kernel: np.ndarray, stride: int, padding: int,
                  in_hw: tuple[int, int]) -> np.ndarray:
    b, cout = dy.shape[0], dy.shape[1]
    _, cin, kh, kw = kernel.shape
    w2 = kernel.reshape(cout, cin * kh * kw)
    cols = np.matmul(w2.T[None, :, :], dy.reshape(b, cout, -1))
    return _col2im(cols, in_hw, cin, kh, kw, stride, padding)


def conv_bwd_kernel(x: np.ndarray, dy: np.ndarray, stride: int, padding: int,
                    kernel_hw: tuple[int, int]) -> np.ndarray:
    b, cin = x.shape[0], x.shape[1]
    cout = dy.shape[1]
    kh, kw = kernel_hw
    cols = _im2col(x, kh, kw, stride, padding)
    dyf = dy.reshape(b, cout, -1)
    dk = np.matmul(dyf, cols.transpose(0, 2, 1)).sum(axis=0)
    return dk.reshape(cout, cin, kh, kw)
