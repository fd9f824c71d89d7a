//! Raw 2-D transposed-convolution kernels (forward and the two vjps),
//! lowered to a single gemm plus a scatter/gather pass. The tape wires
//! these into differentiable nodes.

use crate::array::gemm;

/// Static geometry of one transposed-convolution node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct ConvTDims {
    pub batch: usize,
    pub c_in: usize,
    pub h: usize,
    pub w: usize,
    pub c_out: usize,
    pub kh: usize,
    pub kw: usize,
    pub stride: usize,
    pub pad: usize,
    pub out_h: usize,
    pub out_w: usize,
}

impl ConvTDims {
    pub fn output_size(in_size: usize, kernel: usize, stride: usize, pad: usize) -> Option<usize> {
        ((in_size - 1) * stride + kernel).checked_sub(2 * pad).filter(|&s| s > 0)
    }
}

/// Gather x ([B, C_in, H, W] row-major) into an im2row buffer of shape
/// [B*H*W, C_in].
fn input_rows(x: &[f64], d: &ConvTDims) -> Vec<f64> {
    let hw = d.h * d.w;
    let mut rows = vec![0.0; d.batch * hw * d.c_in];
    for b in 0..d.batch {
        for c in 0..d.c_in {
            let src = &x[(b * d.c_in + c) * hw..(b * d.c_in + c + 1) * hw];
            for (p, &v) in src.iter().enumerate() {
                rows[(b * hw + p) * d.c_in + c] = v;
            }
        }
    }
    rows
}

/// Forward: out[b, co, i*s - p + ki, j*s - p + kj] += Σ_ci x[b,ci,i,j] * k[ci,co,ki,kj].
pub(crate) fn conv_transpose2d(x: &[f64], kernel: &[f64], d: &ConvTDims) -> Vec<f64> {
    let hw = d.h * d.w;
    let kk = d.kh * d.kw;
    let rows = input_rows(x, d);
    // cols[bhw, co*kk + kij] = Σ_ci rows[bhw, ci] * kernel[ci, co*kk + kij]
    let mut cols = vec![0.0; d.batch * hw * d.c_out * kk];
    gemm(d.batch * hw, d.c_in, d.c_out * kk, 1.0, &rows, false, kernel, false, 0.0, &mut cols);

    let out_hw = d.out_h * d.out_w;
    let mut out = vec![0.0; d.batch * d.c_out * out_hw];
    for b in 0..d.batch {
        for i in 0..d.h {
            for j in 0..d.w {
                let row = &cols[(b * hw + i * d.w + j) * d.c_out * kk..][..d.c_out * kk];
                for co in 0..d.c_out {
                    let plane = &mut out[(b * d.c_out + co) * out_hw..][..out_hw];
                    for ki in 0..d.kh {
                        let oi = (i * d.stride + ki) as isize - d.pad as isize;
                        if oi < 0 || oi >= d.out_h as isize {
                            continue;
                        }
                        for kj in 0..d.kw {
                            let oj = (j * d.stride + kj) as isize - d.pad as isize;
                            if oj < 0 || oj >= d.out_w as isize {
                                continue;
                            }
                            plane[oi as usize * d.out_w + oj as usize] +=
                                row[co * kk + ki * d.kw + kj];
                        }
                    }
                }
            }
        }
    }
    out
}

/// Gather the output cotangent back into column layout:
/// dcols[bhw, co*kk + kij] = dout[b, co, oi, oj] (zero where the forward
/// scatter fell outside the output).
fn gather_cols(dout: &[f64], d: &ConvTDims) -> Vec<f64> {
    let hw = d.h * d.w;
    let kk = d.kh * d.kw;
    let out_hw = d.out_h * d.out_w;
    let mut dcols = vec![0.0; d.batch * hw * d.c_out * kk];
    for b in 0..d.batch {
        for i in 0..d.h {
            for j in 0..d.w {
                let row = &mut dcols[(b * hw + i * d.w + j) * d.c_out * kk..][..d.c_out * kk];
                for co in 0..d.c_out {
                    let plane = &dout[(b * d.c_out + co) * out_hw..][..out_hw];
                    for ki in 0..d.kh {
                        let oi = (i * d.stride + ki) as isize - d.pad as isize;
                        if oi < 0 || oi >= d.out_h as isize {
                            continue;
                        }
                        for kj in 0..d.kw {
                            let oj = (j * d.stride + kj) as isize - d.pad as isize;
                            if oj < 0 || oj >= d.out_w as isize {
                                continue;
                            }
                            row[co * kk + ki * d.kw + kj] =
                                plane[oi as usize * d.out_w + oj as usize];
                        }
                    }
                }
            }
        }
    }
    dcols
}

/// Cotangent w.r.t. the input: dX = dcols · Kᵀ, laid back out as
/// [B, C_in, H, W].
pub(crate) fn conv_transpose2d_grad_input(dout: &[f64], kernel: &[f64], d: &ConvTDims) -> Vec<f64> {
    let hw = d.h * d.w;
    let kk = d.kh * d.kw;
    let dcols = gather_cols(dout, d);
    let mut drows = vec![0.0; d.batch * hw * d.c_in];
    // dcols [B*HW, Cout*kk] · kernelᵀ [Cout*kk, Cin]
    gemm(d.batch * hw, d.c_out * kk, d.c_in, 1.0, &dcols, false, kernel, true, 0.0, &mut drows);
    let mut dx = vec![0.0; d.batch * d.c_in * hw];
    for b in 0..d.batch {
        for c in 0..d.c_in {
            let dst = &mut dx[(b * d.c_in + c) * hw..][..hw];
            for (p, slot) in dst.iter_mut().enumerate() {
                *slot = drows[(b * hw + p) * d.c_in + c];
            }
        }
    }
    dx
}

/// Cotangent w.r.t. the kernel: dK = Xᵀ · dcols, shape [C_in, C_out*kh*kw].
pub(crate) fn conv_transpose2d_grad_kernel(
    x: &[f64],
    dout: &[f64],
    d: &ConvTDims,
) -> Vec<f64> {
    let hw = d.h * d.w;
    let kk = d.kh * d.kw;
    let rows = input_rows(x, d);
    let dcols = gather_cols(dout, d);
    let mut dk = vec![0.0; d.c_in * d.c_out * kk];
    gemm(d.c_in, d.batch * hw, d.c_out * kk, 1.0, &rows, true, &dcols, false, 0.0, &mut dk);
    dk
}
