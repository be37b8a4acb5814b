//! Dense row-major tensors generic over the float precision.
//!
//! Training runs in `f32`; gradient checks instantiate the same code in
//! `f64`, so every numeric kernel is written against the [`Real`] trait.

use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};
use core::fmt;
use core::ops::{AddAssign, MulAssign, SubAssign};
use num_traits::Float;

/// Float precision usable by the tensor and tape machinery.
pub trait Real:
    Float + AddAssign + SubAssign + MulAssign + fmt::Debug + Default + Send + Sync + 'static
{
    fn of_f64(v: f64) -> Self;
    fn as_f64(self) -> f64;
    fn of_f32(v: f32) -> Self;
    fn as_f32(self) -> f32;
}

impl Real for f32 {
    fn of_f64(v: f64) -> Self {
        v as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
    fn of_f32(v: f32) -> Self {
        v
    }
    fn as_f32(self) -> f32 {
        self
    }
}

impl Real for f64 {
    fn of_f64(v: f64) -> Self {
        v
    }
    fn as_f64(self) -> f64 {
        self
    }
    fn of_f32(v: f32) -> Self {
        v as f64
    }
    fn as_f32(self) -> f32 {
        self as f32
    }
}

/// Row-major dense tensor.
#[derive(Clone, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    pub fn zeros(shape: &[usize]) -> Self {
        let len = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![T::zero(); len] }
    }

    pub fn filled(shape: &[usize], v: T) -> Self {
        let len = shape.iter().product();
        Tensor { shape: shape.to_vec(), data: vec![v; len] }
    }

    pub fn from_vec(shape: &[usize], data: Vec<T>) -> Self {
        assert_eq!(
            shape.iter().product::<usize>(),
            data.len(),
            "tensor data length does not match shape"
        );
        Tensor { shape: shape.to_vec(), data }
    }

    pub fn scalar(v: T) -> Self {
        Tensor { shape: vec![1], data: vec![v] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Scalar extraction; panics unless the tensor has exactly one element.
    pub fn item(&self) -> T {
        assert_eq!(self.data.len(), 1, "item() on non-scalar tensor");
        self.data[0]
    }

    /// Same data, new shape. Element count must match.
    pub fn reshaped(mut self, shape: &[usize]) -> Self {
        assert_eq!(shape.iter().product::<usize>(), self.data.len());
        self.shape = shape.to_vec();
        self
    }

    /// Lossless only when converting to a wider type; f64 -> f32 rounds.
    pub fn cast<U: Real>(&self) -> Tensor<U> {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|v| U::of_f64(v.as_f64())).collect(),
        }
    }

    pub fn shape_string(&self) -> String {
        format!("{:?}", self.shape)
    }

    /// 2-D transpose copy.
    pub fn transposed2d(&self) -> Tensor<T> {
        assert_eq!(self.shape.len(), 2);
        let (r, c) = (self.shape[0], self.shape[1]);
        let mut out = vec![T::zero(); r * c];
        for i in 0..r {
            for j in 0..c {
                out[j * r + i] = self.data[i * c + j];
            }
        }
        Tensor { shape: vec![c, r], data: out }
    }

    /// Bit-level equality (exact float compare, no tolerance).
    pub fn bit_eq(&self, other: &Tensor<T>) -> bool {
        self.shape == other.shape
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.as_f64().to_bits() == b.as_f64().to_bits())
    }

    pub fn max_abs_diff(&self, other: &Tensor<T>) -> f64 {
        assert_eq!(self.shape, other.shape);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a.as_f64() - b.as_f64()).abs())
            .fold(0.0, f64::max)
    }
}

impl<T: Real> fmt::Debug for Tensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.data.len() <= 8 {
            write!(f, "Tensor{:?}{:?}", self.shape, self.data)
        } else {
            write!(f, "Tensor{:?}[{} elems]", self.shape, self.data.len())
        }
    }
}

/// `out[i,j] = sum_k opa(a)[i,k] * opb(b)[k,j]` with optional transposes.
///
/// `a` is `[m,k]` (or `[k,m]` when `ta`), `b` is `[k,n]` (or `[n,k]` when `tb`).
pub fn matmul<T: Real>(
    a: &[T],
    b: &[T],
    m: usize,
    k: usize,
    n: usize,
    ta: bool,
    tb: bool,
) -> Vec<T> {
    let mut out = vec![T::zero(); m * n];
    match (ta, tb) {
        (false, false) => {
            for i in 0..m {
                let out_row = &mut out[i * n..(i + 1) * n];
                for kk in 0..k {
                    let av = a[i * k + kk];
                    let b_row = &b[kk * n..(kk + 1) * n];
                    for (o, &bv) in out_row.iter_mut().zip(b_row) {
                        *o += av * bv;
                    }
                }
            }
        }
        (false, true) => {
            for i in 0..m {
                let a_row = &a[i * k..(i + 1) * k];
                for j in 0..n {
                    let b_row = &b[j * k..(j + 1) * k];
                    let mut acc = T::zero();
                    for (&av, &bv) in a_row.iter().zip(b_row) {
                        acc += av * bv;
                    }
                    out[i * n + j] = acc;
                }
            }
        }
        (true, false) => {
            for kk in 0..k {
                let a_row = &a[kk * m..(kk + 1) * m];
                let b_row = &b[kk * n..(kk + 1) * n];
                for i in 0..m {
                    let av = a_row[i];
                    let out_row = &mut out[i * n..(i + 1) * n];
                    for (o, &bv) in out_row.iter_mut().zip(b_row) {
                        *o += av * bv;
                    }
                }
            }
        }
        (true, true) => {
            for i in 0..m {
                for j in 0..n {
                    let mut acc = T::zero();
                    for kk in 0..k {
                        acc += a[kk * m + i] * b[j * k + kk];
                    }
                    out[i * n + j] = acc;
                }
            }
        }
    }
    out
}

/// Valid output size of a convolution along one axis.
pub fn conv_out_len(len: usize, kernel: usize, stride: usize, pad: usize) -> usize {
    (len + 2 * pad - kernel) / stride + 1
}

/// Direct 2-D convolution (cross-correlation). `x` is `[ci,h,w]`,
/// `w` is `[co,ci,kh,kw]`, output `[co,oh,ow]`.
#[allow(clippy::too_many_arguments)]
pub fn conv2d_fwd<T: Real>(
    x: &[T],
    ci: usize,
    h: usize,
    w: usize,
    wt: &[T],
    co: usize,
    kh: usize,
    kw: usize,
    bias: Option<&[T]>,
    stride: usize,
    pad: usize,
) -> (Vec<T>, usize, usize) {
    let oh = conv_out_len(h, kh, stride, pad);
    let ow = conv_out_len(w, kw, stride, pad);
    let mut out = vec![T::zero(); co * oh * ow];
    for c_o in 0..co {
        if let Some(b) = bias {
            let bv = b[c_o];
            for o in &mut out[c_o * oh * ow..(c_o + 1) * oh * ow] {
                *o = bv;
            }
        }
        for c_i in 0..ci {
            let x_plane = &x[c_i * h * w..(c_i + 1) * h * w];
            for a in 0..kh {
                for b in 0..kw {
                    let wv = wt[((c_o * ci + c_i) * kh + a) * kw + b];
                    if wv == T::zero() {
                        continue;
                    }
                    let (ox_lo, ox_hi) = valid_range(w, kw, stride, pad, b);
                    if ox_lo >= ox_hi {
                        continue;
                    }
                    for oy in 0..oh {
                        let iy = (oy * stride + a) as isize - pad as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        let x_row = &x_plane[iy as usize * w..(iy as usize + 1) * w];
                        let out_row = &mut out[(c_o * oh + oy) * ow..(c_o * oh + oy + 1) * ow];
                        if stride == 1 {
                            let ix0 = (ox_lo + b) as isize - pad as isize;
                            let xs = &x_row[ix0 as usize..ix0 as usize + (ox_hi - ox_lo)];
                            for (o, &xv) in out_row[ox_lo..ox_hi].iter_mut().zip(xs) {
                                *o += wv * xv;
                            }
                        } else {
                            for ox in ox_lo..ox_hi {
                                let ix = (ox * stride + b) as isize - pad as isize;
                                out_row[ox] += wv * x_row[ix as usize];
                            }
                        }
                    }
                }
            }
        }
    }
    (out, oh, ow)
}

/// Output positions along one axis whose input index stays in bounds.
fn valid_range(len: usize, _kernel: usize, stride: usize, pad: usize, tap: usize) -> (usize, usize) {
    // need 0 <= o*stride + tap - pad <= len-1
    let lo = if tap >= pad { 0 } else { (pad - tap + stride - 1) / stride };
    let max_i = len as isize - 1 - tap as isize + pad as isize;
    if max_i < 0 {
        return (0, 0);
    }
    let hi = (max_i as usize) / stride + 1;
    (lo, hi)
}

/// Gradient of `conv2d_fwd` w.r.t. its input; also the transposed-convolution
/// forward used by the critic's explicit input-gradient graph.
/// `g` is `[co,gh,gw]`, result `[ci,oh,ow]`.
#[allow(clippy::too_many_arguments)]
pub fn conv2d_input_grad<T: Real>(
    g: &[T],
    co: usize,
    gh: usize,
    gw: usize,
    wt: &[T],
    ci: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    pad: usize,
    oh: usize,
    ow: usize,
) -> Vec<T> {
    let mut out = vec![T::zero(); ci * oh * ow];
    for c_o in 0..co {
        let g_plane = &g[c_o * gh * gw..(c_o + 1) * gh * gw];
        for c_i in 0..ci {
            let out_plane = &mut out[c_i * oh * ow..(c_i + 1) * oh * ow];
            for a in 0..kh {
                for b in 0..kw {
                    let wv = wt[((c_o * ci + c_i) * kh + a) * kw + b];
                    if wv == T::zero() {
                        continue;
                    }
                    let (gx_lo, gx_hi) = valid_range(ow, kw, stride, pad, b);
                    if gx_lo >= gx_hi {
                        continue;
                    }
                    for gy in 0..gh {
                        let iy = (gy * stride + a) as isize - pad as isize;
                        if iy < 0 || iy >= oh as isize {
                            continue;
                        }
                        let g_row = &g_plane[gy * gw..(gy + 1) * gw];
                        let out_row = &mut out_plane[iy as usize * ow..(iy as usize + 1) * ow];
                        if stride == 1 {
                            let ix0 = (gx_lo + b) as isize - pad as isize;
                            let os = &mut out_row[ix0 as usize..ix0 as usize + (gx_hi - gx_lo)];
                            for (o, &gv) in os.iter_mut().zip(&g_row[gx_lo..gx_hi]) {
                                *o += wv * gv;
                            }
                        } else {
                            for gx in gx_lo..gx_hi {
                                let ix = (gx * stride + b) as isize - pad as isize;
                                out_row[ix as usize] += wv * g_row[gx];
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Gradient of `conv2d_fwd` w.r.t. its weights. `x` is `[ci,h,w]`,
/// `g` is `[co,gh,gw]`, result `[co,ci,kh,kw]`.
#[allow(clippy::too_many_arguments)]
pub fn conv2d_weight_grad<T: Real>(
    x: &[T],
    ci: usize,
    h: usize,
    w: usize,
    g: &[T],
    co: usize,
    gh: usize,
    gw: usize,
    kh: usize,
    kw: usize,
    stride: usize,
    pad: usize,
) -> Vec<T> {
    let mut out = vec![T::zero(); co * ci * kh * kw];
    for c_o in 0..co {
        let g_plane = &g[c_o * gh * gw..(c_o + 1) * gh * gw];
        for c_i in 0..ci {
            let x_plane = &x[c_i * h * w..(c_i + 1) * h * w];
            for a in 0..kh {
                for b in 0..kw {
                    let (gx_lo, gx_hi) = valid_range(w, kw, stride, pad, b);
                    if gx_lo >= gx_hi {
                        continue;
                    }
                    let mut acc = T::zero();
                    for gy in 0..gh {
                        let iy = (gy * stride + a) as isize - pad as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        let g_row = &g_plane[gy * gw..(gy + 1) * gw];
                        let x_row = &x_plane[iy as usize * w..(iy as usize + 1) * w];
                        if stride == 1 {
                            let ix0 = (gx_lo + b) as isize - pad as isize;
                            let xs = &x_row[ix0 as usize..ix0 as usize + (gx_hi - gx_lo)];
                            for (&gv, &xv) in g_row[gx_lo..gx_hi].iter().zip(xs) {
                                acc += gv * xv;
                            }
                        } else {
                            for gx in gx_lo..gx_hi {
                                let ix = (gx * stride + b) as isize - pad as isize;
                                acc += g_row[gx] * x_row[ix as usize];
                            }
                        }
                    }
                    out[((c_o * ci + c_i) * kh + a) * kw + b] = acc;
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn matmul_small_known() {
        // [2x3] x [3x2]
        let a = vec![1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0];
        let b = vec![7.0f64, 8.0, 9.0, 10.0, 11.0, 12.0];
        let y = matmul(&a, &b, 2, 3, 2, false, false);
        assert_eq!(y, vec![58.0, 64.0, 139.0, 154.0]);
    }

    #[test]
    fn matmul_transpose_variants_agree() {
        let a = vec![1.0f64, -2.0, 0.5, 3.0, 4.0, -1.0]; // [2,3] or [3,2]
        let b = vec![2.0f64, 1.0, -1.0, 0.0, 3.0, 5.0];
        let base = matmul(&a, &b, 2, 3, 2, false, false);
        // Transposing inputs and flipping flags must reproduce `base`.
        let at = Tensor::from_vec(&[2, 3], a.clone()).transposed2d();
        let bt = Tensor::from_vec(&[3, 2], b.clone()).transposed2d();
        assert_eq!(matmul(at.data(), &b, 2, 3, 2, true, false), base);
        assert_eq!(matmul(&a, bt.data(), 2, 3, 2, false, true), base);
        assert_eq!(matmul(at.data(), bt.data(), 2, 3, 2, true, true), base);
    }

    // Brute-force conv oracle: independent index arithmetic.
    #[allow(clippy::too_many_arguments)]
    fn conv_oracle(
        x: &[f64],
        ci: usize,
        h: usize,
        w: usize,
        wt: &[f64],
        co: usize,
        k: usize,
        bias: &[f64],
        stride: usize,
        pad: usize,
    ) -> Vec<f64> {
        let oh = (h + 2 * pad - k) / stride + 1;
        let ow = (w + 2 * pad - k) / stride + 1;
        let mut out = vec![0.0; co * oh * ow];
        for c_o in 0..co {
            for oy in 0..oh {
                for ox in 0..ow {
                    let mut acc = bias[c_o];
                    for c_i in 0..ci {
                        for a in 0..k {
                            for b in 0..k {
                                let iy = (oy * stride + a) as isize - pad as isize;
                                let ix = (ox * stride + b) as isize - pad as isize;
                                if iy >= 0 && ix >= 0 && iy < h as isize && ix < w as isize {
                                    acc += x[(c_i * h + iy as usize) * w + ix as usize]
                                        * wt[((c_o * ci + c_i) * k + a) * k + b];
                                }
                            }
                        }
                    }
                    out[(c_o * oh + oy) * ow + ox] = acc;
                }
            }
        }
        out
    }

    #[test]
    fn conv_matches_padded_oracle() {
        let mut state = 1u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 33) as f64) / (1u64 << 31) as f64 - 1.0
        };
        for &(ci, h, w, co, k, stride, pad) in
            &[(2usize, 7usize, 6usize, 3usize, 3usize, 1usize, 1usize), (3, 8, 8, 2, 3, 2, 1), (1, 5, 9, 4, 4, 2, 1)]
        {
            let x: Vec<f64> = (0..ci * h * w).map(|_| next()).collect();
            let wt: Vec<f64> = (0..co * ci * k * k).map(|_| next()).collect();
            let bias: Vec<f64> = (0..co).map(|_| next()).collect();
            let (got, _, _) = conv2d_fwd(&x, ci, h, w, &wt, co, k, k, Some(&bias), stride, pad);
            let want = conv_oracle(&x, ci, h, w, &wt, co, k, &bias, stride, pad);
            for (g, e) in got.iter().zip(&want) {
                assert!((g - e).abs() < 1e-12, "conv mismatch {g} vs {e}");
            }
        }
    }
}
