//! Dense row-major arrays of `f64` plus the matmul kernel the tape ops
//! are built on.
//!
//! Arrays are immutable values once created; every vector and matrix in
//! the system (signals, actions, hidden states, parameters) is one of
//! these. Construction rejects NaN/Inf so non-finite values surface at
//! op boundaries instead of propagating silently.

use crate::{shape_err, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Array {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Array {
    /// Build an array, validating that the element count matches the
    /// shape and that every value is finite.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let n: usize = shape.iter().product();
        if shape.iter().any(|&d| d == 0) {
            return Err(shape_err("Array::new", format!("zero dimension in {shape:?}")));
        }
        if n != data.len() {
            return Err(shape_err(
                "Array::new",
                format!("shape {:?} wants {} values, got {}", shape, n, data.len()),
            ));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite("Array::new"));
        }
        Ok(Array { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Array { shape, data: vec![0.0; n] }
    }

    pub fn full(shape: Vec<usize>, value: f64) -> Self {
        let n = shape.iter().product();
        Array { shape, data: vec![value; n] }
    }

    pub fn scalar(value: f64) -> Self {
        Array { shape: vec![1], data: vec![value] }
    }

    /// 1-D array from values.
    pub fn vector(data: Vec<f64>) -> Self {
        Array { shape: vec![data.len()], data }
    }

    /// 2-D array from row-major values.
    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        Array::new(vec![rows, cols], data)
    }

    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(usize) -> f64) -> Self {
        let n: usize = shape.iter().product();
        Array { shape, data: (0..n).map(|i| f(i)).collect() }
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

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// The lone value of a single-element array.
    pub fn item(&self) -> Result<f64> {
        if self.data.len() != 1 {
            return Err(shape_err("Array::item", format!("shape {:?} is not scalar", self.shape)));
        }
        Ok(self.data[0])
    }

    pub fn is_scalar(&self) -> bool {
        self.data.len() == 1
    }

    /// Reinterpret with a new shape of equal element count.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Array> {
        let n: usize = shape.iter().product();
        if n != self.data.len() {
            return Err(shape_err(
                "Array::reshape",
                format!("{:?} -> {:?} changes element count", self.shape, shape),
            ));
        }
        Ok(Array { shape, data: self.data.clone() })
    }

    /// Rows of a 2-D array (a 1-D array counts as a single row).
    pub fn rows(&self) -> usize {
        match self.shape.len() {
            1 => 1,
            _ => self.shape[0],
        }
    }

    /// Columns of a 2-D array (a 1-D array is one row wide).
    pub fn cols(&self) -> usize {
        match self.shape.len() {
            1 => self.shape[0],
            _ => self.shape[1..].iter().product(),
        }
    }

    pub fn get2(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols() + c]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Array {
        Array { shape: self.shape.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub(crate) fn zip_map(&self, other: &Array, f: impl Fn(f64, f64) -> f64) -> Array {
        debug_assert_eq!(self.data.len(), other.data.len());
        Array {
            shape: self.shape.clone(),
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    pub fn norm2(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Elementwise accumulate `self += alpha * other`.
    pub(crate) fn axpy(&mut self, alpha: f64, other: &Array) {
        debug_assert_eq!(self.data.len(), other.data.len());
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += alpha * b;
        }
    }
}

/// `c = alpha * A·B + beta * c` on row-major buffers, with optional
/// transposition of either operand. Logical dims: A is m×k, B is k×n,
/// C is m×n. When a transpose flag is set the physical buffer holds the
/// transposed matrix.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: &[f64],
    ta: bool,
    b: &[f64],
    tb: bool,
    beta: f64,
    c: &mut [f64],
) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    let (rsa, csa) = if ta { (1, m as isize) } else { (k as isize, 1) };
    let (rsb, csb) = if tb { (1, k as isize) } else { (n as isize, 1) };
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            rsa,
            csa,
            b.as_ptr(),
            rsb,
            csb,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_validates_shape_and_finiteness() {
        assert!(Array::new(vec![2, 2], vec![1.0; 4]).is_ok());
        assert!(matches!(
            Array::new(vec![2, 2], vec![1.0; 3]),
            Err(Error::ShapeMismatch { .. })
        ));
        assert!(matches!(
            Array::new(vec![2], vec![1.0, f64::NAN]),
            Err(Error::NonFinite(_))
        ));
        assert!(matches!(
            Array::new(vec![2], vec![1.0, f64::INFINITY]),
            Err(Error::NonFinite(_))
        ));
    }

    #[test]
    fn gemm_matches_naive_triple_loop() {
        // random-ish deterministic fill
        let m = 3;
        let k = 4;
        let n = 5;
        let a: Vec<f64> = (0..m * k).map(|i| ((i * 37 + 11) % 17) as f64 * 0.25 - 2.0).collect();
        let b: Vec<f64> = (0..k * n).map(|i| ((i * 23 + 5) % 13) as f64 * 0.5 - 3.0).collect();
        let mut c = vec![0.0; m * n];
        gemm(m, k, n, 1.0, &a, false, &b, false, 0.0, &mut c);
        for i in 0..m {
            for j in 0..n {
                let mut s = 0.0;
                for p in 0..k {
                    s += a[i * k + p] * b[p * n + j];
                }
                assert!((c[i * n + j] - s).abs() < 1e-12);
            }
        }
        // transposed A: physical k×m buffer
        let at: Vec<f64> = {
            let mut t = vec![0.0; m * k];
            for i in 0..m {
                for p in 0..k {
                    t[p * m + i] = a[i * k + p];
                }
            }
            t
        };
        let mut c2 = vec![0.0; m * n];
        gemm(m, k, n, 1.0, &at, true, &b, false, 0.0, &mut c2);
        for (x, y) in c.iter().zip(&c2) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn reshape_preserves_data() {
        let a = Array::new(vec![2, 3], (0..6).map(|i| i as f64).collect()).unwrap();
        let b = a.reshape(vec![3, 2]).unwrap();
        assert_eq!(b.shape(), &[3, 2]);
        assert_eq!(b.data(), a.data());
        assert!(a.reshape(vec![4, 2]).is_err());
    }
}
