//! Dense row-major `f64` tensors and the handful of shape/reduction
//! primitives the circuit pipeline needs.
//!
//! Row-major is the single canonical layout: the flat index of
//! `(i_1, ..., i_n)` is `sum_d i_d * stride_d` with `stride_last = 1`.
//! Log-domain values use `f64::NEG_INFINITY` for exact zeros.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TensorError {
    #[error("shape {shape:?} implies {expected} elements, got {actual}")]
    ShapeDataMismatch {
        shape: Vec<usize>,
        expected: usize,
        actual: usize,
    },
    #[error("expected a rank-1 tensor, got rank {0}")]
    NotAVector(usize),
    #[error("row_axes {row_axes} out of range for rank {rank}")]
    RowAxesOutOfRange { row_axes: usize, rank: usize },
    #[error("axis {axis} out of range for rank {rank}")]
    AxisOutOfRange { axis: usize, rank: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

/// Dense multi-dimensional array of `f64` with explicit shape.
///
/// Immutable by convention once handed out; construction and mutation are
/// single-owner so values can be shared read-only across evaluators.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TensorError> {
        let expected: usize = shape.iter().product();
        if expected != data.len() {
            return Err(TensorError::ShapeDataMismatch {
                shape,
                expected,
                actual: data.len(),
            });
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![0.0; n],
        }
    }

    pub fn full(shape: &[usize], value: f64) -> Self {
        let n = shape.iter().product();
        Self {
            shape: shape.to_vec(),
            data: vec![value; n],
        }
    }

    /// Rank-0 tensor holding a single value.
    pub fn scalar(value: f64) -> Self {
        Self {
            shape: vec![],
            data: vec![value],
        }
    }

    pub fn vector(data: Vec<f64>) -> Self {
        Self {
            shape: vec![data.len()],
            data,
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
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

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// The single value of a rank-0 or one-element tensor.
    pub fn item(&self) -> f64 {
        debug_assert_eq!(self.data.len(), 1);
        self.data[0]
    }

    /// Row-major strides, `stride_last = 1`.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.shape.len()];
        for d in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * self.shape[d + 1];
        }
        strides
    }

    pub fn at(&self, index: &[usize]) -> f64 {
        debug_assert_eq!(index.len(), self.shape.len());
        let strides = self.strides();
        let flat: usize = index.iter().zip(&strides).map(|(i, s)| i * s).sum();
        self.data[flat]
    }

    /// Reinterprets the data under a new shape of the same element count.
    pub fn reshape(&self, shape: &[usize]) -> Result<Self, TensorError> {
        let expected: usize = shape.iter().product();
        if expected != self.data.len() {
            return Err(TensorError::ShapeDataMismatch {
                shape: shape.to_vec(),
                expected,
                actual: self.data.len(),
            });
        }
        Ok(Self {
            shape: shape.to_vec(),
            data: self.data.clone(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Flattens a tensor into a matrix: the first `row_axes` axes become
    /// rows, the remaining axes become columns, both in row-major order.
    /// Because the layout is row-major this is a pure reinterpretation.
    pub fn matricize(&self, row_axes: usize) -> Result<Self, TensorError> {
        if row_axes > self.rank() {
            return Err(TensorError::RowAxesOutOfRange {
                row_axes,
                rank: self.rank(),
            });
        }
        let rows: usize = self.shape[..row_axes].iter().product();
        let cols: usize = self.shape[row_axes..].iter().product();
        Ok(Self {
            shape: vec![rows, cols],
            data: self.data.clone(),
        })
    }

    /// Reduces `axis` with a numerically stable log-sum-exp.
    /// An all `-inf` slice reduces to `-inf` (empty mass), never NaN.
    pub fn logsumexp_axis(&self, axis: usize) -> Result<Self, TensorError> {
        if axis >= self.rank() {
            return Err(TensorError::AxisOutOfRange {
                axis,
                rank: self.rank(),
            });
        }
        let outer: usize = self.shape[..axis].iter().product();
        let reduce = self.shape[axis];
        let inner: usize = self.shape[axis + 1..].iter().product();
        let mut out_shape = self.shape.clone();
        out_shape.remove(axis);
        let mut out = vec![0.0; outer * inner];
        for o in 0..outer {
            for i in 0..inner {
                let base = o * reduce * inner + i;
                let mut max = f64::NEG_INFINITY;
                for r in 0..reduce {
                    max = max.max(self.data[base + r * inner]);
                }
                out[o * inner + i] = if max == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    let mut acc = 0.0;
                    for r in 0..reduce {
                        acc += (self.data[base + r * inner] - max).exp();
                    }
                    max + acc.ln()
                };
            }
        }
        Ok(Self {
            shape: out_shape,
            data: out,
        })
    }
}

/// Kronecker product of two vectors: `out[i*M + j] = u[i] * v[j]`.
pub fn kron(u: &Tensor, v: &Tensor) -> Result<Tensor, TensorError> {
    if u.rank() != 1 {
        return Err(TensorError::NotAVector(u.rank()));
    }
    if v.rank() != 1 {
        return Err(TensorError::NotAVector(v.rank()));
    }
    let mut out = Vec::with_capacity(u.len() * v.len());
    for &a in u.data() {
        for &b in v.data() {
            out.push(a * b);
        }
    }
    Ok(Tensor::vector(out))
}

/// Log-domain matrix-vector product:
/// `out[s] = log sum_k exp(logw[s,k] + logv[k])`.
///
/// `-inf` entries in `logw` encode exact zero weights.
pub fn matmul_log(logw: &Tensor, logv: &Tensor) -> Result<Tensor, TensorError> {
    if logw.rank() != 2 || logv.rank() != 1 {
        return Err(TensorError::ShapeMismatch(format!(
            "need matrix and vector, got ranks {} and {}",
            logw.rank(),
            logv.rank()
        )));
    }
    let (s, k) = (logw.shape()[0], logw.shape()[1]);
    if k != logv.len() {
        return Err(TensorError::ShapeMismatch(format!(
            "matrix is {s}x{k} but vector has length {}",
            logv.len()
        )));
    }
    let mut out = vec![f64::NEG_INFINITY; s];
    for (row, slot) in out.iter_mut().enumerate() {
        let w_row = &logw.data()[row * k..(row + 1) * k];
        let mut max = f64::NEG_INFINITY;
        for (a, b) in w_row.iter().zip(logv.data()) {
            max = max.max(a + b);
        }
        if max > f64::NEG_INFINITY {
            let mut acc = 0.0;
            for (a, b) in w_row.iter().zip(logv.data()) {
                let t = a + b;
                if t > f64::NEG_INFINITY {
                    acc += (t - max).exp();
                }
            }
            *slot = max + acc.ln();
        }
    }
    Ok(Tensor::vector(out))
}

/// Scalar log-sum-exp of two values; `-inf`-safe.
pub fn logaddexp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        b
    } else if b == f64::NEG_INFINITY {
        a
    } else if a > b {
        a + (b - a).exp().ln_1p()
    } else {
        b + (a - b).exp().ln_1p()
    }
}

/// Stable log-sum-exp over a slice.
pub fn logsumexp(values: &[f64]) -> f64 {
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let acc: f64 = values.iter().map(|&v| (v - max).exp()).sum();
    max + acc.ln()
}
