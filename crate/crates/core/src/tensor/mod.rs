//! Dense 3-way tensors, their mode-3 Fourier transform and the norms used by
//! the decomposition objective.
//!
//! Storage is frontal-slice-major: the pixel index runs fastest, then the
//! frame index, then the slice index. Frontal slice `p` is therefore a
//! contiguous column-major `n1 × n2` matrix, and tube `(i, j, :)` is strided
//! by `n1 * n2`.

mod fourier;
mod norms;
mod snapshot;

pub use fourier::{fft_mode3, ifft_mode3, FourierTensor3};
pub use norms::{ksupport_norm, ksupport_norm_sq, norm_l1, norm_l112, tensor_nuclear_norm};
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor3 {
    data: Vec<f64>,
    dims: (usize, usize, usize),
}

impl Tensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        check_dims(n1, n2, n3)?;
        Ok(Self { data: vec![0.0; n1 * n2 * n3], dims: (n1, n2, n3) })
    }

    /// Wraps `data` laid out frontal-slice-major.
    pub fn from_vec(n1: usize, n2: usize, n3: usize, data: Vec<f64>) -> Result<Self> {
        check_dims(n1, n2, n3)?;
        if data.len() != n1 * n2 * n3 {
            return Err(Error::param(format!(
                "tensor data has {} elements, dims {n1}x{n2}x{n3} need {}",
                data.len(),
                n1 * n2 * n3
            )));
        }
        Ok(Self { data, dims: (n1, n2, n3) })
    }

    /// Stacks equally sized `n1 × n2` column-major slices along mode 3.
    pub fn from_slices(n1: usize, n2: usize, slices: &[Vec<f64>]) -> Result<Self> {
        let mut data = Vec::with_capacity(n1 * n2 * slices.len());
        for (p, s) in slices.iter().enumerate() {
            if s.len() != n1 * n2 {
                return Err(Error::param(format!(
                    "slice {p} has {} elements, expected {}",
                    s.len(),
                    n1 * n2
                )));
            }
            data.extend_from_slice(s);
        }
        Self::from_vec(n1, n2, slices.len(), data)
    }

    pub fn from_fn(
        n1: usize,
        n2: usize,
        n3: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Result<Self> {
        check_dims(n1, n2, n3)?;
        let mut data = Vec::with_capacity(n1 * n2 * n3);
        for p in 0..n3 {
            for j in 0..n2 {
                for i in 0..n1 {
                    data.push(f(i, j, p));
                }
            }
        }
        Ok(Self { data, dims: (n1, n2, n3) })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn n1(&self) -> usize {
        self.dims.0
    }

    pub fn n2(&self) -> usize {
        self.dims.1
    }

    pub fn n3(&self) -> usize {
        self.dims.2
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn slice_len(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, p: usize) -> usize {
        let (n1, n2, _) = self.dims;
        i + n1 * (j + n2 * p)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, p: usize) -> f64 {
        self.data[self.index(i, j, p)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, p: usize, value: f64) {
        let idx = self.index(i, j, p);
        self.data[idx] = value;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    /// Frontal slice `p` as a column-major `n1 × n2` buffer.
    pub fn frontal(&self, p: usize) -> &[f64] {
        let d = self.slice_len();
        &self.data[p * d..(p + 1) * d]
    }

    pub fn frontal_mut(&mut self, p: usize) -> &mut [f64] {
        let d = self.slice_len();
        &mut self.data[p * d..(p + 1) * d]
    }

    pub fn frontal_slices(&self) -> std::slice::Chunks<'_, f64> {
        self.data.chunks(self.slice_len())
    }

    pub fn frontal_slices_mut(&mut self) -> std::slice::ChunksMut<'_, f64> {
        let d = self.slice_len();
        self.data.chunks_mut(d)
    }

    /// Column `j` of frontal slice `p`: the `n1` pixels of frame `j`.
    pub fn column(&self, j: usize, p: usize) -> &[f64] {
        let start = self.index(0, j, p);
        &self.data[start..start + self.dims.0]
    }

    pub fn tube(&self, i: usize, j: usize) -> Vec<f64> {
        (0..self.dims.2).map(|p| self.get(i, j, p)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    pub fn same_dims(&self, other: &Tensor3) -> bool {
        self.dims == other.dims
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|x| *x *= factor);
    }

    /// Returns `sum_k coef_k * t_k`. All tensors must share dims.
    pub fn linear_combination(terms: &[(f64, &Tensor3)]) -> Tensor3 {
        let (_, first) = terms[0];
        let mut data = vec![0.0; first.len()];
        for (coef, t) in terms {
            assert!(t.same_dims(first), "tensor dims differ in linear combination");
            for (acc, x) in data.iter_mut().zip(&t.data) {
                *acc += coef * x;
            }
        }
        Tensor3 { data, dims: first.dims }
    }

    pub fn sub(&self, other: &Tensor3) -> Tensor3 {
        Self::linear_combination(&[(1.0, self), (-1.0, other)])
    }

    pub fn add(&self, other: &Tensor3) -> Tensor3 {
        Self::linear_combination(&[(1.0, self), (1.0, other)])
    }

    pub fn max_abs_diff(&self, other: &Tensor3) -> f64 {
        assert!(self.same_dims(other));
        self.data.iter().zip(&other.data).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }
}

fn check_dims(n1: usize, n2: usize, n3: usize) -> Result<()> {
    if n1 == 0 || n2 == 0 || n3 == 0 {
        return Err(Error::param(format!("tensor dims must be positive, got {n1}x{n2}x{n3}")));
    }
    Ok(())
}
