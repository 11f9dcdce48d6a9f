use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use super::Tensor3;

/// A tensor after a length-`n3` DFT along every tube. Same layout as
/// [`Tensor3`].
#[derive(Clone, Debug)]
pub struct FourierTensor3 {
    data: Vec<Complex64>,
    dims: (usize, usize, usize),
}

impl FourierTensor3 {
    pub fn zeros(n1: usize, n2: usize, n3: usize) -> Self {
        Self { data: vec![Complex64::new(0.0, 0.0); n1 * n2 * n3], dims: (n1, n2, n3) }
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        self.dims
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize, p: usize) -> Complex64 {
        let (n1, n2, _) = self.dims;
        self.data[i + n1 * (j + n2 * p)]
    }

    pub fn frontal(&self, p: usize) -> &[Complex64] {
        let d = self.dims.0 * self.dims.1;
        &self.data[p * d..(p + 1) * d]
    }

    pub fn frontal_mut(&mut self, p: usize) -> &mut [Complex64] {
        let d = self.dims.0 * self.dims.1;
        &mut self.data[p * d..(p + 1) * d]
    }

    pub fn frontal_matrix(&self, p: usize) -> DMatrix<Complex64> {
        DMatrix::from_column_slice(self.dims.0, self.dims.1, self.frontal(p))
    }

    /// Number of Fourier slices that carry independent information for a
    /// real input: `ceil((n3 + 1) / 2)`. The rest are conjugate mirrors.
    pub fn independent_slices(&self) -> usize {
        self.dims.2 / 2 + 1
    }

    /// Overwrites slices `n3 - p` for `1 <= p < independent_slices()` with
    /// the conjugate of slice `p`.
    pub fn mirror_conjugates(&mut self) {
        let n3 = self.dims.2;
        let d = self.dims.0 * self.dims.1;
        for p in 1..self.independent_slices() {
            let q = n3 - p;
            if q == p {
                continue;
            }
            let (lo, hi) = self.data.split_at_mut(q * d);
            for (dst, src) in hi[..d].iter_mut().zip(&lo[p * d..(p + 1) * d]) {
                *dst = src.conj();
            }
        }
    }
}

/// Unnormalized forward DFT of every tube.
pub fn fft_mode3(t: &Tensor3) -> FourierTensor3 {
    let (n1, n2, n3) = t.dims();
    let d = n1 * n2;
    let mut tubes: Vec<Complex64> = Vec::with_capacity(d * n3);
    for idx in 0..d {
        tubes.extend((0..n3).map(|p| Complex64::new(t.as_slice()[idx + d * p], 0.0)));
    }
    if n3 > 1 {
        let fft = FftPlanner::<f64>::new().plan_fft_forward(n3);
        fft.process(&mut tubes);
    }
    let mut out = FourierTensor3::zeros(n1, n2, n3);
    scatter_tubes(&tubes, &mut out.data, d, n3);
    out
}

/// Inverse DFT with `1/n3` normalisation. The imaginary part is dropped;
/// for spectra of real tensors it is rounding noise.
pub fn ifft_mode3(f: &FourierTensor3) -> Tensor3 {
    let (n1, n2, n3) = f.dims();
    let d = n1 * n2;
    let mut tubes: Vec<Complex64> = Vec::with_capacity(d * n3);
    for idx in 0..d {
        tubes.extend((0..n3).map(|p| f.data[idx + d * p]));
    }
    if n3 > 1 {
        let ifft = FftPlanner::<f64>::new().plan_fft_inverse(n3);
        ifft.process(&mut tubes);
    }
    let scale = 1.0 / n3 as f64;
    let mut data = vec![0.0; d * n3];
    for idx in 0..d {
        for p in 0..n3 {
            data[idx + d * p] = tubes[idx * n3 + p].re * scale;
        }
    }
    Tensor3::from_vec(n1, n2, n3, data).expect("dims already validated")
}

fn scatter_tubes(tubes: &[Complex64], out: &mut [Complex64], d: usize, n3: usize) {
    for idx in 0..d {
        for p in 0..n3 {
            out[idx + d * p] = tubes[idx * n3 + p];
        }
    }
}
