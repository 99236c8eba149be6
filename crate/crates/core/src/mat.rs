//! Minimal row-major `f64` matrix used by the network engine.
//!
//! This is deliberately not a general linear-algebra library: the engine only
//! needs dense affine maps and their transposed products, over batches that
//! fit comfortably in memory.

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    /// Build from a flat row-major buffer. Panics if the length does not match.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "buffer length {} != {}x{}", data.len(), rows, cols);
        Mat { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn fill(&mut self, v: f64) {
        self.data.iter_mut().for_each(|x| *x = v);
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.cols)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }
}

/// `out = x · wᵀ + b`, where `x` is `(batch, in)`, `w` is `(out_dim, in)` and
/// `b` broadcasts over the batch. `out` must be `(batch, out_dim)`.
pub fn affine(x: &Mat, w: &Mat, b: &[f64], out: &mut Mat) {
    debug_assert_eq!(x.cols(), w.cols());
    debug_assert_eq!(w.rows(), b.len());
    debug_assert_eq!(out.rows(), x.rows());
    debug_assert_eq!(out.cols(), w.rows());
    for r in 0..x.rows() {
        let xr = x.row(r);
        let or = out.row_mut(r);
        for (o, (wr, &bias)) in or.iter_mut().zip(w.iter_rows().zip(b.iter())) {
            *o = bias + dot(xr, wr);
        }
    }
}

/// `out = g · w`, where `g` is `(batch, out_dim)` and `w` is `(out_dim, in)`.
/// Accumulates into `out` (`(batch, in)`), which callers zero beforehand.
pub fn matmul_acc(g: &Mat, w: &Mat, out: &mut Mat) {
    debug_assert_eq!(g.cols(), w.rows());
    debug_assert_eq!(out.rows(), g.rows());
    debug_assert_eq!(out.cols(), w.cols());
    for r in 0..g.rows() {
        let gr = g.row(r);
        let or = out.row_mut(r);
        for (k, wr) in w.iter_rows().enumerate() {
            axpy(gr[k], wr, or);
        }
    }
}

/// `out += gᵀ · x`, where `g` is `(batch, out_dim)` and `x` is `(batch, in)`;
/// `out` is `(out_dim, in)`. This is the weight-gradient product.
pub fn matmul_tn_acc(g: &Mat, x: &Mat, out: &mut Mat) {
    debug_assert_eq!(g.rows(), x.rows());
    debug_assert_eq!(out.rows(), g.cols());
    debug_assert_eq!(out.cols(), x.cols());
    for r in 0..g.rows() {
        let gr = g.row(r);
        let xr = x.row(r);
        for (k, &gv) in gr.iter().enumerate() {
            if gv != 0.0 {
                axpy(gv, xr, out.row_mut(k));
            }
        }
    }
}

/// `out += column sums of g` — the bias-gradient reduction.
pub fn col_sums_acc(g: &Mat, out: &mut [f64]) {
    debug_assert_eq!(g.cols(), out.len());
    for r in g.iter_rows() {
        for (o, &v) in out.iter_mut().zip(r.iter()) {
            *o += v;
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

/// `y += a · x`.
pub fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x.iter()) {
        *yi += a * xi;
    }
}
