use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

/// Haar-random orthogonal matrix; with `special` the determinant is +1.
pub fn haar_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R, special: bool) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if special && n > 0 && q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

pub fn random_antisymmetric<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v: f64 = rng.sample(StandardNormal);
            m[(i, j)] = v;
            m[(j, i)] = -v;
        }
    }
    m
}

pub fn trace_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().sum()
}

pub fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    m.clone().singular_values().max()
}

pub fn antisymmetry_defect(m: &DMatrix<f64>) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] + m[(j, i)]).abs());
        }
    }
    worst
}

/// `sum_ab a_ab b_ab`
pub fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}
