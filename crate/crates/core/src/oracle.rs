//! Dense `2^N x 2^N` reference implementation under the one-dimensional
//! Jordan-Wigner encoding. Independent of the `lambda` model: channels are
//! applied through their Kraus form and correlations through literal traces.
//!
//! Qubit 0 is the leftmost tensor factor; `g1_x = Z...Z X_x`, `g2_x = Z...Z Y_x`,
//! so the vacuum is `|0...0>`.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{domain, Error, Result};
use crate::gaussian::{CorrelationMatrix, QuadraticObservable, C64};
use crate::noise::PauliNoise;

pub const DEFAULT_MAX_MODES: usize = 4;
pub const HARD_MAX_MODES: usize = 8;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn pauli(which: char) -> DMatrix<C64> {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match which {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!("not a Pauli label"),
    }
}

fn pauli_string(labels: &[char]) -> DMatrix<C64> {
    labels
        .iter()
        .fold(DMatrix::from_element(1, 1, c(1.0, 0.0)), |acc, &l| {
            acc.kronecker(&pauli(l))
        })
}

/// Dense Jordan-Wigner Majorana operators, `ops[2x + f - 1]`.
#[derive(Debug, Clone)]
pub struct DenseMajoranas {
    n_modes: usize,
    ops: Vec<DMatrix<C64>>,
}

impl DenseMajoranas {
    pub fn jordan_wigner(n_modes: usize) -> Result<Self> {
        Self::with_limit(n_modes, DEFAULT_MAX_MODES)
    }

    /// As [`DenseMajoranas::jordan_wigner`] with a raised size guard (at most 8).
    pub fn with_limit(n_modes: usize, limit: usize) -> Result<Self> {
        if limit > HARD_MAX_MODES {
            return domain(format!("oracle limit cannot exceed {HARD_MAX_MODES} modes"));
        }
        if n_modes == 0 || n_modes > limit {
            return domain(format!("oracle supports 1..={limit} modes, got {n_modes}"));
        }
        let mut ops = Vec::with_capacity(2 * n_modes);
        for x in 0..n_modes {
            for end in ['X', 'Y'] {
                let labels: Vec<char> = (0..n_modes)
                    .map(|q| match q.cmp(&x) {
                        std::cmp::Ordering::Less => 'Z',
                        std::cmp::Ordering::Equal => end,
                        std::cmp::Ordering::Greater => 'I',
                    })
                    .collect();
                ops.push(pauli_string(&labels));
            }
        }
        Ok(Self { n_modes, ops })
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        1 << self.n_modes
    }

    pub fn op(&self, a: usize) -> &DMatrix<C64> {
        &self.ops[a]
    }

    fn identity(&self) -> DMatrix<C64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    /// Linear combination `sum_a v_a g_a`.
    fn combine(&self, v: &[f64]) -> DMatrix<C64> {
        let mut out = DMatrix::zeros(self.dim(), self.dim());
        for (a, &w) in v.iter().enumerate() {
            if w != 0.0 {
                out += &self.ops[a] * c(w, 0.0);
            }
        }
        out
    }

    /// `offset I + i sum_ab O_ab g_a g_b`
    pub fn observable(&self, obs: &QuadraticObservable) -> Result<DMatrix<C64>> {
        let m = 2 * self.n_modes;
        if obs.coeff().nrows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: obs.coeff().nrows(),
            });
        }
        let mut out = self.identity() * c(obs.offset, 0.0);
        for a in 0..m {
            for b in 0..m {
                let w = obs.coeff()[(a, b)];
                if w != 0.0 {
                    out += &self.ops[a] * &self.ops[b] * c(0.0, w);
                }
            }
        }
        Ok(out)
    }
}

/// Dense density matrix of the Gaussian state with correlation matrix
/// `Gamma`, built from the normal-mode decomposition of `i Gamma`.
pub fn gaussian_state_to_dense(
    state: &CorrelationMatrix,
    maj: &DenseMajoranas,
) -> Result<DMatrix<C64>> {
    let g = state.gamma();
    let m = 2 * maj.n_modes();
    if g.nrows() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: g.nrows(),
        });
    }
    let h = g.map(|v| c(0.0, v));
    let eig = SymmetricEigen::new(h);
    let mut rho = maj.identity();
    for (k, &sigma) in eig.eigenvalues.iter().enumerate() {
        if sigma <= 1e-12 {
            continue;
        }
        let v = eig.eigenvectors.column(k);
        let u: Vec<f64> = v.iter().map(|z| z.re * std::f64::consts::SQRT_2).collect();
        let w: Vec<f64> = v.iter().map(|z| z.im * std::f64::consts::SQRT_2).collect();
        let s: f64 = (0..m)
            .flat_map(|a| (0..m).map(move |b| (a, b)))
            .map(|(a, b)| u[a] * g[(a, b)] * w[b])
            .sum();
        let (bu, bw) = (maj.combine(&u), maj.combine(&w));
        let factor = maj.identity() + &bu * &bw * c(0.0, s);
        rho = factor * rho;
    }
    Ok(rho / c(maj.dim() as f64, 0.0))
}

/// `Gamma_ab = (i/2) tr([g_a, g_b] rho)`; rejects results with a sizeable
/// imaginary part.
pub fn dense_to_correlation_matrix(
    rho: &DMatrix<C64>,
    maj: &DenseMajoranas,
) -> Result<DMatrix<f64>> {
    let m = 2 * maj.n_modes();
    let mut g = DMatrix::<f64>::zeros(m, m);
    for a in 0..m {
        for b in a + 1..m {
            let comm = maj.op(a) * maj.op(b) - maj.op(b) * maj.op(a);
            let v = (comm * rho).trace() * c(0.0, 0.5);
            if v.im.abs() > 1e-9 {
                return Err(Error::Numerical(format!(
                    "Gamma[{a},{b}] has imaginary part {}",
                    v.im
                )));
            }
            g[(a, b)] = v.re;
            g[(b, a)] = -v.re;
        }
    }
    Ok(g)
}

pub fn oracle_expectation(
    rho: &DMatrix<C64>,
    obs: &QuadraticObservable,
    maj: &DenseMajoranas,
) -> Result<f64> {
    Ok((maj.observable(obs)? * rho).trace().re)
}

// (P rho P)_{ij} = conj(ph(i)) ph(j) rho_{i^m, j^m} for P|j> = ph(j)|j ^ m>
fn conjugate_by_pauli(
    rho: &DMatrix<C64>,
    n_qubits: usize,
    qubit: usize,
    which: char,
) -> DMatrix<C64> {
    let bit = 1usize << (n_qubits - 1 - qubit);
    let phase = |j: usize| -> C64 {
        let set = j & bit != 0;
        match which {
            'X' => c(1.0, 0.0),
            'Y' => {
                if set {
                    c(0.0, -1.0)
                } else {
                    c(0.0, 1.0)
                }
            }
            _ => {
                if set {
                    c(-1.0, 0.0)
                } else {
                    c(1.0, 0.0)
                }
            }
        }
    };
    let mask = if which == 'Z' { 0 } else { bit };
    DMatrix::from_fn(rho.nrows(), rho.ncols(), |i, j| {
        phase(i).conj() * phase(j) * rho[(i ^ mask, j ^ mask)]
    })
}

/// Kraus form of the single-qubit Pauli channel on every qubit. Linear, so it
/// also acts on non-Hermitian operators.
pub fn apply_pauli_channel_dense(
    rho: &DMatrix<C64>,
    noise: &PauliNoise,
    n_qubits: usize,
) -> DMatrix<C64> {
    let mut out = rho.clone();
    for q in 0..n_qubits {
        let mut next = &out * c(1.0 - 0.75 * noise.p, 0.0);
        for (which, &a) in ['X', 'Y', 'Z'].iter().zip(&noise.alpha) {
            if a > 0.0 {
                next += conjugate_by_pauli(&out, n_qubits, q, *which) * c(0.75 * noise.p * a, 0.0);
            }
        }
        out = next;
    }
    out
}

/// Damping of `g_a g_b` under the dense channel: `(lambda, residual)` with
/// `residual = max |T(P) - lambda P|`.
pub fn dense_bilinear_damping(
    maj: &DenseMajoranas,
    noise: &PauliNoise,
    a: usize,
    b: usize,
) -> (f64, f64) {
    let p = maj.op(a) * maj.op(b);
    let tp = apply_pauli_channel_dense(&p, noise, maj.n_modes());
    let num = (p.adjoint() * &tp).trace();
    let den = (p.adjoint() * &p).trace();
    let lambda = (num / den).re;
    let residual = (tp - p * c(lambda, 0.0))
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    (lambda, residual)
}

/// Plane rotation `(a, b, theta)`: identity except `[[cos, sin], [-sin, cos]]`
/// on rows and columns `a < b`.
pub type Givens = (usize, usize, f64);

/// Factor a special orthogonal `R` as `G_1 G_2 ... G_k`.
pub fn givens_decomposition(r: &DMatrix<f64>) -> Result<Vec<Givens>> {
    let m = r.nrows();
    if r.ncols() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: r.ncols(),
        });
    }
    let mut work = r.clone();
    let mut applied = Vec::new();
    for j in 0..m {
        for i in (j + 1..m).rev() {
            let (x, y) = (work[(j, j)], work[(i, j)]);
            if y.abs() < 1e-300 {
                continue;
            }
            let theta = y.atan2(x);
            let (s, co) = theta.sin_cos();
            for col in 0..m {
                let (rj, ri) = (work[(j, col)], work[(i, col)]);
                work[(j, col)] = co * rj + s * ri;
                work[(i, col)] = -s * rj + co * ri;
            }
            applied.push((j, i, theta));
        }
    }
    let defect = (work - DMatrix::<f64>::identity(m, m)).amax();
    if defect > 1e-9 {
        return Err(Error::InputDomain(format!(
            "matrix is not special orthogonal (residual {defect:e})"
        )));
    }
    Ok(applied.into_iter().map(|(a, b, t)| (a, b, -t)).collect())
}

/// Dense unitary `U` with `U^dag g_a U = sum_b R_ab g_b`.
pub fn gaussian_unitary_dense(r: &DMatrix<f64>, maj: &DenseMajoranas) -> Result<DMatrix<C64>> {
    let m = 2 * maj.n_modes();
    if r.nrows() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: r.nrows(),
        });
    }
    let mut u = maj.identity();
    for (a, b, theta) in givens_decomposition(r)? {
        let (s, co) = (theta / 2.0).sin_cos();
        let g = maj.identity() * c(co, 0.0) + maj.op(a) * maj.op(b) * c(s, 0.0);
        u *= g;
    }
    Ok(u)
}

/// Schrodinger picture: each layer applies `U_k` followed by the channel on
/// every qubit, then `tr(rho O)`.
pub fn oracle_noisy_circuit_expectation(
    state: &CorrelationMatrix,
    layers: &[DMatrix<f64>],
    noise: Option<&PauliNoise>,
    obs: &QuadraticObservable,
    maj: &DenseMajoranas,
) -> Result<f64> {
    let mut rho = gaussian_state_to_dense(state, maj)?;
    for r in layers {
        let u = gaussian_unitary_dense(r, maj)?;
        rho = &u * rho * u.adjoint();
        if let Some(n) = noise {
            rho = apply_pauli_channel_dense(&rho, n, maj.n_modes());
        }
    }
    oracle_expectation(&rho, obs, maj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::{
        product_state, quadratic_expectation, random_gaussian_state, random_normalized_observable,
        Purity,
    };
    use crate::linalg::haar_orthogonal;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_mode_operators() {
        let maj = DenseMajoranas::jordan_wigner(1).unwrap();
        assert_eq!(maj.op(0), &pauli('X'));
        assert_eq!(maj.op(1), &pauli('Y'));
        assert!(DenseMajoranas::jordan_wigner(5).is_err());
        assert!(DenseMajoranas::with_limit(5, 8).is_ok());
        assert!(DenseMajoranas::with_limit(9, 9).is_err());
    }

    #[test]
    fn anticommutation() {
        let maj = DenseMajoranas::jordan_wigner(3).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let ac = maj.op(a) * maj.op(b) + maj.op(b) * maj.op(a);
                let expected = if a == b {
                    maj.identity() * c(2.0, 0.0)
                } else {
                    DMatrix::zeros(8, 8)
                };
                assert!((ac - expected).camax() < 1e-14);
            }
        }
    }

    #[test]
    fn vacuum_is_all_zero_state() {
        let maj = DenseMajoranas::jordan_wigner(2).unwrap();
        let rho = gaussian_state_to_dense(&product_state(&[0.0, 0.0]).unwrap(), &maj).unwrap();
        assert!((rho[(0, 0)].re - 1.0).abs() < 1e-14);
        let rho = gaussian_state_to_dense(&product_state(&[0.0, 1.0]).unwrap(), &maj).unwrap();
        assert!((rho[(1, 1)].re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let maj = DenseMajoranas::jordan_wigner(n).unwrap();
            for purity in [Purity::Pure, Purity::Mixed] {
                let s = random_gaussian_state(n, purity, &mut rng);
                let rho = gaussian_state_to_dense(&s, &maj).unwrap();
                assert!((rho.trace().re - 1.0).abs() < 1e-12);
                let back = dense_to_correlation_matrix(&rho, &maj).unwrap();
                assert!((back - s.gamma()).amax() < 1e-12);
                let o = random_normalized_observable(n, &mut rng);
                let dense = oracle_expectation(&rho, &o, &maj).unwrap();
                assert!((dense - quadratic_expectation(&o, &s).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn givens_reconstructs_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let r = haar_orthogonal(6, &mut rng, true);
        let rot = givens_decomposition(&r).unwrap();
        let mut prod = DMatrix::<f64>::identity(6, 6);
        for (a, b, t) in rot {
            let mut g = DMatrix::<f64>::identity(6, 6);
            let (s, co) = t.sin_cos();
            g[(a, a)] = co;
            g[(b, b)] = co;
            g[(a, b)] = s;
            g[(b, a)] = -s;
            prod *= g;
        }
        assert!((prod - &r).amax() < 1e-12);
        let mut bad = r.clone();
        bad.column_mut(0).neg_mut();
        assert!(givens_decomposition(&bad).is_err());
    }

    #[test]
    fn unitary_implements_rotation() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let maj = DenseMajoranas::jordan_wigner(3).unwrap();
        let r = haar_orthogonal(6, &mut rng, true);
        let u = gaussian_unitary_dense(&r, &maj).unwrap();
        assert!((u.adjoint() * &u - maj.identity()).camax() < 1e-12);
        for a in 0..6 {
            let lhs = u.adjoint() * maj.op(a) * &u;
            let rhs = maj.combine(&r.row(a).iter().copied().collect::<Vec<_>>());
            assert!((lhs - rhs).camax() < 1e-12);
        }
    }

    #[test]
    fn channel_preserves_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let maj = DenseMajoranas::jordan_wigner(3).unwrap();
        let rho = gaussian_state_to_dense(&random_gaussian_state(3, Purity::Mixed, &mut rng), &maj)
            .unwrap();
        let n = PauliNoise::new(0.3, [0.2, 0.5, 0.3]).unwrap();
        let out = apply_pauli_channel_dense(&rho, &n, 3);
        assert!((out.trace().re - 1.0).abs() < 1e-13);
        assert!((out.adjoint() - &out).camax() < 1e-14);
    }
}
