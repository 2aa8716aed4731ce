//! Single-qubit Pauli noise acting on encoded Majorana bilinears.
//!
//! `T_p(rho) = (1 - 3p/4) rho + (3p/4) sum_s alpha_s s rho s`. A Pauli `s`
//! is an eigenoperator with eigenvalue `1 - (3p/2)(1 - alpha_s)`, so every
//! encoded bilinear `g_a g_b` is rescaled by a product `lambda_ab` over its
//! string.

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::encodings::{Encoding, StringComposition};
use crate::error::{domain, Error, Result};
use crate::gaussian::{
    majorana_to_complex, momentum_occupations, CorrelationMatrix, QuadraticObservable,
};
use crate::lattice::Lattice;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliNoise {
    pub p: f64,
    pub alpha: [f64; 3],
}

impl PauliNoise {
    pub fn new(p: f64, alpha: [f64; 3]) -> Result<Self> {
        if !(0.0..=2.0 / 3.0).contains(&p) {
            return domain(format!("noise rate p must lie in [0, 2/3], got {p}"));
        }
        if alpha.iter().any(|&a| !(0.0..=1.0).contains(&a)) {
            return domain("Pauli weights must lie in [0, 1]");
        }
        if (alpha.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return domain("Pauli weights must sum to one");
        }
        Ok(Self { p, alpha })
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        Self::new(p, [1.0 / 3.0; 3])
    }

    pub fn is_depolarizing(&self) -> bool {
        self.alpha.iter().all(|a| (a - 1.0 / 3.0).abs() <= 1e-12)
    }

    /// Eigenvalues `(eta_x, eta_y, eta_z)` of the single-qubit channel.
    pub fn pauli_eigenvalues(&self) -> [f64; 3] {
        self.alpha.map(|a| 1.0 - 1.5 * self.p * (1.0 - a))
    }

    /// `r = 1 - 3p/2`, the smallest eigenvalue over all Pauli weights.
    pub fn worst_case_base(&self) -> f64 {
        1.0 - 1.5 * self.p
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LambdaMode {
    /// `(1 - p)^w`; requires depolarizing weights.
    ExactDepolarizing,
    /// Product of Pauli eigenvalues over the exact string of the bilinear.
    /// Needs an encoding with fixed strings (Jordan-Wigner, Bravyi-Kitaev).
    ExactGeneral,
    /// `(1 - 3p/2)^w`, the lower end of the admissible range.
    WorstCase,
}

pub fn lambda_for_bilinear(
    encoding: &Encoding,
    noise: &PauliNoise,
    a: usize,
    b: usize,
    mode: LambdaMode,
) -> Result<f64> {
    check_mode(encoding, noise, mode)?;
    let w = encoding.bilinear_weight(a, b)?;
    if a == b {
        return Ok(1.0);
    }
    Ok(match mode {
        LambdaMode::ExactDepolarizing => (1.0 - noise.p).powi(w as i32),
        LambdaMode::WorstCase => noise.worst_case_base().powi(w as i32),
        LambdaMode::ExactGeneral => general_lambda(&encoding.string_composition(a, b)?, noise),
    })
}

fn general_lambda(c: &StringComposition, noise: &PauliNoise) -> f64 {
    let [ex, ey, ez] = noise.pauli_eigenvalues();
    ex.powi(c.x as i32) * ey.powi(c.y as i32) * ez.powi(c.z as i32)
}

fn check_mode(encoding: &Encoding, noise: &PauliNoise, mode: LambdaMode) -> Result<()> {
    match mode {
        LambdaMode::ExactDepolarizing if !noise.is_depolarizing() => Err(Error::Unsupported(
            "exact_depolarizing needs alpha = (1/3, 1/3, 1/3)".into(),
        )),
        LambdaMode::ExactGeneral => {
            if encoding.num_majoranas() >= 2 {
                encoding.string_composition(0, 1)?;
            }
            Ok(())
        }
        _ => Ok(()),
    }
}

/// Damping factors for every Majorana pair, built once per
/// (encoding, noise, mode). Diagonal entries are one.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaMatrix {
    pub values: DMatrix<f64>,
    pub mode: LambdaMode,
}

impl LambdaMatrix {
    pub fn build(encoding: &Encoding, noise: &PauliNoise, mode: LambdaMode) -> Result<Self> {
        check_mode(encoding, noise, mode)?;
        let m = encoding.num_majoranas();
        let base = match mode {
            LambdaMode::ExactDepolarizing => 1.0 - noise.p,
            _ => noise.worst_case_base(),
        };
        let rows: Vec<Vec<f64>> = (0..m)
            .into_par_iter()
            .map(|a| {
                (0..m)
                    .map(|b| {
                        if a == b {
                            return 1.0;
                        }
                        match mode {
                            LambdaMode::ExactGeneral => general_lambda(
                                &encoding.string_composition(a, b).expect("checked above"),
                                noise,
                            ),
                            _ => base.powi(encoding.weight_unchecked(a, b) as i32),
                        }
                    })
                    .collect()
            })
            .collect();
        let values = DMatrix::from_fn(m, m, |a, b| rows[a][b]);
        Ok(Self { values, mode })
    }

    pub fn ones(m: usize) -> Self {
        Self {
            values: DMatrix::from_element(m, m, 1.0),
            mode: LambdaMode::ExactDepolarizing,
        }
    }

    pub fn size(&self) -> usize {
        self.values.nrows()
    }

    /// `lambda o M`
    pub fn damp(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        self.values.component_mul(m)
    }
}

fn check_sizes(
    obs: &QuadraticObservable,
    state: &CorrelationMatrix,
    lambda: &LambdaMatrix,
) -> Result<()> {
    let m = state.gamma().nrows();
    for found in [obs.coeff().nrows(), lambda.size()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    Ok(())
}

/// `offset + sum_ab lambda_ab O_ab Gamma_ab`
pub fn noisy_expectation(
    obs: &QuadraticObservable,
    state: &CorrelationMatrix,
    lambda: &LambdaMatrix,
) -> Result<f64> {
    check_sizes(obs, state, lambda)?;
    let (o, g, l) = (obs.coeff(), state.gamma(), &lambda.values);
    let s: f64 = (0..o.len()).map(|i| o[i] * l[i] * g[i]).sum();
    Ok(obs.offset + s)
}

/// Noiseless minus noisy expectation, `sum_ab O_ab (1 - lambda_ab) Gamma_ab`.
pub fn signed_error(
    obs: &QuadraticObservable,
    state: &CorrelationMatrix,
    lambda: &LambdaMatrix,
) -> Result<f64> {
    check_sizes(obs, state, lambda)?;
    let (o, g, l) = (obs.coeff(), state.gamma(), &lambda.values);
    Ok((0..o.len()).map(|i| o[i] * (1.0 - l[i]) * g[i]).sum())
}

pub fn measurement_error(
    obs: &QuadraticObservable,
    state: &CorrelationMatrix,
    lambda: &LambdaMatrix,
) -> Result<f64> {
    signed_error(obs, state, lambda).map(f64::abs)
}

/// `error / p` under exact depolarizing noise.
pub fn sensitivity(
    obs: &QuadraticObservable,
    state: &CorrelationMatrix,
    encoding: &Encoding,
    p: f64,
) -> Result<f64> {
    if !(p > 0.0) {
        return domain("sensitivity needs p > 0");
    }
    let noise = PauliNoise::depolarizing(p)?;
    let lambda = LambdaMatrix::build(encoding, &noise, LambdaMode::ExactDepolarizing)?;
    Ok(measurement_error(obs, state, &lambda)? / p)
}

/// Noisy `<n_k>` for every `k`, read off the complex correlations of
/// `lambda o Gamma`. Quadratic in `N` per momentum instead of in `2N`.
pub fn noisy_momentum_occupations(
    state: &CorrelationMatrix,
    lattice: &Lattice,
    lambda: &LambdaMatrix,
    ks: &[[f64; 2]],
) -> Result<Vec<f64>> {
    let m = lattice.num_majoranas();
    for found in [state.gamma().nrows(), lambda.size()] {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    let damped = majorana_to_complex(&lambda.damp(state.gamma()))?;
    Ok(momentum_occupations(lattice, &damped.c, ks))
}
