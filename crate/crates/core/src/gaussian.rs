//! Fermionic Gaussian states in the Majorana representation.
//!
//! `Gamma_ab = (i/2) tr([g_a, g_b] rho)` with `g1 = c^dag + c` and
//! `g2 = i (c^dag - c)`. A quadratic observable `offset + i sum_ab O_ab g_a g_b`
//! then has expectation `offset + sum_ab O_ab Gamma_ab`.

use std::cmp::Ordering;

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::lattice::{Lattice, Momentum, MomentumGrid};
use crate::linalg::{
    antisymmetry_defect, frobenius_dot, haar_orthogonal, random_antisymmetric, trace_norm,
};

pub type C64 = Complex<f64>;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix {
    gamma: DMatrix<f64>,
}

impl CorrelationMatrix {
    /// Checks shape, antisymmetry and `|Gamma_ab| <= 1`. The full spectral
    /// condition is left to [`CorrelationMatrix::check_physical`].
    pub fn new(gamma: DMatrix<f64>) -> Result<Self> {
        let n = gamma.nrows();
        if n != gamma.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: gamma.ncols(),
            });
        }
        if n % 2 != 0 {
            return domain(format!("correlation matrix must have even size, got {n}"));
        }
        if antisymmetry_defect(&gamma) > TOL {
            return Err(Error::Unphysical(
                "correlation matrix is not antisymmetric".into(),
            ));
        }
        if gamma.iter().any(|v| !v.is_finite() || v.abs() > 1.0 + TOL) {
            return Err(Error::Unphysical(
                "correlation entry outside [-1, 1]".into(),
            ));
        }
        Ok(Self { gamma })
    }

    pub(crate) fn new_unchecked(gamma: DMatrix<f64>) -> Self {
        Self { gamma }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        product_state(&vec![0.0; n_modes]).expect("vacuum is physical")
    }

    pub fn n_modes(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn gamma(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.gamma
    }

    /// Spectral norm at most one.
    pub fn check_physical(&self) -> Result<()> {
        let s = self.gamma.clone().singular_values().max();
        if s > 1.0 + TOL {
            return Err(Error::Unphysical(format!("spectral norm {s} exceeds 1")));
        }
        Ok(())
    }

    /// `Gamma Gamma^T = I` within `tol`.
    pub fn is_pure(&self, tol: f64) -> bool {
        let g = &self.gamma;
        let d = g * g.transpose() - DMatrix::<f64>::identity(g.nrows(), g.nrows());
        d.amax() <= tol
    }
}

/// Product state with on-site densities `n_x`.
pub fn product_state(occupations: &[f64]) -> Result<CorrelationMatrix> {
    let n = occupations.len();
    let mut g = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for (x, &occ) in occupations.iter().enumerate() {
        if !(0.0..=1.0).contains(&occ) {
            return Err(Error::Unphysical(format!(
                "occupation {occ} outside [0, 1]"
            )));
        }
        g[(2 * x, 2 * x + 1)] = 2.0 * occ - 1.0;
        g[(2 * x + 1, 2 * x)] = 1.0 - 2.0 * occ;
    }
    Ok(CorrelationMatrix { gamma: g })
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticObservable {
    pub offset: f64,
    coeff: DMatrix<f64>,
}

impl QuadraticObservable {
    pub fn new(offset: f64, coeff: DMatrix<f64>) -> Result<Self> {
        if coeff.nrows() != coeff.ncols() || coeff.nrows() % 2 != 0 {
            return domain("observable coefficients must be a square matrix of even size");
        }
        if antisymmetry_defect(&coeff) > TOL {
            return domain("observable coefficients must be antisymmetric");
        }
        Ok(Self { offset, coeff })
    }

    pub(crate) fn new_unchecked(offset: f64, coeff: DMatrix<f64>) -> Self {
        Self { offset, coeff }
    }

    pub fn coeff(&self) -> &DMatrix<f64> {
        &self.coeff
    }

    pub fn n_modes(&self) -> usize {
        self.coeff.nrows() / 2
    }

    pub fn trace_norm(&self) -> f64 {
        trace_norm(&self.coeff)
    }

    /// Rescale the traceless part to unit trace norm.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace_norm();
        if t == 0.0 {
            return domain("cannot normalize a zero observable");
        }
        Ok(Self {
            offset: self.offset / t,
            coeff: &self.coeff / t,
        })
    }

    /// The observable `i (g_a g_b - g_b g_a) / 2`, i.e. `i g_a g_b` for `a != b`.
    pub fn bilinear(n_modes: usize, a: usize, b: usize) -> Result<Self> {
        let m = 2 * n_modes;
        if a >= m || b >= m || a == b {
            return domain(format!("invalid Majorana pair ({a}, {b})"));
        }
        let mut c = DMatrix::<f64>::zeros(m, m);
        c[(a, b)] = 0.5;
        c[(b, a)] = -0.5;
        Ok(Self {
            offset: 0.0,
            coeff: c,
        })
    }

    /// `sum_xy h_xy c^dag_x c_y` for Hermitian `h`.
    pub fn from_hopping(h: &DMatrix<C64>) -> Result<Self> {
        let n = h.nrows();
        if n != h.ncols() {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: h.ncols(),
            });
        }
        for i in 0..n {
            for j in 0..n {
                if (h[(i, j)] - h[(j, i)].conj()).norm() > TOL {
                    return domain("hopping matrix must be Hermitian");
                }
            }
        }
        let mut c = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for x in 0..n {
            for y in 0..n {
                let v = h[(x, y)];
                c[(2 * x, 2 * y)] = v.im / 4.0;
                c[(2 * x + 1, 2 * y + 1)] = v.im / 4.0;
                c[(2 * x, 2 * y + 1)] = v.re / 4.0;
                c[(2 * x + 1, 2 * y)] = -v.re / 4.0;
            }
        }
        let offset = (0..n).map(|x| h[(x, x)].re).sum::<f64>() / 2.0;
        Ok(Self { offset, coeff: c })
    }
}

pub fn quadratic_expectation(obs: &QuadraticObservable, state: &CorrelationMatrix) -> Result<f64> {
    if obs.coeff.nrows() != state.gamma.nrows() {
        return Err(Error::DimensionMismatch {
            expected: state.gamma.nrows(),
            found: obs.coeff.nrows(),
        });
    }
    Ok(obs.offset + frobenius_dot(&obs.coeff, &state.gamma))
}

/// Two-point functions `C_xy = <c^dag_x c_y>` and `F_xy = <c_x c_y>`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexCorrelations {
    pub c: DMatrix<C64>,
    pub f: Option<DMatrix<C64>>,
}

impl ComplexCorrelations {
    pub fn number_conserving(c: DMatrix<C64>) -> Self {
        Self { c, f: None }
    }
}

/// Validating conversion; rejects non-Hermitian `C`, non-antisymmetric `F`
/// and, for number-conserving input, eigenvalues outside `[0, 1]`.
pub fn complex_to_majorana(corr: &ComplexCorrelations) -> Result<CorrelationMatrix> {
    let n = corr.c.nrows();
    if corr.c.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: corr.c.ncols(),
        });
    }
    for i in 0..n {
        for j in 0..n {
            if (corr.c[(i, j)] - corr.c[(j, i)].conj()).norm() > TOL {
                return Err(Error::Unphysical("C is not Hermitian".into()));
            }
        }
    }
    match &corr.f {
        None => {
            let eig = corr.c.clone().symmetric_eigenvalues();
            if eig.iter().any(|&e| !(-TOL..=1.0 + TOL).contains(&e)) {
                return Err(Error::Unphysical("eigenvalues of C outside [0, 1]".into()));
            }
        }
        Some(f) => {
            if f.nrows() != n || f.ncols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: f.nrows(),
                });
            }
            for i in 0..n {
                for j in 0..n {
                    if (f[(i, j)] + f[(j, i)]).norm() > TOL {
                        return Err(Error::Unphysical("F is not antisymmetric".into()));
                    }
                }
            }
        }
    }
    let g = complex_to_majorana_unchecked(&corr.c, corr.f.as_ref());
    let state = CorrelationMatrix::new(g)?;
    if corr.f.is_some() {
        state.check_physical()?;
    }
    Ok(state)
}

pub(crate) fn complex_to_majorana_unchecked(
    c: &DMatrix<C64>,
    f: Option<&DMatrix<C64>>,
) -> DMatrix<f64> {
    let n = c.nrows();
    let mut g = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for x in 0..n {
        for y in 0..n {
            let cv = c[(x, y)];
            let fv = f.map_or(C64::new(0.0, 0.0), |f| f[(x, y)]);
            let d = if x == y { 1.0 } else { 0.0 };
            g[(2 * x, 2 * y)] = -2.0 * (cv.im + fv.im);
            g[(2 * x + 1, 2 * y + 1)] = -2.0 * cv.im + 2.0 * fv.im;
            g[(2 * x, 2 * y + 1)] = 2.0 * (cv.re + fv.re) - d;
            g[(2 * x + 1, 2 * y)] = d - 2.0 * cv.re + 2.0 * fv.re;
        }
    }
    g
}

/// Inverse of [`complex_to_majorana`]. Affine in `Gamma`, so it is also
/// meaningful for damped matrices `lambda o Gamma`.
pub fn majorana_to_complex(gamma: &DMatrix<f64>) -> Result<ComplexCorrelations> {
    let m = gamma.nrows();
    if m != gamma.ncols() || m % 2 != 0 {
        return domain("Majorana correlation matrix must be square with even size");
    }
    let n = m / 2;
    let mut c = DMatrix::<C64>::zeros(n, n);
    let mut f = DMatrix::<C64>::zeros(n, n);
    let mut anomalous = false;
    for x in 0..n {
        for y in 0..n {
            let g11 = gamma[(2 * x, 2 * y)];
            let g22 = gamma[(2 * x + 1, 2 * y + 1)];
            let g12 = gamma[(2 * x, 2 * y + 1)];
            let g21 = gamma[(2 * x + 1, 2 * y)];
            let d = if x == y { 0.5 } else { 0.0 };
            c[(x, y)] = C64::new((g12 - g21) / 4.0 + d, -(g11 + g22) / 4.0);
            let fv = C64::new((g12 + g21) / 4.0, (g22 - g11) / 4.0);
            anomalous |= fv.norm() > 1e-14;
            f[(x, y)] = fv;
        }
    }
    Ok(ComplexCorrelations {
        c,
        f: anomalous.then_some(f),
    })
}

pub fn dispersion(k: [f64; 2], dim: usize) -> f64 {
    -2.0 * k.iter().take(dim).map(|v| v.cos()).sum::<f64>()
}

/// Ground state of the nearest-neighbour tight-binding model with `n_occ`
/// particles on the closed-shell momentum grid.
#[derive(Debug, Clone)]
pub struct FermiSea {
    pub lattice: Lattice,
    pub grid: MomentumGrid,
    pub occupied: Vec<bool>,
    pub correlations: DMatrix<C64>,
    pub state: CorrelationMatrix,
}

impl FermiSea {
    pub fn new(lattice: Lattice, n_occ: usize) -> Result<Self> {
        let grid = MomentumGrid::for_occupation(lattice, n_occ)?;
        Self::on_grid(grid, n_occ)
    }

    pub fn on_grid(grid: MomentumGrid, n_occ: usize) -> Result<Self> {
        let lattice = grid.lattice;
        let n = lattice.num_sites();
        if n_occ > n {
            return domain(format!("cannot place {n_occ} particles on {n} sites"));
        }
        let order = fill_order(&grid.momenta, lattice.dim());
        let mut occupied = vec![false; n];
        for &i in order.iter().take(n_occ) {
            occupied[i] = true;
        }
        let occ: Vec<&Momentum> = grid
            .momenta
            .iter()
            .zip(&occupied)
            .filter_map(|(m, &o)| o.then_some(m))
            .collect();
        let c = plane_wave_correlations(&lattice, &occ);
        let state = CorrelationMatrix::new_unchecked(complex_to_majorana_unchecked(&c, None));
        Ok(Self {
            lattice,
            grid,
            occupied,
            correlations: c,
            state,
        })
    }

    pub fn n_occ(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Grid points adjacent to a point of opposite occupation.
    pub fn contour(&self) -> Vec<bool> {
        (0..self.grid.len())
            .map(|i| {
                self.grid
                    .neighbors(i)
                    .iter()
                    .any(|&j| self.occupied[j] != self.occupied[i])
            })
            .collect()
    }
}

/// Grid indices in filling order: ascending energy, ties broken by the
/// lexicographic order of `m`.
pub fn fill_order(momenta: &[Momentum], dim: usize) -> Vec<usize> {
    let energy: Vec<f64> = momenta.iter().map(|m| dispersion(m.k, dim)).collect();
    let mut idx: Vec<usize> = (0..momenta.len()).collect();
    idx.sort_by(|&i, &j| {
        let (ei, ej) = (energy[i], energy[j]);
        if (ei - ej).abs() <= 1e-12 {
            momenta[i].twice_m.cmp(&momenta[j].twice_m)
        } else {
            ei.partial_cmp(&ej).unwrap_or(Ordering::Equal)
        }
    });
    idx
}

// C_xy = (1/N) sum_q e^{-i q (r_x - r_y)}, raw coordinate differences.
fn plane_wave_correlations(lattice: &Lattice, occ: &[&Momentum]) -> DMatrix<C64> {
    let n = lattice.num_sites();
    let l = lattice.size() as i64;
    let dim = lattice.dim();
    let span = (2 * l - 1) as usize;
    let table_len = if dim == 1 { span } else { span * span };
    let table: Vec<C64> = (0..table_len)
        .into_par_iter()
        .map(|t| {
            let dx = (t % span) as i64 - (l - 1);
            let dy = if dim == 1 {
                0
            } else {
                (t / span) as i64 - (l - 1)
            };
            occ.iter()
                .map(|m| C64::from_polar(1.0, -(m.k[0] * dx as f64 + m.k[1] * dy as f64)))
                .sum::<C64>()
                / n as f64
        })
        .collect();
    DMatrix::from_fn(n, n, |x, y| {
        let (a, b) = (lattice.coords(x), lattice.coords(y));
        let dx = (a[0] as i64 - b[0] as i64 + l - 1) as usize;
        let dy = (a[1] as i64 - b[1] as i64 + l - 1) as usize;
        table[if dim == 1 { dx } else { dy * span + dx }]
    })
}

/// `n_k = (1/N) sum_xy e^{i k (r_x - r_y)} c^dag_x c_y` as a quadratic observable.
pub fn momentum_occupation_observable(lattice: &Lattice, k: [f64; 2]) -> QuadraticObservable {
    let n = lattice.num_sites();
    let phase: Vec<C64> = (0..n)
        .map(|x| {
            let r = lattice.coords(x);
            C64::from_polar(1.0, k[0] * r[0] as f64 + k[1] * r[1] as f64)
        })
        .collect();
    let h = DMatrix::from_fn(n, n, |x, y| phase[x] * phase[y].conj() / n as f64);
    QuadraticObservable::from_hopping(&h).expect("plane-wave projector is Hermitian")
}

pub fn momentum_occupation(
    state: &CorrelationMatrix,
    lattice: &Lattice,
    k: [f64; 2],
) -> Result<f64> {
    if state.n_modes() != lattice.num_sites() {
        return Err(Error::DimensionMismatch {
            expected: lattice.num_sites(),
            found: state.n_modes(),
        });
    }
    quadratic_expectation(&momentum_occupation_observable(lattice, k), state)
}

/// `Re(u^dag C u) / N` with `u_x = e^{-i k r_x}` for every `k`. Equals
/// `<n_k>` when `C` comes from [`majorana_to_complex`] of the (possibly
/// damped) correlation matrix.
pub fn momentum_occupations(lattice: &Lattice, c: &DMatrix<C64>, ks: &[[f64; 2]]) -> Vec<f64> {
    // With C = A + iB and u = cos - i sin, Re(u^dag C u) is
    // cos.A.cos + sin.A.sin + cos.B.sin - sin.B.cos, so two real products
    // against a block of plane waves do all the work.
    const CHUNK: usize = 128;
    let n = lattice.num_sites();
    let coords: Vec<[f64; 2]> = (0..n)
        .map(|x| {
            let r = lattice.coords(x);
            [r[0] as f64, r[1] as f64]
        })
        .collect();
    let a = c.map(|z| z.re);
    let b = c.map(|z| z.im);
    ks.par_chunks(CHUNK)
        .flat_map_iter(|block| {
            let m = block.len();
            let mut waves = DMatrix::<f64>::zeros(n, 2 * m);
            for (j, k) in block.iter().enumerate() {
                for (x, r) in coords.iter().enumerate() {
                    let (sin, cos) = (k[0] * r[0] + k[1] * r[1]).sin_cos();
                    waves[(x, j)] = cos;
                    waves[(x, m + j)] = sin;
                }
            }
            let pa = &a * &waves;
            let pb = &b * &waves;
            (0..m)
                .map(|j| {
                    let (cj, sj) = (waves.column(j), waves.column(m + j));
                    let v = cj.dot(&pa.column(j))
                        + sj.dot(&pa.column(m + j))
                        + cj.dot(&pb.column(m + j))
                        - sj.dot(&pb.column(j));
                    v / n as f64
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purity {
    Pure,
    Mixed,
}

/// `Gamma = Q (+)_k s_k J Q^T` with Haar `Q`; `s_k = 1` for pure states and
/// uniform in `[0, 1]` otherwise.
pub fn random_gaussian_state<R: Rng + ?Sized>(
    n_modes: usize,
    purity: Purity,
    rng: &mut R,
) -> CorrelationMatrix {
    let m = 2 * n_modes;
    let q = haar_orthogonal(m, rng, false);
    let mut core = DMatrix::<f64>::zeros(m, m);
    for k in 0..n_modes {
        let s = match purity {
            Purity::Pure => 1.0,
            Purity::Mixed => rng.gen::<f64>(),
        };
        core[(2 * k, 2 * k + 1)] = s;
        core[(2 * k + 1, 2 * k)] = -s;
    }
    let mut g = &q * core * q.transpose();
    g = (&g - g.transpose()) * 0.5;
    CorrelationMatrix::new_unchecked(g)
}

/// Random antisymmetric coefficients with unit trace norm, zero offset.
pub fn random_normalized_observable<R: Rng + ?Sized>(
    n_modes: usize,
    rng: &mut R,
) -> QuadraticObservable {
    let c = random_antisymmetric(2 * n_modes, rng);
    let t = trace_norm(&c);
    QuadraticObservable::new_unchecked(0.0, c / t)
}
