//! Closed-form error bounds and the exact lattice sums they dominate.
//!
//! Noise enters through `r = 1 - 3p/2`. Internally the bounds work with the
//! rate `a = -ln r`, which is computed with `ln_1p` so that `p ~ 1e-9` keeps
//! full relative precision.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{domain, Result};
use crate::gaussian::fill_order;
use crate::lattice::{Boundary, Lattice, MomentumGrid};
use crate::special::{integrate, polylog_exp, zeta_gap};

pub use crate::special::{polylog, riemann_zeta};

const MU_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Unstable,
    Fractional,
    Logarithmic,
    Linear,
}

impl Regime {
    pub fn classify(mu: f64, dim: usize) -> Self {
        let d = dim as f64;
        if mu <= d {
            Regime::Unstable
        } else if (mu - d - 1.0).abs() <= MU_EQ_TOL {
            Regime::Logarithmic
        } else if mu < d + 1.0 {
            Regime::Fractional
        } else {
            Regime::Linear
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::Unstable => "mu<=D unstable",
            Regime::Fractional => "D<mu<D+1",
            Regime::Logarithmic => "mu=D+1",
            Regime::Linear => "mu>D+1",
        }
    }

    /// Leading power of `p` as `p -> 0` (the logarithmic case has exponent
    /// one up to a `log(1/p)` factor).
    pub fn small_p_exponent(mu: f64, dim: usize) -> Option<f64> {
        match Self::classify(mu, dim) {
            Regime::Unstable => None,
            Regime::Fractional => Some(mu - dim as f64),
            Regime::Logarithmic | Regime::Linear => Some(1.0),
        }
    }
}

/// Power-law decay `|Gamma_{r r'}| <= K / d^mu` of a state on a `D`
/// dimensional lattice, measured through an encoding with offset `phi0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub mu: f64,
    #[serde(rename = "D")]
    pub dim: usize,
    pub phi0: f64,
}

impl DecayParams {
    pub fn new(k: f64, mu: f64, dim: usize, phi0: f64) -> Result<Self> {
        let params = Self { k, mu, dim, phi0 };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0 && self.k.is_finite()) {
            return domain(format!("K must be positive, got {}", self.k));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) {
            return domain(format!("mu must be positive, got {}", self.mu));
        }
        if self.dim == 0 {
            return domain("D must be at least 1");
        }
        if !(self.phi0 >= 1.0 && self.phi0.is_finite()) {
            return domain(format!("phi0 must be at least 1, got {}", self.phi0));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        Regime::classify(self.mu, self.dim)
    }

    pub fn is_stable(&self) -> bool {
        self.mu > self.dim as f64
    }

    /// Order `mu - D + 1` of the zeta and polylog terms.
    pub fn order(&self) -> f64 {
        self.mu - self.dim as f64 + 1.0
    }

    fn require_stable(&self) -> Result<()> {
        self.validate()?;
        if !self.is_stable() {
            return domain(format!(
                "bound diverges for mu = {} <= D = {} (unstable regime)",
                self.mu, self.dim
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub value: f64,
    pub regime: Regime,
    pub p: f64,
    pub params: DecayParams,
}

/// `2^D (1 + D)^{D-1} / (D - 1)!`
pub fn c_dim(dim: usize) -> f64 {
    assert!(dim >= 1, "c_dim needs D >= 1");
    let d = dim as f64;
    let fact: f64 = (1..dim).map(|i| i as f64).product();
    2f64.powi(dim as i32) * (1.0 + d).powi(dim as i32 - 1) / fact
}

/// Number of points of `Z^D` within 1-norm distance `radius` of the origin.
pub fn ball_count(dim: usize, radius: usize) -> f64 {
    // sum_j 2^j C(D, j) C(radius, j)
    let mut total = 0.0;
    let mut c_dim_j = 1.0;
    let mut c_rad_j = 1.0;
    for j in 0..=dim.min(radius) {
        total += 2f64.powi(j as i32) * c_dim_j * c_rad_j;
        c_dim_j *= (dim - j) as f64 / (j + 1) as f64;
        c_rad_j *= (radius - j) as f64 / (j + 1) as f64;
    }
    total
}

/// `a = -ln(1 - 3p/2)` for `p` in `[0, 2/3]`.
pub fn worst_case_rate(p: f64) -> Result<f64> {
    if !(0.0..=2.0 / 3.0).contains(&p) {
        return domain(format!("p must lie in [0, 2/3], got {p}"));
    }
    Ok(-(-1.5 * p).ln_1p())
}

fn rate_of(r: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&r) {
        return domain(format!("r must lie in [0, 1], got {r}"));
    }
    Ok(-r.ln())
}

/// `zeta(s) - e^{-c} Li_s(e^{-b})` without cancellation for small `b, c`.
fn decay_gap(s: f64, b: f64, c: f64) -> Result<f64> {
    let zeta = riemann_zeta(s)?;
    if b == f64::INFINITY {
        return Ok(zeta);
    }
    let damp = if c == f64::INFINITY {
        1.0
    } else {
        -(-c).exp_m1()
    };
    if b == 0.0 {
        return Ok(damp * zeta);
    }
    Ok(zeta_gap(s, b)? + damp * polylog_exp(s, b)?)
}

/// Closed-form bound on the measurement error for decaying correlations,
/// `3 p phi0 + 2 K C_D (zeta(s) - r^phi0 Li_s(r))`, `s = mu - D + 1`.
pub fn decay_bound(params: &DecayParams, p: f64) -> Result<BoundReport> {
    params.require_stable()?;
    let a = worst_case_rate(p)?;
    let s = params.order();
    let gap = decay_gap(s, a, a * params.phi0)?;
    let value = 3.0 * p * params.phi0 + 2.0 * params.k * c_dim(params.dim) * gap;
    Ok(BoundReport {
        value,
        regime: params.regime(),
        p,
        params: *params,
    })
}

/// Parameters of `S = max_r' sum_r [1 - r^{K1 d + K2}] g(r, r')` with
/// `|g| <= 1` inside distance `d0` and `K / (d - d0)^mu` beyond.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumParams {
    /// `-ln r`
    pub rate: f64,
    pub k1: f64,
    pub k2: f64,
    pub d0: usize,
    pub mu: f64,
    pub dim: usize,
    pub k: f64,
}

impl SumParams {
    pub fn new(r: f64, k1: f64, k2: f64, d0: usize, mu: f64, dim: usize, k: f64) -> Result<Self> {
        let sp = Self {
            rate: rate_of(r)?,
            k1,
            k2,
            d0,
            mu,
            dim,
            k,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn with_rate(
        rate: f64,
        k1: f64,
        k2: f64,
        d0: usize,
        mu: f64,
        dim: usize,
        k: f64,
    ) -> Result<Self> {
        let sp = Self {
            rate,
            k1,
            k2,
            d0,
            mu,
            dim,
            k,
        };
        sp.validate()?;
        Ok(sp)
    }

    pub fn r(&self) -> f64 {
        (-self.rate).exp()
    }

    fn validate(&self) -> Result<()> {
        if !(self.rate >= 0.0) {
            return domain(format!("r must lie in [0, 1], rate {}", self.rate));
        }
        if !(self.k1 >= 0.0 && self.k2 >= 0.0 && self.k1.is_finite() && self.k2.is_finite()) {
            return domain("K1 and K2 must be finite and non-negative");
        }
        if !(self.k >= 0.0 && self.k.is_finite()) {
            return domain("K must be finite and non-negative");
        }
        if self.dim == 0 {
            return domain("D must be at least 1");
        }
        Ok(())
    }

    fn one_minus_r_pow(&self, x: f64) -> f64 {
        if self.rate == f64::INFINITY {
            if x > 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            -(-self.rate * x).exp_m1()
        }
    }
}

/// Bernoulli bound on the part inside `d0`:
/// `(1 - r) max(K1 d0 + K2, 1) |B_D(d0)|` with the exact ball size.
pub fn bound_s1(sp: &SumParams) -> Result<f64> {
    sp.validate()?;
    let weight = (sp.k1 * sp.d0 as f64 + sp.k2).max(1.0);
    Ok(sp.one_minus_r_pow(1.0) * weight * ball_count(sp.dim, sp.d0))
}

/// `K C_D (d0 + 1)^{D-1} (zeta(s) - r^{K1 d0 + K2} Li_s(r^{K1}))`.
pub fn bound_s2(sp: &SumParams) -> Result<f64> {
    sp.validate()?;
    if !(sp.mu > sp.dim as f64) {
        return domain(format!("S2 diverges for mu = {} <= D = {}", sp.mu, sp.dim));
    }
    if sp.rate == 0.0 || sp.k == 0.0 {
        return Ok(0.0);
    }
    let s = sp.mu - sp.dim as f64 + 1.0;
    let b = sp.rate * sp.k1;
    let c = sp.rate * (sp.k1 * sp.d0 as f64 + sp.k2);
    let pre = sp.k * c_dim(sp.dim) * ((sp.d0 + 1) as f64).powi(sp.dim as i32 - 1);
    Ok(pre * decay_gap(s, b, c)?)
}

pub fn bound_s(sp: &SumParams) -> Result<f64> {
    Ok(bound_s1(sp)? + bound_s2(sp)?)
}

/// `(1 - r) phi0 + K C_D (zeta(s) - r^phi0 Li_s(r))`
pub fn single_sum_bound(params: &DecayParams, r: f64) -> Result<f64> {
    params.require_stable()?;
    let a = rate_of(r)?;
    let one_minus_r = if a == f64::INFINITY {
        1.0
    } else {
        -(-a).exp_m1()
    };
    let gap = decay_gap(params.order(), a, a * params.phi0)?;
    Ok(one_minus_r * params.phi0 + params.k * c_dim(params.dim) * gap)
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LatticeSum {
    pub inner: f64,
    pub outer: f64,
}

impl LatticeSum {
    pub fn total(&self) -> f64 {
        self.inner + self.outer
    }
}

/// Direct evaluation of `S` on a periodic lattice with `g` at its extreme
/// allowed values. `inner` collects `d <= d0`, `outer` the rest.
pub fn lattice_sum(lattice: &Lattice, sp: &SumParams) -> Result<LatticeSum> {
    sp.validate()?;
    if lattice.dim() != sp.dim {
        return domain("lattice dimension differs from D");
    }
    let mut out = LatticeSum::default();
    for site in 0..lattice.num_sites() {
        let d = lattice.site_distance(0, site);
        let damp = sp.one_minus_r_pow(sp.k1 * d as f64 + sp.k2);
        if d <= sp.d0 {
            out.inner += damp;
        } else {
            out.outer += damp * sp.k / ((d - sp.d0) as f64).powf(sp.mu);
        }
    }
    Ok(out)
}

/// Circuit bound `constant * f(p) * d^e` where `f` is
/// [`decay_bound`]. The constant is not fixed by the analysis and is reported
/// separately from the shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitBound {
    pub shape: f64,
    pub constant: f64,
    pub value: f64,
    pub f_p: f64,
    pub exponent: i32,
    pub regime: Regime,
}

fn circuit_shape(
    params: &DecayParams,
    p: f64,
    depth: usize,
    exponent: i32,
    constant: f64,
) -> Result<CircuitBound> {
    if !(constant >= 0.0 && constant.is_finite()) {
        return domain("bound constant must be finite and non-negative");
    }
    let f = decay_bound(params, p)?;
    let shape = f.value * (depth as f64).powi(exponent);
    Ok(CircuitBound {
        shape,
        constant,
        value: constant * shape,
        f_p: f.value,
        exponent,
        regime: f.regime,
    })
}

/// Gaussian circuits: `f(p) d^{D+2}`.
pub fn circuit_bound(params: &DecayParams, p: f64, depth: usize) -> Result<CircuitBound> {
    circuit_bound_with_constant(params, p, depth, 1.0)
}

pub fn circuit_bound_with_constant(
    params: &DecayParams,
    p: f64,
    depth: usize,
    constant: f64,
) -> Result<CircuitBound> {
    circuit_shape(params, p, depth, params.dim as i32 + 2, constant)
}

/// Interacting circuits: `f(p) d^{2D+1}`.
pub fn interacting_bound(params: &DecayParams, p: f64, depth: usize) -> Result<CircuitBound> {
    interacting_bound_with_constant(params, p, depth, 1.0)
}

pub fn interacting_bound_with_constant(
    params: &DecayParams,
    p: f64,
    depth: usize,
    constant: f64,
) -> Result<CircuitBound> {
    circuit_shape(params, p, depth, 2 * params.dim as i32 + 1, constant)
}

/// Fully explicit bound for a Gaussian circuit of gate radius `radius`:
/// `sum_k 2 S(K1 = 1, K2 = phi0, d0 = 2 radius k, K amplification[k])`.
/// `amplification[k - 1]` bounds the growth of the correlation prefactor
/// after `k` layers (see `circuits::correlation_amplification`).
pub fn circuit_chain_bound(
    params: &DecayParams,
    p: f64,
    radius: usize,
    amplification: &[f64],
) -> Result<f64> {
    params.require_stable()?;
    let a = worst_case_rate(p)?;
    let mut total = 0.0;
    for (i, &amp) in amplification.iter().enumerate() {
        if !(amp >= 1.0) {
            return domain("amplification factors must be at least 1");
        }
        let d0 = 2 * radius * (i + 1);
        let sp = SumParams::with_rate(
            a,
            1.0,
            params.phi0,
            d0,
            params.mu,
            params.dim,
            params.k * amp,
        )?;
        total += 2.0 * bound_s(&sp)?;
    }
    Ok(total)
}

/// `lambda = -ln(1 - p)`, the decay rate of `(1 - p)^{|s|}`.
pub fn fermi2d_rate(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return domain(format!("p must lie in (0, 1), got {p}"));
    }
    Ok(-(-p).ln_1p())
}

/// Continuum error away from a circular Fermi surface of radius `k_f`,
/// `(1/2) lambda k_f^2 / (lambda^2 + delta^2)^{3/2}` with `delta = |k| - k_f`.
/// This is the derived form; it scales as `delta^-3` for `delta >> lambda`.
pub fn fermi2d_limit_error(p: f64, k_f: f64, delta: f64) -> Result<f64> {
    let lam = fermi2d_rate(p)?;
    if !(k_f > 0.0) {
        return domain("k_F must be positive");
    }
    if delta == 0.0 || !delta.is_finite() {
        return domain("delta = 0 lies on the Fermi surface; use fermi2d_on_surface_error");
    }
    Ok(0.5 * lam * k_f * k_f / (lam * lam + delta * delta).powf(1.5))
}

/// `I(lambda) = (lambda/pi) int_0^{pi/2} d theta / sqrt(lambda^2 + 4 k_f^2 sin^2 theta)`
pub fn fermi2d_surface_integral(p: f64, k_f: f64) -> Result<f64> {
    let lam = fermi2d_rate(p)?;
    if !(k_f > 0.0) {
        return domain("k_F must be positive");
    }
    let f = |t: f64| 1.0 / (lam * lam + 4.0 * k_f * k_f * t.sin().powi(2)).sqrt();
    // the integrand is peaked on a scale lambda / (2 k_f) near zero
    let knee = (lam / (2.0 * k_f)).min(PI / 2.0);
    let mut cuts = vec![0.0];
    let mut x = knee;
    while x < PI / 2.0 {
        cuts.push(x);
        x *= 8.0;
    }
    cuts.push(PI / 2.0);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        total += integrate(f, w[0], w[1], 0.0, 1e-11)?;
    }
    Ok(lam / PI * total)
}

/// `(lambda / 4 k_f) asinh(2 k_f / lambda)`, an upper bound on `I`.
pub fn fermi2d_surface_integral_bound(p: f64, k_f: f64) -> Result<f64> {
    let lam = fermi2d_rate(p)?;
    if !(k_f > 0.0) {
        return domain("k_F must be positive");
    }
    Ok(lam / (4.0 * k_f) * (2.0 * k_f / lam).asinh())
}

/// Noisy occupation on the surface is `1/2 - I(lambda)`; against the empty
/// side this is the error, and it tends to `1/2` as `p -> 0`.
pub fn fermi2d_on_surface_error(p: f64, k_f: f64) -> Result<f64> {
    Ok(0.5 - fermi2d_surface_integral(p, k_f)?)
}

/// Radius of the disk with the same area as `n_occ` grid cells.
pub fn fermi2d_effective_kf(size: usize, n_occ: usize) -> f64 {
    (n_occ as f64 / PI).sqrt() * 2.0 * PI / size as f64
}

/// Momenta of the lowest `n_occ` tight-binding states on an `L x L` torus.
pub fn lowest_filling(size: usize, n_occ: usize) -> Result<Vec<[f64; 2]>> {
    let lattice = Lattice::new(2, size)?;
    let grid = MomentumGrid::new(lattice, Boundary::for_occupation(n_occ))?;
    if n_occ > grid.len() {
        return domain(format!("n_occ = {n_occ} exceeds {} modes", grid.len()));
    }
    let order = fill_order(&grid.momenta, 2);
    Ok(order[..n_occ].iter().map(|&i| grid.momenta[i].k).collect())
}

/// Exact noisy occupation `n_k` on an `L x L` torus for a filled set of
/// momenta, with bilinears damped by `(1 - p)^{|s|_2}` (minimal image).
pub fn fermi2d_lattice_occupation(
    size: usize,
    occupied: &[[f64; 2]],
    p: f64,
    k: [f64; 2],
) -> Result<f64> {
    let lam = fermi2d_rate(p)?;
    let l = size as i64;
    let half = l / 2;
    let wrap = |x: i64| if x > half { x - l } else { x };
    let total: f64 = (0..l * l)
        .into_par_iter()
        .map(|idx| {
            let (sx, sy) = (wrap(idx % l) as f64, wrap(idx / l) as f64);
            let w = (-lam * (sx * sx + sy * sy).sqrt()).exp();
            occupied
                .iter()
                .map(|q| ((k[0] - q[0]) * sx + (k[1] - q[1]) * sy).cos())
                .sum::<f64>()
                * w
        })
        .sum();
    Ok(total / (l * l) as f64)
}

/// Exact error of `n_k` on a periodic chain of `n` sites whose state is
/// translation invariant with occupation `occ(q_m)`, `q_m = 2 pi m / n`,
/// under weights `1 - (1 - p)^{phi0 + d(s)}`:
/// `|(1/n) sum_s w(s) sum_q e^{i (k - q) s} n(q)|`.
pub fn translation_invariant_error(
    n: usize,
    p: f64,
    phi0: f64,
    k: f64,
    occ: &[f64],
) -> Result<f64> {
    if n == 0 || occ.len() != n {
        return domain("occupation table must have one entry per momentum");
    }
    if !(0.0..=1.0).contains(&p) {
        return domain(format!("p must lie in [0, 1], got {p}"));
    }
    let nf = n as f64;
    let (re, im) = (0..n)
        .into_par_iter()
        .map(|s| {
            let d = s.min(n - s) as f64;
            let w = -((phi0 + d) * (-p).ln_1p()).exp_m1();
            let mut acc = (0.0, 0.0);
            for (m, &nq) in occ.iter().enumerate() {
                if nq == 0.0 {
                    continue;
                }
                let q = 2.0 * PI * m as f64 / nf;
                let (sin, cos) = ((k - q) * s as f64).sin_cos();
                acc.0 += nq * cos;
                acc.1 += nq * sin;
            }
            (w * acc.0, w * acc.1)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    Ok(re.hypot(im) / nf)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub n: usize,
    pub p: f64,
    pub k: f64,
    pub error: f64,
}

/// Step occupation `n(q_m) = 1` for `0 <= m < n/2` (jump at `q_j = 0`),
/// probed at `k = k_offset` for each chain length. `phi0 = 1`.
pub fn jump_scaling_probe(n_grid: &[usize], p: f64, k_offset: f64) -> Result<Vec<ProbeRow>> {
    if n_grid.is_empty() {
        return domain("empty N grid");
    }
    n_grid
        .iter()
        .map(|&n| {
            if n < 2 {
                return domain("N must be at least 2");
            }
            let occ: Vec<f64> = (0..n).map(|m| if m < n / 2 { 1.0 } else { 0.0 }).collect();
            let error = translation_invariant_error(n, p, 1.0, k_offset, &occ)?;
            Ok(ProbeRow {
                n,
                p,
                k: k_offset,
                error,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProbe {
    pub rows: Vec<ProbeRow>,
    pub slope: f64,
}

/// Error of a smooth occupation across `p_grid` on an `n`-site chain at
/// momentum `k`, with the fitted log-log slope in `p`.
pub fn lipschitz_scaling_probe(
    p_grid: &[f64],
    n_smooth: &(dyn Fn(f64) -> f64 + Sync),
    n: usize,
    k: f64,
) -> Result<LipschitzProbe> {
    if p_grid.is_empty() {
        return domain("empty p grid");
    }
    let occ: Vec<f64> = (0..n)
        .map(|m| n_smooth(2.0 * PI * m as f64 / n as f64))
        .collect();
    let rows = p_grid
        .iter()
        .map(|&p| {
            Ok(ProbeRow {
                n,
                p,
                k,
                error: translation_invariant_error(n, p, 1.0, k, &occ)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = rows.iter().map(|r| r.p).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.error).collect();
    let slope = fit_loglog_slope(&xs, &ys)?;
    Ok(LipschitzProbe { rows, slope })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return domain("slope fit needs at least two paired points");
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return domain("slope fit needs positive data");
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("slope fit needs distinct x values");
    }
    Ok(sxy / sxx)
}
