//! States with prescribed power-law correlation decay.

use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{domain, Result};
use crate::gaussian::{
    complex_to_majorana, random_gaussian_state, ComplexCorrelations, CorrelationMatrix, Purity, C64,
};
use crate::lattice::{majorana_site, Lattice};
use crate::linalg::spectral_norm;

#[derive(Debug, Clone)]
pub struct SyntheticState {
    pub state: CorrelationMatrix,
    /// Prefactor `K` in `|Gamma_ab| <= K / d^mu` for `a, b` on different sites.
    pub k: f64,
    pub mu: f64,
}

/// Largest `|Gamma_ab| d(a, b)^mu` over pairs on different sites.
pub fn decay_constant(gamma: &DMatrix<f64>, lattice: &Lattice, mu: f64) -> f64 {
    let mut worst = 0.0f64;
    for a in 0..gamma.nrows() {
        for b in 0..gamma.ncols() {
            let (sa, sb) = (majorana_site(a), majorana_site(b));
            if sa != sb {
                let d = lattice.site_distance(sa, sb) as f64;
                worst = worst.max(gamma[(a, b)].abs() * d.powf(mu));
            }
        }
    }
    worst
}

/// Translation-invariant, number-conserving state with `C(0) = 1/2` and
/// `C(s) = amp / d(s)^mu`. The amplitude is `fill / sum_{s != 0} d(s)^-mu`,
/// which keeps every momentum occupation within `1/2 +- fill`.
pub fn power_law_state(lattice: &Lattice, mu: f64, fill: f64) -> Result<SyntheticState> {
    if !(fill > 0.0 && fill <= 0.5) {
        return domain(format!("fill must lie in (0, 1/2], got {fill}"));
    }
    if !(mu > 0.0) {
        return domain("mu must be positive");
    }
    let n = lattice.num_sites();
    let norm: f64 = (1..n)
        .map(|s| (lattice.site_distance(0, s) as f64).powf(-mu))
        .sum();
    let amp = if norm > 0.0 { fill / norm } else { 0.0 };
    let c = DMatrix::from_fn(n, n, |x, y| {
        if x == y {
            C64::new(0.5, 0.0)
        } else {
            C64::new(amp * (lattice.site_distance(x, y) as f64).powf(-mu), 0.0)
        }
    });
    let state = complex_to_majorana(&ComplexCorrelations::number_conserving(c))?;
    Ok(SyntheticState {
        state,
        k: 2.0 * amp,
        mu,
    })
}

/// Random pure correlations damped entrywise by `min(1, K / d^mu)` and
/// rescaled into the unit ball. The decay premise is re-checked on the result.
pub fn damped_random_state<R: Rng + ?Sized>(
    lattice: &Lattice,
    mu: f64,
    k: f64,
    rng: &mut R,
) -> Result<SyntheticState> {
    if !(k > 0.0 && mu > 0.0) {
        return domain("K and mu must be positive");
    }
    let base = random_gaussian_state(lattice.num_sites(), Purity::Pure, rng);
    let g0 = base.gamma();
    let mut g = DMatrix::from_fn(g0.nrows(), g0.ncols(), |a, b| {
        let (sa, sb) = (majorana_site(a), majorana_site(b));
        if sa == sb {
            g0[(a, b)]
        } else {
            let d = lattice.site_distance(sa, sb) as f64;
            g0[(a, b)] * (k * d.powf(-mu)).min(1.0)
        }
    });
    let norm = spectral_norm(&g);
    if norm > 1.0 {
        g /= norm;
    }
    let measured = decay_constant(&g, lattice, mu);
    if measured > k * (1.0 + 1e-12) {
        return domain(format!("decay premise violated: {measured} > {k}"));
    }
    Ok(SyntheticState {
        state: CorrelationMatrix::new(g)?,
        k,
        mu,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::momentum_occupation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn power_law_premise_and_occupations() {
        let lat = Lattice::new(1, 16).unwrap();
        let s = power_law_state(&lat, 3.0, 0.45).unwrap();
        assert!(decay_constant(s.state.gamma(), &lat, 3.0) <= s.k * (1.0 + 1e-12));
        s.state.check_physical().unwrap();
        for m in 0..16 {
            let k = 2.0 * std::f64::consts::PI * m as f64 / 16.0;
            let n = momentum_occupation(&s.state, &lat, [k, 0.0]).unwrap();
            assert!((0.05 - 1e-12..=0.95 + 1e-12).contains(&n), "{n}");
        }
    }

    #[test]
    fn damped_state_is_physical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = Lattice::new(2, 4).unwrap();
        let s = damped_random_state(&lat, 2.5, 0.5, &mut rng).unwrap();
        s.state.check_physical().unwrap();
        assert!(decay_constant(s.state.gamma(), &lat, 2.5) <= 0.5 * (1.0 + 1e-12));
    }
}
