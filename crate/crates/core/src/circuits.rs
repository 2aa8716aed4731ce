//! Local Gaussian (matchgate) circuits with Pauli noise after every layer.
//!
//! A layer `U` acts as `U^dag g_a U = sum_b R_ab g_b` with `R` special
//! orthogonal and block diagonal over disjoint groups of nearby sites.
//! Observables evolve as `O -> R^T O R`, states as `Gamma -> R Gamma R^T`,
//! and noise multiplies both entrywise by `lambda`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gaussian::{quadratic_expectation, CorrelationMatrix, QuadraticObservable};
use crate::lattice::{majorana_site, Lattice};
use crate::linalg::haar_orthogonal;
use crate::noise::LambdaMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct GateBlock {
    pub majoranas: Vec<usize>,
    pub rotation: DMatrix<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianLayer {
    n_majoranas: usize,
    blocks: Vec<GateBlock>,
    locality_radius: usize,
}

impl GaussianLayer {
    /// Validates disjointness, orthogonality and that every block stays
    /// within `locality_radius` on `lattice`.
    pub fn new(lattice: &Lattice, blocks: Vec<GateBlock>, locality_radius: usize) -> Result<Self> {
        let m = lattice.num_majoranas();
        let mut used = vec![false; m];
        for b in &blocks {
            let k = b.majoranas.len();
            if b.rotation.nrows() != k || b.rotation.ncols() != k {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: b.rotation.nrows(),
                });
            }
            for &a in &b.majoranas {
                if a >= m || used[a] {
                    return domain(format!("Majorana {a} out of range or in two blocks"));
                }
                used[a] = true;
            }
            let defect =
                (b.rotation.transpose() * &b.rotation - DMatrix::<f64>::identity(k, k)).amax();
            if defect > 1e-10 {
                return domain(format!("gate is not orthogonal (defect {defect:e})"));
            }
            for &a in &b.majoranas {
                for &c in &b.majoranas {
                    let d = lattice.site_distance(majorana_site(a), majorana_site(c));
                    if d > locality_radius {
                        return domain(format!(
                            "gate spans distance {d} > radius {locality_radius}"
                        ));
                    }
                }
            }
        }
        Ok(Self {
            n_majoranas: m,
            blocks,
            locality_radius,
        })
    }

    pub fn identity(lattice: &Lattice) -> Self {
        Self {
            n_majoranas: lattice.num_majoranas(),
            blocks: Vec::new(),
            locality_radius: 0,
        }
    }

    /// Wraps a dense rotation; the radius is read off its support.
    pub fn from_dense(lattice: &Lattice, r: DMatrix<f64>) -> Result<Self> {
        let m = lattice.num_majoranas();
        if r.nrows() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: r.nrows(),
            });
        }
        let mut radius = 0;
        for a in 0..m {
            for b in 0..m {
                if r[(a, b)] != 0.0 {
                    radius = radius.max(lattice.site_distance(majorana_site(a), majorana_site(b)));
                }
            }
        }
        let block = GateBlock {
            majoranas: (0..m).collect(),
            rotation: r,
        };
        Self::new(lattice, vec![block], radius)
    }

    pub fn locality_radius(&self) -> usize {
        self.locality_radius
    }

    pub fn blocks(&self) -> &[GateBlock] {
        &self.blocks
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let mut r = DMatrix::<f64>::identity(self.n_majoranas, self.n_majoranas);
        for b in &self.blocks {
            for (i, &a) in b.majoranas.iter().enumerate() {
                for (j, &c) in b.majoranas.iter().enumerate() {
                    r[(a, c)] = b.rotation[(i, j)];
                }
            }
        }
        r
    }

    // right-multiply by R (transpose = false) or R^T (transpose = true)
    fn mix_columns(&self, m: &mut DMatrix<f64>, transpose: bool) {
        for b in &self.blocks {
            let rot = if transpose {
                b.rotation.transpose()
            } else {
                b.rotation.clone()
            };
            let cols =
                DMatrix::from_fn(m.nrows(), b.majoranas.len(), |i, j| m[(i, b.majoranas[j])]);
            let mixed = cols * rot;
            for (j, &a) in b.majoranas.iter().enumerate() {
                m.column_mut(a).copy_from(&mixed.column(j));
            }
        }
    }

    // left-multiply by R (transpose = false) or R^T (transpose = true)
    fn mix_rows(&self, m: &mut DMatrix<f64>, transpose: bool) {
        for b in &self.blocks {
            let rot = if transpose {
                b.rotation.transpose()
            } else {
                b.rotation.clone()
            };
            let rows =
                DMatrix::from_fn(b.majoranas.len(), m.ncols(), |i, j| m[(b.majoranas[i], j)]);
            let mixed = rot * rows;
            for (i, &a) in b.majoranas.iter().enumerate() {
                m.row_mut(a).copy_from(&mixed.row(i));
            }
        }
    }

    /// `R^T O R`
    pub fn conjugate_observable(&self, o: &DMatrix<f64>) -> DMatrix<f64> {
        let mut m = o.clone();
        self.mix_columns(&mut m, false);
        self.mix_rows(&mut m, true);
        m
    }

    /// `R Gamma R^T`
    pub fn conjugate_state(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        let mut m = g.clone();
        self.mix_columns(&mut m, true);
        self.mix_rows(&mut m, false);
        m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCircuit {
    pub lattice: Lattice,
    pub layers: Vec<GaussianLayer>,
}

impl GaussianCircuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn radius(&self) -> usize {
        self.layers
            .iter()
            .map(|l| l.locality_radius)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    #[serde(rename = "D")]
    pub dim: usize,
    #[serde(rename = "L")]
    pub size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitSpec {
    pub seed: u64,
    pub depth: usize,
    pub radius: usize,
    pub lattice: LatticeSpec,
}

impl CircuitSpec {
    pub fn build(&self) -> Result<GaussianCircuit> {
        let lattice = Lattice::new(self.lattice.dim, self.lattice.size)?;
        brickwork_random_circuit(&lattice, self.depth, self.radius, self.seed)
    }
}

/// How Haar gates are drawn for a brickwork circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateSampling {
    /// Independent gate for every block.
    PerGate,
    /// One gate per layer, repeated on every block of that layer. The
    /// circuit then commutes with translations by the run length.
    PerLayer,
}

pub fn brickwork_random_circuit(
    lattice: &Lattice,
    depth: usize,
    radius: usize,
    seed: u64,
) -> Result<GaussianCircuit> {
    brickwork_circuit(lattice, depth, radius, seed, GateSampling::PerGate)
}

/// Brickwork of Haar-random special orthogonal gates. Layer `t` cuts lines
/// along axis `t mod D` into runs of `radius + 1` consecutive sites; the run
/// offset alternates between `0` and `(radius + 1) / 2` on successive passes.
pub fn brickwork_circuit(
    lattice: &Lattice,
    depth: usize,
    radius: usize,
    seed: u64,
    sampling: GateSampling,
) -> Result<GaussianCircuit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let l = lattice.size();
    let run = (radius + 1).min(l);
    let n_lines = lattice.num_sites() / l;
    let mut layers = Vec::with_capacity(depth);
    for t in 0..depth {
        let axis = t % lattice.dim();
        let offset = if (t / lattice.dim()) % 2 == 1 {
            run / 2
        } else {
            0
        };
        let shared = match sampling {
            GateSampling::PerLayer => Some(haar_orthogonal(2 * run, &mut rng, true)),
            GateSampling::PerGate => None,
        };
        let mut blocks = Vec::new();
        for line in 0..n_lines {
            let mut start = 0;
            while start < l {
                let len = run.min(l - start);
                let mut majoranas = Vec::with_capacity(2 * len);
                for j in 0..len {
                    let pos = (offset + start + j) % l;
                    let coords = if lattice.dim() == 1 {
                        vec![pos]
                    } else if axis == 0 {
                        vec![pos, line]
                    } else {
                        vec![line, pos]
                    };
                    let site = lattice.site_index(&coords)?;
                    majoranas.extend([2 * site, 2 * site + 1]);
                }
                let rotation = match &shared {
                    Some(g) if len == run => g.clone(),
                    _ => haar_orthogonal(majoranas.len(), &mut rng, true),
                };
                blocks.push(GateBlock {
                    majoranas,
                    rotation,
                });
                start += len;
            }
        }
        layers.push(GaussianLayer::new(lattice, blocks, radius)?);
    }
    Ok(GaussianCircuit {
        lattice: *lattice,
        layers,
    })
}

pub fn evolve_observable_ideal(
    obs: &QuadraticObservable,
    layer: &GaussianLayer,
) -> QuadraticObservable {
    QuadraticObservable::new_unchecked(obs.offset, layer.conjugate_observable(obs.coeff()))
}

pub fn apply_noise_to_observable(
    obs: &QuadraticObservable,
    lambda: &LambdaMatrix,
) -> QuadraticObservable {
    QuadraticObservable::new_unchecked(obs.offset, lambda.damp(obs.coeff()))
}

fn check_circuit(
    state: &CorrelationMatrix,
    circuit: &GaussianCircuit,
    lambda: Option<&LambdaMatrix>,
) -> Result<()> {
    let m = circuit.lattice.num_majoranas();
    let mut sizes = vec![state.gamma().nrows()];
    if let Some(l) = lambda {
        sizes.push(l.size());
    }
    for found in sizes {
        if found != m {
            return Err(Error::DimensionMismatch { expected: m, found });
        }
    }
    Ok(())
}

/// Heisenberg picture, last layer first. Each layer is `U_k` followed by the
/// noise channel, so the adjoint applies `lambda` before `R^T . R`.
pub fn noisy_circuit_expectation(
    state: &CorrelationMatrix,
    circuit: &GaussianCircuit,
    lambda: Option<&LambdaMatrix>,
    obs: &QuadraticObservable,
) -> Result<f64> {
    check_circuit(state, circuit, lambda)?;
    let mut o = obs.clone();
    for layer in circuit.layers.iter().rev() {
        if let Some(l) = lambda {
            o = apply_noise_to_observable(&o, l);
        }
        o = evolve_observable_ideal(&o, layer);
    }
    quadratic_expectation(&o, state)
}

pub fn ideal_circuit_expectation(
    state: &CorrelationMatrix,
    circuit: &GaussianCircuit,
    obs: &QuadraticObservable,
) -> Result<f64> {
    noisy_circuit_expectation(state, circuit, None, obs)
}

/// Second moments of the evolved state after every layer (Schrodinger
/// picture). Exact for any input state, Gaussian or not.
pub fn evolve_state(
    state: &CorrelationMatrix,
    circuit: &GaussianCircuit,
    lambda: Option<&LambdaMatrix>,
) -> Result<Vec<DMatrix<f64>>> {
    check_circuit(state, circuit, lambda)?;
    let mut g = state.gamma().clone();
    let mut out = Vec::with_capacity(circuit.depth());
    for layer in &circuit.layers {
        g = layer.conjugate_state(&g);
        if let Some(l) = lambda {
            g = l.damp(&g);
        }
        out.push(g.clone());
    }
    Ok(out)
}

/// `|ideal - noisy|` for each entry of `lambdas`.
pub fn circuit_error_curve(
    state: &CorrelationMatrix,
    circuit: &GaussianCircuit,
    obs: &QuadraticObservable,
    lambdas: &[LambdaMatrix],
) -> Result<Vec<f64>> {
    let ideal = ideal_circuit_expectation(state, circuit, obs)?;
    lambdas
        .iter()
        .map(|l| Ok((ideal - noisy_circuit_expectation(state, circuit, Some(l), obs)?).abs()))
        .collect()
}

/// Entry `k - 1` is `(prod_{j <= k} max_a sum_b |R_j|_ab)^2`. It bounds the
/// factor by which `|Gamma|` entries, taken at distance shrunk by
/// `2 * radius * k`, can grow over the first `k` layers; damping by noise
/// only lowers entries.
pub fn correlation_amplification(circuit: &GaussianCircuit) -> Vec<f64> {
    let mut acc = 1.0;
    circuit
        .layers
        .iter()
        .map(|layer| {
            let row_max = layer
                .blocks
                .iter()
                .flat_map(|b| {
                    b.rotation
                        .row_iter()
                        .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
                })
                .fold(1.0f64, f64::max);
            acc *= row_max;
            acc * acc
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LightConeReport {
    pub radius: usize,
    /// Largest site distance carrying a non-zero correlation after each layer.
    pub support: Vec<usize>,
    /// Allowed distance `2 * radius * k` after layer `k`.
    pub allowed: Vec<usize>,
    pub violations: usize,
    pub largest_violation: f64,
}

impl LightConeReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

/// Checks that correlations of an initial product state never reach beyond
/// `2 * radius * k` after `k` layers.
pub fn lightcone_correlation_check(
    initial: &CorrelationMatrix,
    circuit: &GaussianCircuit,
    lambda: Option<&LambdaMatrix>,
) -> Result<LightConeReport> {
    let lat = &circuit.lattice;
    let g0 = initial.gamma();
    for a in 0..g0.nrows() {
        for b in 0..g0.ncols() {
            if majorana_site(a) != majorana_site(b) && g0[(a, b)] != 0.0 {
                return domain("light-cone check needs an initial product state");
            }
        }
    }
    let radius = circuit.radius();
    let evolved = evolve_state(initial, circuit, lambda)?;
    let mut report = LightConeReport {
        radius,
        support: Vec::new(),
        allowed: Vec::new(),
        violations: 0,
        largest_violation: 0.0,
    };
    for (k, g) in evolved.iter().enumerate() {
        let allowed = 2 * radius * (k + 1);
        let mut support = 0;
        for a in 0..g.nrows() {
            for b in 0..g.ncols() {
                let v = g[(a, b)].abs();
                if v < 1e-14 {
                    continue;
                }
                let d = lat.site_distance(majorana_site(a), majorana_site(b));
                support = support.max(d);
                if d > allowed {
                    report.violations += 1;
                    report.largest_violation = report.largest_violation.max(v);
                }
            }
        }
        report.support.push(support);
        report.allowed.push(allowed);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encodings::{Encoding, EncodingKind};
    use crate::gaussian::{
        product_state, random_gaussian_state, random_normalized_observable, Purity,
    };
    use crate::noise::{noisy_expectation, LambdaMode, PauliNoise};
    use rand::Rng;

    fn lambda(lat: Lattice, p: f64) -> LambdaMatrix {
        let e = Encoding::new(EncodingKind::Local { phi0: 1 }, lat).unwrap();
        LambdaMatrix::build(
            &e,
            &PauliNoise::depolarizing(p).unwrap(),
            LambdaMode::ExactDepolarizing,
        )
        .unwrap()
    }

    #[test]
    fn brickwork_is_deterministic_and_local() {
        let lat = Lattice::new(2, 6).unwrap();
        let a = brickwork_random_circuit(&lat, 4, 1, 42).unwrap();
        let b = brickwork_random_circuit(&lat, 4, 1, 42).unwrap();
        assert_eq!(a, b);
        for layer in &a.layers {
            let r = layer.dense();
            assert!((r.transpose() * &r - DMatrix::<f64>::identity(72, 72)).amax() < 1e-12);
            assert!((r.determinant() - 1.0).abs() < 1e-9);
        }
        let c = brickwork_random_circuit(&lat, 4, 1, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn spec_json_roundtrip() {
        let spec = CircuitSpec {
            seed: 7,
            depth: 3,
            radius: 1,
            lattice: LatticeSpec { dim: 1, size: 8 },
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"D\":1"));
        let back: CircuitSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(spec, back);
        assert_eq!(back.build().unwrap(), spec.build().unwrap());
    }

    #[test]
    fn blockwise_matches_dense() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lat = Lattice::new(1, 7).unwrap();
        let circ = brickwork_random_circuit(&lat, 2, 2, 5).unwrap();
        let o = random_normalized_observable(7, &mut rng);
        for layer in &circ.layers {
            let r = layer.dense();
            let dense = r.transpose() * o.coeff() * &r;
            assert!((layer.conjugate_observable(o.coeff()) - dense).amax() < 1e-13);
            let dense = &r * o.coeff() * r.transpose();
            assert!((layer.conjugate_state(o.coeff()) - dense).amax() < 1e-13);
        }
    }

    #[test]
    fn heisenberg_matches_schrodinger() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let lat = Lattice::new(1, 6).unwrap();
        let circ = brickwork_random_circuit(&lat, 3, 1, 9).unwrap();
        let s = random_gaussian_state(6, Purity::Mixed, &mut rng);
        let lam = lambda(lat, 0.07);
        let o = random_normalized_observable(6, &mut rng);
        let heis = noisy_circuit_expectation(&s, &circ, Some(&lam), &o).unwrap();
        let last = evolve_state(&s, &circ, Some(&lam)).unwrap().pop().unwrap();
        let schr = quadratic_expectation(&o, &CorrelationMatrix::new_unchecked(last)).unwrap();
        assert!((heis - schr).abs() < 1e-12);
    }

    #[test]
    fn identity_layer_reduces_to_measurement_noise() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let lat = Lattice::new(1, 5).unwrap();
        let circ = GaussianCircuit {
            lattice: lat,
            layers: vec![GaussianLayer::identity(&lat)],
        };
        let s = random_gaussian_state(5, Purity::Mixed, &mut rng);
        let o = random_normalized_observable(5, &mut rng);
        let lam = lambda(lat, 0.2);
        let a = noisy_circuit_expectation(&s, &circ, Some(&lam), &o).unwrap();
        assert!((a - noisy_expectation(&o, &s, &lam).unwrap()).abs() < 1e-14);
        let empty = GaussianCircuit {
            lattice: lat,
            layers: vec![],
        };
        let b = noisy_circuit_expectation(&s, &empty, Some(&lam), &o).unwrap();
        assert!((b - quadratic_expectation(&o, &s).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn zero_noise_error_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let lat = Lattice::new(2, 4).unwrap();
        let circ = brickwork_random_circuit(&lat, 3, 1, 1).unwrap();
        let s = random_gaussian_state(16, Purity::Mixed, &mut rng);
        let o = random_normalized_observable(16, &mut rng);
        let errs = circuit_error_curve(&s, &circ, &o, &[lambda(lat, 0.0)]).unwrap();
        assert!(errs[0] < 1e-14);
    }

    #[test]
    fn light_cone_radius_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let lat = Lattice::new(1, 16).unwrap();
        let occ: Vec<f64> = (0..16).map(|_| rng.gen()).collect();
        let s = product_state(&occ).unwrap();
        let circ = brickwork_random_circuit(&lat, 4, 1, 11).unwrap();
        for lam in [None, Some(lambda(lat, 0.1))] {
            let rep = lightcone_correlation_check(&s, &circ, lam.as_ref()).unwrap();
            assert!(rep.holds(), "{rep:?}");
            assert_eq!(rep.support, vec![1, 3, 5, 7]);
        }
        let bad = random_gaussian_state(16, Purity::Pure, &mut rng);
        assert!(lightcone_correlation_check(&bad, &circ, None).is_err());
    }

    #[test]
    fn matches_dense_oracle() {
        use crate::oracle::{oracle_noisy_circuit_expectation, DenseMajoranas};
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let lat = Lattice::new(1, 3).unwrap();
        let maj = DenseMajoranas::jordan_wigner(3).unwrap();
        let enc = Encoding::new(EncodingKind::Jw1d, lat).unwrap();
        for (depth, radius) in [(1, 1), (3, 1), (2, 2)] {
            let circ = brickwork_random_circuit(&lat, depth, radius, depth as u64).unwrap();
            let dense: Vec<_> = circ.layers.iter().map(GaussianLayer::dense).collect();
            let s = random_gaussian_state(3, Purity::Mixed, &mut rng);
            let o = random_normalized_observable(3, &mut rng);
            for noise in [
                PauliNoise::depolarizing(0.13).unwrap(),
                PauliNoise::new(0.2, [0.6, 0.3, 0.1]).unwrap(),
            ] {
                let lam = LambdaMatrix::build(&enc, &noise, LambdaMode::ExactGeneral).unwrap();
                let ours = noisy_circuit_expectation(&s, &circ, Some(&lam), &o).unwrap();
                let dense_val =
                    oracle_noisy_circuit_expectation(&s, &dense, Some(&noise), &o, &maj).unwrap();
                assert!((ours - dense_val).abs() < 1e-12, "{ours} vs {dense_val}");
            }
        }
    }

    #[test]
    fn explicit_chain_bound_dominates() {
        use crate::bounds::{circuit_chain_bound, DecayParams};
        use crate::synthetic::damped_random_state;
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for (dim, size) in [(1, 12), (2, 4)] {
            let lat = Lattice::new(dim, size).unwrap();
            let n = lat.num_sites();
            for seed in 0..4 {
                let circ = brickwork_random_circuit(&lat, 3, 1, seed).unwrap();
                let amp = correlation_amplification(&circ);
                assert!(amp.windows(2).all(|w| w[1] >= w[0]));
                let mu = dim as f64 + 1.5;
                let s = damped_random_state(&lat, mu, 0.5, &mut rng).unwrap();
                let params = DecayParams::new(s.k, mu, dim, 1.0).unwrap();
                for p in [1e-3, 1e-2, 1e-1] {
                    let lam = lambda(lat, p);
                    let bound = circuit_chain_bound(&params, p, 1, &amp).unwrap();
                    for _ in 0..5 {
                        let o = random_normalized_observable(n, &mut rng);
                        let err =
                            circuit_error_curve(&s.state, &circ, &o, std::slice::from_ref(&lam))
                                .unwrap()[0];
                        assert!(err <= bound, "{err} > {bound}");
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_nonlocal_gate() {
        let lat = Lattice::new(1, 8).unwrap();
        let block = GateBlock {
            majoranas: vec![0, 8],
            rotation: DMatrix::identity(2, 2),
        };
        assert!(GaussianLayer::new(&lat, vec![block], 1).is_err());
    }
}
