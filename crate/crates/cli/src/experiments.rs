//! Subcommand configurations and the computations behind them.

use std::f64::consts::PI;
use std::fmt;

use fqnoise_core::bounds::{
    circuit_bound, circuit_chain_bound, decay_bound, fermi2d_limit_error, fermi2d_on_surface_error,
    interacting_bound, DecayParams,
};
use fqnoise_core::circuits::{
    brickwork_circuit, correlation_amplification, ideal_circuit_expectation,
    noisy_circuit_expectation, GateSampling,
};
use fqnoise_core::encodings::{Encoding, EncodingKind};
use fqnoise_core::gaussian::{
    momentum_occupations, product_state, CorrelationMatrix, FermiSea, QuadraticObservable, C64,
};
use fqnoise_core::lattice::{majorana_index, Boundary, Lattice, MomentumGrid};
use fqnoise_core::noise::{
    measurement_error, noisy_momentum_occupations, LambdaMatrix, LambdaMode, PauliNoise,
};
use fqnoise_core::synthetic::power_law_state;
use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{
    check, check_p, ConfigError, ConfigResult, EncodingChoice, Mode, Settings, Sweep,
};
use crate::table::{Cell, Table};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Core(fqnoise_core::Error),
    Invariant(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Core(
                fqnoise_core::Error::InputDomain(_) | fqnoise_core::Error::Unsupported(_),
            ) => 2,
            RunError::Core(_) | RunError::Invariant(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Core(e) => write!(f, "{e}"),
            RunError::Invariant(m) => write!(f, "numerical invariant violated: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e)
    }
}

impl From<fqnoise_core::Error> for RunError {
    fn from(e: fqnoise_core::Error) -> Self {
        RunError::Core(e)
    }
}

pub type RunResult<T> = std::result::Result<T, RunError>;

fn encoding_for(choice: EncodingChoice, phi0: usize, lattice: Lattice) -> ConfigResult<Encoding> {
    Encoding::new(choice.kind(phi0), lattice)
        .map_err(|e| ConfigError::new("encoding", e.to_string()))
}

fn lambda_for(enc: &Encoding, p: f64, mode: Mode) -> RunResult<LambdaMatrix> {
    let noise = PauliNoise::depolarizing(p).map_err(|e| ConfigError::new("p", e.to_string()))?;
    Ok(LambdaMatrix::build(enc, &noise, mode.lambda_mode())?)
}

fn sorted_axis(grid: &MomentumGrid) -> Vec<[f64; 2]> {
    let mut ks: Vec<[f64; 2]> = grid.momenta.iter().map(|m| m.k).collect();
    ks.sort_by(|a, b| a[0].total_cmp(&b[0]));
    ks
}

// ---------------------------------------------------------------- fermi1d

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fermi1dConfig {
    pub p: f64,
    pub n_grid: Vec<usize>,
    /// Chain length for the momentum sweep.
    #[serde(rename = "L")]
    pub size: usize,
    pub sweep: Sweep,
    pub encoding: EncodingChoice,
    pub phi0: usize,
    pub mode: Mode,
}

impl Fermi1dConfig {
    pub const KEYS: [&'static str; 7] = ["p", "n_grid", "L", "sweep", "encoding", "phi0", "mode"];

    pub fn from_settings(s: &Settings) -> ConfigResult<Self> {
        let default_grid: Vec<usize> = (1..=10).map(|i| 20 * i).collect();
        let cfg = Self {
            p: s.get("p", 1e-2)?,
            n_grid: s.get_usize_list("n_grid", &default_grid)?,
            size: s.get("L", 100)?,
            sweep: s.get("sweep", Sweep::Size)?,
            encoding: s.get("encoding", EncodingChoice::Local)?,
            phi0: s.get("phi0", 1)?,
            mode: s.get("mode", Mode::Exact)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        check_p("p", self.p, 2.0 / 3.0)?;
        check(self.phi0 >= 1, "phi0", "phi0 must be at least 1")?;
        for &n in &self.n_grid {
            check(
                n >= 4 && n % 4 == 0,
                "n_grid",
                format!("N = {n} must be a positive multiple of 4"),
            )?;
        }
        check(
            self.size >= 4 && self.size % 4 == 0,
            "L",
            "L must be a positive multiple of 4",
        )?;
        if self.sweep == Sweep::Momentum {
            check(
                self.p > 0.0,
                "p",
                "the momentum sweep reports error / p and needs p > 0",
            )?;
        }
        let probe = Lattice::new(
            1,
            self.n_grid
                .iter()
                .copied()
                .max()
                .unwrap_or(self.size)
                .max(self.size),
        )
        .map_err(|e| ConfigError::new("n_grid", e.to_string()))?;
        encoding_for(self.encoding, self.phi0, probe)?;
        Ok(())
    }
}

/// Half-filled periodic chain: `N/2` particles, degenerate edge pair broken
/// by the fill order, so `k_F = pi/2` and `q0 = 2 pi / N` are grid momenta.
pub fn half_filled_chain(n: usize) -> RunResult<FermiSea> {
    let lat = Lattice::new(1, n)?;
    Ok(FermiSea::on_grid(
        MomentumGrid::new(lat, Boundary::Periodic)?,
        n / 2,
    )?)
}

pub fn run_fermi1d(cfg: &Fermi1dConfig) -> RunResult<Table> {
    match cfg.sweep {
        Sweep::Size => fermi1d_size_sweep(cfg),
        Sweep::Momentum => fermi1d_momentum_sweep(cfg),
    }
}

fn fermi1d_size_sweep(cfg: &Fermi1dConfig) -> RunResult<Table> {
    let rows: Vec<Vec<Cell>> = cfg
        .n_grid
        .par_iter()
        .map(|&n| -> RunResult<Vec<Cell>> {
            let sea = half_filled_chain(n)?;
            let enc = encoding_for(cfg.encoding, cfg.phi0, sea.lattice)?;
            let lam = lambda_for(&enc, cfg.p, cfg.mode)?;
            let ks = [[PI / 2.0, 0.0], [2.0 * PI / n as f64, 0.0]];
            let clean = momentum_occupations(&sea.lattice, &sea.correlations, &ks);
            let noisy = noisy_momentum_occupations(&sea.state, &sea.lattice, &lam, &ks)?;
            Ok(vec![
                n.into(),
                noisy[0].into(),
                noisy[1].into(),
                (clean[0] - noisy[0]).abs().into(),
                (clean[1] - noisy[1]).abs().into(),
            ])
        })
        .collect::<RunResult<_>>()?;
    let mut t = Table::new(vec![
        "N",
        "n_noisy_kF",
        "n_noisy_q0",
        "error_kF",
        "error_q0",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn fermi1d_momentum_sweep(cfg: &Fermi1dConfig) -> RunResult<Table> {
    let sea = half_filled_chain(cfg.size)?;
    let enc = encoding_for(cfg.encoding, cfg.phi0, sea.lattice)?;
    let lam = lambda_for(&enc, cfg.p, cfg.mode)?;
    let ks = sorted_axis(&sea.grid);
    let clean = momentum_occupations(&sea.lattice, &sea.correlations, &ks);
    let noisy = noisy_momentum_occupations(&sea.state, &sea.lattice, &lam, &ks)?;
    let mut t = Table::new(vec!["N", "k", "n_noiseless", "n_noisy", "sensitivity"]);
    for ((k, c), n) in ks.iter().zip(clean).zip(noisy) {
        t.push(vec![
            cfg.size.into(),
            k[0].into(),
            c.into(),
            n.into(),
            ((c - n).abs() / cfg.p).into(),
        ]);
    }
    Ok(t)
}

// ---------------------------------------------------------------- fermi2d

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fermi2dConfig {
    pub p: f64,
    #[serde(rename = "L")]
    pub size: usize,
    pub n_occ: Vec<usize>,
    pub encoding: EncodingChoice,
    pub phi0: usize,
    pub mode: Mode,
}

impl Fermi2dConfig {
    pub const KEYS: [&'static str; 6] = ["p", "L", "n_occ", "encoding", "phi0", "mode"];

    pub fn from_settings(s: &Settings) -> ConfigResult<Self> {
        let cfg = Self {
            p: s.get("p", 1e-2)?,
            size: s.get("L", 30)?,
            n_occ: s.get_usize_list("n_occ", &[300, 450, 700])?,
            encoding: s.get("encoding", EncodingChoice::Local)?,
            phi0: s.get("phi0", 1)?,
            mode: s.get("mode", Mode::Exact)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        check_p("p", self.p, 2.0 / 3.0)?;
        check(
            self.p > 0.0,
            "p",
            "sensitivity is error / p and needs p > 0",
        )?;
        check(self.phi0 >= 1, "phi0", "phi0 must be at least 1")?;
        check(
            self.size >= 2 && self.size % 2 == 0,
            "L",
            "L must be even and at least 2",
        )?;
        let n = self.size * self.size;
        for &occ in &self.n_occ {
            check(
                occ <= n,
                "n_occ",
                format!("n_occ = {occ} exceeds the {n} lattice sites"),
            )?;
        }
        let lat = Lattice::new(2, self.size).map_err(|e| ConfigError::new("L", e.to_string()))?;
        encoding_for(self.encoding, self.phi0, lat)?;
        Ok(())
    }
}

pub fn run_fermi2d(cfg: &Fermi2dConfig) -> RunResult<Table> {
    let lat = Lattice::new(2, cfg.size)?;
    let enc = encoding_for(cfg.encoding, cfg.phi0, lat)?;
    let lam = lambda_for(&enc, cfg.p, cfg.mode)?;
    let mut t = Table::new(vec![
        "n_occ",
        "kx",
        "ky",
        "occupied",
        "contour",
        "n_noiseless",
        "n_noisy",
        "sensitivity",
    ]);
    for &occ in &cfg.n_occ {
        let sea = FermiSea::new(lat, occ)?;
        let ks: Vec<[f64; 2]> = sea.grid.momenta.iter().map(|m| m.k).collect();
        let clean = momentum_occupations(&lat, &sea.correlations, &ks);
        let noisy = noisy_momentum_occupations(&sea.state, &lat, &lam, &ks)?;
        let contour = sea.contour();
        for i in 0..ks.len() {
            t.push(vec![
                occ.into(),
                ks[i][0].into(),
                ks[i][1].into(),
                sea.occupied[i].into(),
                contour[i].into(),
                clean[i].into(),
                noisy[i].into(),
                ((clean[i] - noisy[i]).abs() / cfg.p).into(),
            ]);
        }
    }
    Ok(t)
}

// ------------------------------------------------------- encoding-compare

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EncodingCompareConfig {
    pub p: f64,
    /// Odd side lengths for the 2D vertical-hop curves.
    #[serde(rename = "L")]
    pub sizes: Vec<usize>,
    /// Mode counts (powers of two) for the Bravyi-Kitaev curve.
    pub bk_n: Vec<usize>,
    pub phi0: usize,
}

impl EncodingCompareConfig {
    pub const KEYS: [&'static str; 4] = ["p", "L", "bk_n", "phi0"];

    pub fn from_settings(s: &Settings) -> ConfigResult<Self> {
        let cfg = Self {
            p: s.get("p", 1e-2)?,
            sizes: s.get_usize_list("L", &[3, 5, 7, 9, 11, 13, 15])?,
            bk_n: s.get_usize_list("bk_n", &[2, 4, 8, 16, 32, 64, 128, 256])?,
            phi0: s.get("phi0", 1)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        check_p("p", self.p, 2.0 / 3.0)?;
        check(self.phi0 >= 1, "phi0", "phi0 must be at least 1")?;
        for &l in &self.sizes {
            check(
                l >= 3 && l % 2 == 1,
                "L",
                format!("L = {l} must be odd and at least 3"),
            )?;
        }
        for &n in &self.bk_n {
            check(
                n >= 2 && n.is_power_of_two(),
                "bk_n",
                format!("N = {n} must be a power of two"),
            )?;
        }
        Ok(())
    }
}

/// Vertical neighbours in the centre column, where the snake string spans
/// exactly `L + 1` qubits. Returns the two Majorana indices.
pub fn centre_vertical_hop(lattice: &Lattice) -> RunResult<(usize, usize)> {
    let l = lattice.size();
    let c = (l - 1) / 2;
    let a = lattice.site_index(&[c, c])?;
    let b = lattice.site_index(&[c, c + 1])?;
    Ok((majorana_index(a, 1), majorana_index(b, 2)))
}

/// Pure state pairing `a` with `b` (`Gamma_ab = 1`) and the two partner
/// Majoranas of the same sites with each other; vacuum elsewhere.
pub fn dimer_state(n_modes: usize, a: usize, b: usize) -> RunResult<CorrelationMatrix> {
    let mut g = CorrelationMatrix::vacuum(n_modes).into_inner();
    let partner = |x: usize| x ^ 1;
    let (pa, pb) = (partner(a), partner(b));
    for &i in &[a, b, pa, pb] {
        for j in 0..2 * n_modes {
            g[(i, j)] = 0.0;
            g[(j, i)] = 0.0;
        }
    }
    g[(a, b)] = 1.0;
    g[(b, a)] = -1.0;
    g[(pa, pb)] = 1.0;
    g[(pb, pa)] = -1.0;
    Ok(CorrelationMatrix::new(g)?)
}

fn number_operator(n_modes: usize, j: usize) -> RunResult<QuadraticObservable> {
    let mut h = DMatrix::<C64>::zeros(n_modes, n_modes);
    h[(j, j)] = C64::new(1.0, 0.0);
    Ok(QuadraticObservable::from_hopping(&h)?)
}

pub fn run_encoding_compare(cfg: &EncodingCompareConfig) -> RunResult<Table> {
    let noise =
        PauliNoise::depolarizing(cfg.p).map_err(|e| ConfigError::new("p", e.to_string()))?;
    let mut t = Table::new(vec![
        "encoding",
        "L",
        "N",
        "observable",
        "weight",
        "error",
        "closed_form",
    ]);
    let hop_rows: Vec<Vec<Vec<Cell>>> = cfg
        .sizes
        .par_iter()
        .map(|&l| -> RunResult<Vec<Vec<Cell>>> {
            let lat = Lattice::new(2, l)?;
            let (a, b) = centre_vertical_hop(&lat)?;
            let state = dimer_state(lat.num_sites(), a, b)?;
            let obs = QuadraticObservable::bilinear(lat.num_sites(), a, b)?;
            let mut out = Vec::new();
            for kind in [
                EncodingKind::Local { phi0: cfg.phi0 },
                EncodingKind::Jw2dSnake,
            ] {
                let enc = Encoding::new(kind, lat)?;
                let lam = LambdaMatrix::build(&enc, &noise, LambdaMode::ExactDepolarizing)?;
                let w = enc.bilinear_weight(a, b)?;
                let expected_w = match kind {
                    EncodingKind::Jw2dSnake => l + 1,
                    _ => cfg.phi0 + 1,
                };
                if w != expected_w {
                    return Err(RunError::Invariant(format!(
                        "vertical hop weight {w}, expected {expected_w}"
                    )));
                }
                let name = match kind {
                    EncodingKind::Jw2dSnake => "jw2d_snake".to_string(),
                    _ => format!("local{}", cfg.phi0),
                };
                out.push(vec![
                    name.into(),
                    l.into(),
                    lat.num_sites().into(),
                    "vertical_hop".into(),
                    w.into(),
                    measurement_error(&obs, &state, &lam)?.into(),
                    (1.0 - (1.0 - cfg.p).powi(w as i32)).into(),
                ]);
            }
            Ok(out)
        })
        .collect::<RunResult<_>>()?;
    hop_rows.into_iter().flatten().for_each(|r| t.push(r));
    let bk_rows: Vec<Vec<Cell>> = cfg
        .bk_n
        .par_iter()
        .map(|&n| -> RunResult<Vec<Cell>> {
            let lat = Lattice::new(1, n)?;
            let enc = Encoding::new(EncodingKind::BravyiKitaev, lat)?;
            let (j, w) = (0..n)
                .map(|j| enc.bilinear_weight(2 * j, 2 * j + 1).map(|w| (j, w)))
                .collect::<fqnoise_core::Result<Vec<_>>>()?
                .into_iter()
                .max_by_key(|&(j, w)| (w, std::cmp::Reverse(j)))
                .expect("at least two modes");
            let mut occ = vec![0.0; n];
            occ[j] = 1.0;
            let state = product_state(&occ)?;
            let obs = number_operator(n, j)?;
            let lam = LambdaMatrix::build(&enc, &noise, LambdaMode::ExactDepolarizing)?;
            Ok(vec![
                "bravyi_kitaev".into(),
                n.into(),
                n.into(),
                format!("number_{j}").into(),
                w.into(),
                measurement_error(&obs, &state, &lam)?.into(),
                (0.5 - 0.5 * (1.0 - cfg.p).powi(w as i32)).into(),
            ])
        })
        .collect::<RunResult<_>>()?;
    bk_rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

// ---------------------------------------------------------------- circuit

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitConfig {
    pub dim: usize,
    #[serde(rename = "L")]
    pub sizes: Vec<usize>,
    pub depth: Vec<usize>,
    pub p: Vec<f64>,
    pub radius: usize,
    pub seed: u64,
    pub gates: GateSampling,
    pub mu: f64,
    pub fill: f64,
    pub phi0: usize,
    pub mode: Mode,
}

impl CircuitConfig {
    pub const KEYS: [&'static str; 11] = [
        "dim", "L", "depth", "p", "radius", "seed", "gates", "mu", "fill", "phi0", "mode",
    ];

    pub fn from_settings(s: &Settings) -> ConfigResult<Self> {
        let dim: usize = s.get("dim", 1)?;
        let default_sizes: &[usize] = if dim == 2 { &[8, 16] } else { &[64, 256] };
        let cfg = Self {
            dim,
            sizes: s.get_usize_list("L", default_sizes)?,
            depth: s.get_usize_list("depth", &[3])?,
            p: s.get_list("p", &[1e-2])?,
            radius: s.get("radius", 1)?,
            seed: s.get("seed", 7)?,
            gates: parse_gates(s)?,
            mu: s.get("mu", dim as f64 + 2.0)?,
            fill: s.get("fill", 0.45)?,
            phi0: s.get("phi0", 1)?,
            mode: s.get("mode", Mode::Exact)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        check((1..=2).contains(&self.dim), "dim", "dim must be 1 or 2")?;
        for &l in &self.sizes {
            check(l >= 2, "L", format!("L = {l} must be at least 2"))?;
        }
        for &p in &self.p {
            check_p("p", p, 2.0 / 3.0)?;
        }
        check(self.radius >= 1, "radius", "gate radius must be at least 1")?;
        check(
            self.mu > self.dim as f64,
            "mu",
            format!("mu must exceed dim = {}", self.dim),
        )?;
        check(
            self.fill > 0.0 && self.fill <= 0.5,
            "fill",
            "fill must lie in (0, 1/2]",
        )?;
        check(self.phi0 >= 1, "phi0", "phi0 must be at least 1")?;
        Ok(())
    }
}

fn parse_gates(s: &Settings) -> ConfigResult<GateSampling> {
    match s.raw("gates").map(str::trim) {
        None | Some("per_layer") | Some("per-layer") => Ok(GateSampling::PerLayer),
        Some("per_gate") | Some("per-gate") => Ok(GateSampling::PerGate),
        Some(other) => Err(ConfigError::new(
            "gates",
            format!("expected per_layer or per_gate, got `{other}`"),
        )),
    }
}

/// `(1 / (N D)) sum_{x, axis} (c^dag_x c_{x+e} + h.c.) / 2`
pub fn mean_hopping(lattice: &Lattice) -> RunResult<QuadraticObservable> {
    let n = lattice.num_sites();
    let l = lattice.size();
    let w = 0.5 / (n * lattice.dim()) as f64;
    let mut h = DMatrix::<C64>::zeros(n, n);
    for x in 0..n {
        let r = lattice.coords(x);
        for axis in 0..lattice.dim() {
            let mut r2 = [r[0], r[1]];
            r2[axis] = (r2[axis] + 1) % l;
            let y = lattice.site_index(&r2[..lattice.dim()])?;
            h[(x, y)] += C64::new(w, 0.0);
            h[(y, x)] += C64::new(w, 0.0);
        }
    }
    Ok(QuadraticObservable::from_hopping(&h)?)
}

pub fn run_circuit(cfg: &CircuitConfig) -> RunResult<Table> {
    let mut cases = Vec::new();
    for &l in &cfg.sizes {
        for &depth in &cfg.depth {
            for &p in &cfg.p {
                cases.push((l, depth, p));
            }
        }
    }
    let rows: Vec<Vec<Cell>> = cases
        .par_iter()
        .map(|&(l, depth, p)| -> RunResult<Vec<Cell>> {
            let lat = Lattice::new(cfg.dim, l)?;
            let init = power_law_state(&lat, cfg.mu, cfg.fill)?;
            let circ = brickwork_circuit(&lat, depth, cfg.radius, cfg.seed, cfg.gates)?;
            let enc = encoding_for(EncodingChoice::Local, cfg.phi0, lat)?;
            let lam = lambda_for(&enc, p, cfg.mode)?;
            let obs = mean_hopping(&lat)?;
            let ideal = ideal_circuit_expectation(&init.state, &circ, &obs)?;
            let noisy = noisy_circuit_expectation(&init.state, &circ, Some(&lam), &obs)?;
            let error = (ideal - noisy).abs();
            let params = DecayParams::new(init.k, cfg.mu, cfg.dim, cfg.phi0 as f64)?;
            let amp = correlation_amplification(&circ);
            let bound = obs.trace_norm() * circuit_chain_bound(&params, p, cfg.radius, &amp)?;
            let shape = circuit_bound(&params, p, depth)?.shape;
            if !(error <= 2.0) {
                return Err(RunError::Invariant(format!(
                    "circuit error {error} exceeds 2"
                )));
            }
            if error > bound * (1.0 + 1e-9) {
                return Err(RunError::Invariant(format!(
                    "circuit error {error} exceeds the explicit bound {bound}"
                )));
            }
            Ok(vec![
                cfg.dim.into(),
                l.into(),
                lat.num_sites().into(),
                depth.into(),
                p.into(),
                cfg.seed.into(),
                ideal.into(),
                noisy.into(),
                error.into(),
                bound.into(),
                shape.into(),
            ])
        })
        .collect::<RunResult<_>>()?;
    let mut t = Table::new(vec![
        "D",
        "L",
        "N",
        "depth",
        "p",
        "seed",
        "ideal",
        "noisy",
        "error",
        "bound_explicit",
        "circuit_shape",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

// ----------------------------------------------------------------- bounds

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsConfig {
    #[serde(rename = "K")]
    pub k: f64,
    pub mu: f64,
    pub dim: usize,
    pub phi0: f64,
    pub p: Vec<f64>,
    pub depth: Vec<usize>,
    pub k_f: f64,
    pub delta: Vec<f64>,
}

impl BoundsConfig {
    pub const KEYS: [&'static str; 8] = ["K", "mu", "dim", "phi0", "p", "depth", "k_f", "delta"];

    pub fn from_settings(s: &Settings) -> ConfigResult<Self> {
        let dim: usize = s.get("dim", 1)?;
        let cfg = Self {
            k: s.get("K", 1.0)?,
            mu: s.get("mu", dim as f64 + 2.0)?,
            dim,
            phi0: s.get("phi0", 1.0)?,
            p: s.get_list("p", &[1e-4, 1e-3, 1e-2, 1e-1])?,
            depth: s.get_usize_list("depth", &[1, 2, 4, 8])?,
            k_f: s.get("k_f", PI / 4.0)?,
            delta: s.get_list("delta", &[0.25, 0.5, 1.0])?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> ConfigResult<()> {
        check(
            self.k > 0.0 && self.k.is_finite(),
            "K",
            "K must be positive",
        )?;
        check(self.dim >= 1, "dim", "dim must be at least 1")?;
        check(
            self.mu > self.dim as f64,
            "mu",
            format!("bounds diverge for mu <= dim = {}", self.dim),
        )?;
        check(self.phi0 >= 1.0, "phi0", "phi0 must be at least 1")?;
        for &p in &self.p {
            check(
                p > 0.0 && p <= 2.0 / 3.0,
                "p",
                format!("p = {p} must lie in (0, 2/3]"),
            )?;
        }
        check(self.k_f > 0.0, "k_f", "k_f must be positive")?;
        for &d in &self.delta {
            check(
                d != 0.0 && d.is_finite(),
                "delta",
                "delta must be non-zero (use the on-surface row)",
            )?;
        }
        Ok(())
    }
}

pub fn run_bounds(cfg: &BoundsConfig) -> RunResult<Table> {
    let params = DecayParams::new(cfg.k, cfg.mu, cfg.dim, cfg.phi0)?;
    let mut t = Table::new(vec!["quantity", "p", "depth", "delta", "value", "regime"]);
    let nan = f64::NAN;
    for &p in &cfg.p {
        let r = decay_bound(&params, p)?;
        t.push(vec![
            "decay".into(),
            p.into(),
            0usize.into(),
            nan.into(),
            r.value.into(),
            r.regime.label().into(),
        ]);
        for &d in &cfg.depth {
            let b3 = circuit_bound(&params, p, d)?;
            t.push(vec![
                "circuit".into(),
                p.into(),
                d.into(),
                nan.into(),
                b3.value.into(),
                b3.regime.label().into(),
            ]);
            let b4 = interacting_bound(&params, p, d)?;
            t.push(vec![
                "interacting".into(),
                p.into(),
                d.into(),
                nan.into(),
                b4.value.into(),
                b4.regime.label().into(),
            ]);
        }
        t.push(vec![
            "fermi2d_on_surface".into(),
            p.into(),
            0usize.into(),
            0.0.into(),
            fermi2d_on_surface_error(p, cfg.k_f)?.into(),
            "".into(),
        ]);
        for &delta in &cfg.delta {
            t.push(vec![
                "fermi2d_off_surface".into(),
                p.into(),
                0usize.into(),
                delta.into(),
                fermi2d_limit_error(p, cfg.k_f, delta)?.into(),
                "".into(),
            ]);
        }
    }
    Ok(t)
}
