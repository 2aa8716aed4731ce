//! Periodic hypercubic lattices in one and two dimensions.
//!
//! Sites are flattened row-major, `index = x + L * y`. Each site carries two
//! Majorana modes, `a = 2 * site + (flavor - 1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    size: usize,
}

impl Lattice {
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return domain(format!("lattice dimension must be 1 or 2, got {dim}"));
        }
        if size == 0 {
            return domain("lattice size must be positive");
        }
        Ok(Self { dim, size })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn num_sites(&self) -> usize {
        self.size.pow(self.dim as u32)
    }

    pub fn num_majoranas(&self) -> usize {
        2 * self.num_sites()
    }

    pub fn coords(&self, site: usize) -> [usize; 2] {
        [site % self.size, site / self.size]
    }

    pub fn site_index(&self, coords: &[usize]) -> Result<usize> {
        self.check_coords(coords)?;
        Ok(coords.iter().rev().fold(0, |acc, &c| acc * self.size + c))
    }

    fn check_coords(&self, coords: &[usize]) -> Result<()> {
        if coords.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: coords.len(),
            });
        }
        if let Some(c) = coords.iter().find(|&&c| c >= self.size) {
            return domain(format!(
                "coordinate {c} outside lattice of size {}",
                self.size
            ));
        }
        Ok(())
    }

    /// L1 distance on the torus, `sum_i min(|r_i - r'_i|, L - |r_i - r'_i|)`.
    pub fn torus_distance(&self, r1: &[usize], r2: &[usize]) -> Result<usize> {
        self.check_coords(r1)?;
        self.check_coords(r2)?;
        Ok(r1
            .iter()
            .zip(r2)
            .map(|(&a, &b)| self.axis_distance(a, b))
            .sum())
    }

    fn axis_distance(&self, a: usize, b: usize) -> usize {
        let d = a.abs_diff(b);
        d.min(self.size - d)
    }

    /// Torus distance between flattened sites. Panics on out-of-range sites.
    pub fn site_distance(&self, i: usize, j: usize) -> usize {
        let n = self.num_sites();
        assert!(i < n && j < n, "site index out of range");
        let (a, b) = (self.coords(i), self.coords(j));
        (0..self.dim).map(|k| self.axis_distance(a[k], b[k])).sum()
    }

    /// Signed minimal displacement `r' - r` per axis, in `[-L/2, L/2]`.
    pub fn displacement(&self, i: usize, j: usize) -> [i64; 2] {
        let (a, b) = (self.coords(i), self.coords(j));
        let l = self.size as i64;
        let mut out = [0i64; 2];
        for k in 0..self.dim {
            let mut d = (b[k] as i64 - a[k] as i64).rem_euclid(l);
            if d > l / 2 {
                d -= l;
            }
            out[k] = d;
        }
        out
    }

    /// Boustrophedon order used by the two-dimensional Jordan-Wigner string.
    pub fn snake_index(&self, coords: &[usize]) -> Result<usize> {
        self.check_coords(coords)?;
        Ok(match self.dim {
            1 => coords[0],
            _ => {
                let (x, y) = (coords[0], coords[1]);
                let col = if y % 2 == 0 { x } else { self.size - 1 - x };
                y * self.size + col
            }
        })
    }

    pub fn snake_index_of_site(&self, site: usize) -> usize {
        let [x, y] = self.coords(site);
        if self.dim == 1 {
            x
        } else {
            y * self.size + if y % 2 == 0 { x } else { self.size - 1 - x }
        }
    }
}

pub fn majorana_index(site: usize, flavor: u8) -> usize {
    debug_assert!(flavor == 1 || flavor == 2);
    2 * site + (flavor as usize - 1)
}

pub fn majorana_site(a: usize) -> usize {
    a / 2
}

pub fn majorana_flavor(a: usize) -> u8 {
    (a % 2) as u8 + 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Periodic,
    Antiperiodic,
}

impl Boundary {
    /// Closed-shell convention: odd fillings use periodic momenta, even
    /// fillings antiperiodic.
    pub fn for_occupation(n_occ: usize) -> Self {
        if n_occ % 2 == 1 {
            Boundary::Periodic
        } else {
            Boundary::Antiperiodic
        }
    }
}

/// Grid momentum `k = (2 pi / L) m` with `m` stored as the integer `2m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Momentum {
    pub twice_m: [i64; 2],
    pub k: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    pub lattice: Lattice,
    pub boundary: Boundary,
    pub momenta: Vec<Momentum>,
}

impl MomentumGrid {
    pub fn new(lattice: Lattice, boundary: Boundary) -> Result<Self> {
        let l = lattice.size();
        if l % 2 == 1 {
            return Err(Error::Unsupported(format!(
                "momentum grids need even L, got {l}"
            )));
        }
        let li = l as i64;
        let axis: Vec<i64> = match boundary {
            Boundary::Periodic => (-li / 2..li / 2).map(|m| 2 * m).collect(),
            Boundary::Antiperiodic => (-li / 2..li / 2).map(|m| 2 * m + 1).collect(),
        };
        let to_k = |t: i64| PI * t as f64 / l as f64;
        let momenta = match lattice.dim() {
            1 => axis
                .iter()
                .map(|&t| Momentum {
                    twice_m: [t, 0],
                    k: [to_k(t), 0.0],
                })
                .collect(),
            _ => axis
                .iter()
                .flat_map(|&ty| {
                    axis.iter().map(move |&tx| Momentum {
                        twice_m: [tx, ty],
                        k: [to_k(tx), to_k(ty)],
                    })
                })
                .collect(),
        };
        Ok(Self {
            lattice,
            boundary,
            momenta,
        })
    }

    pub fn for_occupation(lattice: Lattice, n_occ: usize) -> Result<Self> {
        Self::new(lattice, Boundary::for_occupation(n_occ))
    }

    pub fn len(&self) -> usize {
        self.momenta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.momenta.is_empty()
    }

    /// Grid spacing `2 pi / L`.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.lattice.size() as f64
    }

    /// Index of a grid point from its `2m` components.
    pub fn index_of(&self, twice_m: [i64; 2]) -> Option<usize> {
        let l = self.lattice.size() as i64;
        let offset = match self.boundary {
            Boundary::Periodic => 0,
            Boundary::Antiperiodic => 1,
        };
        let pos = |t: i64| -> Option<i64> {
            let u = t - offset + l;
            (u % 2 == 0 && (0..2 * l).contains(&u)).then_some(u / 2)
        };
        let ix = pos(twice_m[0])?;
        match self.lattice.dim() {
            1 => (twice_m[1] == 0).then_some(ix as usize),
            _ => Some((pos(twice_m[1])? * l + ix) as usize),
        }
    }

    /// Neighbouring grid points along each axis, with wrap-around.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let l = self.lattice.size() as i64;
        let t = self.momenta[idx].twice_m;
        let wrap = |v: i64| -> i64 {
            let mut v = v;
            if v >= l {
                v -= 2 * l;
            }
            if v < -l {
                v += 2 * l;
            }
            v
        };
        let mut out = Vec::with_capacity(4);
        for axis in 0..self.lattice.dim() {
            for step in [-2, 2] {
                let mut n = t;
                n[axis] = wrap(n[axis] + step);
                if let Some(j) = self.index_of(n) {
                    out.push(j);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        let l = Lattice::new(1, 10).unwrap();
        assert_eq!(l.torus_distance(&[0], &[9]).unwrap(), 1);
        let l = Lattice::new(2, 4).unwrap();
        assert_eq!(l.torus_distance(&[0, 0], &[2, 3]).unwrap(), 3);
        assert!(l.torus_distance(&[0], &[1]).is_err());
        assert!(l.torus_distance(&[0, 4], &[1, 1]).is_err());
    }

    #[test]
    fn snake_examples() {
        let l = Lattice::new(2, 4).unwrap();
        assert_eq!(l.snake_index(&[3, 0]).unwrap(), 3);
        assert_eq!(l.snake_index(&[3, 1]).unwrap(), 4);
        assert_eq!(l.snake_index(&[0, 1]).unwrap(), 7);
        for s in 0..16 {
            assert_eq!(
                l.snake_index_of_site(s),
                l.snake_index(&l.coords(s)).unwrap()
            );
        }
    }

    #[test]
    fn grid_examples() {
        let g = MomentumGrid::for_occupation(Lattice::new(1, 8).unwrap(), 3).unwrap();
        assert_eq!(g.boundary, Boundary::Periodic);
        let ms: Vec<i64> = g.momenta.iter().map(|m| m.twice_m[0] / 2).collect();
        assert_eq!(ms, vec![-4, -3, -2, -1, 0, 1, 2, 3]);
        let g = MomentumGrid::for_occupation(Lattice::new(1, 8).unwrap(), 4).unwrap();
        assert_eq!(g.boundary, Boundary::Antiperiodic);
        assert!((g.momenta[0].k[0] + 7.0 * PI / 8.0).abs() < 1e-15);
        assert!(MomentumGrid::new(Lattice::new(1, 7).unwrap(), Boundary::Periodic).is_err());
        let g = MomentumGrid::new(Lattice::new(2, 6).unwrap(), Boundary::Antiperiodic).unwrap();
        for (i, m) in g.momenta.iter().enumerate() {
            assert_eq!(g.index_of(m.twice_m), Some(i));
            assert_eq!(g.neighbors(i).len(), 4);
        }
    }

    proptest! {
        #[test]
        fn distance_is_a_metric(l in 1usize..9, dim in 1usize..3, a in 0usize..81, b in 0usize..81, c in 0usize..81) {
            let lat = Lattice::new(dim, l).unwrap();
            let n = lat.num_sites();
            let (a, b, c) = (a % n, b % n, c % n);
            let (dab, dba) = (lat.site_distance(a, b), lat.site_distance(b, a));
            prop_assert_eq!(dab, dba);
            prop_assert_eq!(lat.site_distance(a, a), 0);
            prop_assert!(lat.site_distance(a, c) <= dab + lat.site_distance(b, c));
            prop_assert!(dab <= dim * (l / 2));
            let (ra, rb) = (lat.coords(a), lat.coords(b));
            prop_assert_eq!(lat.torus_distance(&ra[..dim], &rb[..dim]).unwrap(), dab);
        }

        #[test]
        fn site_index_roundtrip(l in 1usize..9, dim in 1usize..3, s in 0usize..81) {
            let lat = Lattice::new(dim, l).unwrap();
            let s = s % lat.num_sites();
            prop_assert_eq!(lat.site_index(&lat.coords(s)[..dim]).unwrap(), s);
        }

        #[test]
        fn snake_is_bijection(l in 1usize..10) {
            let lat = Lattice::new(2, l).unwrap();
            let mut seen = vec![false; l * l];
            for s in 0..l * l {
                let k = lat.snake_index_of_site(s);
                prop_assert!(!seen[k]);
                seen[k] = true;
            }
        }

        #[test]
        fn grid_is_closed_under_negation(half in 1usize..8, dim in 1usize..3, periodic in any::<bool>()) {
            let lat = Lattice::new(dim, 2 * half).unwrap();
            let b = if periodic { Boundary::Periodic } else { Boundary::Antiperiodic };
            let g = MomentumGrid::new(lat, b).unwrap();
            prop_assert_eq!(g.len(), lat.num_sites());
            let l = lat.size() as i64;
            for m in &g.momenta {
                let mut neg = [-m.twice_m[0], -m.twice_m[1]];
                for t in neg.iter_mut().take(dim) {
                    if *t >= l { *t -= 2 * l; }
                }
                prop_assert!(g.index_of(neg).is_some());
                prop_assert!(m.k.iter().all(|k| (-PI..PI).contains(k)));
            }
        }
    }
}
