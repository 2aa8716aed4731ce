//! Fermion-to-qubit encodings, reduced to what noise propagation needs: the
//! Pauli weight of each Majorana bilinear and, where the encoding fixes the
//! Pauli string, its X/Y/Z composition.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lattice::{majorana_flavor, majorana_site, Lattice};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EncodingKind {
    /// Locality-preserving model: weight `phi0 + d(r, r')`.
    Local {
        phi0: usize,
    },
    Jw1d,
    Jw2dSnake,
    BravyiKitaev,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StringComposition {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl StringComposition {
    pub fn weight(&self) -> usize {
        self.x + self.y + self.z
    }
}

#[derive(Debug, Clone)]
pub struct Encoding {
    kind: EncodingKind,
    lattice: Lattice,
    bk: Option<Vec<PauliString>>,
}

impl Encoding {
    pub fn new(kind: EncodingKind, lattice: Lattice) -> Result<Self> {
        let n = lattice.num_sites();
        let bk = match kind {
            EncodingKind::Local { phi0 } if phi0 == 0 => {
                return domain("local encoding needs phi0 >= 1");
            }
            EncodingKind::Jw1d if lattice.dim() != 1 => {
                return Err(Error::Unsupported(
                    "jw1d needs a one-dimensional lattice".into(),
                ));
            }
            EncodingKind::Jw2dSnake if lattice.dim() != 2 => {
                return Err(Error::Unsupported(
                    "jw2d_snake needs a two-dimensional lattice".into(),
                ));
            }
            EncodingKind::BravyiKitaev => {
                if !n.is_power_of_two() {
                    return Err(Error::Unsupported(format!(
                        "Bravyi-Kitaev needs a power-of-two number of modes, got {n}"
                    )));
                }
                Some(bk_majoranas(n))
            }
            _ => None,
        };
        Ok(Self { kind, lattice, bk })
    }

    pub fn kind(&self) -> EncodingKind {
        self.kind
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn num_majoranas(&self) -> usize {
        self.lattice.num_majoranas()
    }

    fn check(&self, a: usize, b: usize) -> Result<()> {
        let m = self.num_majoranas();
        if a >= m || b >= m {
            return domain(format!(
                "Majorana index out of range ({a}, {b}) for {m} modes"
            ));
        }
        Ok(())
    }

    /// Number of qubits on which the encoded `g_a g_b` acts non-trivially.
    pub fn bilinear_weight(&self, a: usize, b: usize) -> Result<usize> {
        self.check(a, b)?;
        Ok(self.weight_unchecked(a, b))
    }

    pub(crate) fn weight_unchecked(&self, a: usize, b: usize) -> usize {
        if a == b {
            return 0;
        }
        let (x, y) = (majorana_site(a), majorana_site(b));
        match self.kind {
            EncodingKind::Local { phi0 } => phi0 + self.lattice.site_distance(x, y),
            EncodingKind::Jw1d => 1 + x.abs_diff(y),
            EncodingKind::Jw2dSnake => {
                1 + self
                    .lattice
                    .snake_index_of_site(x)
                    .abs_diff(self.lattice.snake_index_of_site(y))
            }
            EncodingKind::BravyiKitaev => {
                let strings = self.bk.as_ref().expect("built in constructor");
                strings[a].product_weight(&strings[b])
            }
        }
    }

    /// X/Y/Z content of the encoded bilinear. Not defined for the local model,
    /// which only fixes weights.
    pub fn string_composition(&self, a: usize, b: usize) -> Result<StringComposition> {
        self.check(a, b)?;
        if a == b {
            return Ok(StringComposition::default());
        }
        match self.kind {
            EncodingKind::Local { .. } => Err(Error::Unsupported(
                "the local encoding model has no fixed Pauli strings".into(),
            )),
            EncodingKind::Jw1d => Ok(jw_composition(a, b, |s| s)),
            EncodingKind::Jw2dSnake => Ok(jw_composition(a, b, |s| {
                self.lattice.snake_index_of_site(s)
            })),
            EncodingKind::BravyiKitaev => {
                let strings = self.bk.as_ref().expect("built in constructor");
                Ok(strings[a].product(&strings[b]).composition())
            }
        }
    }

    pub fn max_weight(&self) -> usize {
        let m = self.num_majoranas();
        (0..m)
            .flat_map(|a| (a + 1..m).map(move |b| (a, b)))
            .map(|(a, b)| self.weight_unchecked(a, b))
            .max()
            .unwrap_or(0)
    }
}

fn jw_composition(a: usize, b: usize, order: impl Fn(usize) -> usize) -> StringComposition {
    let (pa, pb) = (order(majorana_site(a)), order(majorana_site(b)));
    if pa == pb {
        return StringComposition { x: 0, y: 0, z: 1 };
    }
    let (lo, hi) = if pa < pb { (a, b) } else { (b, a) };
    let mut c = StringComposition {
        x: 0,
        y: 0,
        z: pa.abs_diff(pb) - 1,
    };
    // lower end: X.Z ~ Y, Y.Z ~ X; upper end keeps its own Pauli
    if majorana_flavor(lo) == 1 {
        c.y += 1;
    } else {
        c.x += 1;
    }
    if majorana_flavor(hi) == 1 {
        c.x += 1;
    } else {
        c.y += 1;
    }
    c
}

/// Pauli string in binary symplectic form, phases dropped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PauliString {
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl PauliString {
    fn identity(n: usize) -> Self {
        Self {
            x: vec![false; n],
            z: vec![false; n],
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        Self {
            x: self.x.iter().zip(&other.x).map(|(a, b)| a ^ b).collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a ^ b).collect(),
        }
    }

    fn product_weight(&self, other: &Self) -> usize {
        (0..self.x.len())
            .filter(|&q| (self.x[q] ^ other.x[q]) || (self.z[q] ^ other.z[q]))
            .count()
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .filter(|(a, b)| **a || **b)
            .count()
    }

    pub fn composition(&self) -> StringComposition {
        let mut c = StringComposition::default();
        for (&x, &z) in self.x.iter().zip(&self.z) {
            match (x, z) {
                (true, false) => c.x += 1,
                (true, true) => c.y += 1,
                (false, true) => c.z += 1,
                _ => {}
            }
        }
        c
    }
}

fn lowbit(i: usize) -> usize {
    i & i.wrapping_neg()
}

/// Fenwick-tree sets of the Bravyi-Kitaev transform for mode `j` (0-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BkSets {
    pub update: Vec<usize>,
    pub parity: Vec<usize>,
    pub flip: Vec<usize>,
}

pub fn bk_sets(j: usize, n: usize) -> BkSets {
    let mut update = Vec::new();
    let mut i = j + 1;
    i += lowbit(i);
    while i <= n {
        update.push(i - 1);
        i += lowbit(i);
    }
    let mut parity = Vec::new();
    let mut k = j;
    while k > 0 {
        parity.push(k - 1);
        k -= lowbit(k);
    }
    let mut flip = Vec::new();
    let i = j + 1;
    let mut step = lowbit(i) >> 1;
    while step > 0 {
        flip.push(i - step - 1);
        step >>= 1;
    }
    BkSets {
        update,
        parity,
        flip,
    }
}

/// Weight of the encoded number operator `n_i`: `1 + |F(i)|`.
pub fn bk_number_operator_weight(i: usize, n: usize) -> Result<usize> {
    if !n.is_power_of_two() || i >= n {
        return domain(format!(
            "need i < n with n a power of two, got i = {i}, n = {n}"
        ));
    }
    Ok(1 + (i + 1).trailing_zeros() as usize)
}

fn bk_majoranas(n: usize) -> Vec<PauliString> {
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let s = bk_sets(j, n);
        let mut g1 = PauliString::identity(n);
        g1.x[j] = true;
        for &u in &s.update {
            g1.x[u] = true;
        }
        for &p in &s.parity {
            g1.z[p] = true;
        }
        let mut g2 = PauliString::identity(n);
        g2.x[j] = true;
        g2.z[j] = true;
        for &u in &s.update {
            g2.x[u] = true;
        }
        for &p in &s.parity {
            if !s.flip.contains(&p) {
                g2.z[p] = true;
            }
        }
        out.push(g1);
        out.push(g2);
    }
    out
}

/// Bravyi-Kitaev basis-change matrix over GF(2), `b = beta n`, built by the
/// recursion `beta_{2m} = [[beta_m, 0], [A, beta_m]]` with `A` zero except a
/// bottom row of ones.
pub fn bk_beta_matrix(n: usize) -> Result<Vec<Vec<bool>>> {
    if !n.is_power_of_two() {
        return domain(format!("beta matrix needs a power of two, got {n}"));
    }
    let mut beta = vec![vec![true]];
    let mut m = 1;
    while m < n {
        let mut next = vec![vec![false; 2 * m]; 2 * m];
        for i in 0..m {
            for j in 0..m {
                next[i][j] = beta[i][j];
                next[m + i][m + j] = beta[i][j];
            }
        }
        for j in 0..m {
            next[2 * m - 1][j] = true;
        }
        beta = next;
        m *= 2;
    }
    Ok(beta)
}

pub fn gf2_inverse(m: &[Vec<bool>]) -> Result<Vec<Vec<bool>>> {
    let n = m.len();
    let mut a: Vec<Vec<bool>> = m.to_vec();
    let mut inv: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| a[r][col])
            .ok_or_else(|| Error::Numerical("singular GF(2) matrix".into()))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        for r in 0..n {
            if r != col && a[r][col] {
                for c in 0..n {
                    a[r][c] ^= a[col][c];
                    inv[r][c] ^= inv[col][c];
                }
            }
        }
    }
    Ok(inv)
}

/// Bravyi-Kitaev Majoranas obtained from Jordan-Wigner ones through the
/// symplectic action of `beta`: `x -> beta x`, `z -> beta^{-T} z`.
pub fn bk_majoranas_from_beta(n: usize) -> Result<Vec<PauliString>> {
    let beta = bk_beta_matrix(n)?;
    let inv = gf2_inverse(&beta)?;
    let apply = |m: &dyn Fn(usize, usize) -> bool, v: &[bool]| -> Vec<bool> {
        (0..n)
            .map(|i| (0..n).filter(|&j| m(i, j) && v[j]).count() % 2 == 1)
            .collect()
    };
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        let mut x = vec![false; n];
        x[j] = true;
        let z1: Vec<bool> = (0..n).map(|k| k < j).collect();
        let z2: Vec<bool> = (0..n).map(|k| k <= j).collect();
        let bx = apply(&|i, k| beta[i][k], &x);
        let binv_t = |i: usize, k: usize| inv[k][i];
        out.push(PauliString {
            x: bx.clone(),
            z: apply(&binv_t, &z1),
        });
        out.push(PauliString {
            x: bx,
            z: apply(&binv_t, &z2),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::majorana_index;
    use proptest::prelude::*;

    fn lat(d: usize, l: usize) -> Lattice {
        Lattice::new(d, l).unwrap()
    }

    #[test]
    fn local_weights() {
        let e = Encoding::new(EncodingKind::Local { phi0: 2 }, lat(1, 10)).unwrap();
        assert_eq!(e.bilinear_weight(0, 1).unwrap(), 2);
        assert_eq!(e.bilinear_weight(0, majorana_index(9, 1)).unwrap(), 3);
        assert!(e.bilinear_weight(0, 20).is_err());
        assert!(Encoding::new(EncodingKind::Local { phi0: 0 }, lat(1, 4)).is_err());
    }

    #[test]
    fn jw_weights() {
        let e = Encoding::new(EncodingKind::Jw1d, lat(1, 8)).unwrap();
        assert_eq!(
            e.bilinear_weight(majorana_index(3, 1), majorana_index(4, 1))
                .unwrap(),
            2
        );
        assert_eq!(
            e.bilinear_weight(majorana_index(3, 1), majorana_index(3, 2))
                .unwrap(),
            1
        );
        let e = Encoding::new(EncodingKind::Jw2dSnake, lat(2, 4)).unwrap();
        assert_eq!(e.max_weight(), 16);
        assert!(Encoding::new(EncodingKind::Jw2dSnake, lat(1, 4)).is_err());
        assert!(Encoding::new(EncodingKind::Jw1d, lat(2, 4)).is_err());
    }

    #[test]
    fn jw2d_vertical_neighbours() {
        // centre column of an odd lattice spans L + 1 qubits
        for l in [3usize, 5, 9, 11] {
            let lattice = lat(2, l);
            let e = Encoding::new(EncodingKind::Jw2dSnake, lattice).unwrap();
            let x = (l - 1) / 2;
            let s0 = lattice.site_index(&[x, 0]).unwrap();
            let s1 = lattice.site_index(&[x, 1]).unwrap();
            assert_eq!(e.bilinear_weight(2 * s0, 2 * s1).unwrap(), l + 1);
        }
        // even lattice: centre columns straddle L + 1
        let lattice = lat(2, 10);
        let e = Encoding::new(EncodingKind::Jw2dSnake, lattice).unwrap();
        let w = |x: usize| {
            let a = lattice.site_index(&[x, 2]).unwrap();
            let b = lattice.site_index(&[x, 3]).unwrap();
            e.bilinear_weight(2 * a, 2 * b).unwrap()
        };
        assert_eq!((w(4), w(5)), (12, 10));
        assert_eq!((w(0), w(9)), (20, 2));
    }

    #[test]
    fn vertical_weights_exhaustive() {
        for l in 2..=8usize {
            let lattice = lat(2, l);
            let e = Encoding::new(EncodingKind::Jw2dSnake, lattice).unwrap();
            for y in 0..l - 1 {
                for x in 0..l {
                    let a = 2 * lattice.site_index(&[x, y]).unwrap();
                    let b = 2 * lattice.site_index(&[x, y + 1]).unwrap();
                    let expected = if y % 2 == 0 { 2 * l - 2 * x } else { 2 * x + 2 };
                    assert_eq!(e.bilinear_weight(a, b).unwrap(), expected);
                }
            }
        }
    }

    #[test]
    fn bk_number_weights() {
        assert_eq!(bk_number_operator_weight(0, 8).unwrap(), 1);
        assert_eq!(bk_number_operator_weight(7, 8).unwrap(), 4);
        assert_eq!(bk_number_operator_weight(6, 8).unwrap(), 1);
        let max16 = (0..16)
            .map(|i| bk_number_operator_weight(i, 16).unwrap())
            .max();
        assert_eq!(max16, Some(5));
        assert!(bk_number_operator_weight(0, 12).is_err());
        assert!(Encoding::new(EncodingKind::BravyiKitaev, lat(1, 6)).is_err());
    }

    #[test]
    fn bk_beta_small() {
        let b = bk_beta_matrix(4).unwrap();
        let rows: Vec<Vec<u8>> = b
            .iter()
            .map(|r| r.iter().map(|&v| v as u8).collect())
            .collect();
        assert_eq!(
            rows,
            vec![
                vec![1, 0, 0, 0],
                vec![1, 1, 0, 0],
                vec![0, 0, 1, 0],
                vec![1, 1, 1, 1]
            ]
        );
    }

    #[test]
    fn bk_fenwick_matches_beta_certification() {
        for n in [1usize, 2, 4, 8, 16] {
            let fast = bk_majoranas(n);
            let oracle = bk_majoranas_from_beta(n).unwrap();
            assert_eq!(fast, oracle, "n = {n}");
            let e = Encoding::new(EncodingKind::BravyiKitaev, lat(1, n)).unwrap();
            for i in 0..n {
                let w = e.bilinear_weight(2 * i, 2 * i + 1).unwrap();
                assert_eq!(w, bk_number_operator_weight(i, n).unwrap());
                let beta = bk_beta_matrix(n).unwrap();
                let row = &gf2_inverse(&beta).unwrap()[i];
                assert_eq!(w, row.iter().filter(|&&v| v).count());
            }
        }
    }

    #[test]
    fn bk_sets_examples() {
        let s = bk_sets(7, 8);
        assert!(s.update.is_empty());
        assert_eq!(s.flip, vec![3, 5, 6]);
        assert_eq!(s.parity, vec![6, 5, 3]);
        assert_eq!(bk_sets(0, 8).update, vec![1, 3, 7]);
    }

    #[test]
    fn jw_composition_examples() {
        let e = Encoding::new(EncodingKind::Jw1d, lat(1, 6)).unwrap();
        let c = e
            .string_composition(majorana_index(1, 1), majorana_index(4, 2))
            .unwrap();
        assert_eq!(c, StringComposition { x: 0, y: 2, z: 2 });
        let c = e
            .string_composition(majorana_index(4, 2), majorana_index(1, 2))
            .unwrap();
        assert_eq!(c, StringComposition { x: 1, y: 1, z: 2 });
        let c = e.string_composition(3, 2).unwrap();
        assert_eq!(c, StringComposition { x: 0, y: 0, z: 1 });
        let local = Encoding::new(EncodingKind::Local { phi0: 1 }, lat(1, 6)).unwrap();
        assert!(matches!(
            local.string_composition(0, 3),
            Err(Error::Unsupported(_))
        ));
    }

    proptest! {
        #[test]
        fn weights_symmetric_and_consistent(l in 2usize..9, a in 0usize..200, b in 0usize..200) {
            for (kind, d) in [
                (EncodingKind::Local { phi0: 2 }, 2),
                (EncodingKind::Jw1d, 1),
                (EncodingKind::Jw2dSnake, 2),
            ] {
                let e = Encoding::new(kind, lat(d, l)).unwrap();
                let m = e.num_majoranas();
                let (a, b) = (a % m, b % m);
                let w = e.bilinear_weight(a, b).unwrap();
                prop_assert_eq!(w, e.bilinear_weight(b, a).unwrap());
                if a != b {
                    prop_assert!(w >= 1);
                    if let Ok(c) = e.string_composition(a, b) {
                        prop_assert_eq!(c.weight(), w);
                    }
                }
                if let EncodingKind::Local { phi0 } = kind {
                    let (x, y) = (a / 2, b / 2);
                    if x != y {
                        prop_assert_eq!(w, phi0 + e.lattice().site_distance(x, y));
                    }
                }
            }
        }

        #[test]
        fn jw1d_string_structure(l in 2usize..12, a in 0usize..24, b in 0usize..24) {
            let e = Encoding::new(EncodingKind::Jw1d, lat(1, l)).unwrap();
            let (a, b) = (a % (2 * l), b % (2 * l));
            let s = (a / 2).abs_diff(b / 2);
            prop_assume!(s >= 1);
            let c = e.string_composition(a, b).unwrap();
            prop_assert_eq!(c.x + c.y, 2);
            prop_assert_eq!(c.z, s - 1);
        }

        #[test]
        fn bk_composition_weight(log_n in 0u32..5, a in 0usize..64, b in 0usize..64) {
            let n = 1usize << log_n;
            let e = Encoding::new(EncodingKind::BravyiKitaev, lat(1, n)).unwrap();
            let (a, b) = (a % (2 * n), b % (2 * n));
            prop_assert_eq!(e.string_composition(a, b).unwrap().weight(), e.bilinear_weight(a, b).unwrap());
        }
    }
}
