//! Root systems of the simple Dynkin types, expressed in the basis of
//! fundamental weights.
//!
//! Simple roots are numbered as in Bourbaki. The weight coordinates of the
//! simple root `α_i` are row `i` of [`RootSystem::cartan`], where
//!
//! ```text
//! α_i = Σ_j cartan[i][j] · ω_j,      cartan = Nᵀ,   N_ij = ⟨α_i, α_j^∨⟩ (Bourbaki plates)
//! ```
//!
//! For simply-laced types the transpose is invisible. For B, C, F and G it
//! fixes which end of the diagram carries the long roots: with this
//! orientation F4 has `ω_3 − α_3 = 2ω_2 − ω_3 + ω_4`, and the coroot pairing
//! `⟨α_i^∨, ω_j⟩ = δ_ij` holds by construction.
//!
//! E-series numbering: `1 - 3 - 4 - 5 - 6 (- 7 (- 8))` is the long chain and
//! node `2` hangs off node `4`.

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl Family {
    pub fn letter(self) -> char {
        match self {
            Family::A => 'A',
            Family::B => 'B',
            Family::C => 'C',
            Family::D => 'D',
            Family::E => 'E',
            Family::F => 'F',
            Family::G => 'G',
        }
    }
}

/// A Dynkin type such as `E8` or `B3`.
#[derive(Debug, Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DynkinSpec {
    pub family: Family,
    pub rank: usize,
}

impl DynkinSpec {
    pub fn new(family: Family, rank: usize) -> Result<Self> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B => rank >= 2,
            Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        // packed monomials carry at most 16 variables
        if !ok || rank > 16 {
            return Err(Error::InvalidType(format!("{}{}", family.letter(), rank)));
        }
        Ok(DynkinSpec { family, rank })
    }

    /// Bourbaki Cartan matrix `N_ij = ⟨α_i, α_j^∨⟩`, zero-based.
    pub fn bourbaki_cartan(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut m = vec![vec![0i64; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |a: usize, b: usize| {
            m[a - 1][b - 1] = -1;
            m[b - 1][a - 1] = -1;
        };
        match self.family {
            Family::A | Family::B | Family::C => {
                for i in 1..n {
                    link(i, i + 1);
                }
            }
            Family::D => {
                for i in 1..n - 1 {
                    link(i, i + 1);
                }
                link(n - 2, n);
            }
            Family::E => {
                link(1, 3);
                link(2, 4);
                for i in 3..n {
                    link(i, i + 1);
                }
            }
            Family::F => {
                link(1, 2);
                link(2, 3);
                link(3, 4);
            }
            Family::G => link(1, 2),
        }
        match self.family {
            // α_n short
            Family::B => m[n - 2][n - 1] = -2,
            // α_n long
            Family::C => m[n - 1][n - 2] = -2,
            // α_1, α_2 long
            Family::F => m[1][2] = -2,
            // α_1 short
            Family::G => m[1][0] = -3,
            _ => {}
        }
        m
    }
}

impl fmt::Display for DynkinSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.rank)
    }
}

impl FromStr for DynkinSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(Error::InvalidType(s.to_string())),
        };
        let rank: usize = chars
            .as_str()
            .parse()
            .map_err(|_| Error::InvalidType(s.to_string()))?;
        DynkinSpec::new(family, rank)
    }
}

/// An integral weight in the fundamental-weight basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<i64>);

impl Weight {
    pub fn zero(rank: usize) -> Self {
        Weight(vec![0; rank])
    }

    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        Weight(v)
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn add(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Weight) -> Weight {
        Weight(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: i64) -> Weight {
        Weight(self.0.iter().map(|a| a * k).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.0.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if mag == 1 {
                write!(f, "{sign}w[{}]", i + 1)?;
            } else {
                write!(f, "{sign}{mag}*w[{}]", i + 1)?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// A root, stored with both coordinate systems and its coroot.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Root {
    /// Coordinates in the basis of simple roots.
    pub simple: Vec<i64>,
    /// Coordinates in the basis of fundamental weights.
    pub weight: Weight,
    /// The coroot in the basis of simple coroots.
    pub coroot: Vec<i64>,
}

impl Root {
    pub fn is_positive(&self) -> bool {
        self.simple.iter().any(|&c| c > 0)
    }

    pub fn height(&self) -> i64 {
        self.simple.iter().sum()
    }

    pub fn negate(&self) -> Root {
        Root {
            simple: self.simple.iter().map(|c| -c).collect(),
            weight: self.weight.scale(-1),
            coroot: self.coroot.iter().map(|c| -c).collect(),
        }
    }
}

/// Full finite root system of a Dynkin type.
#[derive(Debug, Clone)]
pub struct RootSystem {
    pub spec: DynkinSpec,
    pub cartan: Vec<Vec<i64>>,
    /// Positive roots sorted by height, then by simple coordinates.
    positive: Vec<Root>,
    /// Positive-root index by weight coordinates (negative roots map to the
    /// index of their negative, with `false`).
    lookup: FxHashMap<Vec<i64>, (usize, bool)>,
    /// `det(C)·C⁻¹·1`: pairing a root's weight coordinates with this vector
    /// gives `det(C)` times its height.
    height_functional: Vec<i64>,
}

impl RootSystem {
    pub fn new(spec: DynkinSpec) -> Self {
        let n = spec.rank;
        let bourbaki = spec.bourbaki_cartan();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| bourbaki[j][i]).collect())
            .collect();

        // reflection closure starting from the simple roots
        let mut roots: Vec<Root> = Vec::new();
        let mut seen: FxHashMap<Vec<i64>, usize> = FxHashMap::default();
        for i in 0..n {
            let mut simple = vec![0; n];
            simple[i] = 1;
            let mut coroot = vec![0; n];
            coroot[i] = 1;
            let r = Root {
                simple,
                weight: Weight(cartan[i].clone()),
                coroot,
            };
            seen.insert(r.simple.clone(), roots.len());
            roots.push(r);
        }
        let mut head = 0;
        while head < roots.len() {
            let r = roots[head].clone();
            head += 1;
            for j in 0..n {
                let img = reflect_root(&cartan, &r, j);
                if !seen.contains_key(&img.simple) {
                    seen.insert(img.simple.clone(), roots.len());
                    roots.push(img);
                }
            }
        }
        let mut positive: Vec<Root> = roots.into_iter().filter(|r| r.is_positive()).collect();
        positive.sort_by(|a, b| a.height().cmp(&b.height()).then_with(|| b.simple.cmp(&a.simple)));

        let mut lookup = FxHashMap::default();
        for (k, r) in positive.iter().enumerate() {
            lookup.insert(r.weight.0.clone(), (k, true));
            lookup.insert(r.weight.scale(-1).0, (k, false));
        }

        let inv = rational_inverse(&cartan);
        let det = integer_det(&cartan);
        let height_functional = (0..n)
            .map(|j| {
                let s: BigRational = inv[j].iter().cloned().sum();
                let v = s * BigRational::from_integer(det.into());
                debug_assert!(v.is_integer());
                i64::try_from(v.to_integer()).expect("height functional fits in i64")
            })
            .collect();

        RootSystem {
            spec,
            cartan,
            positive,
            lookup,
            height_functional,
        }
    }

    pub fn rank(&self) -> usize {
        self.spec.rank
    }

    pub fn positive_roots(&self) -> &[Root] {
        &self.positive
    }

    /// All roots: positive ones first, then their negatives in the same order.
    pub fn all_roots(&self) -> Vec<Root> {
        let mut v = self.positive.clone();
        v.extend(self.positive.iter().map(Root::negate));
        v
    }

    pub fn simple_root(&self, i: usize) -> &Root {
        let (k, _) = self.lookup[&self.cartan[i]];
        &self.positive[k]
    }

    pub fn highest_root(&self) -> &Root {
        self.positive.last().expect("nonempty root system")
    }

    /// Looks up a root from its weight coordinates.
    pub fn root_by_weight(&self, w: &[i64]) -> Option<Root> {
        self.lookup.get(w).map(|&(k, pos)| {
            if pos {
                self.positive[k].clone()
            } else {
                self.positive[k].negate()
            }
        })
    }

    /// Index of a positive root given by weight coordinates.
    pub fn positive_index(&self, w: &[i64]) -> Option<usize> {
        match self.lookup.get(w) {
            Some(&(k, true)) => Some(k),
            _ => None,
        }
    }

    /// Sign of the height of a weight, computed through the inverse Cartan
    /// matrix. For roots this decides positivity.
    pub fn height_sign(&self, w: &[i64]) -> i64 {
        let s: i64 = w
            .iter()
            .zip(&self.height_functional)
            .map(|(a, b)| a * b)
            .sum();
        s.signum()
    }

    pub fn check_weight(&self, lambda: &Weight) -> Result<()> {
        if lambda.rank() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: lambda.rank(),
            });
        }
        Ok(())
    }

    /// `⟨β^∨, λ⟩`.
    pub fn coroot_pairing(&self, beta: &Root, lambda: &Weight) -> Result<i64> {
        self.check_weight(lambda)?;
        if beta.coroot.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: beta.coroot.len(),
            });
        }
        Ok(beta.coroot.iter().zip(&lambda.0).map(|(a, b)| a * b).sum())
    }

    /// `s_β(λ) = λ − ⟨β^∨, λ⟩ β`.
    pub fn reflect_weight(&self, beta: &Root, lambda: &Weight) -> Result<Weight> {
        let k = self.coroot_pairing(beta, lambda)?;
        Ok(lambda.sub(&beta.weight.scale(k)))
    }

    /// Weight coordinates of `ρ = Σ ω_i`-style sums restricted to a set of
    /// indices.
    pub fn weight_sum(&self, indices: impl IntoIterator<Item = usize>) -> Weight {
        let mut v = vec![0; self.rank()];
        for i in indices {
            v[i] += 1;
        }
        Weight(v)
    }

    /// Exponents of the Weyl group from the height distribution of the
    /// positive roots (the partition dual to it).
    pub fn exponents(&self) -> Vec<usize> {
        let max_h = self.highest_root().height() as usize;
        let mut count = vec![0usize; max_h + 2];
        for r in &self.positive {
            count[r.height() as usize] += 1;
        }
        let mut ex = Vec::new();
        for m in 1..=max_h {
            for _ in 0..count[m].saturating_sub(count[m + 1]) {
                ex.push(m);
            }
        }
        ex
    }

    /// Degrees of the basic invariants.
    pub fn invariant_degrees(&self) -> Vec<usize> {
        self.exponents().into_iter().map(|m| m + 1).collect()
    }

    /// `|W|` as the product of the degrees.
    pub fn weyl_order(&self) -> u128 {
        self.invariant_degrees().iter().map(|&d| d as u128).product()
    }
}

fn reflect_root(cartan: &[Vec<i64>], r: &Root, j: usize) -> Root {
    let n = cartan.len();
    let k = r.weight.0[j];
    let mut simple = r.simple.clone();
    simple[j] -= k;
    let weight = Weight((0..n).map(|t| r.weight.0[t] - k * cartan[j][t]).collect());
    // ⟨β^∨, α_j⟩ = Σ_t β^∨_t ⟨α_t^∨, α_j⟩
    let kc: i64 = (0..n).map(|t| r.coroot[t] * cartan[j][t]).sum();
    let mut coroot = r.coroot.clone();
    coroot[j] -= kc;
    Root {
        simple,
        weight,
        coroot,
    }
}

pub(crate) fn rational_inverse(m: &[Vec<i64>]) -> Vec<Vec<BigRational>> {
    let n = m.len();
    let q = |v: i64| BigRational::from_integer(v.into());
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigRational> = row.iter().map(|&v| q(v)).collect();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .expect("Cartan matrix is invertible");
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for v in a[col].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..2 * n {
                    let t = &a[col][c] * &f;
                    a[r][c] = &a[r][c] - t;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

pub(crate) fn integer_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&v| BigRational::from_integer(v.into())).collect())
        .collect();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return 0;
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det = &det * &a[col][col];
        for r in col + 1..n {
            if !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                for c in col..n {
                    let t = &a[col][c] * &f;
                    a[r][c] = &a[r][c] - t;
                }
            }
        }
    }
    i64::try_from(det.to_integer()).expect("determinant fits in i64")
}
