//! Basic Weyl invariants and Groebner bases of the ideal they generate.
//!
//! Invariants are orbit power sums `Σ_{λ ∈ W·μ} λ^d`, where a weight `λ` is
//! read as the linear polynomial `Σ λ_j w[j]`. A candidate of degree `d` is
//! accepted when it raises the rank of the Jacobian evaluated at a fixed
//! integer point; a full-rank Jacobian with the right degrees certifies a
//! basic set.
//!
//! Groebner bases use grevlex with `w[1]` the smallest variable and may be
//! truncated at a degree bound, in which case normal forms are exact for
//! polynomials up to that degree.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rustc_hash::{FxHashMap, FxHashSet};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::{self, SparseVec};
use crate::poly::{Monomial, Polynomial, QPoly};
use crate::rootdata::{RootSystem, Weight};

/// The `W`-orbit of `lambda`, in breadth-first order from `lambda`.
pub fn weight_orbit(rs: &RootSystem, lambda: &Weight) -> Vec<Weight> {
    let mut seen: FxHashSet<Weight> = FxHashSet::default();
    seen.insert(lambda.clone());
    let mut out = vec![lambda.clone()];
    let mut k = 0;
    while k < out.len() {
        let cur = out[k].clone();
        for i in 0..rs.rank() {
            let img = rs
                .reflect_weight(rs.simple_root(i), &cur)
                .expect("weight of the right rank");
            if seen.insert(img.clone()) {
                out.push(img);
            }
        }
        k += 1;
    }
    out
}

/// `Σ_{λ ∈ orbit} λ^d`.
pub fn power_sum(orbit: &[Weight], d: u32) -> Polynomial<BigInt> {
    let n = orbit.first().map_or(0, |w| w.rank());
    let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
    for lam in orbit {
        let mut p = Polynomial::monomial(n, Monomial::ONE, BigInt::one());
        for _ in 0..d {
            p = p.mul_linear_int(&lam.0);
        }
        for (m, c) in p.into_terms() {
            *acc.entry(m).or_insert_with(BigInt::zero) += c;
        }
    }
    Polynomial::from_terms(n, acc)
}

/// Gradient of `Σ_{λ ∈ orbit} λ^d` at the point `x`.
fn power_sum_gradient(orbit: &[Weight], d: u32, x: &[i64]) -> Vec<BigInt> {
    let n = x.len();
    let mut g = vec![BigInt::zero(); n];
    if d == 0 {
        return g;
    }
    for lam in orbit {
        let v: i64 = lam.0.iter().zip(x).map(|(a, b)| a * b).sum();
        let pw = BigInt::from(v).pow(d - 1) * BigInt::from(d);
        for (j, gj) in g.iter_mut().enumerate() {
            if lam.0[j] != 0 {
                *gj += &pw * BigInt::from(lam.0[j]);
            }
        }
    }
    g
}

const JACOBIAN_POINTS: [[i64; 8]; 3] = [
    [2, 3, 5, 7, 11, 13, 17, 19],
    [1, 4, 9, 16, 25, 36, 49, 64],
    [3, 1, 4, 1, 5, 9, 2, 6],
];

/// A basic set of `W`-invariants.
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSet {
    /// Degrees `d_1 ≤ … ≤ d_l` of the full basic set.
    pub degrees: Vec<u32>,
    /// Orbit representative used for each degree.
    pub orbits: Vec<Weight>,
    /// Expanded generators, for the degrees not exceeding the requested bound.
    pub generators: Vec<QPoly>,
}

/// Orbit power sums forming a basic set of invariants, certified by the
/// Jacobian criterion. Only generators of degree `≤ max_degree` are
/// expanded.
pub fn fundamental_invariants(rs: &RootSystem, max_degree: Option<u32>) -> Result<InvariantSet> {
    let n = rs.rank();
    let degrees: Vec<u32> = rs.invariant_degrees().iter().map(|&d| d as u32).collect();
    let mut candidates: Vec<Vec<Weight>> = (0..n)
        .map(|i| weight_orbit(rs, &Weight::fundamental(n, i)))
        .collect();
    candidates.sort_by_key(|o| o.len());
    for point in JACOBIAN_POINTS.iter().map(|p| &p[..n]) {
        let mut rows: Vec<SparseVec> = Vec::new();
        let mut chosen: Vec<&Vec<Weight>> = Vec::new();
        for &d in &degrees {
            let pick = candidates.iter().find(|orbit| {
                let g: SparseVec = power_sum_gradient(orbit, d, point)
                    .into_iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(j, a)| (j, BigRational::from_integer(a)))
                    .collect();
                let mut trial = rows.clone();
                trial.push(g);
                linalg::rank(n, &trial) == trial.len()
            });
            match pick {
                Some(orbit) => {
                    rows.push(
                        power_sum_gradient(orbit, d, point)
                            .into_iter()
                            .enumerate()
                            .filter(|(_, a)| !a.is_zero())
                            .map(|(j, a)| (j, BigRational::from_integer(a)))
                            .collect(),
                    );
                    chosen.push(orbit);
                }
                None => break,
            }
        }
        if chosen.len() == n {
            let generators = degrees
                .iter()
                .zip(&chosen)
                .filter(|(d, _)| max_degree.is_none_or(|m| **d <= m))
                .map(|(d, orbit)| power_sum(orbit, *d).to_rational())
                .collect();
            return Ok(InvariantSet {
                orbits: chosen.iter().map(|o| o[0].clone()).collect(),
                degrees,
                generators,
            });
        }
    }
    Err(Error::DegenerateJacobian)
}

#[derive(PartialEq, Eq)]
struct Key(Monomial);

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.grevlex(other.0)
    }
}

/// A reduced Groebner basis under grevlex, possibly truncated.
#[derive(Debug, Clone, PartialEq)]
pub struct GroebnerBasis {
    nvars: usize,
    /// Monic, sorted by leading monomial.
    basis: Vec<QPoly>,
    /// Pairs and generators above this degree were not processed.
    truncation: Option<u32>,
}

fn lm(p: &QPoly) -> Monomial {
    p.leading().expect("nonzero basis element").0
}

fn monic(p: QPoly) -> QPoly {
    let lc = p.leading().expect("nonzero").1.clone();
    if lc.is_one() {
        p
    } else {
        p.map_coeffs(|c| c / &lc)
    }
}

/// Remainder of `p` on division by `basis`, reducing every term.
fn normal_form(nvars: usize, basis: &[QPoly], p: &QPoly) -> QPoly {
    let mut work: BTreeMap<Key, BigRational> = p.terms().iter().map(|(m, c)| (Key(*m), c.clone())).collect();
    let mut rem: Vec<(Monomial, BigRational)> = Vec::new();
    while let Some((Key(m), c)) = work.pop_last() {
        match basis.iter().find(|g| lm(g).divides(m)) {
            Some(g) => {
                let q = Monomial::div(m, lm(g));
                for (gm, gc) in &g.terms()[1..] {
                    let key = Key(gm.mul(q));
                    let v = &c * gc;
                    match work.get_mut(&key) {
                        Some(x) => {
                            *x -= v;
                            if x.is_zero() {
                                work.remove(&key);
                            }
                        }
                        None => {
                            work.insert(key, -v);
                        }
                    }
                }
            }
            None => rem.push((m, c)),
        }
    }
    Polynomial::from_terms(nvars, rem)
}

fn s_polynomial(f: &QPoly, g: &QPoly) -> QPoly {
    let l = lm(f).lcm(lm(g));
    let a = f.mul_monomial_int(Monomial::div(l, lm(f)), 1);
    let b = g.mul_monomial_int(Monomial::div(l, lm(g)), 1);
    a.sub(&b)
}

enum Task {
    Input(usize),
    Pair(usize, usize),
}

/// Buchberger's algorithm for homogeneous generators, processing work in
/// increasing degree and dropping everything above `truncation`.
pub fn groebner(gens: &[QPoly], truncation: Option<u32>) -> Result<GroebnerBasis> {
    let nvars = gens.first().map_or(0, |g| g.nvars());
    let mut inputs = Vec::new();
    for g in gens {
        if g.nvars() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: g.nvars(),
            });
        }
        if !g.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        if !g.is_zero() {
            inputs.push(g.clone());
        }
    }
    let within = |d: u32| truncation.is_none_or(|t| d <= t);
    // (degree, sequence) -> task
    let mut queue: BTreeMap<(u32, usize), Task> = BTreeMap::new();
    let mut seq = 0usize;
    for (k, g) in inputs.iter().enumerate() {
        let d = g.degree().unwrap_or(0);
        if within(d) {
            queue.insert((d, seq), Task::Input(k));
            seq += 1;
        }
    }
    let mut basis: Vec<QPoly> = Vec::new();
    while let Some(((deg, _), task)) = queue.pop_first() {
        let h = match task {
            Task::Input(k) => inputs[k].clone(),
            Task::Pair(i, j) => s_polynomial(&basis[i], &basis[j]),
        };
        let r = normal_form(nvars, &basis, &h);
        if r.is_zero() {
            continue;
        }
        let r = monic(r);
        let new = basis.len();
        for (i, g) in basis.iter().enumerate() {
            if lm(g).is_coprime(lm(&r)) {
                continue;
            }
            let d = lm(g).lcm(lm(&r)).degree();
            if within(d) {
                queue.insert((d, seq), Task::Pair(i, new));
                seq += 1;
            }
        }
        log::trace!("groebner: degree {deg}, basis size {}", new + 1);
        basis.push(r);
    }
    Ok(GroebnerBasis::reduced(nvars, basis, truncation))
}

impl GroebnerBasis {
    fn reduced(nvars: usize, basis: Vec<QPoly>, truncation: Option<u32>) -> Self {
        let mut keep: Vec<QPoly> = Vec::new();
        for (k, g) in basis.iter().enumerate() {
            let redundant = basis.iter().enumerate().any(|(j, h)| {
                j != k && lm(h).divides(lm(g)) && (lm(h) != lm(g) || j < k)
            });
            if !redundant {
                keep.push(g.clone());
            }
        }
        let mut out = Vec::with_capacity(keep.len());
        for k in 0..keep.len() {
            let others: Vec<QPoly> = keep
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != k)
                .map(|(_, g)| g.clone())
                .collect();
            let (m, c) = keep[k].leading().expect("nonzero").clone();
            let tail = Polynomial::from_terms(nvars, keep[k].terms()[1..].iter().cloned());
            let tail = normal_form(nvars, &others, &tail);
            out.push(Polynomial::monomial(nvars, m, c).add(&tail));
        }
        out.sort_by(|a, b| lm(a).grevlex(lm(b)));
        GroebnerBasis {
            nvars,
            basis: out,
            truncation,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[QPoly] {
        &self.basis
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    /// Normal form of `p`.
    pub fn reduce(&self, p: &QPoly) -> Result<QPoly> {
        if p.nvars() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: p.nvars(),
            });
        }
        Ok(normal_form(self.nvars, &self.basis, p))
    }

    /// Number of standard monomials of each degree `0..=max_degree`.
    pub fn standard_monomial_counts(&self, max_degree: u32) -> Vec<usize> {
        (0..=max_degree)
            .map(|d| {
                Monomial::all_of_degree(self.nvars, d)
                    .into_iter()
                    .filter(|m| !self.basis.iter().any(|g| lm(g).divides(*m)))
                    .count()
            })
            .collect()
    }

    /// Cache representation: exponent vectors and coefficients as
    /// `"num/den"` strings.
    pub fn to_json(&self, meta: Value) -> Value {
        let basis: Vec<Value> = self
            .basis
            .iter()
            .map(|g| {
                Value::Array(
                    g.terms()
                        .iter()
                        .map(|(m, c)| json!([m.exponents(self.nvars), c.to_string()]))
                        .collect(),
                )
            })
            .collect();
        json!({
            "meta": meta,
            "order": "grevlex",
            "nvars": self.nvars,
            "truncation": self.truncation,
            "basis": basis,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |what: &str| Error::Parse(format!("groebner cache: {what}"));
        if v["order"] != "grevlex" {
            return Err(bad("unsupported order"));
        }
        let nvars = v["nvars"].as_u64().ok_or_else(|| bad("nvars"))? as usize;
        let truncation = v["truncation"].as_u64().map(|t| t as u32);
        let mut basis = Vec::new();
        for g in v["basis"].as_array().ok_or_else(|| bad("basis"))? {
            let mut terms = Vec::new();
            for t in g.as_array().ok_or_else(|| bad("polynomial"))? {
                let exps: Vec<u32> = t[0]
                    .as_array()
                    .ok_or_else(|| bad("exponents"))?
                    .iter()
                    .map(|e| e.as_u64().map(|x| x as u32).ok_or_else(|| bad("exponent")))
                    .collect::<Result<_>>()?;
                if exps.len() != nvars {
                    return Err(bad("exponent length"));
                }
                let c: BigRational = t[1]
                    .as_str()
                    .ok_or_else(|| bad("coefficient"))?
                    .parse()
                    .map_err(|_| bad("coefficient"))?;
                terms.push((Monomial::from_exponents(&exps)?, c));
            }
            basis.push(Polynomial::from_terms(nvars, terms));
        }
        Ok(GroebnerBasis {
            nvars,
            basis,
            truncation,
        })
    }
}
