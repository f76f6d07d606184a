//! Exact sparse linear algebra over `ℚ`.
//!
//! Systems are split into connected components (columns linked by a common
//! row) and each component is brought to reduced row echelon form with
//! fraction-free integer row operations, dividing every row by the gcd of
//! its entries to keep numbers small. Pivots are chosen in row order at the
//! leftmost surviving column, so results are deterministic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type SparseVec = Vec<(usize, BigRational)>;

/// One equation `Σ coeffs · x = rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Equation {
    pub coeffs: SparseVec,
    pub rhs: BigRational,
}

impl Equation {
    pub fn homogeneous(coeffs: SparseVec) -> Self {
        Equation {
            coeffs,
            rhs: BigRational::zero(),
        }
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        self.coeffs
            .iter()
            .map(|(c, a)| a * &x[*c])
            .fold(BigRational::zero(), |s, t| s + t)
    }
}

/// `particular + span(nullspace)`; vectors are sparse.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionSpace {
    pub ncols: usize,
    pub particular: SparseVec,
    pub nullspace: Vec<SparseVec>,
    /// The free column attached to each nullspace vector (its entry there is 1).
    pub free_columns: Vec<usize>,
}

impl SolutionSpace {
    pub fn free_params(&self) -> usize {
        self.nullspace.len()
    }

    pub fn dense(&self, v: &SparseVec) -> Vec<BigRational> {
        let mut out = vec![BigRational::zero(); self.ncols];
        for (c, a) in v {
            out[*c] = a.clone();
        }
        out
    }

    /// `particular + Σ t_k · nullspace[k]`.
    pub fn point(&self, t: &[BigRational]) -> Vec<BigRational> {
        let mut x = self.dense(&self.particular);
        for (v, tk) in self.nullspace.iter().zip(t) {
            for (c, a) in v {
                x[*c] += a * tk;
            }
        }
        x
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

fn primitive(row: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for a in row.iter() {
        if !a.is_zero() {
            g = g.gcd(a);
            if g.is_one() {
                return;
            }
        }
    }
    if !g.is_zero() && !g.is_one() {
        for a in row.iter_mut() {
            if !a.is_zero() {
                *a /= &g;
            }
        }
    }
}

/// `row ← lead·row − row[c]·pivot`, then made primitive.
fn eliminate(row: &mut [BigInt], pivot: &[BigInt], c: usize) {
    if row[c].is_zero() {
        return;
    }
    let g = row[c].gcd(&pivot[c]);
    let a = &pivot[c] / &g;
    let b = &row[c] / &g;
    for (x, p) in row.iter_mut().zip(pivot) {
        if p.is_zero() {
            if !x.is_zero() {
                *x *= &a;
            }
        } else {
            *x = &*x * &a - &b * p;
        }
    }
    primitive(row);
}

/// Reduced echelon form of one dense component; the last entry of every row
/// is the right-hand side. Returns pivot rows keyed by pivot column.
fn component_rref(rows: Vec<Vec<BigInt>>, m: usize) -> Result<Vec<(usize, Vec<BigInt>)>> {
    let mut piv: Vec<(usize, Vec<BigInt>)> = Vec::new();
    for mut row in rows {
        for (c, p) in &piv {
            eliminate(&mut row, p, *c);
        }
        let lead = match row[..m].iter().position(|a| !a.is_zero()) {
            Some(c) => c,
            None => {
                if !row[m].is_zero() {
                    return Err(Error::Inconsistent);
                }
                continue;
            }
        };
        if row[lead].is_negative() {
            for a in row.iter_mut() {
                *a = -&*a;
            }
        }
        for (_, p) in piv.iter_mut() {
            eliminate(p, &row, lead);
        }
        piv.push((lead, row));
    }
    piv.sort_by_key(|(c, _)| *c);
    Ok(piv)
}

fn to_integer_row(eq: &Equation, local: &[usize], m: usize) -> Vec<BigInt> {
    let mut l = eq.rhs.denom().clone();
    for (_, a) in &eq.coeffs {
        l = l.lcm(a.denom());
    }
    let lq = BigRational::from_integer(l);
    let mut row = vec![BigInt::zero(); m + 1];
    for (c, a) in &eq.coeffs {
        row[local[*c]] += (a * &lq).to_integer();
    }
    row[m] = (&eq.rhs * &lq).to_integer();
    row
}

/// Exact solution set of `equations` in `ncols` unknowns.
pub fn solve(ncols: usize, equations: &[Equation]) -> Result<SolutionSpace> {
    let mut uf = UnionFind((0..ncols).collect());
    for eq in equations {
        for w in eq.coeffs.windows(2) {
            uf.union(w[0].0, w[1].0);
        }
        if let Some((c, _)) = eq.coeffs.iter().find(|(c, _)| *c >= ncols) {
            return Err(Error::IndexOutOfRange(*c));
        }
    }
    let mut comp_cols: Vec<Vec<usize>> = vec![Vec::new(); ncols];
    for c in 0..ncols {
        let r = uf.find(c);
        comp_cols[r].push(c);
    }
    let mut comp_rows: Vec<Vec<&Equation>> = vec![Vec::new(); ncols];
    for eq in equations {
        match eq.coeffs.iter().find(|(_, a)| !a.is_zero()) {
            Some((c, _)) => {
                let r = uf.find(*c);
                comp_rows[r].push(eq);
            }
            None => {
                if !eq.rhs.is_zero() {
                    return Err(Error::Inconsistent);
                }
            }
        }
    }
    let mut local = vec![0usize; ncols];
    let mut particular = Vec::new();
    let mut null: Vec<(usize, SparseVec)> = Vec::new();
    for r in 0..ncols {
        let cols = &comp_cols[r];
        if cols.is_empty() {
            continue;
        }
        let m = cols.len();
        for (k, &c) in cols.iter().enumerate() {
            local[c] = k;
        }
        let rows: Vec<Vec<BigInt>> = comp_rows[r]
            .iter()
            .map(|eq| to_integer_row(eq, &local, m))
            .collect();
        let piv = component_rref(rows, m)?;
        let mut is_pivot = vec![false; m];
        for (c, row) in &piv {
            is_pivot[*c] = true;
            if !row[m].is_zero() {
                particular.push((cols[*c], BigRational::new(row[m].clone(), row[*c].clone())));
            }
        }
        for f in (0..m).filter(|&f| !is_pivot[f]) {
            let mut v: SparseVec = vec![(cols[f], BigRational::one())];
            for (c, row) in &piv {
                if !row[f].is_zero() {
                    v.push((cols[*c], BigRational::new(-row[f].clone(), row[*c].clone())));
                }
            }
            v.sort_by_key(|(c, _)| *c);
            null.push((cols[f], v));
        }
    }
    particular.sort_by_key(|(c, _)| *c);
    null.sort_by_key(|(f, _)| *f);
    Ok(SolutionSpace {
        ncols,
        particular,
        free_columns: null.iter().map(|(f, _)| *f).collect(),
        nullspace: null.into_iter().map(|(_, v)| v).collect(),
    })
}

/// Basis of the kernel of a homogeneous system with integer coefficients,
/// each vector scaled to a primitive integer vector.
pub fn integer_nullspace(ncols: usize, rows: &[Vec<(usize, BigInt)>]) -> Result<Vec<Vec<(usize, BigInt)>>> {
    let eqs: Vec<Equation> = rows
        .iter()
        .map(|r| {
            Equation::homogeneous(
                r.iter()
                    .map(|(c, a)| (*c, BigRational::from_integer(a.clone())))
                    .collect(),
            )
        })
        .collect();
    let sol = solve(ncols, &eqs)?;
    Ok(sol.nullspace.iter().map(primitive_integer).collect())
}

/// The primitive integer vector on the ray of `v`.
pub fn primitive_integer(v: &SparseVec) -> Vec<(usize, BigInt)> {
    let mut l = BigInt::one();
    for (_, a) in v {
        l = l.lcm(a.denom());
    }
    let lq = BigRational::from_integer(l);
    let mut out: Vec<(usize, BigInt)> = v.iter().map(|(c, a)| (*c, (a * &lq).to_integer())).collect();
    let mut g = BigInt::zero();
    for (_, a) in &out {
        g = g.gcd(a);
    }
    if !g.is_zero() && !g.is_one() {
        for (_, a) in out.iter_mut() {
            *a /= &g;
        }
    }
    out
}

/// Rank of a set of sparse rational vectors of length `ncols`.
pub fn rank(ncols: usize, vectors: &[SparseVec]) -> usize {
    let eqs: Vec<Equation> = vectors.iter().map(|v| Equation::homogeneous(v.clone())).collect();
    let sol = solve(ncols, &eqs).expect("homogeneous systems are consistent");
    ncols - sol.free_params()
}
