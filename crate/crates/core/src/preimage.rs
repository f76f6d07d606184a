//! Preimages under the characteristic map by undetermined coefficients.
//!
//! A generic homogeneous polynomial `p = Σ a[e]·w^e` of degree `k` is
//! constrained either by `Δ_w(p) = 0` for the length-`k` elements `w` outside
//! `W^Θ` (delta variant) or by `s_i(p) = p` for `i ∈ Θ` (invariance variant),
//! and normalized by `Δ_u(p) = x_u` for `u ∈ W^Θ` of length `k`.
//!
//! For large systems the invariance kernel is computed in stages, one
//! generator at a time: the kernel for `{s_{i_1}, …, s_{i_j}}` is spanned by
//! polynomials `b_1, …, b_d`, and the kernel for the next generator is
//! `{ Σ c_k b_k : Σ c_k Δ_i(b_k) = 0 }`. Each stage is a small exact system
//! since `s_i` only moves monomials along the exponents of node `i` and its
//! neighbours.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::invariants::GroebnerBasis;
use crate::linalg::{self, Equation, SolutionSpace, SparseVec};
use crate::poly::{Monomial, Polynomial, QPoly};
use crate::polyops::WeylAction;
use crate::rootdata::RootSystem;
use crate::weyl::{CosetReps, ParabolicSubset};

/// Constraint variant used to cut out preimage candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Delta,
    Invariance,
}

/// An integer linear form in the unknown coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinForm(Vec<(u32, BigInt)>);

impl LinForm {
    pub fn unknown(j: usize) -> Self {
        LinForm(vec![(j as u32, BigInt::from(1))])
    }

    pub fn terms(&self) -> &[(u32, BigInt)] {
        &self.0
    }

    fn merge(&self, other: &Self, sign: i32) -> Self {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let v = if sign < 0 { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, v));
                j += 1;
            } else {
                let v = if sign < 0 { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !v.is_zero() {
                    out.push((a[i].0, v));
                }
                i += 1;
                j += 1;
            }
        }
        LinForm(out)
    }
}

impl crate::poly::Coeff for LinForm {
    fn zero() -> Self {
        LinForm(Vec::new())
    }
    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        *self = self.merge(other, 1);
    }
    fn sub_assign(&mut self, other: &Self) {
        *self = self.merge(other, -1);
    }
    fn neg(&self) -> Self {
        LinForm(self.0.iter().map(|(j, a)| (*j, -a)).collect())
    }
    fn scale_int(&self, k: i128) -> Self {
        if k == 0 {
            return LinForm(Vec::new());
        }
        let k = BigInt::from(k);
        LinForm(self.0.iter().map(|(j, a)| (*j, a * &k)).collect())
    }
}

/// `Σ a[e]·w^e` over all exponent vectors `e` of total degree `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericPolynomial {
    nvars: usize,
    degree: u32,
    /// Lexicographically decreasing exponent vectors.
    monomials: Vec<Monomial>,
}

impl GenericPolynomial {
    pub fn new(nvars: usize, degree: u32) -> Self {
        let mut monomials = Monomial::all_of_degree(nvars, degree);
        monomials.sort_by_key(|m| std::cmp::Reverse(m.exponents(nvars)));
        GenericPolynomial {
            nvars,
            degree,
            monomials,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// `a[e1,...,el]`.
    pub fn unknown_name(&self, j: usize) -> String {
        let e: Vec<String> = self.monomials[j]
            .exponents(self.nvars)
            .iter()
            .map(|x| x.to_string())
            .collect();
        format!("a[{}]", e.join(","))
    }

    pub fn symbolic(&self) -> Polynomial<LinForm> {
        Polynomial::from_terms(
            self.nvars,
            self.monomials
                .iter()
                .enumerate()
                .map(|(j, m)| (*m, LinForm::unknown(j))),
        )
    }

    /// The polynomial with the unknowns set to `values`.
    pub fn instantiate(&self, values: &[BigRational]) -> QPoly {
        Polynomial::from_terms(
            self.nvars,
            self.monomials.iter().zip(values).map(|(m, v)| (*m, v.clone())),
        )
    }
}

/// Equations in the unknowns of a generic polynomial.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    pub generic: GenericPolynomial,
    pub equations: Vec<Equation>,
}

impl fmt::Display for LinearSystem {
    /// One equation per line as `lhs = 0`, e.g. `a[2,0,0,0] + a[1,1,0,0] - 1 = 0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for eq in &self.equations {
            writeln!(f, "{} = 0", format_equation(&self.generic, eq))?;
        }
        Ok(())
    }
}

fn format_equation(g: &GenericPolynomial, eq: &Equation) -> String {
    let mut terms: Vec<(String, BigRational)> = eq
        .coeffs
        .iter()
        .map(|(j, a)| (g.unknown_name(*j), a.clone()))
        .collect();
    if !eq.rhs.is_zero() {
        terms.push((String::new(), -eq.rhs.clone()));
    }
    let mut out = String::new();
    for (k, (name, a)) in terms.iter().enumerate() {
        let mag = a.abs();
        if k == 0 {
            if a.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(if a.is_negative() { " - " } else { " + " });
        }
        let one = BigRational::from_integer(1.into());
        match (name.is_empty(), mag == one) {
            (true, _) => out.push_str(&mag.to_string()),
            (false, true) => out.push_str(name),
            (false, false) => out.push_str(&format!("{mag}*{name}")),
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn form_to_equation(form: &LinForm, rhs: BigRational) -> Equation {
    Equation {
        coeffs: form
            .terms()
            .iter()
            .map(|(j, a)| (*j as usize, BigRational::from_integer(a.clone())))
            .collect(),
        rhs,
    }
}

/// `Δ_w(p) = 0` for every `w ∉ W^Θ` with `l(w) = k`.
pub fn build_constraints_delta(
    rs: &RootSystem,
    ops: &WeylAction,
    theta: &ParabolicSubset,
    k: u32,
) -> Result<LinearSystem> {
    let generic = GenericPolynomial::new(rs.rank(), k);
    let mut equations = Vec::new();
    if k > 0 {
        let levels = rs.length_levels(k as usize);
        if let Some(top) = levels.levels.get(k as usize) {
            let vals = ops.delta_on_levels(&levels, &generic.symbolic())?;
            for (w, v) in top.iter().zip(&vals[k as usize]) {
                let outside = rs.right_descents(w).iter().any(|&i| theta.contains(i));
                if !outside {
                    continue;
                }
                let c = v.constant_value().unwrap_or_else(LinForm::default);
                if !c.terms().is_empty() {
                    equations.push(form_to_equation(&c, BigRational::zero()));
                }
            }
        }
    }
    Ok(LinearSystem { generic, equations })
}

/// Coefficient matching in `s_i(p) − p = 0` for every `i ∈ Θ`.
pub fn build_constraints_invariance(
    rs: &RootSystem,
    ops: &WeylAction,
    theta: &ParabolicSubset,
    k: u32,
) -> Result<LinearSystem> {
    let generic = GenericPolynomial::new(rs.rank(), k);
    let p = generic.symbolic();
    let mut equations = Vec::new();
    for i in theta.theta() {
        let diff = ops.reflect(i, &p)?.sub(&p);
        for (_, c) in diff.terms() {
            equations.push(form_to_equation(c, BigRational::zero()));
        }
    }
    Ok(LinearSystem { generic, equations })
}

/// `Δ_u(p) = x_u` for every `u ∈ W^Θ` with `l(u) = k`; `target` lists the
/// nonzero `x_u` by coset index.
pub fn normalization(
    ops: &WeylAction,
    reps: &CosetReps,
    generic: &GenericPolynomial,
    target: &[(usize, BigRational)],
) -> Result<Vec<Equation>> {
    let k = generic.degree() as usize;
    let vals = ops.delta_on_reps(reps, &generic.symbolic(), k)?;
    let mut out = Vec::new();
    for (u, v) in vals.iter().enumerate() {
        if reps.length(u) != k {
            continue;
        }
        let form = v
            .as_ref()
            .and_then(|p| p.constant_value())
            .unwrap_or_else(LinForm::default);
        let rhs = target
            .iter()
            .find(|(t, _)| *t == u)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(BigRational::zero);
        out.push(form_to_equation(&form, rhs));
    }
    Ok(out)
}

/// Solution set of `system` together with the normalization equations.
pub fn solve(system: &LinearSystem, normalization: &[Equation]) -> Result<SolutionSpace> {
    let all: Vec<Equation> = system
        .equations
        .iter()
        .chain(normalization)
        .cloned()
        .collect();
    linalg::solve(system.generic.len(), &all)
}

/// Order `Θ` so that each generator is adjacent to an earlier one where
/// possible.
fn connected_order(rs: &RootSystem, theta: &ParabolicSubset) -> Vec<usize> {
    let mut left: Vec<usize> = theta.theta();
    let mut order = Vec::new();
    while !left.is_empty() {
        let pos = left
            .iter()
            .position(|&i| order.iter().any(|&j: &usize| rs.cartan[i][j] != 0))
            .unwrap_or(0);
        order.push(left.remove(pos));
    }
    order
}

/// A basis of the degree-`k` polynomials fixed by every `s_i`, `i ∈ Θ`,
/// computed in stages over the generators. Basis polynomials are primitive
/// integer polynomials.
pub fn invariant_basis(
    rs: &RootSystem,
    ops: &WeylAction,
    theta: &ParabolicSubset,
    k: u32,
) -> Result<Vec<Polynomial<BigInt>>> {
    let n = rs.rank();
    let mut basis: Vec<Polynomial<BigInt>> = Monomial::all_of_degree(n, k)
        .into_iter()
        .map(|m| Polynomial::monomial(n, m, BigInt::from(1)))
        .collect();
    for i in connected_order(rs, theta) {
        let mut row_of: FxHashMap<Monomial, usize> = FxHashMap::default();
        let mut rows: Vec<Vec<(usize, BigInt)>> = Vec::new();
        for (c, b) in basis.iter().enumerate() {
            for (m, a) in ops.delta(i, b)?.terms() {
                let r = *row_of.entry(*m).or_insert_with(|| {
                    rows.push(Vec::new());
                    rows.len() - 1
                });
                rows[r].push((c, a.clone()));
            }
        }
        let null = linalg::integer_nullspace(basis.len(), &rows)?;
        log::debug!(
            "invariance stage s_{}: {} -> {} basis polynomials",
            i + 1,
            basis.len(),
            null.len()
        );
        basis = null
            .iter()
            .map(|v| {
                let mut acc: FxHashMap<Monomial, BigInt> = FxHashMap::default();
                for (c, a) in v {
                    for (m, x) in basis[*c].terms() {
                        *acc.entry(*m).or_insert_with(BigInt::zero) += a * x;
                    }
                }
                Polynomial::from_terms(n, acc)
            })
            .collect();
    }
    Ok(basis)
}

/// A basis of the degree-`k` solutions of the homogeneous delta system.
pub fn delta_basis(
    rs: &RootSystem,
    ops: &WeylAction,
    theta: &ParabolicSubset,
    k: u32,
) -> Result<Vec<QPoly>> {
    let system = build_constraints_delta(rs, ops, theta, k)?;
    let sol = solve(&system, &[])?;
    Ok(sol
        .nullspace
        .iter()
        .map(|v| system.generic.instantiate(&sol.dense(v)))
        .collect())
}

/// `Δ_u(p)` for `u ∈ W^Θ` of length `deg p`, as `(coset index, value)` with
/// zero values omitted.
pub fn c_map_parabolic(ops: &WeylAction, reps: &CosetReps, p: &QPoly) -> Result<Vec<(usize, BigRational)>> {
    let k = match p.homogeneous_degree()? {
        None => return Ok(Vec::new()),
        Some(k) => k as usize,
    };
    let vals = ops.delta_on_reps(reps, p, k)?;
    let mut out = Vec::new();
    for (u, v) in vals.iter().enumerate() {
        if reps.length(u) == k {
            if let Some(c) = v.as_ref().and_then(|q| q.constant_value()) {
                if !c.is_zero() {
                    out.push((u, c));
                }
            }
        }
    }
    Ok(out)
}

/// Finds `p = Σ t_j b_j` over a kernel basis with `Δ_u(p) = x_u` on `W^Θ`;
/// free parameters are set to zero.
pub fn combine_from_basis(
    ops: &WeylAction,
    reps: &CosetReps,
    basis: &[QPoly],
    k: usize,
    target: &[(usize, BigRational)],
) -> Result<QPoly> {
    let n = ops.rank();
    let rows_u: Vec<usize> = (0..reps.len()).filter(|&u| reps.length(u) == k).collect();
    let mut coeffs: Vec<SparseVec> = vec![Vec::new(); rows_u.len()];
    for (j, b) in basis.iter().enumerate() {
        for (u, x) in c_map_parabolic(ops, reps, b)? {
            let r = rows_u.iter().position(|&v| v == u).expect("length-k coset");
            coeffs[r].push((j, x));
        }
    }
    let mut eqs = Vec::with_capacity(rows_u.len());
    for (r, u) in rows_u.iter().enumerate() {
        let rhs = target
            .iter()
            .find(|(t, _)| t == u)
            .map(|(_, x)| x.clone())
            .unwrap_or_else(BigRational::zero);
        eqs.push(Equation {
            coeffs: std::mem::take(&mut coeffs[r]),
            rhs,
        });
    }
    if let Some((t, _)) = target.iter().find(|(t, _)| !rows_u.contains(t)) {
        return Err(Error::NoPreimage(format!(
            "target class index {t} is not of codimension {k}"
        )));
    }
    let sol = linalg::solve(basis.len(), &eqs).map_err(|e| match e {
        Error::Inconsistent => Error::NoPreimage("normalization system is inconsistent".into()),
        other => other,
    })?;
    let mut p = QPoly::zero(n);
    for (j, t) in &sol.particular {
        p = p.add(&basis[*j].map_coeffs(|a| a * t));
    }
    Ok(p)
}

/// Preimage search for one parabolic quotient.
pub struct PreimageSolver<'a> {
    pub rs: &'a RootSystem,
    pub ops: &'a WeylAction,
    pub theta: &'a ParabolicSubset,
    pub reps: &'a CosetReps,
    pub variant: Variant,
    pub groebner: Option<&'a GroebnerBasis>,
}

impl PreimageSolver<'_> {
    /// A kernel basis for the chosen variant in degree `k`.
    pub fn kernel(&self, k: u32) -> Result<Vec<QPoly>> {
        match self.variant {
            Variant::Invariance => Ok(invariant_basis(self.rs, self.ops, self.theta, k)?
                .iter()
                .map(|b| b.to_rational())
                .collect()),
            Variant::Delta => delta_basis(self.rs, self.ops, self.theta, k),
        }
    }

    /// A polynomial `p` with `c(p) = x` for the class `x` given by its
    /// nonzero coefficients on `W^Θ` of length `k`, reduced by the
    /// Groebner basis if one is attached, and re-verified.
    pub fn preimage(&self, k: u32, target: &[(usize, BigRational)]) -> Result<QPoly> {
        let basis = self.kernel(k)?;
        self.preimage_with_kernel(&basis, k, target)
    }

    pub fn preimage_with_kernel(
        &self,
        basis: &[QPoly],
        k: u32,
        target: &[(usize, BigRational)],
    ) -> Result<QPoly> {
        let p = combine_from_basis(self.ops, self.reps, basis, k as usize, target)?;
        let p = match self.groebner {
            Some(gb) => gb.reduce(&p)?,
            None => p,
        };
        let mut got = c_map_parabolic(self.ops, self.reps, &p)?;
        let mut want: Vec<(usize, BigRational)> =
            target.iter().filter(|(_, x)| !x.is_zero()).cloned().collect();
        got.sort_by_key(|(u, _)| *u);
        want.sort_by_key(|(u, _)| *u);
        if got != want {
            return Err(Error::Internal("preimage failed the round-trip check".into()));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rootdata::DynkinSpec;
    use num_traits::One;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn setup(ty: &str, omit: &[usize]) -> (RootSystem, WeylAction, ParabolicSubset, CosetReps) {
        let rs = RootSystem::new(ty.parse::<DynkinSpec>().unwrap());
        let ops = WeylAction::new(&rs);
        let theta = ParabolicSubset::omitting(rs.rank(), omit).unwrap();
        let reps = rs.minimal_coset_reps(&theta);
        (rs, ops, theta, reps)
    }

    fn index_of(g: &GenericPolynomial, e: &[u32]) -> usize {
        g.monomials()
            .iter()
            .position(|m| m.exponents(g.nvars()) == e)
            .unwrap()
    }

    /// The affine family `a[2000] = 1 + 2t, a[1100] = −2t, a[0200] = 2t,
    /// a[0110] = −2t, a[0020] = t, a[0011] = −t, a[0002] = t`, rest 0.
    fn f4_family(g: &GenericPolynomial) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut base = vec![q(0); g.len()];
        let mut dir = vec![q(0); g.len()];
        base[index_of(g, &[2, 0, 0, 0])] = q(1);
        for (e, d) in [
            ([2, 0, 0, 0], 2),
            ([1, 1, 0, 0], -2),
            ([0, 2, 0, 0], 2),
            ([0, 1, 1, 0], -2),
            ([0, 0, 2, 0], 1),
            ([0, 0, 1, 1], -1),
            ([0, 0, 0, 2], 1),
        ] {
            dir[index_of(g, &e)] = q(d);
        }
        (base, dir)
    }

    fn assert_is_family(sol: &SolutionSpace, base: &[BigRational], dir: &[BigRational]) {
        assert_eq!(sol.free_params(), 1);
        let n = base.len();
        let to_sparse = |v: &[BigRational]| -> SparseVec {
            v.iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(c, a)| (c, a.clone()))
                .collect()
        };
        let d = to_sparse(dir);
        assert_eq!(linalg::rank(n, &[sol.nullspace[0].clone(), d.clone()]), 1);
        let p = sol.dense(&sol.particular);
        let diff: Vec<BigRational> = base.iter().zip(&p).map(|(a, b)| a - b).collect();
        assert_eq!(linalg::rank(n, &[d, to_sparse(&diff)]), 1);
    }

    #[test]
    fn generic_polynomial_shape() {
        let g = GenericPolynomial::new(4, 2);
        assert_eq!(g.len(), 10);
        assert_eq!(g.unknown_name(0), "a[2,0,0,0]");
        assert_eq!(g.unknown_name(1), "a[1,1,0,0]");
        assert_eq!(g.unknown_name(9), "a[0,0,0,2]");
        assert_eq!(GenericPolynomial::new(8, 10).len(), 19448);
    }

    #[test]
    fn f4_p1_delta_system_matches_display() {
        let (rs, ops, theta, reps) = setup("F4", &[0]);
        let sys = build_constraints_delta(&rs, &ops, &theta, 2).unwrap();
        assert_eq!(sys.equations.len(), 8);
        let u = (0..reps.len()).find(|&u| reps.length(u) == 2).unwrap();
        let norm = normalization(&ops, &reps, &sys.generic, &[(u, q(1))]).unwrap();
        let full = LinearSystem {
            generic: sys.generic.clone(),
            equations: sys.equations.iter().chain(&norm).cloned().collect(),
        };
        let text = full.to_string();
        let mut lines: Vec<&str> = text.lines().collect();
        lines.sort();
        let mut expected = vec![
            "a[0,0,1,1] + a[0,0,2,0] = 0",
            "a[1,0,0,1] = 0",
            "a[0,1,1,0] + a[0,2,0,0] = 0",
            "a[0,1,0,1] = 0",
            "a[1,1,0,0] + a[0,2,0,0] = 0",
            "a[1,0,1,0] = 0",
            "a[0,1,1,0] + 2*a[0,0,2,0] = 0",
            "a[0,0,0,2] + a[0,0,1,1] = 0",
            "a[2,0,0,0] + a[1,1,0,0] - 1 = 0",
        ];
        expected.sort();
        // Equations are compared up to order of terms: normalize each line.
        let canon = |s: &str| {
            let lhs = s.trim_end_matches(" = 0");
            let mut t: Vec<String> = lhs.replace(" - ", " + -").split(" + ").map(|x| x.to_string()).collect();
            t.sort();
            t.join("|")
        };
        let mut a: Vec<String> = lines.iter().map(|s| canon(s)).collect();
        let mut b: Vec<String> = expected.iter().map(|s| canon(s)).collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }

    #[test]
    fn f4_p1_family_in_both_variants() {
        let (rs, ops, theta, reps) = setup("F4", &[0]);
        let u = (0..reps.len()).find(|&u| reps.length(u) == 2).unwrap();
        for sys in [
            build_constraints_delta(&rs, &ops, &theta, 2).unwrap(),
            build_constraints_invariance(&rs, &ops, &theta, 2).unwrap(),
        ] {
            let norm = normalization(&ops, &reps, &sys.generic, &[(u, q(1))]).unwrap();
            let sol = solve(&sys, &norm).unwrap();
            let (base, dir) = f4_family(&sys.generic);
            assert_is_family(&sol, &base, &dir);
            for eq in sys.equations.iter().chain(&norm) {
                for t in [-2, 0, 3] {
                    let x: Vec<BigRational> = base.iter().zip(&dir).map(|(b, d)| b + d * q(t)).collect();
                    assert_eq!(eq.eval(&x), eq.rhs);
                }
            }
            // t = 0 gives w[1]^2
            assert_eq!(sys.generic.instantiate(&base), QPoly::parse(4, "w[1]^2").unwrap());
        }
    }

    #[test]
    fn trivial_systems() {
        let (rs, ops, theta, _) = setup("F4", &[0]);
        assert!(build_constraints_delta(&rs, &ops, &theta, 0).unwrap().equations.is_empty());
        let none = ParabolicSubset::borel(4);
        assert!(build_constraints_invariance(&rs, &ops, &none, 3).unwrap().equations.is_empty());
    }

    #[test]
    fn degree_one_delta_system_isolates_the_node() {
        let (rs, ops, theta, _) = setup("F4", &[2]);
        let sys = build_constraints_delta(&rs, &ops, &theta, 1).unwrap();
        let sol = solve(&sys, &[]).unwrap();
        assert_eq!(sol.free_params(), 1);
        assert_eq!(sys.generic.instantiate(&sol.dense(&sol.nullspace[0])), QPoly::parse(4, "w[3]").unwrap());
    }

    #[test]
    fn staged_basis_matches_direct_nullspace() {
        for (ty, omit, kmax) in [("F4", vec![0], 6), ("F4", vec![3], 5), ("B3", vec![1], 4), ("E6", vec![0], 4)] {
            let (rs, ops, theta, _) = setup(ty, &omit);
            for k in 0..=kmax {
                let staged = invariant_basis(&rs, &ops, &theta, k).unwrap();
                let sys = build_constraints_invariance(&rs, &ops, &theta, k).unwrap();
                let direct = solve(&sys, &[]).unwrap();
                assert_eq!(staged.len(), direct.free_params(), "{ty} k={k}");
                let index: FxHashMap<Monomial, usize> =
                    sys.generic.monomials().iter().enumerate().map(|(j, m)| (*m, j)).collect();
                let mut vecs: Vec<SparseVec> = direct.nullspace.clone();
                let r = linalg::rank(sys.generic.len(), &vecs);
                for b in &staged {
                    for i in theta.theta() {
                        assert_eq!(ops.reflect(i, b).unwrap(), *b);
                    }
                    vecs.push(b.terms().iter().map(|(m, a)| (index[m], BigRational::from_integer(a.clone()))).collect());
                }
                assert_eq!(linalg::rank(sys.generic.len(), &vecs), r);
            }
        }
    }

    /// Delta kernel = invariant kernel + degree-k part of the ideal of
    /// positive-degree W-invariants; the images under `c` agree.
    #[test]
    fn variants_agree_after_normalization() {
        for (ty, omit) in [("F4", vec![0]), ("F4", vec![3]), ("B3", vec![0]), ("C3", vec![2]), ("A3", vec![1])] {
            let (rs, ops, theta, reps) = setup(ty, &omit);
            for k in 1..=4u32 {
                for u in (0..reps.len()).filter(|&u| reps.length(u) == k as usize) {
                    let target = vec![(u, BigRational::one())];
                    for variant in [Variant::Delta, Variant::Invariance] {
                        let solver = PreimageSolver {
                            rs: &rs,
                            ops: &ops,
                            theta: &theta,
                            reps: &reps,
                            variant,
                            groebner: None,
                        };
                        let p = solver.preimage(k, &target).unwrap();
                        // c-image over the whole slice of W: only u survives
                        let full = ops.c_map_full(&rs, &p).unwrap();
                        assert_eq!(full.len(), 1, "{ty} {variant:?} k={k}");
                        assert_eq!(full[0].0, reps.elements[u]);
                        assert!(full[0].1.is_one());
                    }
                }
            }
        }
    }

    #[test]
    fn no_preimage_for_wrong_codimension() {
        let (rs, ops, theta, reps) = setup("F4", &[0]);
        let solver = PreimageSolver {
            rs: &rs,
            ops: &ops,
            theta: &theta,
            reps: &reps,
            variant: Variant::Invariance,
            groebner: None,
        };
        let u = (0..reps.len()).find(|&u| reps.length(u) == 3).unwrap();
        assert!(matches!(solver.preimage(2, &[(u, q(1))]), Err(Error::NoPreimage(_))));
    }
}
