//! Weyl action on polynomials, divided differences `Δ_i = (1 − s_i)/α_i`,
//! their compositions over coset trees, the Leibniz expansion of
//! multiplication operators, and the full Giambelli formula.
//!
//! `s_i` fixes `w[j]` for `j ≠ i` and sends `w[i]` to `w[i] − α_i = L_i − w[i]`
//! where `L_i = −Σ_{t≠i} a_{it} w[t]` collects the neighbours of node `i`.
//! Writing `x = w[i]` and `y = s_i(x)`, the identity
//! `x^m − y^m = (x − y)·h_{m−1}(x, y)` with `x − y = α_i` gives
//! `Δ_i(r·x^m) = r·h_{m−1}(x, y)` for `r` free of `x`, so no polynomial
//! division is ever performed.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::poly::{Coeff, Monomial, Polynomial, QPoly};
use crate::rootdata::RootSystem;
use crate::weyl::{CosetReps, LengthLevels, WeylElement};

type Table = Vec<(Monomial, i128)>;

const TABLE_SLOTS: usize = 256;

/// Substitution tables for the simple reflections of one root system.
#[derive(Debug)]
pub struct WeylAction {
    rank: usize,
    alpha: Vec<Vec<i64>>,
    link: Vec<Vec<i64>>,
    /// `(L_i − x)^m`
    reflect_tab: Vec<Vec<OnceLock<Option<Table>>>>,
    /// `h_{m−1}(x, L_i − x)`
    delta_tab: Vec<Vec<OnceLock<Option<Table>>>>,
}

fn slots() -> Vec<OnceLock<Option<Table>>> {
    (0..TABLE_SLOTS).map(|_| OnceLock::new()).collect()
}

fn table_mul_linear(t: &Table, form: &[(Monomial, i128)]) -> Option<Table> {
    let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
    for (m, c) in t {
        for (v, k) in form {
            let e = acc.entry(m.mul(*v)).or_insert(0);
            *e = e.checked_add(c.checked_mul(*k)?)?;
        }
    }
    Some(acc.into_iter().filter(|(_, c)| *c != 0).collect())
}

fn table_add(a: &Table, b: &Table) -> Option<Table> {
    let mut acc: FxHashMap<Monomial, i128> = FxHashMap::default();
    for (m, c) in a.iter().chain(b) {
        let e = acc.entry(*m).or_insert(0);
        *e = e.checked_add(*c)?;
    }
    Some(acc.into_iter().filter(|(_, c)| *c != 0).collect())
}

impl WeylAction {
    pub fn new(rs: &RootSystem) -> Self {
        let rank = rs.rank();
        let alpha = rs.cartan.clone();
        let link = (0..rank)
            .map(|i| {
                (0..rank)
                    .map(|t| if t == i { 0 } else { -rs.cartan[i][t] })
                    .collect()
            })
            .collect();
        WeylAction {
            rank,
            alpha,
            link,
            reflect_tab: (0..rank).map(|_| slots()).collect(),
            delta_tab: (0..rank).map(|_| slots()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `α_i` in weight coordinates.
    pub fn simple_root(&self, i: usize) -> &[i64] {
        &self.alpha[i]
    }

    /// `L_i − x` as a table.
    fn image_of_var(&self, i: usize) -> Vec<(Monomial, i128)> {
        let mut out = vec![(Monomial::var(i), -1)];
        for (t, &k) in self.link[i].iter().enumerate() {
            if k != 0 {
                out.push((Monomial::var(t), k as i128));
            }
        }
        out
    }

    fn reflect_table(&self, i: usize, m: u32) -> Result<&Table> {
        let m = m as usize;
        if m >= TABLE_SLOTS {
            return Err(Error::Internal(format!("degree {m} exceeds table range")));
        }
        if self.reflect_tab[i][m].get().is_none() {
            let value = if m == 0 {
                Some(vec![(Monomial::ONE, 1)])
            } else {
                let prev = self.reflect_table(i, m as u32 - 1)?;
                table_mul_linear(prev, &self.image_of_var(i))
            };
            let _ = self.reflect_tab[i][m].set(value);
        }
        self.reflect_tab[i][m]
            .get()
            .and_then(|t| t.as_ref())
            .ok_or_else(|| Error::Internal(format!("substitution table overflow at degree {m}")))
    }

    fn delta_table(&self, i: usize, m: u32) -> Result<&Table> {
        let mu = m as usize;
        if mu >= TABLE_SLOTS {
            return Err(Error::Internal(format!("degree {mu} exceeds table range")));
        }
        if self.delta_tab[i][mu].get().is_none() {
            let value = match m {
                0 => Some(Vec::new()),
                1 => Some(vec![(Monomial::ONE, 1)]),
                _ => {
                    // h_{m-1}(x, y) = y^{m-1} + x·h_{m-2}(x, y)
                    let prev = self.delta_table(i, m - 1)?.clone();
                    let ypow = self.reflect_table(i, m - 1)?;
                    table_mul_linear(&prev, &[(Monomial::var(i), 1)])
                        .and_then(|xp| table_add(&xp, ypow))
                }
            };
            let _ = self.delta_tab[i][mu].set(value);
        }
        self.delta_tab[i][mu]
            .get()
            .and_then(|t| t.as_ref())
            .ok_or_else(|| Error::Internal(format!("divided-difference table overflow at degree {m}")))
    }

    fn check<C: Coeff>(&self, i: usize, p: &Polynomial<C>) -> Result<()> {
        if i >= self.rank {
            return Err(Error::IndexOutOfRange(i + 1));
        }
        if p.nvars() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: p.nvars(),
            });
        }
        Ok(())
    }

    fn substitute<C: Coeff>(&self, i: usize, p: &Polynomial<C>, divided: bool) -> Result<Polynomial<C>> {
        let mut acc: FxHashMap<Monomial, C> = FxHashMap::default();
        acc.reserve(p.len());
        for (m, c) in p.terms() {
            let rest = m.without(i);
            let table = if divided {
                self.delta_table(i, m.exp(i))?
            } else {
                self.reflect_table(i, m.exp(i))?
            };
            for (tm, k) in table {
                let v = c.scale_int(*k);
                acc.entry(rest.mul(*tm))
                    .and_modify(|x| x.add_assign(&v))
                    .or_insert(v);
            }
        }
        Ok(Polynomial::from_map(self.rank, acc))
    }

    /// `s_i(p)`.
    pub fn reflect<C: Coeff>(&self, i: usize, p: &Polynomial<C>) -> Result<Polynomial<C>> {
        self.check(i, p)?;
        self.substitute(i, p, false)
    }

    /// `Δ_i(p) = (p − s_i p)/α_i`.
    pub fn delta<C: Coeff>(&self, i: usize, p: &Polynomial<C>) -> Result<Polynomial<C>> {
        self.check(i, p)?;
        self.substitute(i, p, true)
    }

    /// `(Δ_i p, s_i p)` in a single pass over the terms.
    pub fn delta_and_reflect<C: Coeff>(
        &self,
        i: usize,
        p: &Polynomial<C>,
    ) -> Result<(Polynomial<C>, Polynomial<C>)> {
        self.check(i, p)?;
        let mut d: FxHashMap<Monomial, C> = FxHashMap::default();
        let mut s: FxHashMap<Monomial, C> = FxHashMap::default();
        for (m, c) in p.terms() {
            let e = m.exp(i);
            let rest = m.without(i);
            for (tm, k) in self.delta_table(i, e)? {
                let v = c.scale_int(*k);
                d.entry(rest.mul(*tm))
                    .and_modify(|x| x.add_assign(&v))
                    .or_insert(v);
            }
            for (tm, k) in self.reflect_table(i, e)? {
                let v = c.scale_int(*k);
                s.entry(rest.mul(*tm))
                    .and_modify(|x| x.add_assign(&v))
                    .or_insert(v);
            }
        }
        Ok((
            Polynomial::from_map(self.rank, d),
            Polynomial::from_map(self.rank, s),
        ))
    }

    /// `Δ_i` computed literally as `(p − s_i p)/α_i` by exact division;
    /// an independent check on the closed form used by [`Self::delta`].
    pub fn delta_by_division(&self, i: usize, p: &QPoly) -> Result<QPoly> {
        let num = p.sub(&self.reflect(i, p)?);
        divide_by_linear(&num, &self.alpha[i]).ok_or(Error::InexactDivision(i + 1))
    }

    /// `Δ_{a_1} ∘ ⋯ ∘ Δ_{a_k}` for the word `[a_1, …, a_k]`; the last letter
    /// acts first.
    pub fn delta_word<C: Coeff>(&self, word: &[usize], p: &Polynomial<C>) -> Result<Polynomial<C>> {
        let mut cur = p.clone();
        for &i in word.iter().rev() {
            if cur.is_zero() {
                break;
            }
            cur = self.delta(i, &cur)?;
        }
        Ok(cur)
    }

    /// `Δ_w` along the stored reduced word of `w`.
    pub fn delta_element<C: Coeff>(&self, w: &WeylElement, p: &Polynomial<C>) -> Result<Polynomial<C>> {
        let word: Vec<usize> = w.word().iter().map(|&i| i as usize).collect();
        self.delta_word(&word, p)
    }

    /// `s_{a_1} ⋯ s_{a_k}(p)`.
    pub fn reflect_word<C: Coeff>(&self, word: &[usize], p: &Polynomial<C>) -> Result<Polynomial<C>> {
        let mut cur = p.clone();
        for &i in word.iter().rev() {
            cur = self.reflect(i, &cur)?;
        }
        Ok(cur)
    }

    /// `Δ_u(p)` for every `u ∈ W^Θ` with `l(u) ≤ max_len`, following the
    /// breadth-first tree of `reps` (`u = s_i·parent`, so
    /// `Δ_u = Δ_i ∘ Δ_parent`).
    pub fn delta_on_reps<C: Coeff>(
        &self,
        reps: &CosetReps,
        p: &Polynomial<C>,
        max_len: usize,
    ) -> Result<Vec<Option<Polynomial<C>>>> {
        let mut out: Vec<Option<Polynomial<C>>> = vec![None; reps.len()];
        for k in 0..reps.len() {
            if reps.length(k) > max_len {
                break;
            }
            out[k] = Some(match reps.parent[k] {
                None => p.clone(),
                Some((par, i)) => {
                    let prev = out[par].as_ref().expect("parents precede children");
                    if prev.is_zero() {
                        prev.clone()
                    } else {
                        self.delta(i, prev)?
                    }
                }
            });
        }
        Ok(out)
    }

    /// `Δ_w(p)` for every `w` in the given length slices of `W`.
    pub fn delta_on_levels<C: Coeff>(
        &self,
        levels: &LengthLevels,
        p: &Polynomial<C>,
    ) -> Result<Vec<Vec<Polynomial<C>>>> {
        let mut out: Vec<Vec<Polynomial<C>>> = vec![vec![p.clone()]];
        for k in 1..levels.levels.len() {
            let mut level = Vec::with_capacity(levels.levels[k].len());
            for &(par, i) in &levels.parents[k] {
                let prev = &out[k - 1][par];
                level.push(if prev.is_zero() {
                    prev.clone()
                } else {
                    self.delta(i, prev)?
                });
            }
            out.push(level);
        }
        Ok(out)
    }

    /// The G/B characteristic map: `(w, Δ_w(p))` for all `w` with
    /// `l(w) = deg p` and nonzero coefficient. Enumerates the whole slice,
    /// so intended for small groups and checks.
    pub fn c_map_full<C: Coeff>(
        &self,
        rs: &RootSystem,
        p: &Polynomial<C>,
    ) -> Result<Vec<(WeylElement, C)>> {
        let k = match p.homogeneous_degree()? {
            None => return Ok(Vec::new()),
            Some(k) => k as usize,
        };
        let levels = rs.length_levels(k);
        if levels.levels.len() <= k {
            return Ok(Vec::new());
        }
        let vals = self.delta_on_levels(&levels, p)?;
        let mut out = Vec::new();
        for (w, v) in levels.levels[k].iter().zip(&vals[k]) {
            let c = v
                .constant_value()
                .ok_or_else(|| Error::Internal("Δ_w of top degree is not constant".into()))?;
            if !c.is_zero() {
                out.push((w.clone(), c));
            }
        }
        Ok(out)
    }

    /// Multiplication by `c(p)` on `CH(G/P_Θ)` via the Leibniz rule
    /// `Δ_i(f·q) = Δ_i(f)·q + s_i(f)·Δ_i(q)`.
    ///
    /// Returns `cols` with `c(p)·σ_v = Σ_{(w, d) ∈ cols[v]} d·σ_w`, where
    /// `σ_u` is the class with `Δ_u`-coefficient (codimension `l(u)`).
    /// One depth-first walk over the coset tree carries, at node `w`, the
    /// expansion `Δ_w(p·q) = Σ_v f_v·Δ_v(q)`; terms with `v ∉ W^Θ` never
    /// return to `W^Θ` under further left multiplication and are dropped.
    pub fn leibniz_operator<C: Coeff>(
        &self,
        reps: &CosetReps,
        p: &Polynomial<C>,
    ) -> Result<Vec<Vec<(usize, C)>>> {
        let a = match p.homogeneous_degree()? {
            None => return Ok(vec![Vec::new(); reps.len()]),
            Some(a) => a as usize,
        };
        let children = reps.children();
        let mut cols: Vec<Vec<(usize, C)>> = vec![Vec::new(); reps.len()];
        let root = vec![(0usize, p.clone())];
        self.leibniz_visit(reps, &children, 0, root, a, &mut cols)?;
        for c in &mut cols {
            c.sort_by_key(|(w, _)| *w);
        }
        Ok(cols)
    }

    fn leibniz_visit<C: Coeff>(
        &self,
        reps: &CosetReps,
        children: &[Vec<(usize, usize)>],
        node: usize,
        state: Vec<(usize, Polynomial<C>)>,
        a: usize,
        cols: &mut [Vec<(usize, C)>],
    ) -> Result<()> {
        let lw = reps.length(node);
        for (v, f) in &state {
            if lw == reps.length(*v) + a {
                let c = f
                    .constant_value()
                    .ok_or_else(|| Error::Internal("Leibniz coefficient is not constant".into()))?;
                if !c.is_zero() {
                    cols[*v].push((node, c));
                }
            }
        }
        for &(child, i) in &children[node] {
            let mut next: Vec<(usize, Polynomial<C>)> = Vec::with_capacity(2 * state.len());
            for (v, f) in &state {
                let target = reps.left[i][*v];
                if f.degree().unwrap_or(0) == 0 {
                    if let Some(t) = target {
                        next.push((t, f.clone()));
                    }
                    continue;
                }
                match target {
                    Some(t) => {
                        let (d, s) = self.delta_and_reflect(i, f)?;
                        if !d.is_zero() {
                            next.push((*v, d));
                        }
                        next.push((t, s));
                    }
                    None => {
                        let d = self.delta(i, f)?;
                        if !d.is_zero() {
                            next.push((*v, d));
                        }
                    }
                }
            }
            next.sort_by_key(|(v, _)| *v);
            let mut merged: Vec<(usize, Polynomial<C>)> = Vec::with_capacity(next.len());
            for (v, f) in next {
                match merged.last_mut() {
                    Some((u, g)) if *u == v => *g = g.add(&f),
                    _ => merged.push((v, f)),
                }
            }
            merged.retain(|(_, f)| !f.is_zero());
            self.leibniz_visit(reps, children, child, merged, a, cols)?;
        }
        Ok(())
    }
}

/// Exact division by a nonzero integer linear form, `None` if a remainder
/// is left.
pub fn divide_by_linear(p: &QPoly, form: &[i64]) -> Option<QPoly> {
    let piv = form.iter().rposition(|&k| k != 0)?;
    let n = p.nvars();
    let mut rem = p.clone();
    let mut quot = QPoly::zero(n);
    let lead = BigRational::from_integer(BigInt::from(form[piv]));
    let lin = QPoly::linear(form);
    // Eliminate the highest power of the pivot variable first.
    while let Some((m, c)) = rem
        .terms()
        .iter()
        .max_by(|a, b| a.0.exp(piv).cmp(&b.0.exp(piv)).then(a.0.grevlex(b.0)))
        .cloned()
    {
        if m.exp(piv) == 0 {
            return None;
        }
        let step = QPoly::monomial(n, Monomial::div(m, Monomial::var(piv)), c / &lead);
        rem = rem.sub(&step.mul(&lin));
        quot = quot.add(&step);
    }
    Some(quot)
}

/// `d`, the product of all positive roots as linear forms.
pub fn positive_root_product(rs: &RootSystem) -> Polynomial<BigInt> {
    let n = rs.rank();
    let mut d = Polynomial::<BigInt>::one(n);
    for b in rs.positive_roots() {
        d = d.mul(&Polynomial::linear(&b.weight.0));
    }
    d
}

/// The full Giambelli polynomial `Δ_{w^{-1}}(d/|W|)`, whose image under the
/// characteristic map is the class `[X_w]` of codimension `l(w_0) − l(w)`.
/// Only for rank at most 4.
pub fn giambelli_full(rs: &RootSystem, ops: &WeylAction, w: &WeylElement) -> Result<QPoly> {
    if rs.rank() > 4 {
        return Err(Error::RankGuard(rs.rank()));
    }
    let d = positive_root_product(rs);
    let order = BigInt::from(rs.weyl_order());
    let top = d.to_rational().scale(&BigRational::new(1.into(), order));
    // Δ_{w^{-1}} along the reversed word: the first letter of w acts first.
    let mut cur = top;
    for &i in w.word() {
        cur = ops.delta(i as usize, &cur)?;
    }
    Ok(cur)
}
