//! The Schubert basis of `CH(G/P_Θ)`, its Hasse and Pieri graphs,
//! Poincaré duality, and the assembly of multiplication tables.
//!
//! `σ_u` for `u ∈ W^Θ` is the class whose coefficient under the
//! characteristic map is `Δ_u`; it has codimension `l(u)`. The printed label
//! of `σ_u` comes from the minimal representative `v = w_0 u w_θ`, written as
//! a path word `a_1,…,a_k` with `v = s_{a_k}⋯s_{a_1}` and `k = dim − l(u)`.
//! `g_{i,j}` is the `j`-th class of codimension `i`; within a codimension the
//! classes are ordered by their lexicographically least path word, except
//! for `E7/P7` where the table in [`crate::labels`] fixes the order.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::invariants::{fundamental_invariants, groebner, GroebnerBasis};
use crate::labels;
use crate::linalg::{self, Equation};
use crate::poly::{Monomial, Polynomial, QPoly};
use crate::polyops::WeylAction;
use crate::preimage::{self, PreimageSolver, Variant};
use crate::rootdata::{DynkinSpec, Family, RootSystem};
use crate::weyl::{CosetReps, ParabolicSubset};

/// A rational combination of Schubert classes, keyed by coset index.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChowClass(BTreeMap<usize, BigRational>);

impl ChowClass {
    pub fn zero() -> Self {
        ChowClass(BTreeMap::new())
    }

    pub fn basis(u: usize) -> Self {
        let mut m = BTreeMap::new();
        m.insert(u, BigRational::one());
        ChowClass(m)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut x = ChowClass::zero();
        for (u, c) in terms {
            x.add_term(u, &c);
        }
        x
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.0.iter().map(|(u, c)| (*u, c))
    }

    pub fn coeff(&self, u: usize) -> BigRational {
        self.0.get(&u).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, u: usize, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let e = self.0.entry(u).or_insert_with(BigRational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&u);
        }
    }

    pub fn add_scaled(&mut self, other: &ChowClass, c: &BigRational) {
        for (u, a) in &other.0 {
            self.add_term(*u, &(a * c));
        }
    }

    pub fn add(&self, other: &ChowClass) -> ChowClass {
        let mut out = self.clone();
        out.add_scaled(other, &BigRational::one());
        out
    }

    pub fn scale(&self, c: &BigRational) -> ChowClass {
        let mut out = ChowClass::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_integral(&self) -> bool {
        self.0.values().all(|c| c.is_integer())
    }
}

/// A linear map on `CH(G/P_Θ)` raising codimension by `degree`;
/// `cols[v]` is the image of `σ_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub degree: usize,
    pub cols: Vec<Vec<(usize, BigRational)>>,
}

impl Operator {
    pub fn apply(&self, x: &ChowClass) -> ChowClass {
        let mut out = ChowClass::zero();
        for (v, c) in x.terms() {
            for (w, d) in &self.cols[v] {
                out.add_term(*w, &(c * d));
            }
        }
        out
    }

    pub fn image(&self, v: usize) -> ChowClass {
        ChowClass::from_terms(self.cols[v].iter().cloned())
    }
}

/// One basis class with its label data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchubertClass {
    /// Index into the coset representatives.
    pub index: usize,
    pub codim: usize,
    /// `j` in `g_{codim,j}`.
    pub number: usize,
    /// 1-based path word.
    pub word: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieriEdge {
    pub from: usize,
    pub to: usize,
    /// Path-word letter distinguishing the two classes, when the covering
    /// is a simple left multiplication.
    pub label: Option<usize>,
    pub weight: BigInt,
}

/// Classes grouped by codimension and weighted coverings between them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PieriGraph {
    pub nodes: Vec<Vec<usize>>,
    pub edges: Vec<PieriEdge>,
}

/// The Schubert basis of one `G/P_Θ`.
#[derive(Debug)]
pub struct ChowRing {
    spec: DynkinSpec,
    rs: RootSystem,
    ops: WeylAction,
    theta: ParabolicSubset,
    reps: CosetReps,
    dual: Vec<usize>,
    star: Vec<usize>,
    classes: Vec<SchubertClass>,
    by_codim: Vec<Vec<usize>>,
}

fn parse_word(s: &str) -> Result<Vec<usize>> {
    let s = s.trim().trim_start_matches('[').trim_end_matches(']');
    if s.trim().is_empty() || s.trim() == "□" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad word letter `{t}`")))
        })
        .collect()
}

impl ChowRing {
    /// `omitted` lists 0-based indices of the simple roots outside `Θ`.
    pub fn new(spec: DynkinSpec, omitted: &[usize]) -> Result<Self> {
        let rs = RootSystem::new(spec);
        let n = rs.rank();
        let theta = ParabolicSubset::omitting(n, omitted)?;
        let ops = WeylAction::new(&rs);
        let reps = rs.minimal_coset_reps(&theta);
        let w0 = rs.longest_element(&ParabolicSubset::full(n));
        let dual: Vec<usize> = reps
            .elements
            .iter()
            .map(|u| reps.coset_index(&rs, &rs.compose(&w0, u).expect("same system")))
            .collect();
        let mut star = vec![0; n];
        for (i, s) in star.iter_mut().enumerate() {
            let img = rs.act(&w0, &rs.simple_root(i).weight)?;
            let neg: Vec<i64> = img.0.iter().map(|x| -x).collect();
            *s = (0..n)
                .find(|&j| rs.simple_root(j).weight.0 == neg)
                .ok_or_else(|| Error::Internal("w0 does not permute simple roots".into()))?;
        }
        let dim = reps.max_length();
        let mut ring = ChowRing {
            spec,
            rs,
            ops,
            theta,
            reps,
            dual,
            star,
            classes: Vec::new(),
            by_codim: vec![Vec::new(); dim + 1],
        };
        ring.assign_labels()?;
        Ok(ring)
    }

    /// The path word of `σ_u` read off the minimal representative `w_0 u w_θ`.
    fn path_word(&self, u: usize) -> Vec<usize> {
        let v = &self.reps.elements[self.dual[u]];
        self.rs
            .lex_least_word(&self.rs.inverse(v))
            .iter()
            .map(|&a| a as usize + 1)
            .collect()
    }

    /// The class whose path word is `word` (1-based).
    pub fn index_by_word(&self, word: &[usize]) -> Result<usize> {
        let letters: Vec<usize> = word
            .iter()
            .map(|&a| {
                if a == 0 || a > self.rs.rank() {
                    Err(Error::IndexOutOfRange(a))
                } else {
                    Ok(a - 1)
                }
            })
            .collect::<Result<_>>()?;
        let vinv = self.rs.element_from_word(&letters)?;
        let text = format!("{word:?}");
        if vinv.length() != word.len() {
            return Err(Error::UnknownLabel(format!("{text} is not reduced")));
        }
        let v = self.rs.inverse(&vinv);
        let k = self
            .reps
            .index_of(&self.rs, &v)
            .ok_or_else(|| Error::UnknownLabel(format!("{text} is not a minimal coset representative")))?;
        Ok(self.dual[k])
    }

    fn assign_labels(&mut self) -> Result<()> {
        let n = self.reps.len();
        let mut words: Vec<Vec<usize>> = (0..n).map(|u| self.path_word(u)).collect();
        let mut number = vec![0usize; n];
        let fixture = self.spec.family == Family::E && self.spec.rank == 7 && self.theta.omitted() == [6];
        if fixture {
            for &(i, j, w) in labels::E7_P7 {
                let word = parse_word(w)?;
                let u = self.index_by_word(&word)?;
                if self.reps.length(u) != i || number[u] != 0 {
                    return Err(Error::Internal(format!("label table entry g_{{{i},{j}}} is inconsistent")));
                }
                number[u] = j;
                words[u] = word;
            }
            if number.contains(&0) {
                return Err(Error::Internal("label table does not cover every class".into()));
            }
        }
        for u in 0..n {
            self.by_codim[self.reps.length(u)].push(u);
        }
        for list in self.by_codim.iter_mut() {
            if fixture {
                list.sort_by_key(|&u| number[u]);
            } else {
                list.sort_by(|&a, &b| words[a].cmp(&words[b]));
            }
            for (j, &u) in list.iter().enumerate() {
                number[u] = j + 1;
            }
        }
        self.classes = (0..n)
            .map(|u| SchubertClass {
                index: u,
                codim: self.reps.length(u),
                number: number[u],
                word: words[u].clone(),
            })
            .collect();
        Ok(())
    }

    pub fn spec(&self) -> &DynkinSpec {
        &self.spec
    }

    pub fn root_system(&self) -> &RootSystem {
        &self.rs
    }

    pub fn weyl_action(&self) -> &WeylAction {
        &self.ops
    }

    pub fn theta(&self) -> &ParabolicSubset {
        &self.theta
    }

    pub fn reps(&self) -> &CosetReps {
        &self.reps
    }

    /// `dim G/P_Θ`.
    pub fn dim(&self) -> usize {
        self.reps.max_length()
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn class(&self, u: usize) -> &SchubertClass {
        &self.classes[u]
    }

    pub fn codim(&self, u: usize) -> usize {
        self.reps.length(u)
    }

    /// Classes of codimension `i` in label order.
    pub fn classes_of_codim(&self, i: usize) -> &[usize] {
        self.by_codim.get(i).map_or(&[], |v| v.as_slice())
    }

    pub fn betti(&self) -> Vec<usize> {
        self.by_codim.iter().map(|v| v.len()).collect()
    }

    /// `g_{i,j}`.
    pub fn label(&self, u: usize) -> String {
        let c = &self.classes[u];
        format!("g_{{{},{}}}", c.codim, c.number)
    }

    pub fn index_by_label(&self, i: usize, j: usize) -> Result<usize> {
        self.by_codim
            .get(i)
            .and_then(|v| j.checked_sub(1).and_then(|j| v.get(j)))
            .copied()
            .ok_or_else(|| Error::UnknownLabel(format!("g_{{{i},{j}}}")))
    }

    /// Accepts `g_{i,j}`, `g{i,j}`, `g_i,j`, or a path word such as `[7,6]`.
    pub fn parse_class(&self, s: &str) -> Result<usize> {
        let t = s.trim();
        if t.starts_with('[') || t == "□" {
            return self.index_by_word(&parse_word(t)?);
        }
        let body = t
            .strip_prefix('g')
            .ok_or_else(|| Error::UnknownLabel(t.to_string()))?
            .trim_start_matches('_')
            .trim_start_matches('{')
            .trim_end_matches('}');
        let mut it = body.split(',');
        let parse = |x: Option<&str>| -> Result<usize> {
            x.and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::UnknownLabel(t.to_string()))
        };
        let i = parse(it.next())?;
        let j = parse(it.next())?;
        if it.next().is_some() {
            return Err(Error::UnknownLabel(t.to_string()));
        }
        self.index_by_label(i, j)
    }

    /// The Poincaré dual class `w_0 u w_θ`.
    pub fn dual(&self, u: usize) -> usize {
        self.dual[u]
    }

    /// The involution `i ↦ i*` with `w_0(α_i) = −α_{i*}` (0-based).
    pub fn star(&self, i: usize) -> usize {
        self.star[i]
    }

    /// Coefficient of the point class in `σ_u · σ_v` for complementary
    /// codimensions.
    pub fn poincare_pair(&self, u: usize, v: usize) -> Result<BigRational> {
        let (a, b) = (self.codim(u), self.codim(v));
        if a + b != self.dim() {
            return Err(Error::NotComplementary(a, b));
        }
        Ok(if self.dual[u] == v {
            BigRational::one()
        } else {
            BigRational::zero()
        })
    }

    /// The codimension of a homogeneous class; `None` for zero.
    pub fn codim_of(&self, x: &ChowClass) -> Result<Option<usize>> {
        let mut c = None;
        for (u, _) in x.terms() {
            let k = self.codim(u);
            match c {
                None => c = Some(k),
                Some(d) if d != k => return Err(Error::Inhomogeneous),
                _ => {}
            }
        }
        Ok(c)
    }

    /// `2g_{14,1} + 3g_{14,2}`; non-integral coefficients are parenthesized.
    pub fn format_class(&self, x: &ChowClass) -> String {
        self.format_with(x, |u| self.label(u))
    }

    /// As [`Self::format_class`] with path words in place of labels.
    pub fn format_class_words(&self, x: &ChowClass) -> String {
        self.format_with(x, |u| {
            let w: Vec<String> = self.classes[u].word.iter().map(|a| a.to_string()).collect();
            format!("[{}]", w.join(","))
        })
    }

    fn format_with(&self, x: &ChowClass, name: impl Fn(usize) -> String) -> String {
        if x.is_zero() {
            return "0".into();
        }
        let mut terms: Vec<(usize, &BigRational)> = x.terms().collect();
        terms.sort_by_key(|(u, _)| (self.codim(*u), self.classes[*u].number));
        let mut out = String::new();
        for (k, (u, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            if k > 0 {
                out.push_str(if neg { " - " } else { " + " });
            } else if neg {
                out.push('-');
            }
            let mag = c.abs();
            if !mag.is_integer() {
                let _ = write!(out, "({mag})");
            } else if !mag.is_one() {
                let _ = write!(out, "{mag}");
            }
            out.push_str(&name(u));
        }
        out
    }

    /// Unweighted Hasse diagram: `σ_u → σ_{s_i u}` for left multiplications
    /// that stay in `W^Θ` and raise the length.
    pub fn hasse(&self) -> PieriGraph {
        let mut edges = Vec::new();
        for u in 0..self.len() {
            for i in 0..self.rs.rank() {
                if let Some(t) = self.reps.left[i][u] {
                    edges.push(PieriEdge {
                        from: u,
                        to: t,
                        label: Some(self.star[i] + 1),
                        weight: BigInt::one(),
                    });
                }
            }
        }
        self.graph(edges)
    }

    fn graph(&self, mut edges: Vec<PieriEdge>) -> PieriGraph {
        let key = |u: usize| (self.codim(u), self.classes[u].number);
        edges.sort_by_key(|e| (key(e.from), key(e.to)));
        PieriGraph {
            nodes: self.by_codim.clone(),
            edges,
        }
    }

    fn check_divisor(&self, alpha: usize) -> Result<()> {
        if alpha >= self.rs.rank() {
            return Err(Error::IndexOutOfRange(alpha + 1));
        }
        if self.theta.contains(alpha) {
            return Err(Error::NotInSubring(alpha + 1));
        }
        Ok(())
    }

    /// Multiplication by `σ_{s_α}` from the Chevalley formula
    /// `σ_{s_α}·σ_u = Σ ⟨β^∨, ω_α⟩ σ_{u s_β}` over positive roots `β` with
    /// `u s_β ∈ W^Θ` and `l(u s_β) = l(u) + 1`.
    pub fn pieri_operator(&self, alpha: usize) -> Result<Operator> {
        self.check_divisor(alpha)?;
        let n = self.rs.rank();
        let rho = self.rs.weight_sum(self.theta.omitted());
        let mut cols = vec![Vec::new(); self.len()];
        for (u, col) in cols.iter_mut().enumerate() {
            let w = &self.reps.elements[u];
            for beta in self.rs.positive_roots() {
                let k = beta.coroot[alpha];
                if k == 0 {
                    continue;
                }
                let ub = self.rs.act(w, &beta.weight)?;
                if self.rs.height_sign(&ub.0) < 0 {
                    continue;
                }
                let pair: i64 = (0..n).map(|j| beta.coroot[j] * rho.0[j]).sum();
                if pair == 0 {
                    continue;
                }
                let lam: Vec<i64> = (0..n).map(|t| self.reps.orbit[u].0[t] - pair * ub.0[t]).collect();
                let Some(m) = self.reps.coset_of_weight(&lam) else {
                    continue;
                };
                if self.reps.length(m) != self.reps.length(u) + 1 {
                    continue;
                }
                let target = self.rs.compose(w, &self.rs.reflection_of_root(beta)?)?;
                if target == self.reps.elements[m] {
                    col.push((m, BigRational::from_integer(k.into())));
                }
            }
            col.sort_by_key(|(m, _)| *m);
        }
        Ok(Operator { degree: 1, cols })
    }

    /// The Pieri graph for the divisor `σ_{s_α}`.
    pub fn pieri_graph(&self, alpha: usize) -> Result<PieriGraph> {
        let op = self.pieri_operator(alpha)?;
        let mut edges = Vec::new();
        for (u, col) in op.cols.iter().enumerate() {
            for (t, c) in col {
                let label = (0..self.rs.rank())
                    .find(|&i| self.reps.left[i][u] == Some(*t))
                    .map(|i| self.star[i] + 1);
                edges.push(PieriEdge {
                    from: u,
                    to: *t,
                    label,
                    weight: c.to_integer(),
                });
            }
        }
        Ok(self.graph(edges))
    }

    /// The default divisor: the first omitted node.
    pub fn hyperplane_node(&self) -> usize {
        self.theta.omitted()[0]
    }

    pub fn pieri_multiply(&self, alpha: usize, x: &ChowClass) -> Result<ChowClass> {
        Ok(self.pieri_operator(alpha)?.apply(x))
    }

    /// `c(p)` on `CH(G/P_Θ)`: the coefficients `Δ_u(p)` for `u ∈ W^Θ`.
    pub fn c_map(&self, p: &QPoly) -> Result<ChowClass> {
        if p.nvars() != self.rs.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rs.rank(),
                found: p.nvars(),
            });
        }
        let mut out = ChowClass::zero();
        for k in 0..=p.degree().unwrap_or(0) {
            let part = p.component(k);
            if part.is_zero() {
                continue;
            }
            for (u, c) in preimage::c_map_parabolic(&self.ops, &self.reps, &part)? {
                out.add_term(u, &c);
            }
        }
        Ok(out)
    }

    /// Multiplication by `c(p)` through the Leibniz expansion.
    pub fn leibniz_operator(&self, p: &QPoly) -> Result<Operator> {
        let degree = p.homogeneous_degree()?.unwrap_or(0) as usize;
        let (ip, den) = p.clear_denominators();
        let den = BigRational::from_integer(den);
        let fast = ip
            .to_checked()
            .map(|cp| self.ops.leibniz_operator(&self.reps, &cp))
            .transpose()?;
        let cols: Vec<Vec<(usize, BigRational)>> = match fast {
            Some(cols) if cols.iter().flatten().all(|(_, c)| !c.is_poisoned()) => cols
                .into_iter()
                .map(|col| {
                    col.into_iter()
                        .map(|(w, c)| (w, BigRational::from_integer(c.value().expect("checked").into()) / &den))
                        .collect()
                })
                .collect(),
            _ => self
                .ops
                .leibniz_operator(&self.reps, &ip)?
                .into_iter()
                .map(|col| {
                    col.into_iter()
                        .map(|(w, c)| (w, BigRational::from_integer(c) / &den))
                        .collect()
                })
                .collect(),
        };
        Ok(Operator { degree, cols })
    }
}

impl PieriGraph {
    pub fn to_dot(&self, ring: &ChowRing) -> String {
        let mut s = String::from("digraph pieri {\n  rankdir=RL;\n  node [shape=box];\n");
        for (i, list) in self.nodes.iter().enumerate() {
            let _ = write!(s, "  {{ rank=same;");
            for &u in list {
                let _ = write!(s, " n{u};");
            }
            s.push_str(" }\n");
            for &u in list {
                let c = ring.class(u);
                let _ = writeln!(
                    s,
                    "  n{u} [label=\"g{{{i},{}}}\\n{:?}\"];",
                    c.number, c.word
                );
            }
        }
        for e in &self.edges {
            let mut attrs = Vec::new();
            if let Some(l) = e.label {
                attrs.push(format!("taillabel=\"{l}\""));
            }
            if !e.weight.is_one() {
                attrs.push(format!("label=\"{}\"", e.weight));
                attrs.push(format!("penwidth={}", e.weight.to_string().len() + 1));
            }
            let _ = writeln!(s, "  n{} -> n{} [{}];", e.from, e.to, attrs.join(", "));
        }
        s.push_str("}\n");
        s
    }
}

/// How a product was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Pieri,
    Duality,
    Leibniz,
}

/// A multiplicative generator of `CH(G/P_Θ) ⊗ ℚ` and its operator.
#[derive(Debug, Clone)]
pub struct Generator {
    pub class: usize,
    pub codim: usize,
    /// Polynomial with `c(p) = σ_class`; `None` for divisors handled by the
    /// Chevalley formula.
    pub preimage: Option<QPoly>,
    pub operator: Operator,
}

/// Options for [`ProductEngine::build`].
#[derive(Debug, Clone)]
pub struct EngineOptions {
    pub variant: Variant,
    pub reduce: bool,
    /// Previously computed reduced Groebner basis, used when its truncation
    /// covers the degrees needed.
    pub groebner: Option<GroebnerBasis>,
    /// Known preimages by class; each is re-verified through the c-map
    /// before use.
    pub preimages: Vec<(usize, QPoly)>,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions {
            variant: Variant::Invariance,
            reduce: true,
            groebner: None,
            preimages: Vec::new(),
        }
    }
}

/// A basis monomial in the generators: `gen · parent`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Mono {
    gen: Option<usize>,
    parent: usize,
}

/// Multiplication on `CH(G/P_Θ)` built from a small set of generators.
///
/// Codimension by codimension, products of already available generators
/// with the monomials of lower codimension are collected; when they fail to
/// span, basis classes are promoted to generators, their preimages are
/// computed, and their multiplication operators obtained from the Leibniz
/// expansion. Every class is then a rational combination of generator
/// monomials.
#[derive(Debug, Clone)]
pub struct ProductEngine {
    pub generators: Vec<Generator>,
    /// Codimensions where preimages were required.
    pub gap_codims: Vec<usize>,
    monos: Vec<Vec<Mono>>,
    /// `expr[u]`: `σ_u = Σ c·mono` over the monomials of its codimension.
    expr: Vec<Vec<(usize, BigRational)>>,
    pub groebner: Option<GroebnerBasis>,
    pub hyperplane: Option<usize>,
}

fn class_vector(ring: &ChowRing, k: usize, x: &ChowClass) -> Vec<(usize, BigRational)> {
    let list = ring.classes_of_codim(k);
    x.terms()
        .map(|(u, c)| (list.iter().position(|&v| v == u).expect("codimension k"), c.clone()))
        .collect()
}

impl ProductEngine {
    pub fn build(ring: &ChowRing, opts: &EngineOptions) -> Result<Self> {
        let dim = ring.dim();
        let betti = ring.betti();
        let mut generators: Vec<Generator> = Vec::new();
        for alpha in ring.theta().omitted() {
            let u = (0..ring.len())
                .find(|&u| ring.codim(u) == 1 && ring.reps().elements[u].word() == [alpha as u8])
                .ok_or_else(|| Error::Internal("missing divisor class".into()))?;
            generators.push(Generator {
                class: u,
                codim: 1,
                preimage: None,
                operator: ring.pieri_operator(alpha)?,
            });
        }
        let hyperplane = (generators.len() == 1).then_some(0);
        let mut engine = ProductEngine {
            generators,
            gap_codims: Vec::new(),
            monos: vec![vec![Mono { gen: None, parent: 0 }]],
            expr: vec![Vec::new(); ring.len()],
            groebner: opts.groebner.clone(),
            hyperplane,
        };
        let mut vecs: Vec<Vec<ChowClass>> = vec![vec![ChowClass::basis(0)]];
        for k in 1..=dim {
            let mut chosen: Vec<Mono> = Vec::new();
            let mut chosen_vecs: Vec<ChowClass> = Vec::new();
            let mut rows: Vec<Vec<(usize, BigRational)>> = Vec::new();
            let try_add = |x: ChowClass, m: Mono, chosen: &mut Vec<Mono>, cv: &mut Vec<ChowClass>, rows: &mut Vec<Vec<(usize, BigRational)>>| {
                if x.is_zero() {
                    return;
                }
                let v = class_vector(ring, k, &x);
                rows.push(v);
                if linalg::rank(betti[k], rows) == rows.len() {
                    chosen.push(m);
                    cv.push(x);
                } else {
                    rows.pop();
                }
            };
            for (g, gen) in engine.generators.iter().enumerate() {
                if gen.codim > k {
                    continue;
                }
                for (p, base) in vecs[k - gen.codim].iter().enumerate() {
                    if chosen.len() == betti[k] {
                        break;
                    }
                    try_add(
                        gen.operator.apply(base),
                        Mono { gen: Some(g), parent: p },
                        &mut chosen,
                        &mut chosen_vecs,
                        &mut rows,
                    );
                }
            }
            if chosen.len() < betti[k] {
                engine.gap_codims.push(k);
                log::info!(
                    "codim {k}: products span {} of {}; computing preimages",
                    chosen.len(),
                    betti[k]
                );
                for &u in ring.classes_of_codim(k) {
                    if chosen.len() == betti[k] {
                        break;
                    }
                    let before = chosen.len();
                    try_add(
                        ChowClass::basis(u),
                        Mono { gen: Some(engine.generators.len()), parent: 0 },
                        &mut chosen,
                        &mut chosen_vecs,
                        &mut rows,
                    );
                    if chosen.len() > before {
                        let gen = engine.make_generator(ring, opts, u)?;
                        engine.generators.push(gen);
                    }
                }
            }
            if chosen.len() != betti[k] {
                return Err(Error::Internal(format!("codimension {k} is not spanned")));
            }
            // σ_u = Σ_j c_j · mono_j: solve with the chosen vectors as columns
            let list = ring.classes_of_codim(k);
            for (r, &u) in list.iter().enumerate() {
                let mut eqs: Vec<Equation> = (0..betti[k])
                    .map(|i| Equation {
                        coeffs: Vec::new(),
                        rhs: if i == r { BigRational::one() } else { BigRational::zero() },
                    })
                    .collect();
                for (j, x) in chosen_vecs.iter().enumerate() {
                    for (i, c) in class_vector(ring, k, x) {
                        eqs[i].coeffs.push((j, c));
                    }
                }
                let sol = linalg::solve(betti[k], &eqs)?;
                if sol.free_params() != 0 {
                    return Err(Error::Internal("generator monomials are dependent".into()));
                }
                engine.expr[u] = sol.particular;
            }
            engine.monos.push(chosen);
            vecs.push(chosen_vecs);
        }
        engine.expr[0] = vec![(0, BigRational::one())];
        Ok(engine)
    }

    fn make_generator(&mut self, ring: &ChowRing, opts: &EngineOptions, u: usize) -> Result<Generator> {
        let k = ring.codim(u) as u32;
        let known = opts.preimages.iter().find(|(v, _)| *v == u).map(|(_, p)| p);
        if let Some(p) = known {
            if ring.c_map(p)? == ChowClass::basis(u) {
                log::info!("using the supplied preimage of {}", ring.label(u));
                return self.generator_from(ring, u, p.clone());
            }
            log::warn!("supplied preimage of {} is wrong; recomputing", ring.label(u));
        }
        if opts.reduce && self.groebner.as_ref().is_none_or(|g| g.truncation().is_some_and(|t| t < k)) {
            let inv = fundamental_invariants(ring.root_system(), Some(k))?;
            log::info!("Groebner basis of the invariant ideal up to degree {k}");
            self.groebner = Some(groebner(&inv.generators, Some(k))?);
        }
        let solver = PreimageSolver {
            rs: ring.root_system(),
            ops: ring.weyl_action(),
            theta: ring.theta(),
            reps: ring.reps(),
            variant: opts.variant,
            groebner: if opts.reduce { self.groebner.as_ref() } else { None },
        };
        log::info!("preimage of {} (degree {k})", ring.label(u));
        let p = solver.preimage(k, &[(u, BigRational::one())])?;
        self.generator_from(ring, u, p)
    }

    fn generator_from(&self, ring: &ChowRing, u: usize, p: QPoly) -> Result<Generator> {
        let k = ring.codim(u);
        log::info!("Leibniz operator for {} ({} terms)", ring.label(u), p.len());
        let operator = ring.leibniz_operator(&p)?;
        if operator.apply(&ChowClass::basis(0)) != ChowClass::basis(u) {
            return Err(Error::Internal("generator operator does not fix its class".into()));
        }
        Ok(Generator {
            class: u,
            codim: k,
            preimage: Some(p),
            operator,
        })
    }

    /// `mono(y)` for every basis monomial of codimension `≤ dim − codim(y)`.
    fn mono_images(&self, ring: &ChowRing, y: &ChowClass) -> Result<Vec<Vec<ChowClass>>> {
        let top = ring.dim() - ring.codim_of(y)?.unwrap_or(0);
        let mut out: Vec<Vec<ChowClass>> = vec![vec![y.clone()]];
        for k in 1..self.monos.len() {
            if k > top {
                out.push(vec![ChowClass::zero(); self.monos[k].len()]);
                continue;
            }
            let row = self.monos[k]
                .iter()
                .map(|m| {
                    let g = &self.generators[m.gen.expect("nonunit monomial")];
                    g.operator.apply(&out[k - g.codim][m.parent])
                })
                .collect();
            out.push(row);
        }
        Ok(out)
    }

    /// `σ_u · y` for every class `u`, sharing the monomial images of `y`.
    pub fn products_with(&self, ring: &ChowRing, y: &ChowClass) -> Result<Vec<ChowClass>> {
        let images = self.mono_images(ring, y)?;
        Ok((0..ring.len())
            .map(|u| {
                let k = ring.codim(u);
                let mut out = ChowClass::zero();
                for (j, c) in &self.expr[u] {
                    out.add_scaled(&images[k][*j], c);
                }
                out
            })
            .collect())
    }

    /// `x · y` through the generator expressions of `x`.
    pub fn multiply_leibniz(&self, ring: &ChowRing, x: &ChowClass, y: &ChowClass) -> Result<ChowClass> {
        ring.codim_of(x)?;
        let images = self.mono_images(ring, y)?;
        let mut out = ChowClass::zero();
        for (u, a) in x.terms() {
            let k = ring.codim(u);
            for (j, c) in &self.expr[u] {
                out.add_scaled(&images[k][*j], &(a * c));
            }
        }
        Ok(out)
    }

    /// Multiplication by `x` from a fresh preimage of `x` and its Leibniz
    /// operator, bypassing the generator expressions. Costly; meant for
    /// cross-checks. Returns the preimage as well.
    pub fn preimage_operator(ring: &ChowRing, variant: Variant, x: &ChowClass) -> Result<(QPoly, Operator)> {
        let k = ring.codim_of(x)?.unwrap_or(0);
        let solver = PreimageSolver {
            rs: ring.root_system(),
            ops: ring.weyl_action(),
            theta: ring.theta(),
            reps: ring.reps(),
            variant,
            groebner: None,
        };
        let target: Vec<(usize, BigRational)> = x.terms().map(|(u, c)| (u, c.clone())).collect();
        let p = solver.preimage(k as u32, &target)?;
        let op = ring.leibniz_operator(&p)?;
        Ok((p, op))
    }

    /// `h^k` when there is a single divisor class.
    pub fn hyperplane_power(&self, ring: &ChowRing, k: usize) -> Option<ChowClass> {
        let h = &self.generators[self.hyperplane?].operator;
        let mut x = ChowClass::basis(0);
        for _ in 0..k.min(ring.dim() + 1) {
            x = h.apply(&x);
        }
        Some(x)
    }

    /// `x = λ·h^k`, if so.
    fn as_hyperplane_power(&self, ring: &ChowRing, x: &ChowClass) -> Result<Option<(usize, BigRational)>> {
        let Some(k) = ring.codim_of(x)? else {
            return Ok(None);
        };
        let Some(hk) = self.hyperplane_power(ring, k) else {
            return Ok(None);
        };
        let Some((u, c)) = hk.terms().next() else {
            return Ok(None);
        };
        let lambda = x.coeff(u) / c;
        Ok((hk.scale(&lambda) == *x).then_some((k, lambda)))
    }

    /// The product with the preferred route: Pieri when one factor is a
    /// multiple of a power of `h`, duality for complementary codimensions,
    /// otherwise the generator expressions.
    pub fn multiply(&self, ring: &ChowRing, x: &ChowClass, y: &ChowClass) -> Result<(ChowClass, Route)> {
        let (cx, cy) = (ring.codim_of(x)?, ring.codim_of(y)?);
        let (Some(a), Some(b)) = (cx, cy) else {
            return Ok((ChowClass::zero(), Route::Pieri));
        };
        if a + b > ring.dim() {
            return Ok((ChowClass::zero(), Route::Pieri));
        }
        for (p, q) in [(x, y), (y, x)] {
            if let Some((k, lambda)) = self.as_hyperplane_power(ring, p)? {
                let h = &self.generators[self.hyperplane.expect("hyperplane")].operator;
                let mut z = q.clone();
                for _ in 0..k {
                    z = h.apply(&z);
                }
                return Ok((z.scale(&lambda), Route::Pieri));
            }
        }
        if a + b == ring.dim() {
            let mut c = BigRational::zero();
            for (u, s) in x.terms() {
                c += s * y.coeff(ring.dual(u));
            }
            let top = ring.classes_of_codim(ring.dim())[0];
            return Ok((ChowClass::from_terms([(top, c)]), Route::Duality));
        }
        Ok((self.multiply_leibniz(ring, x, y)?, Route::Leibniz))
    }

    /// Generator expression of `σ_u`: `(coefficient, generator exponents)`
    /// in the order of [`Self::generators`].
    pub fn expression(&self, ring: &ChowRing, u: usize) -> Vec<(BigRational, Vec<usize>)> {
        let k = ring.codim(u);
        self.expr[u]
            .iter()
            .map(|(j, c)| {
                let mut e = vec![0; self.generators.len()];
                let (mut kk, mut jj) = (k, *j);
                while let Some(g) = self.monos[kk][jj].gen {
                    e[g] += 1;
                    jj = self.monos[kk][jj].parent;
                    kk -= self.generators[g].codim;
                }
                (c.clone(), e)
            })
            .collect()
    }

    /// Full table `σ_u·σ_v` for `u ≤ v` with `codim(u) + codim(v) ≤ dim`,
    /// verifying grading and integrality of every entry.
    pub fn table(&self, ring: &ChowRing) -> Result<Vec<(usize, usize, ChowClass)>> {
        let mut out = Vec::new();
        for v in 0..ring.len() {
            out.extend(self.table_column(ring, v)?);
        }
        Ok(out)
    }

    /// The entries `σ_u·σ_v` of [`Self::table`] for one `v`; columns are
    /// independent and may be computed in parallel.
    pub fn table_column(&self, ring: &ChowRing, v: usize) -> Result<Vec<(usize, usize, ChowClass)>> {
        let mut out = Vec::new();
        let prods = self.products_with(ring, &ChowClass::basis(v))?;
        for (u, z) in prods.into_iter().enumerate() {
            if u > v || ring.codim(u) + ring.codim(v) > ring.dim() {
                continue;
            }
            check_entry(ring, u, v, &z)?;
            out.push((u, v, z));
        }
        Ok(out)
    }
}

fn check_entry(ring: &ChowRing, u: usize, v: usize, z: &ChowClass) -> Result<()> {
    if let Some(k) = ring.codim_of(z)? {
        if k != ring.codim(u) + ring.codim(v) {
            return Err(Error::Internal(format!(
                "{} * {} has codimension {k}",
                ring.label(u),
                ring.label(v)
            )));
        }
    }
    if !z.is_integral() {
        return Err(Error::NonIntegral(format!(
            "{} * {} = {}",
            ring.label(u),
            ring.label(v),
            ring.format_class(z)
        )));
    }
    Ok(())
}

/// Coefficients of `Π [d_i]_t / Π [d'_j]_t`, the Poincaré polynomial of
/// `W/W_Θ`, from the degrees of `W` and of `W_Θ` (both read off root
/// heights).
pub fn quotient_poincare(rs: &RootSystem, theta: &ParabolicSubset) -> Result<Vec<BigInt>> {
    let degrees_of = |roots: Vec<i64>| -> Vec<usize> {
        let max_h = roots.iter().copied().max().unwrap_or(0) as usize;
        let mut count = vec![0usize; max_h + 2];
        for h in roots {
            count[h as usize] += 1;
        }
        let mut d = Vec::new();
        for m in 1..=max_h {
            for _ in 0..count[m].saturating_sub(count[m + 1]) {
                d.push(m + 1);
            }
        }
        d
    };
    let all: Vec<i64> = rs.positive_roots().iter().map(|r| r.height()).collect();
    let sub: Vec<i64> = rs
        .positive_roots()
        .iter()
        .filter(|r| r.simple.iter().enumerate().all(|(j, &c)| c == 0 || theta.contains(j)))
        .map(|r| r.height())
        .collect();
    let qint = |d: usize| -> Vec<BigInt> { vec![BigInt::one(); d] };
    let mul = |a: &[BigInt], b: &[BigInt]| -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    };
    let mut num = vec![BigInt::one()];
    for d in degrees_of(all) {
        num = mul(&num, &qint(d));
    }
    let mut den = vec![BigInt::one()];
    for d in degrees_of(sub) {
        den = mul(&den, &qint(d));
    }
    // exact division by a monic polynomial with constant term 1
    let n = num.len() - den.len() + 1;
    let mut q = vec![BigInt::zero(); n];
    let mut r = num;
    for i in 0..n {
        let c = r[i].clone();
        if !c.is_zero() {
            for (j, d) in den.iter().enumerate() {
                r[i + j] -= &c * d;
            }
        }
        q[i] = c;
    }
    if r.iter().any(|x| !x.is_zero()) {
        return Err(Error::Internal("Poincaré polynomial division left a remainder".into()));
    }
    Ok(q)
}

/// Multiplication table as JSON with a stable field order.
pub fn table_json(ring: &ChowRing, engine: &ProductEngine, table: &[(usize, usize, ChowClass)]) -> String {
    let esc = |s: String| serde_json::Value::String(s).to_string();
    let mut s = String::new();
    let spec = ring.spec();
    let omitted: Vec<String> = ring.theta().omitted().iter().map(|i| (i + 1).to_string()).collect();
    let _ = write!(
        s,
        "{{\n  \"type\": {},\n  \"parabolic\": [{}],\n  \"dim\": {},\n  \"basis\": [\n",
        esc(format!("{}{}", spec.family.letter(), spec.rank)),
        omitted.join(", "),
        ring.dim(),
    );
    let mut order: Vec<usize> = (0..ring.len()).collect();
    order.sort_by_key(|&u| (ring.codim(u), ring.class(u).number));
    for (k, &u) in order.iter().enumerate() {
        let c = ring.class(u);
        let word: Vec<String> = c.word.iter().map(|a| a.to_string()).collect();
        let _ = writeln!(
            s,
            "    {{\"codim\": {}, \"index\": {}, \"word\": [{}]}}{}",
            c.codim,
            c.number,
            word.join(", "),
            if k + 1 < order.len() { "," } else { "" }
        );
    }
    s.push_str("  ],\n  \"products\": [\n");
    let mut rows: Vec<&(usize, usize, ChowClass)> = table.iter().collect();
    let key = |u: usize| (ring.codim(u), ring.class(u).number);
    rows.sort_by_key(|(u, v, _)| (key(*u), key(*v)));
    for (k, (u, v, z)) in rows.iter().enumerate() {
        let mut terms: Vec<(usize, &BigRational)> = z.terms().collect();
        terms.sort_by_key(|(w, _)| key(*w));
        let terms: Vec<String> = terms
            .iter()
            .map(|(w, c)| format!("{{\"class\": {}, \"coeff\": {}}}", esc(ring.label(*w)), esc(c.to_string())))
            .collect();
        let _ = writeln!(
            s,
            "    {{\"left\": {}, \"right\": {}, \"terms\": [{}]}}{}",
            esc(ring.label(*u)),
            esc(ring.label(*v)),
            terms.join(", "),
            if k + 1 < rows.len() { "," } else { "" }
        );
    }
    let _ = write!(
        s,
        "  ],\n  \"preimage_codims\": [{}]\n}}\n",
        engine.gap_codims.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
    );
    s
}

/// Whether `p` is fixed by every simple reflection in `Θ`.
pub fn is_theta_invariant(ring: &ChowRing, p: &QPoly) -> Result<bool> {
    for i in ring.theta().theta() {
        if ring.weyl_action().reflect(i, p)? != *p {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The hyperplane class polynomial `w[α]`.
pub fn divisor_polynomial(ring: &ChowRing, alpha: usize) -> QPoly {
    Polynomial::monomial(ring.root_system().rank(), Monomial::var(alpha), BigRational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(ty: &str, omit: &[usize]) -> ChowRing {
        ChowRing::new(ty.parse().unwrap(), omit).unwrap()
    }

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn projective_line_and_plane() {
        let r = ring("A1", &[0]);
        assert_eq!(r.betti(), [1, 1]);
        assert_eq!(r.hasse().edges.len(), 1);
        let r = ring("A2", &[0]);
        assert_eq!(r.betti(), [1, 1, 1]);
        let h = r.pieri_operator(0).unwrap();
        let line = h.image(0);
        let point = h.apply(&line);
        assert_eq!(r.codim_of(&point).unwrap(), Some(2));
        assert!(h.apply(&point).is_zero());
        assert!(r.pieri_operator(1).is_err());
    }

    #[test]
    fn labels_round_trip() {
        let r = ring("E7", &[6]);
        for u in 0..r.len() {
            let c = r.class(u);
            assert_eq!(r.index_by_label(c.codim, c.number).unwrap(), u);
            assert_eq!(r.parse_class(&r.label(u)).unwrap(), u);
            assert_eq!(r.index_by_word(&c.word).unwrap(), u);
            assert_eq!(c.word.len(), r.dim() - c.codim);
        }
        assert_eq!(r.parse_class("g{5,1}").unwrap(), r.parse_class("g_5,1").unwrap());
        assert!(r.parse_class("g_{5,3}").is_err());
        assert!(r.index_by_word(&[7, 7]).is_err());
        assert!(r.index_by_word(&[1]).is_err());
    }

    #[test]
    fn duality_reverses_codimension() {
        for (ty, omit) in [("F4", vec![0]), ("B3", vec![1]), ("E6", vec![0]), ("A3", vec![0, 2])] {
            let r = ring(ty, &omit);
            for u in 0..r.len() {
                assert_eq!(r.codim(r.dual(u)), r.dim() - r.codim(u));
                assert_eq!(r.dual(r.dual(u)), u);
            }
            let top = r.classes_of_codim(r.dim())[0];
            assert!(r.poincare_pair(0, top).unwrap().is_one());
            assert!(matches!(r.poincare_pair(0, 0), Err(Error::NotComplementary(0, 0))));
        }
    }

    #[test]
    fn chevalley_matches_leibniz() {
        for (ty, omit) in [("B3", vec![0]), ("C3", vec![2]), ("G2", vec![1]), ("F4", vec![3]), ("A3", vec![0, 2])] {
            let r = ring(ty, &omit);
            for &a in &omit {
                let chev = r.pieri_operator(a).unwrap();
                let leib = r.leibniz_operator(&divisor_polynomial(&r, a)).unwrap();
                assert_eq!(chev, leib, "{ty} α{}", a + 1);
            }
        }
    }

    #[test]
    fn poincare_oracle_small_cases() {
        let rs = RootSystem::new("A3".parse().unwrap());
        let full = ParabolicSubset::borel(3);
        let ones = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
        assert_eq!(quotient_poincare(&rs, &full).unwrap(), ones(&[1, 3, 5, 6, 5, 3, 1]));
        let gr = ParabolicSubset::omitting(3, &[1]).unwrap();
        assert_eq!(quotient_poincare(&rs, &gr).unwrap(), ones(&[1, 1, 2, 1, 1]));
        assert_eq!(rs.coset_counts_by_length(&gr), [1, 1, 2, 1, 1]);
    }

    #[test]
    fn class_arithmetic_and_format() {
        let r = ring("E7", &[6]);
        let a = r.index_by_label(10, 1).unwrap();
        let b = r.index_by_label(10, 2).unwrap();
        let x = ChowClass::from_terms([(a, q(2)), (b, q(2))]);
        assert_eq!(r.format_class(&x), "2g_{10,1} + 2g_{10,2}");
        let y = x.add(&ChowClass::from_terms([(a, q(-2))]));
        assert_eq!(r.format_class(&y), "2g_{10,2}");
        let z = y.scale(&BigRational::new((-1).into(), 4.into()));
        assert_eq!(r.format_class(&z), "-(1/2)g_{10,2}");
        assert!(!z.is_integral());
        assert_eq!(r.format_class(&ChowClass::zero()), "0");
        let mixed = ChowClass::from_terms([(a, q(1)), (0, q(1))]);
        assert!(matches!(r.codim_of(&mixed), Err(Error::Inhomogeneous)));
    }

    #[test]
    fn engine_on_a_grassmannian() {
        // Gr(2,4): σ_1^2 = σ_2 + σ_{1,1}, σ_1^4 = 2 points
        let r = ring("A3", &[1]);
        let e = ProductEngine::build(&r, &EngineOptions::default()).unwrap();
        assert_eq!(e.gap_codims, [2]);
        let h = e.hyperplane_power(&r, 2).unwrap();
        assert_eq!(h.len(), 2);
        assert!(h.terms().all(|(_, c)| c.is_one()));
        let top = e.hyperplane_power(&r, 4).unwrap();
        assert_eq!(top, ChowClass::from_terms([(r.classes_of_codim(4)[0], q(2))]));
        let (x, y) = (r.classes_of_codim(2)[0], r.classes_of_codim(2)[1]);
        let (xx, route) = e.multiply(&r, &ChowClass::basis(x), &ChowClass::basis(x)).unwrap();
        assert_eq!(route, Route::Duality);
        assert!(xx.terms().all(|(_, c)| c.is_one()));
        let (xy, _) = e.multiply(&r, &ChowClass::basis(x), &ChowClass::basis(y)).unwrap();
        assert!(xy.is_zero());
        let table = e.table(&r).unwrap();
        assert_eq!(table.len(), 6 + 4 + 2 + 1);
    }

    #[test]
    fn supplied_preimages_are_checked() {
        let r = ring("F4", &[0]);
        let plain = ProductEngine::build(&r, &EngineOptions::default()).unwrap();
        let g = plain.generators.iter().find(|g| g.preimage.is_some()).unwrap();
        let good = EngineOptions {
            preimages: vec![(g.class, g.preimage.clone().unwrap())],
            ..EngineOptions::default()
        };
        let e = ProductEngine::build(&r, &good).unwrap();
        assert_eq!(e.gap_codims, plain.gap_codims);
        let wrong = EngineOptions {
            preimages: vec![(g.class, QPoly::parse(4, "w[1]^4").unwrap())],
            ..EngineOptions::default()
        };
        let e = ProductEngine::build(&r, &wrong).unwrap();
        let a = e.table(&r).unwrap();
        assert_eq!(a, plain.table(&r).unwrap());
    }
}
