//! Sparse multivariate polynomials in the fundamental-weight variables
//! `w[1], …, w[l]`.
//!
//! Terms are kept sorted by graded reverse-lexicographic order with
//! `w[1] < w[2] < … < w[l]`, leading term first. The coefficient type is
//! generic: exact rationals for user-facing values, big integers, a
//! checked `i128` for hot loops, and linear forms in unknowns for the
//! undetermined-coefficient systems.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rustc_hash::FxHashMap;

use crate::error::{Error, Result};

pub const MAX_VARS: usize = 16;

/// Exponent vector packed one byte per variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Monomial(u128);

impl Monomial {
    pub const ONE: Monomial = Monomial(0);

    pub fn from_exponents(exps: &[u32]) -> Result<Self> {
        if exps.len() > MAX_VARS {
            return Err(Error::DimensionMismatch {
                expected: MAX_VARS,
                found: exps.len(),
            });
        }
        let mut bits = 0u128;
        let mut total = 0u32;
        for (i, &e) in exps.iter().enumerate() {
            total += e;
            if e > 255 || total > 255 {
                return Err(Error::Internal(format!("exponent too large: {e}")));
            }
            bits |= (e as u128) << (8 * i);
        }
        Ok(Monomial(bits))
    }

    pub fn var(i: usize) -> Self {
        Monomial(1u128 << (8 * i))
    }

    #[inline]
    pub fn exp(self, i: usize) -> u32 {
        ((self.0 >> (8 * i)) & 0xff) as u32
    }

    pub fn exponents(self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exp(i)).collect()
    }

    #[inline]
    pub fn degree(self) -> u32 {
        self.0.to_le_bytes().iter().map(|&b| b as u32).sum()
    }

    /// Product; the caller keeps total degrees below 256.
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        debug_assert!(self.degree() + other.degree() <= 255);
        Monomial(self.0 + other.0)
    }

    /// `self` with the exponent of variable `i` cleared.
    #[inline]
    pub fn without(self, i: usize) -> Monomial {
        Monomial(self.0 & !(0xffu128 << (8 * i)))
    }

    pub fn divides(self, other: Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exp(i) <= other.exp(i))
    }

    /// Quotient `other / self`; the caller checks divisibility.
    pub fn div(other: Monomial, by: Monomial) -> Monomial {
        debug_assert!(by.divides(other));
        Monomial(other.0 - by.0)
    }

    pub fn lcm(self, other: Monomial) -> Monomial {
        let mut bits = 0u128;
        for i in 0..MAX_VARS {
            bits |= (self.exp(i).max(other.exp(i)) as u128) << (8 * i);
        }
        Monomial(bits)
    }

    pub fn is_coprime(self, other: Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exp(i) == 0 || other.exp(i) == 0)
    }

    /// Graded reverse-lexicographic comparison, `w[1]` the smallest variable.
    pub fn grevlex(self, other: Monomial) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for i in 0..MAX_VARS {
            let (a, b) = (self.exp(i), other.exp(i));
            if a != b {
                return b.cmp(&a);
            }
        }
        Ordering::Equal
    }

    /// All exponent vectors of total degree `k` in `nvars` variables, in
    /// decreasing grevlex order.
    pub fn all_of_degree(nvars: usize, k: u32) -> Vec<Monomial> {
        fn rec(i: usize, nvars: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            if i + 1 == nvars {
                cur.push(left);
                out.push(Monomial::from_exponents(cur).expect("bounded"));
                cur.pop();
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(i + 1, nvars, left - e, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if nvars == 0 {
            if k == 0 {
                out.push(Monomial::ONE);
            }
            return out;
        }
        rec(0, nvars, k, &mut Vec::new(), &mut out);
        out.sort_by(|a, b| b.grevlex(*a));
        out
    }
}

/// Additive coefficient structure with integer scaling. Enough for the Weyl
/// action and divided differences, which never multiply two coefficients.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn sub_assign(&mut self, other: &Self);
    fn neg(&self) -> Self;
    fn scale_int(&self, k: i128) -> Self;
}

/// Coefficients that also form a commutative ring.
pub trait RingCoeff: Coeff {
    fn one() -> Self;
    fn from_int(k: i128) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn scale_int(&self, k: i128) -> Self {
        self * BigRational::from_integer(BigInt::from(k))
    }
}

impl RingCoeff for BigRational {
    fn one() -> Self {
        One::one()
    }
    fn from_int(k: i128) -> Self {
        BigRational::from_integer(BigInt::from(k))
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign(&mut self, other: &Self) {
        *self -= other;
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn scale_int(&self, k: i128) -> Self {
        self * BigInt::from(k)
    }
}

impl RingCoeff for BigInt {
    fn one() -> Self {
        One::one()
    }
    fn from_int(k: i128) -> Self {
        BigInt::from(k)
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// `i128` whose overflow turns the value into a sticky poison marker.
/// Results that are not poisoned are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checked(i128);

impl Checked {
    const POISON: i128 = i128::MIN;

    pub fn new(v: i128) -> Self {
        Checked(v)
    }

    pub fn value(self) -> Option<i128> {
        (self.0 != Self::POISON).then_some(self.0)
    }

    pub fn is_poisoned(self) -> bool {
        self.0 == Self::POISON
    }

    #[inline]
    fn lift(r: Option<i128>) -> Self {
        Checked(r.unwrap_or(Self::POISON))
    }
}

impl Coeff for Checked {
    fn zero() -> Self {
        Checked(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
    #[inline]
    fn add_assign(&mut self, other: &Self) {
        if self.is_poisoned() || other.is_poisoned() {
            self.0 = Self::POISON;
        } else {
            *self = Self::lift(self.0.checked_add(other.0));
        }
    }
    #[inline]
    fn sub_assign(&mut self, other: &Self) {
        if self.is_poisoned() || other.is_poisoned() {
            self.0 = Self::POISON;
        } else {
            *self = Self::lift(self.0.checked_sub(other.0));
        }
    }
    fn neg(&self) -> Self {
        Self::lift(self.0.checked_neg())
    }
    #[inline]
    fn scale_int(&self, k: i128) -> Self {
        if self.is_poisoned() {
            *self
        } else {
            Self::lift(self.0.checked_mul(k))
        }
    }
}

impl RingCoeff for Checked {
    fn one() -> Self {
        Checked(1)
    }
    fn from_int(k: i128) -> Self {
        Checked(k)
    }
    fn mul(&self, other: &Self) -> Self {
        if self.is_poisoned() || other.is_poisoned() {
            Checked(Self::POISON)
        } else {
            Self::lift(self.0.checked_mul(other.0))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: Vec<(Monomial, C)>,
}

pub type QPoly = Polynomial<BigRational>;

impl<C: Coeff> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: Vec::new(),
        }
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, C)>) -> Self {
        let mut acc: FxHashMap<Monomial, C> = FxHashMap::default();
        for (m, c) in terms {
            acc.entry(m)
                .and_modify(|x| x.add_assign(&c))
                .or_insert(c);
        }
        Self::from_map(nvars, acc)
    }

    pub(crate) fn from_map(nvars: usize, acc: FxHashMap<Monomial, C>) -> Self {
        let mut terms: Vec<(Monomial, C)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.grevlex(a.0));
        Polynomial { nvars, terms }
    }

    /// Terms already sorted (decreasing grevlex) and free of zeros.
    #[allow(dead_code)]
    pub(crate) fn from_sorted(nvars: usize, terms: Vec<(Monomial, C)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0.grevlex(w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        Polynomial { nvars, terms }
    }

    pub fn monomial(nvars: usize, m: Monomial, c: C) -> Self {
        Self::from_terms(nvars, [(m, c)])
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &[(Monomial, C)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, C)> {
        self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn leading(&self) -> Option<&(Monomial, C)> {
        self.terms.first()
    }

    /// Maximal total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.iter().map(|(m, _)| m.degree()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        match self.terms.first() {
            None => true,
            Some((m, _)) => {
                let d = m.degree();
                self.terms.iter().all(|(x, _)| x.degree() == d)
            }
        }
    }

    /// Degree of a homogeneous polynomial, `Ok(None)` for zero.
    pub fn homogeneous_degree(&self) -> Result<Option<u32>> {
        if !self.is_homogeneous() {
            return Err(Error::NotHomogeneous);
        }
        Ok(self.degree())
    }

    pub fn coeff(&self, m: Monomial) -> Option<&C> {
        self.terms
            .binary_search_by(|(x, _)| m.grevlex(*x))
            .ok()
            .map(|k| &self.terms[k].1)
    }

    /// Value of a constant polynomial (zero if empty).
    pub fn constant_value(&self) -> Option<C> {
        match self.terms.as_slice() {
            [] => Some(C::zero()),
            [(m, c)] if *m == Monomial::ONE => Some(c.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, subtract: bool) -> Self {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.0.grevlex(b.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    let (m, c) = &other.terms[j];
                    out.push((*m, if subtract { c.neg() } else { c.clone() }));
                    j += 1;
                }
                Ordering::Equal => {
                    let mut c = self.terms[i].1.clone();
                    if subtract {
                        c.sub_assign(&other.terms[j].1);
                    } else {
                        c.add_assign(&other.terms[j].1);
                    }
                    if !c.is_zero() {
                        out.push((self.terms[i].0, c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Polynomial {
            nvars: self.nvars.max(other.nvars),
            terms: out,
        }
    }

    pub fn neg(&self) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect(),
        }
    }

    pub fn scale_int(&self, k: i128) -> Self {
        if k == 0 {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (*m, c.scale_int(k))).collect(),
        }
    }

    /// Multiplication by a monomial with integer coefficient.
    pub fn mul_monomial_int(&self, m: Monomial, k: i128) -> Self {
        if k == 0 {
            return Self::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(x, c)| (x.mul(m), c.scale_int(k))).collect(),
        }
    }

    /// Multiplication by an integer linear form `Σ k_t w[t]`.
    pub fn mul_linear_int(&self, form: &[i64]) -> Self {
        let mut acc: FxHashMap<Monomial, C> = FxHashMap::default();
        for (t, &k) in form.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let v = Monomial::var(t);
            for (m, c) in &self.terms {
                let c = c.scale_int(k as i128);
                acc.entry(m.mul(v))
                    .and_modify(|x| x.add_assign(&c))
                    .or_insert(c);
            }
        }
        Self::from_map(self.nvars, acc)
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        Polynomial::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (*m, f(c))))
    }

    /// The homogeneous component of degree `k`.
    pub fn component(&self, k: u32) -> Self {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == k)
                .cloned()
                .collect(),
        }
    }
}

impl<C: RingCoeff> Polynomial<C> {
    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::one())
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        Self::monomial(nvars, Monomial::ONE, c)
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::monomial(nvars, Monomial::var(i), C::one())
    }

    /// Integer linear form `Σ k_t w[t]`.
    pub fn linear(form: &[i64]) -> Self {
        Self::from_terms(
            form.len(),
            form.iter()
                .enumerate()
                .map(|(t, &k)| (Monomial::var(t), C::from_int(k as i128))),
        )
    }

    pub fn scale(&self, k: &C) -> Self {
        Self::from_terms(self.nvars, self.terms.iter().map(|(m, c)| (*m, c.mul(k))))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut acc: FxHashMap<Monomial, C> = FxHashMap::default();
        acc.reserve(self.terms.len() * other.terms.len().min(64));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca.mul(cb);
                acc.entry(ma.mul(*mb))
                    .and_modify(|x| x.add_assign(&c))
                    .or_insert(c);
            }
        }
        Self::from_map(self.nvars.max(other.nvars), acc)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }
}

impl QPoly {
    /// Integer multiple with coprime integer coefficients and the scale used.
    pub fn clear_denominators(&self) -> (Polynomial<BigInt>, BigInt) {
        use num_integer::Integer;
        let mut l: BigInt = One::one();
        for (_, c) in &self.terms {
            l = l.lcm(c.denom());
        }
        let p = Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, (c * BigRational::from_integer(l.clone())).to_integer()))
                .collect(),
        };
        (p, l)
    }

    pub fn parse(nvars: usize, s: &str) -> Result<Self> {
        Parser::new(nvars, s).parse()
    }
}

impl Polynomial<BigInt> {
    pub fn to_rational(&self) -> QPoly {
        Polynomial {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (*m, BigRational::from_integer(c.clone())))
                .collect(),
        }
    }

    /// Narrows to checked machine integers when every coefficient fits.
    pub fn to_checked(&self) -> Option<Polynomial<Checked>> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let v = c.to_i128()?;
            if v == i128::MIN {
                return None;
            }
            terms.push((*m, Checked(v)));
        }
        Some(Polynomial {
            nvars: self.nvars,
            terms,
        })
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: Monomial, nvars: usize) -> fmt::Result {
    let mut first = true;
    for i in 0..nvars.max(MAX_VARS) {
        let e = m.exp(i);
        if e == 0 {
            continue;
        }
        if !first {
            write!(f, "*")?;
        }
        first = false;
        write!(f, "w[{}]", i + 1)?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

fn write_signed_terms<I>(f: &mut fmt::Formatter<'_>, nvars: usize, terms: I) -> fmt::Result
where
    I: Iterator<Item = (Monomial, bool, String)>,
{
    let mut any = false;
    for (k, (m, negative, abs)) in terms.enumerate() {
        any = true;
        if k == 0 {
            if negative {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if negative { '-' } else { '+' })?;
        }
        if m == Monomial::ONE {
            write!(f, "{abs}")?;
        } else {
            if abs != "1" {
                write!(f, "{abs}*")?;
            }
            write_monomial(f, m, nvars)?;
        }
    }
    if !any {
        write!(f, "0")?;
    }
    Ok(())
}

impl fmt::Display for Polynomial<BigRational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_terms(
            f,
            self.nvars,
            self.terms
                .iter()
                .map(|(m, c)| (*m, c.is_negative(), c.abs().to_string())),
        )
    }
}

impl fmt::Display for Polynomial<BigInt> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signed_terms(
            f,
            self.nvars,
            self.terms
                .iter()
                .map(|(m, c)| (*m, c.is_negative(), c.abs().to_string())),
        )
    }
}

/// Recursive-descent parser for `w[i]` expressions with `+ - * / ^` and
/// parentheses. Division is only allowed by integer literals.
struct Parser<'a> {
    nvars: usize,
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(nvars: usize, src: &'a str) -> Self {
        Parser {
            nvars,
            src,
            chars: src.chars().collect(),
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn parse(mut self) -> Result<QPoly> {
        let p = self.expr()?;
        if self.peek().is_some() {
            return Err(self.err("unexpected trailing input"));
        }
        Ok(p)
    }

    fn expr(&mut self) -> Result<QPoly> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some('-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<QPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.unary()?);
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.integer()?;
                    if Zero::is_zero(&d) {
                        return Err(self.err("division by zero"));
                    }
                    acc = acc.scale(&BigRational::new(One::one(), d));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<QPoly> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(self.unary()?.neg());
        }
        if self.peek() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self
                .integer()?
                .to_u32()
                .filter(|&e| e <= 255)
                .ok_or_else(|| self.err("bad exponent"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<QPoly> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let p = self.expr()?;
                self.expect(')')?;
                Ok(p)
            }
            Some('w') => {
                self.pos += 1;
                self.expect('[')?;
                let i = self
                    .integer()?
                    .to_usize()
                    .ok_or_else(|| self.err("bad index"))?;
                self.expect(']')?;
                if i == 0 || i > self.nvars {
                    return Err(Error::IndexOutOfRange(i));
                }
                Ok(QPoly::var(self.nvars, i - 1))
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(QPoly::constant(self.nvars, BigRational::from_integer(n)))
            }
            _ => Err(self.err("expected term")),
        }
    }
}
