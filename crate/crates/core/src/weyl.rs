//! Weyl group elements, reduced words and parabolic coset representatives.
//!
//! An element is identified by the images `w(ω_1), …, w(ω_l)` of the
//! fundamental weights. Words are kept only as certificates and are always
//! recomputed from the action, never concatenated.

use std::fmt;
use std::hash::{Hash, Hasher};

use rustc_hash::{FxHashMap, FxHashSet};

use crate::error::{Error, Result};
use crate::rootdata::{Root, RootSystem, Weight};

#[derive(Debug, Clone)]
pub struct WeylElement {
    rank: usize,
    /// Row `j` holds the weight coordinates of `w(ω_j)`.
    images: Vec<i64>,
    /// Reduced word, zero-based simple indices, `w = s_{word[0]} s_{word[1]} ⋯`.
    word: Vec<u8>,
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.images == other.images
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.images.hash(state);
    }
}

impl WeylElement {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn images(&self) -> &[i64] {
        &self.images
    }

    pub fn image(&self, j: usize) -> &[i64] {
        &self.images[j * self.rank..(j + 1) * self.rank]
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    /// The word with one-based indices, as used in printed tables.
    pub fn word_one_based(&self) -> Vec<usize> {
        self.word.iter().map(|&i| i as usize + 1).collect()
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, i) in self.word.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", i + 1)?;
        }
        write!(f, "]")
    }
}

/// A subset `Θ` of the simple roots; `P_Θ` is the corresponding parabolic.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParabolicSubset {
    rank: usize,
    theta: Vec<bool>,
}

impl ParabolicSubset {
    pub fn new(rank: usize, theta: &[usize]) -> Result<Self> {
        let mut t = vec![false; rank];
        for &i in theta {
            if i >= rank {
                return Err(Error::IndexOutOfRange(i + 1));
            }
            t[i] = true;
        }
        Ok(ParabolicSubset { rank, theta: t })
    }

    /// `P_Θ` with `Θ = Π ∖ {α_i : i ∈ omitted}`.
    pub fn omitting(rank: usize, omitted: &[usize]) -> Result<Self> {
        let mut t = vec![true; rank];
        for &i in omitted {
            if i >= rank {
                return Err(Error::IndexOutOfRange(i + 1));
            }
            t[i] = false;
        }
        Ok(ParabolicSubset { rank, theta: t })
    }

    /// The maximal parabolic `P_i` (zero-based `i`).
    pub fn maximal(rank: usize, i: usize) -> Result<Self> {
        Self::omitting(rank, &[i])
    }

    pub fn borel(rank: usize) -> Self {
        ParabolicSubset {
            rank,
            theta: vec![false; rank],
        }
    }

    pub fn full(rank: usize) -> Self {
        ParabolicSubset {
            rank,
            theta: vec![true; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn contains(&self, i: usize) -> bool {
        self.theta[i]
    }

    pub fn theta(&self) -> Vec<usize> {
        (0..self.rank).filter(|&i| self.theta[i]).collect()
    }

    pub fn omitted(&self) -> Vec<usize> {
        (0..self.rank).filter(|&i| !self.theta[i]).collect()
    }

    pub fn is_maximal(&self) -> bool {
        self.omitted().len() == 1
    }
}

impl RootSystem {
    pub fn identity(&self) -> WeylElement {
        let n = self.rank();
        let mut images = vec![0; n * n];
        for j in 0..n {
            images[j * n + j] = 1;
        }
        WeylElement {
            rank: n,
            images,
            word: Vec::new(),
        }
    }

    pub fn simple_reflection(&self, i: usize) -> Result<WeylElement> {
        if i >= self.rank() {
            return Err(Error::IndexOutOfRange(i + 1));
        }
        let e = self.identity();
        let images = self.right_mul_images(&e.images, i);
        Ok(WeylElement {
            rank: self.rank(),
            images,
            word: vec![i as u8],
        })
    }

    /// `w(α_i)` in weight coordinates.
    fn image_of_simple_root(&self, images: &[i64], i: usize) -> Vec<i64> {
        let n = self.rank();
        let mut out = vec![0; n];
        for (k, &c) in self.cartan[i].iter().enumerate() {
            if c != 0 {
                for t in 0..n {
                    out[t] += c * images[k * n + t];
                }
            }
        }
        out
    }

    fn has_right_descent(&self, images: &[i64], i: usize) -> bool {
        self.height_sign(&self.image_of_simple_root(images, i)) < 0
    }

    /// Images of `w·s_i`.
    fn right_mul_images(&self, images: &[i64], i: usize) -> Vec<i64> {
        let n = self.rank();
        let a = self.image_of_simple_root(images, i);
        let mut out = images.to_vec();
        for t in 0..n {
            out[i * n + t] -= a[t];
        }
        out
    }

    /// Images of `s_i·w`.
    fn left_mul_images(&self, images: &[i64], i: usize) -> Vec<i64> {
        let n = self.rank();
        let mut out = images.to_vec();
        for j in 0..n {
            let k = out[j * n + i];
            if k != 0 {
                for t in 0..n {
                    out[j * n + t] -= k * self.cartan[i][t];
                }
            }
        }
        out
    }

    fn reduced_word_of(&self, images: &[i64]) -> Vec<u8> {
        let mut cur = images.to_vec();
        let mut rev = Vec::new();
        'outer: loop {
            for i in 0..self.rank() {
                if self.has_right_descent(&cur, i) {
                    cur = self.right_mul_images(&cur, i);
                    rev.push(i as u8);
                    continue 'outer;
                }
            }
            break;
        }
        rev.reverse();
        rev
    }

    fn element_from_images(&self, images: Vec<i64>) -> WeylElement {
        let word = self.reduced_word_of(&images);
        WeylElement {
            rank: self.rank(),
            images,
            word,
        }
    }

    fn check_element(&self, w: &WeylElement) -> Result<()> {
        if w.rank != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                found: w.rank,
            });
        }
        Ok(())
    }

    /// The element `s_{word[0]} s_{word[1]} ⋯` (the word need not be reduced).
    pub fn element_from_word(&self, word: &[usize]) -> Result<WeylElement> {
        let mut images = self.identity().images;
        for &i in word {
            if i >= self.rank() {
                return Err(Error::IndexOutOfRange(i + 1));
            }
            images = self.right_mul_images(&images, i);
        }
        Ok(self.element_from_images(images))
    }

    pub fn act(&self, w: &WeylElement, lambda: &Weight) -> Result<Weight> {
        self.check_element(w)?;
        self.check_weight(lambda)?;
        let n = self.rank();
        let mut out = vec![0; n];
        for (j, &c) in lambda.0.iter().enumerate() {
            if c != 0 {
                for t in 0..n {
                    out[t] += c * w.images[j * n + t];
                }
            }
        }
        Ok(Weight(out))
    }

    /// Composite `u·v`; the stored word is recomputed and reduced.
    pub fn compose(&self, u: &WeylElement, v: &WeylElement) -> Result<WeylElement> {
        self.check_element(u)?;
        self.check_element(v)?;
        let n = self.rank();
        let mut images = vec![0; n * n];
        for j in 0..n {
            for k in 0..n {
                let c = v.images[j * n + k];
                if c != 0 {
                    for t in 0..n {
                        images[j * n + t] += c * u.images[k * n + t];
                    }
                }
            }
        }
        Ok(self.element_from_images(images))
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        let word: Vec<usize> = w.word.iter().rev().map(|&i| i as usize).collect();
        self.element_from_word(&word).expect("indices in range")
    }

    pub fn left_multiply(&self, i: usize, w: &WeylElement) -> WeylElement {
        self.element_from_images(self.left_mul_images(&w.images, i))
    }

    pub fn right_multiply(&self, w: &WeylElement, i: usize) -> WeylElement {
        self.element_from_images(self.right_mul_images(&w.images, i))
    }

    /// `l(w)`, counted independently of the stored word as the number of
    /// positive roots sent to negative roots.
    pub fn inversion_count(&self, w: &WeylElement) -> usize {
        let n = self.rank();
        self.positive_roots()
            .iter()
            .filter(|b| {
                let mut img = vec![0; n];
                for (j, &c) in b.weight.0.iter().enumerate() {
                    if c != 0 {
                        for t in 0..n {
                            img[t] += c * w.images[j * n + t];
                        }
                    }
                }
                self.height_sign(&img) < 0
            })
            .count()
    }

    pub fn right_descents(&self, w: &WeylElement) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.has_right_descent(&w.images, i))
            .collect()
    }

    pub fn left_descents(&self, w: &WeylElement) -> Vec<usize> {
        let inv = self.inverse(w);
        self.right_descents(&inv)
    }

    /// Lexicographically least reduced word.
    pub fn lex_least_word(&self, w: &WeylElement) -> Vec<u8> {
        let mut cur = self.inverse(w).images;
        let mut out = Vec::new();
        'outer: loop {
            for i in 0..self.rank() {
                if self.has_right_descent(&cur, i) {
                    cur = self.right_mul_images(&cur, i);
                    out.push(i as u8);
                    continue 'outer;
                }
            }
            break;
        }
        out
    }

    /// The longest element `w_θ` of `W_Θ`.
    pub fn longest_element(&self, theta: &ParabolicSubset) -> WeylElement {
        let mut images = self.identity().images;
        let mut word = Vec::new();
        'outer: loop {
            for i in theta.theta() {
                if !self.has_right_descent(&images, i) {
                    images = self.right_mul_images(&images, i);
                    word.push(i as u8);
                    continue 'outer;
                }
            }
            break;
        }
        WeylElement {
            rank: self.rank(),
            images,
            word,
        }
    }

    /// The reflection `s_β` for a positive root `β`.
    pub fn reflection_of_root(&self, beta: &Root) -> Result<WeylElement> {
        if self.positive_index(&beta.weight.0).is_none() {
            return Err(Error::NotARoot);
        }
        let n = self.rank();
        let mut images = self.identity().images;
        for j in 0..n {
            let k = beta.coroot[j];
            if k != 0 {
                for t in 0..n {
                    images[j * n + t] -= k * beta.weight.0[t];
                }
            }
        }
        Ok(self.element_from_images(images))
    }

    /// `l(s_i w) > l(w)`, read off from the `i`-th coordinate of `w(ρ)`.
    fn has_left_ascent(&self, images: &[i64], i: usize) -> bool {
        let n = self.rank();
        (0..n).map(|j| images[j * n + i]).sum::<i64>() > 0
    }

    /// Elements of `W` graded by length, levels `0..=max_len`, grown by left
    /// multiplication. Only the requested slices are generated.
    pub fn length_levels(&self, max_len: usize) -> LengthLevels {
        let mut levels = vec![vec![self.identity()]];
        let mut parents = vec![vec![(0, 0)]];
        for _ in 0..max_len {
            let prev = levels.last().expect("nonempty");
            let mut seen: FxHashSet<Vec<i64>> = FxHashSet::default();
            let mut next = Vec::new();
            let mut par = Vec::new();
            for (k, w) in prev.iter().enumerate() {
                for i in 0..self.rank() {
                    if self.has_left_ascent(&w.images, i) {
                        let images = self.left_mul_images(&w.images, i);
                        if seen.insert(images.clone()) {
                            let mut word = vec![i as u8];
                            word.extend_from_slice(&w.word);
                            next.push(WeylElement {
                                rank: self.rank(),
                                images,
                                word,
                            });
                            par.push((k, i));
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            levels.push(next);
            parents.push(par);
        }
        LengthLevels { levels, parents }
    }

    pub fn elements_up_to_length(&self, max_len: usize) -> Vec<Vec<WeylElement>> {
        self.length_levels(max_len).levels
    }

    pub fn elements_of_length(&self, k: usize) -> Vec<WeylElement> {
        self.elements_up_to_length(k).into_iter().nth(k).unwrap_or_default()
    }

    /// The set `W^Θ` of minimal-length representatives of `W/W_Θ`.
    pub fn minimal_coset_reps(&self, theta: &ParabolicSubset) -> CosetReps {
        CosetReps::build(self, theta)
    }

    /// The set `^ΘW = { v·w_θ : v ∈ W^Θ }`, in the order of `W^Θ`.
    /// `|W^Θ|` by length, walking the orbit of `ρ_Θ` level by level without
    /// storing group elements.
    pub fn coset_counts_by_length(&self, theta: &ParabolicSubset) -> Vec<usize> {
        let n = self.rank();
        let mut level: FxHashSet<Vec<i64>> = FxHashSet::default();
        level.insert(self.weight_sum(theta.omitted()).0);
        let mut counts = Vec::new();
        while !level.is_empty() {
            counts.push(level.len());
            let mut next = FxHashSet::default();
            for lam in &level {
                for i in 0..n {
                    if lam[i] > 0 {
                        next.insert((0..n).map(|t| lam[t] - lam[i] * self.cartan[i][t]).collect());
                    }
                }
            }
            level = next;
        }
        counts
    }

    pub fn maximal_coset_reps(&self, theta: &ParabolicSubset) -> Vec<WeylElement> {
        let w_theta = self.longest_element(theta);
        self.minimal_coset_reps(theta)
            .elements
            .iter()
            .map(|v| self.compose(v, &w_theta).expect("same system"))
            .collect()
    }
}

/// Length slices of `W`. `parents[k][j] = (p, i)` says that
/// `levels[k][j] = s_i · levels[k-1][p]`.
#[derive(Debug, Clone)]
pub struct LengthLevels {
    pub levels: Vec<Vec<WeylElement>>,
    pub parents: Vec<Vec<(usize, usize)>>,
}

/// `W^Θ`, graded by length, with the breadth-first tree that produced it and
/// the table of left multiplications that stay inside `W^Θ`.
#[derive(Debug, Clone)]
pub struct CosetReps {
    pub theta: ParabolicSubset,
    pub elements: Vec<WeylElement>,
    /// `u(ρ_Θ)` where `ρ_Θ = Σ_{j∉Θ} ω_j`; identifies the coset `uW_Θ`.
    pub orbit: Vec<Weight>,
    /// `elements[k] = s_i · elements[parent]` for `parent[k] = Some((parent, i))`.
    pub parent: Vec<Option<(usize, usize)>>,
    /// `left[i][u]`: index of `s_i·u` when it lies in `W^Θ` and is longer.
    pub left: Vec<Vec<Option<usize>>>,
    index: FxHashMap<Vec<i64>, usize>,
}

impl CosetReps {
    fn build(rs: &RootSystem, theta: &ParabolicSubset) -> Self {
        let n = rs.rank();
        let rho = rs.weight_sum(theta.omitted());
        let mut elements = vec![rs.identity()];
        let mut orbit = vec![rho.clone()];
        let mut parent = vec![None];
        let mut index = FxHashMap::default();
        index.insert(rho.0.clone(), 0usize);
        let mut head = 0;
        while head < elements.len() {
            let lam = orbit[head].clone();
            for i in 0..n {
                if lam.0[i] > 0 {
                    let next = Weight(
                        (0..n)
                            .map(|t| lam.0[t] - lam.0[i] * rs.cartan[i][t])
                            .collect(),
                    );
                    if !index.contains_key(&next.0) {
                        let w = &elements[head];
                        let images = rs.left_mul_images(&w.images, i);
                        let mut word = vec![i as u8];
                        word.extend_from_slice(&w.word);
                        index.insert(next.0.clone(), elements.len());
                        elements.push(WeylElement {
                            rank: n,
                            images,
                            word,
                        });
                        orbit.push(next);
                        parent.push(Some((head, i)));
                    }
                }
            }
            head += 1;
        }
        let mut left = vec![vec![None; elements.len()]; n];
        for (u, lam) in orbit.iter().enumerate() {
            for i in 0..n {
                if lam.0[i] > 0 {
                    let next: Vec<i64> = (0..n)
                        .map(|t| lam.0[t] - lam.0[i] * rs.cartan[i][t])
                        .collect();
                    left[i][u] = Some(index[&next]);
                }
            }
        }
        CosetReps {
            theta: theta.clone(),
            elements,
            orbit,
            parent,
            left,
            index,
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn length(&self, k: usize) -> usize {
        self.elements[k].length()
    }

    /// Largest length occurring, i.e. `dim G/P_Θ`.
    pub fn max_length(&self) -> usize {
        self.elements.last().map_or(0, |w| w.length())
    }

    /// Index of the minimal representative of the coset `wW_Θ`.
    pub fn coset_index(&self, rs: &RootSystem, w: &WeylElement) -> usize {
        let rho = rs.weight_sum(self.theta.omitted());
        let lam = rs.act(w, &rho).expect("same system");
        self.index[&lam.0]
    }

    /// Index of the coset `uW_Θ` with `u(ρ_Θ) = lambda`.
    pub fn coset_of_weight(&self, lambda: &[i64]) -> Option<usize> {
        self.index.get(lambda).copied()
    }

    /// Index of `w` if it is itself a minimal representative.
    pub fn index_of(&self, rs: &RootSystem, w: &WeylElement) -> Option<usize> {
        let k = self.coset_index(rs, w);
        (self.elements[k] == *w).then_some(k)
    }

    /// Children of each node in the breadth-first tree.
    pub fn children(&self) -> Vec<Vec<(usize, usize)>> {
        let mut ch = vec![Vec::new(); self.len()];
        for (k, p) in self.parent.iter().enumerate() {
            if let Some((par, i)) = *p {
                ch[par].push((k, i));
            }
        }
        ch
    }

    /// Number of representatives of each length.
    pub fn counts_by_length(&self) -> Vec<usize> {
        let mut c = vec![0; self.max_length() + 1];
        for w in &self.elements {
            c[w.length()] += 1;
        }
        c
    }
}
