//! Weyl groups of generalized Cartan matrices.
//!
//! An element is stored as its integer matrix on the simple-root basis
//! (column `j` holds the coordinates of `w(alpha_j)`), together with the
//! matrix of its inverse. Equality and hashing use the matrix only. The
//! canonical reduced word is the lexicographically smallest one and is cached
//! on first use.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Mul;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};

/// Enumeration limits. Exceeding one is an error, never a silent truncation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_elements: usize,
    pub max_length: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_elements: 20_000,
            max_length: 4_096,
        }
    }
}

/// A sequence of node indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    /// Parses whitespace- or comma-separated node labels; the empty string is
    /// the identity.
    pub fn parse(text: &str, cartan: &CartanMatrix) -> Result<Word> {
        let mut letters = Vec::new();
        let mut offset = 0;
        for piece in text.split(|c: char| c == ',' || c.is_whitespace()) {
            if !piece.is_empty() {
                let idx = cartan.label_index(piece).ok_or_else(|| {
                    Error::Parse(format!("unknown node label {piece:?} at position {offset}"))
                })?;
                letters.push(idx);
            }
            offset += piece.len() + 1;
        }
        Ok(Word(letters))
    }

    /// Space-separated labels.
    pub fn display(&self, cartan: &CartanMatrix) -> String {
        self.0
            .iter()
            .map(|&i| cartan.labels()[i].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

struct GroupData {
    cartan: CartanMatrix,
    budget: Budget,
}

/// The Weyl group of a Cartan matrix. Cheap to clone.
#[derive(Clone)]
pub struct WeylGroup {
    inner: Arc<GroupData>,
}

impl WeylGroup {
    pub fn new(cartan: CartanMatrix) -> Self {
        Self::with_budget(cartan, Budget::default())
    }

    pub fn with_budget(cartan: CartanMatrix, budget: Budget) -> Self {
        WeylGroup {
            inner: Arc::new(GroupData { cartan, budget }),
        }
    }

    pub fn cartan(&self) -> &CartanMatrix {
        &self.inner.cartan
    }

    pub fn rank(&self) -> usize {
        self.inner.cartan.size()
    }

    pub fn budget(&self) -> Budget {
        self.inner.budget
    }

    pub fn same_group(&self, other: &WeylGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner.cartan == other.inner.cartan
    }

    pub fn identity(&self) -> WeylElement {
        let n = self.rank();
        let mut m = vec![0i64; n * n];
        for i in 0..n {
            m[i * n + i] = 1;
        }
        let e = WeylElement::from_parts(self.clone(), m.clone().into(), m.into());
        let _ = e.word.set(Word::empty());
        e
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i < self.rank() {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                size: self.rank(),
            })
        }
    }

    /// The simple reflection `s_i`.
    pub fn simple_reflection(&self, i: usize) -> Result<WeylElement> {
        self.check_index(i)?;
        Ok(self.identity().mul_simple_right(i))
    }

    /// Evaluates a word (not necessarily reduced).
    pub fn from_word(&self, word: &[usize]) -> Result<WeylElement> {
        let mut w = self.identity();
        for &i in word {
            self.check_index(i)?;
            w = w.mul_simple_right(i);
        }
        Ok(w)
    }

    /// Builds an element from its matrix on the simple-root basis, rejecting
    /// matrices that do not reduce to the identity by descent stripping.
    pub fn from_matrix(&self, matrix: Vec<i64>) -> Result<WeylElement> {
        let n = self.rank();
        if matrix.len() != n * n {
            return Err(Error::CorruptedElement);
        }
        let mut m = matrix.clone();
        let mut word = Vec::new();
        let limit = self.budget().max_length;
        loop {
            match (0..n).find(|&i| column_is_negative(&m, n, i)) {
                None => break,
                Some(i) => {
                    right_mul_simple(&mut m, &self.inner.cartan, i);
                    word.push(i);
                    if word.len() > limit {
                        return Err(Error::CorruptedElement);
                    }
                }
            }
        }
        let id = self.identity();
        if m != id.matrix.as_ref() {
            return Err(Error::CorruptedElement);
        }
        // matrix = s_{word[k-1]} ... s_{word[0]}
        word.reverse();
        let w = self.from_word(&word)?;
        debug_assert_eq!(w.matrix.as_ref(), matrix.as_slice());
        Ok(w)
    }

    /// All elements of length at most `max_len` (of `W`, or of the parabolic
    /// subgroup generated by `restrict_to`), sorted by length then canonical
    /// word. `None` enumerates until the group is exhausted.
    pub fn enumerate_ball(
        &self,
        max_len: Option<usize>,
        restrict_to: Option<&[usize]>,
    ) -> Result<Vec<WeylElement>> {
        let levels = self.enumerate_levels(max_len, restrict_to)?;
        Ok(levels.into_iter().flatten().collect())
    }

    /// Like [`enumerate_ball`](Self::enumerate_ball) but grouped by length.
    pub fn enumerate_levels(
        &self,
        max_len: Option<usize>,
        restrict_to: Option<&[usize]>,
    ) -> Result<Vec<Vec<WeylElement>>> {
        let gens: Vec<usize> = match restrict_to {
            Some(j) => {
                for &i in j {
                    self.check_index(i)?;
                }
                let mut j = j.to_vec();
                j.sort_unstable();
                j.dedup();
                j
            }
            None => (0..self.rank()).collect(),
        };
        let budget = self.budget();
        let mut seen: HashSet<WeylElement> = HashSet::new();
        let mut levels = vec![vec![self.identity()]];
        seen.insert(self.identity());
        loop {
            let len = levels.len() - 1;
            if max_len.is_some_and(|m| len >= m) {
                break;
            }
            if len >= budget.max_length {
                return Err(Error::BudgetExceeded {
                    what: "length",
                    limit: budget.max_length,
                });
            }
            let mut next = Vec::new();
            for x in &levels[len] {
                for &i in &gens {
                    if x.has_right_descent(i) {
                        continue;
                    }
                    let y = x.mul_simple_right(i);
                    if seen.insert(y.clone()) {
                        next.push(y);
                        if seen.len() > budget.max_elements {
                            return Err(Error::BudgetExceeded {
                                what: "element",
                                limit: budget.max_elements,
                            });
                        }
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            next.sort();
            levels.push(next);
        }
        Ok(levels)
    }

    /// Every element of a finite Weyl group.
    pub fn elements(&self) -> Result<Vec<WeylElement>> {
        self.enumerate_ball(None, None)
    }

    /// Longest element of the parabolic subgroup `W_J`; `None` when `W_J` is
    /// infinite (detected through the length budget).
    pub fn longest_element(&self, j: &[usize]) -> Option<WeylElement> {
        let mut w = self.identity();
        let limit = self.budget().max_length;
        loop {
            match j.iter().copied().filter(|&i| !w.has_right_descent(i)).min() {
                None => return Some(w),
                Some(i) => {
                    w = w.mul_simple_right(i);
                    if w.length() > limit {
                        return None;
                    }
                }
            }
        }
    }
}

impl fmt::Debug for WeylGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeylGroup({:?})", self.inner.cartan)
    }
}

/// An element of a Weyl group.
#[derive(Clone)]
pub struct WeylElement {
    group: WeylGroup,
    matrix: Box<[i64]>,
    inverse: Box<[i64]>,
    word: OnceLock<Word>,
}

impl WeylElement {
    fn from_parts(group: WeylGroup, matrix: Box<[i64]>, inverse: Box<[i64]>) -> Self {
        WeylElement {
            group,
            matrix,
            inverse,
            word: OnceLock::new(),
        }
    }

    pub fn group(&self) -> &WeylGroup {
        &self.group
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    /// Row-major matrix; entry `(r, c)` is the `alpha_r` coefficient of `w(alpha_c)`.
    pub fn matrix(&self) -> &[i64] {
        &self.matrix
    }

    /// `w(alpha_j)` in the simple-root basis.
    pub fn root_image(&self, j: usize) -> Vec<i64> {
        let n = self.rank();
        (0..n).map(|r| self.matrix[r * n + j]).collect()
    }

    /// Applies the element to a vector in the simple-root basis.
    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        let n = self.rank();
        (0..n)
            .map(|r| (0..n).map(|c| self.matrix[r * n + c] * v[c]).sum())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        let n = self.rank();
        (0..n).all(|r| (0..n).all(|c| self.matrix[r * n + c] == i64::from(r == c)))
    }

    /// `i` is a right descent iff `w(alpha_i)` is negative.
    pub fn has_right_descent(&self, i: usize) -> bool {
        column_is_negative(&self.matrix, self.rank(), i)
    }

    pub fn has_left_descent(&self, i: usize) -> bool {
        column_is_negative(&self.inverse, self.rank(), i)
    }

    pub fn right_descents(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.has_right_descent(i))
            .collect()
    }

    pub fn left_descents(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.has_left_descent(i))
            .collect()
    }

    /// `w s_i`.
    pub fn mul_simple_right(&self, i: usize) -> WeylElement {
        let cartan = self.group.cartan();
        let mut m = self.matrix.clone();
        let mut inv = self.inverse.clone();
        right_mul_simple(&mut m, cartan, i);
        left_mul_simple(&mut inv, cartan, i);
        WeylElement::from_parts(self.group.clone(), m, inv)
    }

    /// `s_i w`.
    pub fn mul_simple_left(&self, i: usize) -> WeylElement {
        let cartan = self.group.cartan();
        let mut m = self.matrix.clone();
        let mut inv = self.inverse.clone();
        left_mul_simple(&mut m, cartan, i);
        right_mul_simple(&mut inv, cartan, i);
        WeylElement::from_parts(self.group.clone(), m, inv)
    }

    pub fn inverse(&self) -> WeylElement {
        WeylElement::from_parts(
            self.group.clone(),
            self.inverse.clone(),
            self.matrix.clone(),
        )
    }

    pub fn try_mul(&self, other: &WeylElement) -> Result<WeylElement> {
        if !self.group.same_group(&other.group) {
            return Err(Error::GroupMismatch);
        }
        let n = self.rank();
        Ok(WeylElement::from_parts(
            self.group.clone(),
            mat_mul(&self.matrix, &other.matrix, n),
            mat_mul(&other.inverse, &self.inverse, n),
        ))
    }

    /// The lexicographically smallest reduced word: at every step the
    /// smallest left descent is peeled off.
    pub fn canonical_word(&self) -> &Word {
        self.word.get_or_init(|| {
            let n = self.rank();
            let cartan = self.group.cartan();
            let mut m = self.matrix.to_vec();
            let mut inv = self.inverse.to_vec();
            let mut letters = Vec::new();
            let limit = self.group.budget().max_length.max(1 << 16);
            while let Some(i) = (0..n).find(|&i| column_is_negative(&inv, n, i)) {
                letters.push(i);
                left_mul_simple(&mut m, cartan, i);
                right_mul_simple(&mut inv, cartan, i);
                assert!(letters.len() <= limit, "{}", Error::CorruptedElement);
            }
            Word(letters)
        })
    }

    /// Reduced words in lexicographic order, at most `limit` of them.
    pub fn reduced_words(&self, limit: usize) -> Vec<Word> {
        fn walk(w: &WeylElement, prefix: &mut Vec<usize>, limit: usize, out: &mut Vec<Word>) {
            if out.len() >= limit {
                return;
            }
            if w.is_identity() {
                out.push(Word(prefix.clone()));
                return;
            }
            for i in w.left_descents() {
                prefix.push(i);
                walk(&w.mul_simple_left(i), prefix, limit, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), limit, &mut out);
        out
    }

    /// Number of positive roots made negative; the length of any reduced word.
    pub fn length(&self) -> usize {
        self.canonical_word().len()
    }

    /// Bruhat order, by the subword property: walking the canonical word of
    /// `w` from the right, each letter is absorbed by `v` exactly when it is a
    /// right descent of the current `v`; `v <= w` iff `v` is used up.
    pub fn bruhat_leq(&self, w: &WeylElement) -> bool {
        if self.length() > w.length() {
            return false;
        }
        let n = self.rank();
        let cartan = self.group.cartan();
        let mut cur = self.matrix.to_vec();
        let mut remaining = self.length();
        let letters = w.canonical_word().letters();
        for (k, &s) in letters.iter().enumerate().rev() {
            if remaining > k + 1 {
                return false;
            }
            if column_is_negative(&cur, n, s) {
                right_mul_simple(&mut cur, cartan, s);
                remaining -= 1;
            }
        }
        remaining == 0
    }

    /// Roots `beta_k = s_{i_1} ... s_{i_(k-1)} (alpha_{i_k})` along the
    /// canonical word; these are the positive roots sent negative by `w^{-1}`.
    pub fn inversion_set(&self) -> Vec<Vec<i64>> {
        let cartan = self.group.cartan();
        let n = self.rank();
        let mut prefix = self.group.identity().matrix.to_vec();
        let mut out = Vec::with_capacity(self.length());
        for &i in self.canonical_word().letters() {
            out.push((0..n).map(|r| prefix[r * n + i]).collect());
            right_mul_simple(&mut prefix, cartan, i);
        }
        out
    }

    /// The Bruhat lower interval `[e, w]`, built as the set of subword
    /// products of the canonical word; sorted.
    pub fn lower_interval(&self) -> Vec<WeylElement> {
        let mut set: HashSet<WeylElement> = HashSet::from([self.group.identity()]);
        for &i in self.canonical_word().letters() {
            let extra: Vec<WeylElement> = set.iter().map(|x| x.mul_simple_right(i)).collect();
            set.extend(extra);
        }
        let mut out: Vec<WeylElement> = set.into_iter().collect();
        out.sort();
        out
    }

    /// Human-readable key: the canonical word as space-separated labels, or
    /// `"e"` for the identity.
    pub fn key(&self) -> String {
        let w = self.canonical_word();
        if w.is_empty() {
            "e".to_string()
        } else {
            w.display(self.group.cartan())
        }
    }

    /// `w = w^J w_J` with `w^J` minimal in `w W_J`.
    pub fn parabolic_decompose(&self, j: &[usize]) -> (WeylElement, WeylElement) {
        let mut rep = self.clone();
        while let Some(i) = j
            .iter()
            .copied()
            .filter(|&i| rep.has_right_descent(i))
            .min()
        {
            rep = rep.mul_simple_right(i);
        }
        let part = &rep.inverse() * self;
        (rep, part)
    }

    /// True when the element is a reflection (a conjugate of a simple
    /// reflection): an involution fixing a hyperplane.
    pub fn is_reflection(&self) -> bool {
        if self.is_identity() || (self * self) != self.group.identity() {
            return false;
        }
        self.length() % 2 == 1 && reflection_root(self).is_some()
    }
}

/// The positive root of a reflection `t`, read off a nonzero column of `I - t`
/// and made primitive. Returns `None` if `t` is not a reflection.
pub fn reflection_root(t: &WeylElement) -> Option<Vec<i64>> {
    let n = t.rank();
    let m = t.matrix();
    let mut col = None;
    for c in 0..n {
        let v: Vec<i64> = (0..n).map(|r| i64::from(r == c) - m[r * n + c]).collect();
        if v.iter().any(|&x| x != 0) {
            col = Some(v);
            break;
        }
    }
    let mut v = col?;
    let g = v.iter().fold(0i64, |g, &x| num_integer::gcd(g, x));
    for x in v.iter_mut() {
        *x /= g;
    }
    if v.iter().find(|&&x| x != 0).is_some_and(|&x| x < 0) {
        for x in v.iter_mut() {
            *x = -*x;
        }
    }
    if v.iter().any(|&x| x < 0) {
        return None;
    }
    // Check that t really is the reflection in this root: rank(I - t) = 1.
    for c in 0..n {
        let colc: Vec<i64> = (0..n).map(|r| i64::from(r == c) - m[r * n + c]).collect();
        for a in 0..n {
            for b in 0..n {
                if colc[a] * v[b] != colc[b] * v[a] {
                    return None;
                }
            }
        }
    }
    Some(v)
}

impl PartialEq for WeylElement {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl Eq for WeylElement {}

impl Hash for WeylElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.matrix.hash(state);
    }
}

impl PartialOrd for WeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Deterministic total order: by length, then canonical word.
impl Ord for WeylElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.length()
            .cmp(&other.length())
            .then_with(|| self.canonical_word().cmp(other.canonical_word()))
    }
}

impl<'a> Mul<&'a WeylElement> for &'a WeylElement {
    type Output = WeylElement;

    /// Panics if the operands live in different groups; see
    /// [`WeylElement::try_mul`].
    fn mul(self, rhs: &'a WeylElement) -> WeylElement {
        self.try_mul(rhs)
            .expect("multiplying elements of different Weyl groups")
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.canonical_word();
        if w.is_empty() {
            write!(f, "e")
        } else {
            write!(f, "{}", w.display(self.group.cartan()).replace(' ', "."))
        }
    }
}

fn column_is_negative(m: &[i64], n: usize, c: usize) -> bool {
    for r in 0..n {
        let x = m[r * n + c];
        if x != 0 {
            return x < 0;
        }
    }
    false
}

/// `m <- m s_i`.
fn right_mul_simple(m: &mut [i64], cartan: &CartanMatrix, i: usize) {
    let n = cartan.size();
    for r in 0..n {
        let wi = m[r * n + i];
        if wi == 0 {
            continue;
        }
        for j in 0..n {
            if j == i {
                m[r * n + j] = -wi;
            } else {
                let a = cartan.entry(j, i);
                if a != 0 {
                    m[r * n + j] -= a * wi;
                }
            }
        }
    }
}

/// `m <- s_i m`.
fn left_mul_simple(m: &mut [i64], cartan: &CartanMatrix, i: usize) {
    let n = cartan.size();
    for c in 0..n {
        let mut acc = -m[i * n + c];
        for k in 0..n {
            if k != i {
                let a = cartan.entry(k, i);
                if a != 0 {
                    acc -= a * m[k * n + c];
                }
            }
        }
        m[i * n + c] = acc;
    }
}

fn mat_mul(a: &[i64], b: &[i64], n: usize) -> Box<[i64]> {
    let mut out = vec![0i64; n * n];
    for r in 0..n {
        for k in 0..n {
            let x = a[r * n + k];
            if x == 0 {
                continue;
            }
            for c in 0..n {
                out[r * n + c] += x * b[k * n + c];
            }
        }
    }
    out.into()
}
