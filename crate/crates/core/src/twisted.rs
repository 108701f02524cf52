//! The `J`-twisted Bruhat order `<=^J`, the `J`-length, the minimal witness
//! `c`, Demazure products, `s_i o_l^J`, interval enumeration and positive
//! subexpressions.

use std::collections::HashSet;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poset::FinitePoset;
use crate::weyl::{WeylElement, WeylGroup, Word};

/// A subset `J` of the nodes, with a lazily grown breadth-first enumeration of
/// the parabolic subgroup `W_J`.
pub struct ParabolicContext {
    group: WeylGroup,
    members: Vec<usize>,
    mask: u64,
    levels: Mutex<Levels>,
}

impl Clone for ParabolicContext {
    fn clone(&self) -> Self {
        ParabolicContext {
            group: self.group.clone(),
            members: self.members.clone(),
            mask: self.mask,
            levels: Mutex::new(self.levels.lock().expect("levels lock").clone()),
        }
    }
}

impl std::fmt::Debug for ParabolicContext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ParabolicContext")
            .field("members", &self.members)
            .finish()
    }
}

#[derive(Clone, Default)]
struct Levels {
    levels: Vec<Vec<WeylElement>>,
    seen: HashSet<WeylElement>,
    exhausted: bool,
}

impl ParabolicContext {
    pub fn new(group: &WeylGroup, j: &[usize]) -> Result<Self> {
        let mut members = j.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut mask = 0u64;
        for &i in &members {
            if i >= group.rank() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: group.rank(),
                });
            }
            mask |= 1 << i;
        }
        let e = group.identity();
        let levels = Levels {
            levels: vec![vec![e.clone()]],
            seen: HashSet::from([e]),
            exhausted: false,
        };
        Ok(ParabolicContext {
            group: group.clone(),
            members,
            mask,
            levels: Mutex::new(levels),
        })
    }

    /// `J = I`.
    pub fn full(group: &WeylGroup) -> Self {
        let all: Vec<usize> = (0..group.rank()).collect();
        Self::new(group, &all).expect("all nodes are valid")
    }

    /// `J = {}`.
    pub fn empty(group: &WeylGroup) -> Self {
        Self::new(group, &[]).expect("empty set is valid")
    }

    /// Every subset of the nodes, in bitmask order.
    pub fn all_subsets(group: &WeylGroup) -> Vec<ParabolicContext> {
        let n = group.rank();
        (0u64..1 << n)
            .map(|m| {
                let j: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
                Self::new(group, &j).expect("valid subset")
            })
            .collect()
    }

    pub fn group(&self) -> &WeylGroup {
        &self.group
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        i < 64 && self.mask >> i & 1 == 1
    }

    /// `w = w^J w_J`.
    pub fn decompose(&self, w: &WeylElement) -> (WeylElement, WeylElement) {
        w.parabolic_decompose(&self.members)
    }

    /// True when `w` has no right descent in `J`.
    pub fn is_min_rep(&self, w: &WeylElement) -> bool {
        self.members.iter().all(|&i| !w.has_right_descent(i))
    }

    /// `l^J(w) = l(w^J) - l(w_J)`.
    pub fn j_length(&self, w: &WeylElement) -> i64 {
        let (rep, part) = self.decompose(w);
        rep.length() as i64 - part.length() as i64
    }

    /// Elements of `W_J` of length at most `len`, sorted.
    pub fn wj_ball(&self, len: usize) -> Result<Vec<WeylElement>> {
        let mut st = self.levels.lock().expect("level cache poisoned");
        let budget = self.group.budget();
        while st.levels.len() <= len && !st.exhausted {
            let last = st.levels.last().expect("nonempty").clone();
            let mut next = Vec::new();
            for x in &last {
                for &i in &self.members {
                    if x.has_right_descent(i) {
                        continue;
                    }
                    let y = x.mul_simple_right(i);
                    if st.seen.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            if st.seen.len() > budget.max_elements {
                return Err(Error::BudgetExceeded {
                    what: "element",
                    limit: budget.max_elements,
                });
            }
            if next.is_empty() {
                st.exhausted = true;
            } else {
                next.sort();
                st.levels.push(next);
            }
        }
        Ok(st.levels.iter().take(len + 1).flatten().cloned().collect())
    }

    /// The longest element `w_{J,0}` of `W_J`, if `W_J` is finite.
    pub fn longest_element(&self) -> Option<WeylElement> {
        self.group.longest_element(&self.members)
    }

    /// All witnesses `u in W_J` with `v^J u <= w^J` and `w_J <= u^{-1} v_J`.
    ///
    /// Because `v^J` is a minimal coset representative, `l(v^J u) = l(v^J) +
    /// l(u)`, so every witness has `l(u) <= l(w^J) - l(v^J)`; this is the search
    /// radius.
    pub fn witnesses(&self, v: &WeylElement, w: &WeylElement) -> Result<Vec<WeylElement>> {
        let (v_rep, v_part) = self.decompose(v);
        let (w_rep, w_part) = self.decompose(w);
        if v_rep.length() > w_rep.length() {
            return Ok(Vec::new());
        }
        let radius = w_rep.length() - v_rep.length();
        let mut out = Vec::new();
        for u in self.wj_ball(radius)? {
            let left = &v_rep * &u;
            if !left.bruhat_leq(&w_rep) {
                continue;
            }
            let right = &u.inverse() * &v_part;
            if w_part.bruhat_leq(&right) {
                out.push(u);
            }
        }
        Ok(out)
    }

    /// `v <=^J w`.
    pub fn j_leq(&self, v: &WeylElement, w: &WeylElement) -> Result<bool> {
        let (v_rep, v_part) = self.decompose(v);
        let (w_rep, w_part) = self.decompose(w);
        if v_rep.length() > w_rep.length() {
            return Ok(false);
        }
        let radius = w_rep.length() - v_rep.length();
        for u in self.wj_ball(radius)? {
            if (&v_rep * &u).bruhat_leq(&w_rep) && w_part.bruhat_leq(&(&u.inverse() * &v_part)) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// The Bruhat-minimal witness `c` for `v <=^J w`, checked to satisfy
    /// `l(c w_J) = l(w_J) - l(c)` and `l(c^{-1} v_J) = l(c) + l(v_J)`.
    pub fn minimal_c(&self, v: &WeylElement, w: &WeylElement) -> Result<WeylElement> {
        let wit = self.witnesses(v, w)?;
        if wit.is_empty() {
            return Err(Error::NotComparable);
        }
        let minima: Vec<&WeylElement> = wit
            .iter()
            .filter(|m| wit.iter().all(|x| m.bruhat_leq(x)))
            .collect();
        if minima.len() != 1 {
            return Err(Error::AmbiguousMinimum);
        }
        let c = minima[0].clone();
        let (_, v_part) = self.decompose(v);
        let (_, w_part) = self.decompose(w);
        if (&c * &w_part).length() + c.length() != w_part.length() {
            return Err(Error::Postcondition("l(c w_J) != l(w_J) - l(c)".into()));
        }
        if (&c.inverse() * &v_part).length() != c.length() + v_part.length() {
            return Err(Error::Postcondition("l(c^-1 v_J) != l(c) + l(v_J)".into()));
        }
        Ok(c)
    }

    /// `s_i o_l^J w`: `s_i w` if `s_i w <=^J w`, otherwise `w` (which must then
    /// satisfy `w <=^J s_i w`).
    pub fn circ_l(&self, i: usize, w: &WeylElement) -> Result<WeylElement> {
        if i >= self.group.rank() {
            return Err(Error::IndexOutOfRange {
                index: i,
                size: self.group.rank(),
            });
        }
        let a = w.mul_simple_left(i);
        if self.j_leq(&a, w)? {
            Ok(a)
        } else if self.j_leq(w, &a)? {
            Ok(w.clone())
        } else {
            Err(Error::IncomparablePair)
        }
    }

    /// The interval `[x, y]` of `(W, <=^J)`.
    ///
    /// Candidates are `z = z^J z_J` with `z^J <= y^J` (a minimal
    /// representative) and `l(z_J) <= l(z^J) - l(x^J) + l(x_J)`; both bounds
    /// follow from the witness length bound.
    pub fn interval(&self, x: &WeylElement, y: &WeylElement) -> Result<TwistedIntervalPoset> {
        if !self.j_leq(x, y)? {
            return Err(Error::NotComparable);
        }
        let (x_rep, x_part) = self.decompose(x);
        let (y_rep, _) = self.decompose(y);
        let mut elements = Vec::new();
        let budget = self.group.budget();
        for z_rep in y_rep.lower_interval() {
            if !self.is_min_rep(&z_rep) || z_rep.length() < x_rep.length() {
                continue;
            }
            let bound = z_rep.length() - x_rep.length() + x_part.length();
            for z_part in self.wj_ball(bound)? {
                let z = &z_rep * &z_part;
                if self.j_leq(x, &z)? && self.j_leq(&z, y)? {
                    elements.push(z);
                    if elements.len() > budget.max_elements {
                        return Err(Error::BudgetExceeded {
                            what: "interval element",
                            limit: budget.max_elements,
                        });
                    }
                }
            }
        }
        TwistedIntervalPoset::build(self, x.clone(), y.clone(), elements)
    }
}

/// An interval of `(W, <=^J)` with its cover relations, graded by `l^J`.
#[derive(Clone, Debug)]
pub struct TwistedIntervalPoset {
    pub bottom: WeylElement,
    pub top: WeylElement,
    /// Sorted by `l^J`, then by the element order.
    pub elements: Vec<WeylElement>,
    /// Pairs `(lower, upper)` of indices into `elements`.
    pub covers: Vec<(usize, usize)>,
    pub jlengths: Vec<i64>,
}

impl TwistedIntervalPoset {
    fn build(
        ctx: &ParabolicContext,
        bottom: WeylElement,
        top: WeylElement,
        elements: Vec<WeylElement>,
    ) -> Result<Self> {
        let mut tagged: Vec<(i64, WeylElement)> = elements
            .into_iter()
            .map(|z| (ctx.j_length(&z), z))
            .collect();
        tagged.sort();
        let jlengths: Vec<i64> = tagged.iter().map(|(l, _)| *l).collect();
        let elements: Vec<WeylElement> = tagged.into_iter().map(|(_, z)| z).collect();
        let mut covers = Vec::new();
        for a in 0..elements.len() {
            for b in 0..elements.len() {
                if jlengths[b] == jlengths[a] + 1 && ctx.j_leq(&elements[a], &elements[b])? {
                    covers.push((a, b));
                }
            }
        }
        Ok(TwistedIntervalPoset {
            bottom,
            top,
            elements,
            covers,
            jlengths,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, z: &WeylElement) -> Option<usize> {
        self.elements.iter().position(|x| x == z)
    }

    /// The underlying poset, keyed by canonical words and ranked by `l^J`.
    pub fn to_poset(&self) -> FinitePoset {
        FinitePoset::new(
            self.elements.iter().map(|z| z.key()).collect(),
            self.covers.clone(),
            Some(self.jlengths.clone()),
        )
        .expect("twisted intervals are acyclic and graded")
    }
}

/// `w o_l v`: the Bruhat-minimal element of `{w' v : w' <= w}`.
pub fn demazure_min(w: &WeylElement, v: &WeylElement) -> WeylElement {
    let mut x = v.clone();
    for &i in w.canonical_word().letters().iter().rev() {
        if x.has_left_descent(i) {
            x = x.mul_simple_left(i);
        }
    }
    x
}

/// The Bruhat-maximal element of `{(w')^{-1} u' : w' <= w, u' <= u}`.
pub fn demazure_max_inverse(w: &WeylElement, u: &WeylElement) -> WeylElement {
    let mut x = w.group().identity();
    let w_inv = w.inverse();
    for &i in w_inv
        .canonical_word()
        .letters()
        .iter()
        .chain(u.canonical_word().letters())
    {
        if !x.has_right_descent(i) {
            x = x.mul_simple_right(i);
        }
    }
    x
}

/// A subexpression of a reduced word: the word plus, per letter, whether it
/// is used (`true`) or skipped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subexpression {
    pub word: Word,
    pub used: Vec<bool>,
}

impl Subexpression {
    pub fn skips(&self) -> usize {
        self.used.iter().filter(|u| !**u).count()
    }

    /// The element obtained by multiplying the used letters.
    pub fn evaluate(&self, group: &WeylGroup) -> Result<WeylElement> {
        let letters: Vec<usize> = self
            .word
            .letters()
            .iter()
            .zip(&self.used)
            .filter(|(_, u)| **u)
            .map(|(l, _)| *l)
            .collect();
        group.from_word(&letters)
    }
}

/// The unique positive subexpression for `v` in the reduced word `word`,
/// found right to left: a letter is used exactly when it is a right descent
/// of what remains of `v`.
pub fn mr_positive_subexpression(v: &WeylElement, word: &Word) -> Result<Subexpression> {
    let group = v.group();
    let w = group.from_word(word.letters())?;
    if w.length() != word.len() {
        return Err(Error::NonReducedWord(word.0.clone()));
    }
    let mut cur = v.clone();
    let mut used = vec![false; word.len()];
    for (k, &i) in word.letters().iter().enumerate().rev() {
        if cur.has_right_descent(i) {
            used[k] = true;
            cur = cur.mul_simple_right(i);
        }
    }
    if !cur.is_identity() {
        return Err(Error::NotLeq);
    }
    // Positivity: every prefix product goes up when multiplied by the next letter.
    let mut prefix = group.identity();
    for (k, &i) in word.letters().iter().enumerate() {
        if prefix.has_right_descent(i) {
            return Err(Error::Postcondition(
                "positive subexpression is not positive".into(),
            ));
        }
        if used[k] {
            prefix = prefix.mul_simple_right(i);
        }
    }
    debug_assert_eq!(&prefix, v);
    Ok(Subexpression {
        word: word.clone(),
        used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanMatrix;

    fn a2() -> WeylGroup {
        WeylGroup::new(CartanMatrix::type_a(2))
    }

    fn el(g: &WeylGroup, w: &[usize]) -> WeylElement {
        g.from_word(w).unwrap()
    }

    #[test]
    fn j_length_examples() {
        let g = a2();
        let j2 = ParabolicContext::new(&g, &[1]).unwrap();
        let j0 = ParabolicContext::empty(&g);
        let w0 = el(&g, &[0, 1, 0]);
        assert_eq!(j0.j_length(&w0), 3);
        assert_eq!(j2.j_length(&el(&g, &[1])), -1);
        assert_eq!(j2.j_length(&w0), 1);
    }

    #[test]
    fn j_leq_examples() {
        let g = a2();
        let j2 = ParabolicContext::new(&g, &[1]).unwrap();
        assert!(j2.j_leq(&el(&g, &[1]), &el(&g, &[0])).unwrap());
        assert!(!j2.j_leq(&el(&g, &[0]), &el(&g, &[0, 1, 0])).unwrap());
    }

    #[test]
    fn minimal_c_examples() {
        let g = a2();
        let j2 = ParabolicContext::new(&g, &[1]).unwrap();
        let w0 = el(&g, &[0, 1, 0]);
        assert_eq!(j2.minimal_c(&w0, &w0).unwrap(), g.identity());
        assert_eq!(j2.minimal_c(&g.identity(), &w0).unwrap(), el(&g, &[1]));
        assert_eq!(
            j2.minimal_c(&el(&g, &[1]), &el(&g, &[0])).unwrap(),
            g.identity()
        );
        assert!(matches!(
            j2.minimal_c(&el(&g, &[0]), &w0),
            Err(Error::NotComparable)
        ));
    }

    #[test]
    fn demazure_examples() {
        let g = a2();
        let e = g.identity();
        let w = el(&g, &[0, 1]);
        assert_eq!(demazure_min(&w, &e), e);
        assert_eq!(demazure_min(&e, &w), w);
        assert_eq!(demazure_min(&w, &el(&g, &[1, 0])), e);
        assert_eq!(demazure_max_inverse(&e, &w), w);
        assert_eq!(demazure_max_inverse(&w, &e), w.inverse());
        let s1 = el(&g, &[0]);
        assert_eq!(demazure_max_inverse(&s1, &s1), s1);
    }

    #[test]
    fn circ_examples() {
        let g = a2();
        let j2 = ParabolicContext::new(&g, &[1]).unwrap();
        let s2 = el(&g, &[1]);
        assert_eq!(j2.circ_l(0, &s2).unwrap(), s2);
        let j0 = ParabolicContext::empty(&g);
        let ji = ParabolicContext::full(&g);
        for w in g.elements().unwrap() {
            for i in 0..2 {
                let a = w.mul_simple_left(i);
                let lo = if a.length() < w.length() {
                    a.clone()
                } else {
                    w.clone()
                };
                let hi = if a.length() > w.length() {
                    a
                } else {
                    w.clone()
                };
                assert_eq!(j0.circ_l(i, &w).unwrap(), lo);
                assert_eq!(ji.circ_l(i, &w).unwrap(), hi);
            }
        }
    }

    #[test]
    fn interval_examples() {
        let g = a2();
        let j0 = ParabolicContext::empty(&g);
        let w0 = el(&g, &[0, 1, 0]);
        let full = j0.interval(&g.identity(), &w0).unwrap();
        assert_eq!(full.len(), 6);
        assert_eq!(
            full.jlengths.iter().filter(|&&l| l == 1 || l == 2).count(),
            4
        );
        let single = j0.interval(&w0, &w0).unwrap();
        assert_eq!(single.len(), 1);
        let j2 = ParabolicContext::new(&g, &[1]).unwrap();
        let iv = j2.interval(&el(&g, &[1]), &el(&g, &[0])).unwrap();
        let mut ranks = iv.jlengths.clone();
        ranks.dedup();
        assert_eq!(ranks, vec![-1, 0, 1]);
        // Oracle: filter the whole group.
        let expected = g
            .elements()
            .unwrap()
            .into_iter()
            .filter(|z| j2.j_leq(&el(&g, &[1]), z).unwrap() && j2.j_leq(z, &el(&g, &[0])).unwrap())
            .count();
        assert_eq!(iv.len(), expected);
    }

    #[test]
    fn positive_subexpression_examples() {
        let g = a2();
        let word = Word::new(vec![0, 1, 0]);
        let s = mr_positive_subexpression(&el(&g, &[1]), &word).unwrap();
        assert_eq!(s.used, vec![false, true, false]);
        let s = mr_positive_subexpression(&g.identity(), &word).unwrap();
        assert_eq!(s.used, vec![false; 3]);
        let s = mr_positive_subexpression(&el(&g, &[1, 0, 1]), &word).unwrap();
        assert_eq!(s.used, vec![true; 3]);
        assert!(matches!(
            mr_positive_subexpression(&el(&g, &[1, 0]), &Word::new(vec![0, 1])),
            Err(Error::NotLeq)
        ));
        assert!(matches!(
            mr_positive_subexpression(&g.identity(), &Word::new(vec![0, 0])),
            Err(Error::NonReducedWord(_))
        ));
    }
}
