//! Edge labelings by reflections, reflection orders, and the EL-labeling
//! verifier.

use std::collections::HashMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::FinitePoset;
use crate::error::{Error, Result};
use crate::twisted::{ParabolicContext, TwistedIntervalPoset};
use crate::weyl::{reflection_root, WeylElement, WeylGroup, Word};

/// Sort key of a reflection under a reflection order.
pub type OrderKey = Vec<Ratio<i64>>;

/// A label in `Lambda = {(t, r)} ⊔ {∅} ⊔ {(t, l)}`, ordered
/// `(t1, r) < ∅ < (t2, l)` and by the reflection order within each side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EdgeLabel {
    Right(WeylElement),
    Bottom,
    Left(WeylElement),
}

impl EdgeLabel {
    pub fn reflection(&self) -> Option<&WeylElement> {
        match self {
            EdgeLabel::Right(t) | EdgeLabel::Left(t) => Some(t),
            EdgeLabel::Bottom => None,
        }
    }

    fn side(&self) -> u8 {
        match self {
            EdgeLabel::Right(_) => 0,
            EdgeLabel::Bottom => 1,
            EdgeLabel::Left(_) => 2,
        }
    }

    /// `"(t,r)"`, `"∅"` or `"(t,l)"` with `t` written as a word.
    pub fn display(&self) -> String {
        match self {
            EdgeLabel::Right(t) => format!("({},r)", t.key()),
            EdgeLabel::Bottom => "∅".to_string(),
            EdgeLabel::Left(t) => format!("({},l)", t.key()),
        }
    }
}

/// Comparable form of an [`EdgeLabel`].
pub type LabelKey = (u8, OrderKey);

enum OrderKind {
    /// An explicit finite list (an initial segment of a reflection order).
    List {
        reflections: Vec<WeylElement>,
        index: HashMap<WeylElement, usize>,
    },
    /// Positive roots compared lexicographically after dividing by their
    /// height, reading coordinates in `priority` order.
    RootFunctional { priority: Vec<usize> },
}

/// A total order on (some of) the reflections of a Weyl group.
pub struct ReflectionOrder {
    group: WeylGroup,
    kind: OrderKind,
}

impl ReflectionOrder {
    /// The inversion-sequence order `t_k = s_{i_1}...s_{i_(k-1)} s_{i_k}
    /// s_{i_(k-1)}...s_{i_1}` of a reduced word.
    pub fn from_word(group: &WeylGroup, word: &Word) -> Result<Self> {
        let w = group.from_word(word.letters())?;
        if w.length() != word.len() {
            return Err(Error::NonReducedWord(word.0.clone()));
        }
        let mut prefix = group.identity();
        let mut reflections = Vec::with_capacity(word.len());
        for &i in word.letters() {
            let t = &(&prefix * &group.simple_reflection(i)?) * &prefix.inverse();
            reflections.push(t);
            prefix = prefix.mul_simple_right(i);
        }
        let order = Self::from_reflections(group, reflections)?;
        if !order.satisfies_dihedral_condition() {
            return Err(Error::Postcondition(
                "inversion order violates the dihedral condition".into(),
            ));
        }
        Ok(order)
    }

    /// An explicit list of distinct reflections (not checked for the
    /// dihedral condition; see
    /// [`satisfies_dihedral_condition`](Self::satisfies_dihedral_condition)).
    pub fn from_reflections(group: &WeylGroup, reflections: Vec<WeylElement>) -> Result<Self> {
        let mut index = HashMap::new();
        for (k, t) in reflections.iter().enumerate() {
            if !t.is_reflection() {
                return Err(Error::Precondition(format!("{t:?} is not a reflection")));
            }
            if index.insert(t.clone(), k).is_some() {
                return Err(Error::Precondition(format!("{t:?} listed twice")));
            }
        }
        Ok(ReflectionOrder {
            group: group.clone(),
            kind: OrderKind::List { reflections, index },
        })
    }

    /// The order on all reflections obtained by comparing `beta / ht(beta)`
    /// lexicographically, reading the coordinates listed in `priority` first
    /// and the remaining ones in increasing order. Along every rank-two root
    /// subsystem the normalized roots lie on a segment and are met in angular
    /// order, so this is a reflection order on the whole (possibly infinite)
    /// set of reflections. Reflections whose roots vanish on the priority
    /// coordinates come first.
    pub fn root_functional(group: &WeylGroup, priority: &[usize]) -> Result<Self> {
        let n = group.rank();
        let mut order = Vec::with_capacity(n);
        for &i in priority {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, size: n });
            }
            if !order.contains(&i) {
                order.push(i);
            }
        }
        order.extend((0..n).filter(|i| !priority.contains(i)));
        Ok(ReflectionOrder {
            group: group.clone(),
            kind: OrderKind::RootFunctional { priority: order },
        })
    }

    pub fn group(&self) -> &WeylGroup {
        &self.group
    }

    /// The listed reflections, for explicit orders.
    pub fn reflections(&self) -> Option<&[WeylElement]> {
        match &self.kind {
            OrderKind::List { reflections, .. } => Some(reflections),
            OrderKind::RootFunctional { .. } => None,
        }
    }

    /// Sort key of `t`, or `None` if `t` is not covered by the order.
    pub fn key(&self, t: &WeylElement) -> Option<OrderKey> {
        match &self.kind {
            OrderKind::List { index, .. } => {
                index.get(t).map(|&k| vec![Ratio::from_integer(k as i64)])
            }
            OrderKind::RootFunctional { priority } => {
                let root = reflection_root(t)?;
                let height: i64 = root.iter().sum();
                Some(
                    priority
                        .iter()
                        .map(|&i| Ratio::new(root[i], height))
                        .collect(),
                )
            }
        }
    }

    pub fn label_key(&self, label: &EdgeLabel) -> Result<LabelKey> {
        let key = match label.reflection() {
            Some(t) => self.key(t).ok_or(Error::MissingReflection)?,
            None => Vec::new(),
        };
        Ok((label.side(), key))
    }

    /// For explicit lists: in every plane spanned by two listed roots, the
    /// listed roots appear in angular order. Always true for root-functional
    /// orders.
    pub fn satisfies_dihedral_condition(&self) -> bool {
        match &self.kind {
            OrderKind::List { reflections, .. } => {
                let roots: Vec<Vec<i64>> = reflections
                    .iter()
                    .map(|t| reflection_root(t).expect("listed elements are reflections"))
                    .collect();
                roots_in_angular_order(&roots)
            }
            OrderKind::RootFunctional { .. } => true,
        }
    }
}

/// True when, for every three listed roots lying in a common plane, the
/// middle one (in list order) lies angularly between the other two.
pub fn roots_in_angular_order(roots: &[Vec<i64>]) -> bool {
    let m = roots.len();
    for a in 0..m {
        for b in a + 1..m {
            let Some((p, q)) = independent_coords(&roots[a], &roots[b]) else {
                continue;
            };
            let orient = |x: &[i64], y: &[i64]| {
                (x[p] as i128 * y[q] as i128 - x[q] as i128 * y[p] as i128).signum()
            };
            for c in b + 1..m {
                if !in_plane(&roots[a], &roots[b], &roots[c]) {
                    continue;
                }
                let ab = orient(&roots[a], &roots[b]);
                let bc = orient(&roots[b], &roots[c]);
                let ac = orient(&roots[a], &roots[c]);
                if ab != bc || ab != ac {
                    return false;
                }
            }
        }
    }
    true
}

fn independent_coords(x: &[i64], y: &[i64]) -> Option<(usize, usize)> {
    let n = x.len();
    for p in 0..n {
        for q in p + 1..n {
            if x[p] as i128 * y[q] as i128 != x[q] as i128 * y[p] as i128 {
                return Some((p, q));
            }
        }
    }
    None
}

fn in_plane(x: &[i64], y: &[i64], z: &[i64]) -> bool {
    let n = x.len();
    for p in 0..n {
        for q in p + 1..n {
            for r in q + 1..n {
                let m = |v: &[i64], i| v[i] as i128;
                let det = m(x, p) * (m(y, q) * m(z, r) - m(y, r) * m(z, q))
                    - m(x, q) * (m(y, p) * m(z, r) - m(y, r) * m(z, p))
                    + m(x, r) * (m(y, p) * m(z, q) - m(y, q) * m(z, p));
                if det != 0 {
                    return false;
                }
            }
        }
    }
    true
}

/// A poset with one label per cover, aligned with `poset.covers()`.
#[derive(Clone, Debug)]
pub struct LabeledPoset {
    pub poset: FinitePoset,
    pub labels: Vec<EdgeLabel>,
    keys: Vec<LabelKey>,
}

impl LabeledPoset {
    pub fn new(
        poset: FinitePoset,
        labels: Vec<EdgeLabel>,
        order: &ReflectionOrder,
    ) -> Result<Self> {
        if labels.len() != poset.covers().len() {
            return Err(Error::Precondition("one label per cover required".into()));
        }
        let keys = labels
            .iter()
            .map(|l| order.label_key(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(LabeledPoset {
            poset,
            labels,
            keys,
        })
    }

    /// Label of the cover `lower ⋖ upper`.
    pub fn label(&self, lower: usize, upper: usize) -> Option<&EdgeLabel> {
        self.poset
            .cover_index(lower, upper)
            .map(|k| &self.labels[k])
    }

    pub fn key(&self, lower: usize, upper: usize) -> Option<&LabelKey> {
        self.poset.cover_index(lower, upper).map(|k| &self.keys[k])
    }

    /// Label sequence of a chain given bottom-up, read in `reading` order.
    pub fn chain_keys(&self, chain: &[usize], reading: ChainReading) -> Vec<LabelKey> {
        let mut keys: Vec<LabelKey> = chain
            .windows(2)
            .map(|w| {
                self.key(w[0], w[1])
                    .expect("chain steps are covers")
                    .clone()
            })
            .collect();
        if reading == ChainReading::TopDown {
            keys.reverse();
        }
        keys
    }
}

/// Direction in which the labels of a maximal chain are read.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainReading {
    /// From the bottom element upwards.
    BottomUp,
    /// From the top element downwards.
    TopDown,
}

/// Outcome of [`verify_el`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElReport {
    pub ok: bool,
    pub intervals_checked: usize,
    pub failure: Option<ElFailure>,
}

/// The interval `[bottom, top]` (poset indices) where the check failed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElFailure {
    pub bottom: usize,
    pub top: usize,
    pub reason: String,
}

/// Checks the EL property on every interval `[x, y]`, `x < y`: exactly one
/// maximal chain has strictly increasing labels, it is the lexicographically
/// smallest maximal chain, and its first label is smaller than the label of
/// every other first step inside the interval.
pub fn verify_el(lp: &LabeledPoset, reading: ChainReading) -> ElReport {
    let p = &lp.poset;
    let n = p.len();
    // Outgoing edges in reading direction: (next node, key).
    let out: Vec<Vec<(usize, &LabelKey)>> = (0..n)
        .map(|z| match reading {
            ChainReading::BottomUp => p
                .up(z)
                .iter()
                .map(|&y| (y, lp.key(z, y).expect("cover")))
                .collect(),
            ChainReading::TopDown => p
                .down(z)
                .iter()
                .map(|&y| (y, lp.key(y, z).expect("cover")))
                .collect(),
        })
        .collect();
    let reaches = |from: usize, to: usize| match reading {
        ChainReading::BottomUp => p.leq(from, to),
        ChainReading::TopDown => p.leq(to, from),
    };
    let fail = |s: usize, t: usize, reason: String, checked: usize| {
        let (bottom, top) = match reading {
            ChainReading::BottomUp => (s, t),
            ChainReading::TopDown => (t, s),
        };
        ElReport {
            ok: false,
            intervals_checked: checked,
            failure: Some(ElFailure {
                bottom,
                top,
                reason,
            }),
        }
    };
    // Traversal order along the reading direction.
    let mut order: Vec<usize> = p.topo.clone();
    if reading == ChainReading::TopDown {
        order.reverse();
    }
    let mut checked = 0;
    for s in 0..n {
        // Increasing paths from s: per node, (last key, count).
        let mut inc: Vec<Vec<(&LabelKey, u128)>> = vec![Vec::new(); n];
        for &z in &order {
            if !reaches(s, z) {
                continue;
            }
            for &(y, k) in &out[z] {
                let count: u128 = if z == s {
                    1
                } else {
                    inc[z]
                        .iter()
                        .filter(|(last, _)| *last < k)
                        .map(|(_, c)| c)
                        .sum()
                };
                if count > 0 {
                    inc[y].push((k, count));
                }
            }
        }
        for &t in &order {
            if t == s || !reaches(s, t) {
                continue;
            }
            checked += 1;
            let total: u128 = inc[t].iter().map(|(_, c)| c).sum();
            if total != 1 {
                return fail(s, t, format!("{total} increasing maximal chains"), checked);
            }
            // Greedy lexicographically smallest chain.
            let mut z = s;
            let mut prev: Option<&LabelKey> = None;
            let mut first = true;
            while z != t {
                let mut steps: Vec<(usize, &LabelKey)> = out[z]
                    .iter()
                    .copied()
                    .filter(|&(y, _)| reaches(y, t))
                    .collect();
                steps.sort_by(|a, b| a.1.cmp(b.1));
                if steps.len() >= 2 && steps[0].1 == steps[1].1 {
                    return fail(s, t, "two steps with equal labels".into(), checked);
                }
                let (y, k) = steps[0];
                if prev.is_some_and(|pk| pk >= k) {
                    return fail(
                        s,
                        t,
                        "lexicographically minimal chain is not increasing".into(),
                        checked,
                    );
                }
                if first && steps[1..].iter().any(|(_, other)| *other <= k) {
                    return fail(
                        s,
                        t,
                        "first label of the increasing chain is not minimal".into(),
                        checked,
                    );
                }
                first = false;
                prev = Some(k);
                z = y;
            }
        }
    }
    ElReport {
        ok: true,
        intervals_checked: checked,
        failure: None,
    }
}

/// Maximal chains of the whole poset (bottom-up index lists) sorted by their
/// label sequences; for an EL-labeling this is a shelling order of the order
/// complex. Requires a unique minimum and maximum.
pub fn shelling_order(lp: &LabeledPoset, reading: ChainReading) -> Result<Vec<Vec<usize>>> {
    let p = &lp.poset;
    let (lo, hi) = p
        .minimum()
        .zip(p.maximum())
        .ok_or_else(|| Error::Precondition("bounded poset required".into()))?;
    let mut chains: Vec<(Vec<LabelKey>, Vec<usize>)> = p
        .maximal_chains(lo, hi)
        .into_iter()
        .map(|c| (lp.chain_keys(&c, reading), c))
        .collect();
    chains.sort();
    Ok(chains.into_iter().map(|(_, c)| c).collect())
}

/// Labels each cover `w1 ⋖^J w2` of a twisted interval by the reflection
/// `w2 w1^{-1}`.
pub fn el_label_twisted_interval(
    iv: &TwistedIntervalPoset,
    order: &ReflectionOrder,
) -> Result<LabeledPoset> {
    let labels = iv
        .covers
        .iter()
        .map(|&(a, b)| {
            let t = &iv.elements[b] * &iv.elements[a].inverse();
            if !t.is_reflection() {
                return Err(Error::Postcondition(format!(
                    "cover label {t:?} is not a reflection"
                )));
            }
            Ok(EdgeLabel::Right(t))
        })
        .collect::<Result<Vec<_>>>()?;
    LabeledPoset::new(iv.to_poset(), labels, order)
}

/// An interval of the poset of twisted intervals ordered by inclusion,
/// optionally with an adjoined minimum `0̂` (entry `None` in `pairs`).
#[derive(Clone, Debug)]
pub struct QjInterval {
    pub pairs: Vec<Option<(WeylElement, WeylElement)>>,
    pub poset: FinitePoset,
    pub labels: Vec<EdgeLabel>,
}

impl QjInterval {
    pub fn label(&self, order: &ReflectionOrder) -> Result<LabeledPoset> {
        LabeledPoset::new(self.poset.clone(), self.labels.clone(), order)
    }
}

/// The interval between `[x, y]` and `[x', y']` in the poset of intervals of
/// `(W, <=^J)`; with `bottom = None` the interval `[0̂, [x', y']]` of the
/// augmented poset. Covers move one endpoint by one twisted cover and carry
/// the labels `(y2 y1^{-1}, r)`, `(x1 x2^{-1}, l)`, or `∅` for `0̂ ⋖ [x, x]`.
pub fn assemble_qj_interval(
    ctx: &ParabolicContext,
    bottom: Option<(&WeylElement, &WeylElement)>,
    top: (&WeylElement, &WeylElement),
) -> Result<QjInterval> {
    let (xt, yt) = top;
    let (left, right, zero_hat) = match bottom {
        Some((x, y)) => {
            if !(ctx.j_leq(xt, x)? && ctx.j_leq(x, y)? && ctx.j_leq(y, yt)?) {
                return Err(Error::Precondition(
                    "bottom interval is not contained in top interval".into(),
                ));
            }
            (ctx.interval(xt, x)?, ctx.interval(y, yt)?, false)
        }
        None => {
            let iv = ctx.interval(xt, yt)?;
            (iv.clone(), iv, true)
        }
    };
    let mut pairs: Vec<Option<(WeylElement, WeylElement)>> = Vec::new();
    let mut ranks = Vec::new();
    let mut pos: HashMap<(usize, usize), usize> = HashMap::new();
    if zero_hat {
        pairs.push(None);
        ranks.push(0);
    }
    for (ia, a) in left.elements.iter().enumerate() {
        for (ib, b) in right.elements.iter().enumerate() {
            if zero_hat && !ctx.j_leq(a, b)? {
                continue;
            }
            pos.insert((ia, ib), pairs.len());
            pairs.push(Some((a.clone(), b.clone())));
            ranks.push(right.jlengths[ib] - left.jlengths[ia] + 1);
        }
    }
    let mut covers = Vec::new();
    let mut labels = Vec::new();
    if zero_hat {
        for (ia, a) in left.elements.iter().enumerate() {
            let ib = right.index_of(a).expect("same interval");
            covers.push((0, pos[&(ia, ib)]));
            labels.push(EdgeLabel::Bottom);
        }
    }
    for (&(ia, ib), &q) in &pos {
        // Grow on the right: b ⋖ b'.
        for &(lo, hi) in &right.covers {
            if lo == ib {
                if let Some(&q2) = pos.get(&(ia, hi)) {
                    covers.push((q, q2));
                    labels.push(EdgeLabel::Right(
                        &right.elements[hi] * &right.elements[ib].inverse(),
                    ));
                }
            }
        }
        // Grow on the left: a' ⋖ a.
        for &(lo, hi) in &left.covers {
            if hi == ia {
                if let Some(&q2) = pos.get(&(lo, ib)) {
                    covers.push((q, q2));
                    labels.push(EdgeLabel::Left(
                        &left.elements[ia] * &left.elements[lo].inverse(),
                    ));
                }
            }
        }
    }
    // Deterministic cover order.
    let mut tagged: Vec<((usize, usize), EdgeLabel)> = covers.into_iter().zip(labels).collect();
    tagged.sort_by_key(|(c, _)| *c);
    let (covers, labels): (Vec<_>, Vec<_>) = tagged.into_iter().unzip();
    let keys = pairs
        .iter()
        .map(|p| match p {
            None => "0^".to_string(),
            Some((a, b)) => format!("[{}, {}]", a.key(), b.key()),
        })
        .collect();
    let poset = FinitePoset::new(keys, covers, Some(ranks))?;
    Ok(QjInterval {
        pairs,
        poset,
        labels,
    })
}
