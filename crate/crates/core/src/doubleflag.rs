//! Double flag combinatorics: the thickened Cartan matrix, the poset `Q̂` of
//! triples with its EL-labeling, sampling of the cells `Z^u_{w,v}`, and the
//! face posets of links of the identity.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};
use crate::poset::label::{EdgeLabel, LabeledPoset, ReflectionOrder};
use crate::poset::{order_complex, ComplexMode, FinitePoset, SimplicialComplex};
use crate::rational::Rational;
use crate::sl::{MrKind, ParamSign, PinnedGroup, RatMatrix};
use crate::twisted::{demazure_min, ParabolicContext};
use crate::weyl::{WeylElement, WeylGroup, Word};

/// Label of the adjoined node.
pub const INFINITY_LABEL: &str = "inf";

/// A Cartan matrix `A` on `I` extended by a node `∞` with `ã_{i∞} = ã_{∞i} =
/// -2` for all `i ∈ I`. The node `∞` has index `rank(A)`.
#[derive(Clone, Debug)]
pub struct ThickenedCartan {
    base: WeylGroup,
    extended: WeylGroup,
    parabolic: ParabolicContext,
}

/// Builds the thickening. Fails with [`Error::NotSymmetrizable`] when the
/// base has nodes with different symmetrizer entries (e.g. `B2`, `G2`): the
/// symmetric `-2` entries force all of them to agree with `d_∞`.
pub fn extend_cartan(base: &CartanMatrix) -> Result<ThickenedCartan> {
    let n = base.size();
    let mut rows = base.rows();
    for row in rows.iter_mut() {
        row.push(-2);
    }
    let mut last = vec![-2; n];
    last.push(2);
    rows.push(last);
    let mut labels = base.labels().to_vec();
    if labels.iter().any(|l| l == INFINITY_LABEL) {
        return Err(Error::InvalidCartan(format!(
            "label {INFINITY_LABEL:?} is reserved"
        )));
    }
    labels.push(INFINITY_LABEL.to_string());
    let extended = WeylGroup::new(CartanMatrix::with_labels(rows, labels)?);
    let base_nodes: Vec<usize> = (0..n).collect();
    let parabolic = ParabolicContext::new(&extended, &base_nodes)?;
    Ok(ThickenedCartan {
        base: WeylGroup::new(base.clone()),
        extended,
        parabolic,
    })
}

impl ThickenedCartan {
    pub fn base(&self) -> &WeylGroup {
        &self.base
    }

    pub fn extended(&self) -> &WeylGroup {
        &self.extended
    }

    /// `(W̃, <=^I)`.
    pub fn parabolic(&self) -> &ParabolicContext {
        &self.parabolic
    }

    pub fn infinity(&self) -> usize {
        self.base.rank()
    }

    /// The identification `ι: W -> W̃_I`.
    pub fn iota(&self, w: &WeylElement) -> WeylElement {
        self.extended
            .from_word(w.canonical_word().letters())
            .expect("base nodes are nodes of the extension")
    }

    /// `th(w, v) = ι(w) s_∞ ι(v)`, of length `l(w) + l(v) + 1`.
    pub fn th(&self, w: &WeylElement, v: &WeylElement) -> Result<WeylElement> {
        if !w.group().same_group(&self.base) || !v.group().same_group(&self.base) {
            return Err(Error::GroupMismatch);
        }
        let x = self.iota(w).mul_simple_right(self.infinity());
        let y = &x * &self.iota(v);
        if y.length() != w.length() + v.length() + 1 {
            return Err(Error::Postcondition("th is not length-additive".into()));
        }
        Ok(y)
    }

    /// The reflection order on `W̃` that lists the reflections of `W̃_I`
    /// first: positive roots compared by `β / ht(β)` reading the `∞`
    /// coordinate first.
    pub fn reflection_order(&self) -> Result<ReflectionOrder> {
        let mut priority = vec![self.infinity()];
        priority.extend(0..self.infinity());
        ReflectionOrder::root_functional(&self.extended, &priority)
    }
}

/// A triple `(w, v, u)` of elements of the base group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TripleIndex {
    pub w: WeylElement,
    pub v: WeylElement,
    pub u: WeylElement,
    member: bool,
}

impl TripleIndex {
    pub fn new(w: WeylElement, v: WeylElement, u: WeylElement) -> Result<Self> {
        if !w.group().same_group(v.group()) || !w.group().same_group(u.group()) {
            return Err(Error::GroupMismatch);
        }
        let member = q_member(&w, &v, &u);
        Ok(TripleIndex { w, v, u, member })
    }

    pub fn is_member(&self) -> bool {
        self.member
    }

    /// `l(w) + l(u) - l(v)`, the dimension of the cell.
    pub fn dimension(&self) -> i64 {
        self.w.length() as i64 + self.u.length() as i64 - self.v.length() as i64
    }

    /// Rank in `Q̂`: the dimension plus one (`0̂` has rank 0).
    pub fn rank(&self) -> i64 {
        self.dimension() + 1
    }

    pub fn key(&self) -> String {
        format!("({}, {}, {})", self.w.key(), self.v.key(), self.u.key())
    }

    /// The three canonical reduced words.
    pub fn words(&self) -> TripleWords {
        TripleWords {
            w: self.w.canonical_word().clone(),
            v: self.v.canonical_word().clone(),
            u: self.u.canonical_word().clone(),
        }
    }
}

/// Serialized form of a triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleWords {
    pub w: Word,
    pub v: Word,
    pub u: Word,
}

/// `(w, v, u) ∈ Q`, i.e. `w ∘_l v <= u`.
pub fn q_member(w: &WeylElement, v: &WeylElement, u: &WeylElement) -> bool {
    demazure_min(w, v).bruhat_leq(u)
}

/// `a <= b` in `Q`: `w_a <= w_b`, `v_b <= v_a`, `u_a <= u_b`.
pub fn q_leq(a: &TripleIndex, b: &TripleIndex) -> Result<bool> {
    if !a.is_member() || !b.is_member() {
        return Err(Error::NotMember);
    }
    Ok(a.w.bruhat_leq(&b.w) && b.v.bruhat_leq(&a.v) && a.u.bruhat_leq(&b.u))
}

/// The interval `[0̂, top]` of `Q̂`; entry 0 of `triples` is `0̂`.
#[derive(Clone, Debug)]
pub struct QHatInterval {
    pub triples: Vec<Option<TripleIndex>>,
    pub poset: FinitePoset,
}

pub fn q_interval_hat(top: &TripleIndex) -> Result<QHatInterval> {
    if !top.is_member() {
        return Err(Error::NotMember);
    }
    let group = top.w.group().clone();
    let ws = top.w.lower_interval();
    let us = top.u.lower_interval();
    let max_v = top.w.length() + top.u.length();
    let vs: Vec<WeylElement> = group
        .enumerate_ball(Some(max_v), None)?
        .into_iter()
        .filter(|x| top.v.bruhat_leq(x))
        .collect();
    let mut found = Vec::new();
    for w in &ws {
        for u in &us {
            for v in vs.iter().filter(|v| v.length() <= w.length() + u.length()) {
                let t = TripleIndex::new(w.clone(), v.clone(), u.clone())?;
                if t.is_member() {
                    found.push(t);
                }
            }
        }
    }
    found.sort_by(|a, b| (a.rank(), &a.w, &a.v, &a.u).cmp(&(b.rank(), &b.w, &b.v, &b.u)));
    let mut triples: Vec<Option<TripleIndex>> = vec![None];
    triples.extend(found.into_iter().map(Some));
    let ranks: Vec<i64> = triples
        .iter()
        .map(|t| t.as_ref().map_or(0, TripleIndex::rank))
        .collect();
    let mut covers = Vec::new();
    for (j, b) in triples.iter().enumerate().skip(1) {
        let b = b.as_ref().expect("only entry 0 is 0̂");
        if b.rank() == 1 {
            covers.push((0, j));
        }
        for (i, a) in triples.iter().enumerate().skip(1) {
            let a = a.as_ref().expect("only entry 0 is 0̂");
            if a.rank() + 1 == b.rank() && q_leq(a, b)? {
                covers.push((i, j));
            }
        }
    }
    let keys = triples
        .iter()
        .map(|t| {
            t.as_ref()
                .map_or_else(|| "0^".to_string(), TripleIndex::key)
        })
        .collect();
    let poset = FinitePoset::new(keys, covers, Some(ranks))?;
    Ok(QHatInterval { triples, poset })
}

/// The image `h(w, v, u) = [ι(u), th(w, v)]`, an interval of `(W̃, <=^I)`.
pub fn h_map(t: &TripleIndex, tc: &ThickenedCartan) -> Result<(WeylElement, WeylElement)> {
    Ok((tc.iota(&t.u), tc.th(&t.w, &t.v)?))
}

/// Labels `Q̂` through `h`: a cover moving the top endpoint `y ⋖ y'` gets
/// `(y' y^{-1}, r)`, one moving the bottom endpoint `x' ⋖ x` gets `(x x'^{-1},
/// l)`. A cover `0̂ ⋖ q` gets the first label of the increasing chain of
/// `h(q)` read from the top, i.e. the smallest `(t, r)` over lower covers of
/// `th(w, v)` inside `h(q)`.
pub fn q_el_label(
    iv: &QHatInterval,
    tc: &ThickenedCartan,
    order: &ReflectionOrder,
) -> Result<LabeledPoset> {
    let ctx = tc.parabolic();
    let images: Vec<Option<(WeylElement, WeylElement)>> = iv
        .triples
        .iter()
        .map(|t| t.as_ref().map(|t| h_map(t, tc)).transpose())
        .collect::<Result<_>>()?;
    let mut zero_labels: HashMap<(WeylElement, WeylElement), EdgeLabel> = HashMap::new();
    let mut labels = Vec::with_capacity(iv.poset.covers().len());
    for &(a, b) in iv.poset.covers() {
        let (xb, yb) = images[b].as_ref().expect("0̂ is never an upper end");
        let label = match &images[a] {
            None => {
                if let Some(l) = zero_labels.get(&(xb.clone(), yb.clone())) {
                    l.clone()
                } else {
                    let l = zero_hat_label(ctx, xb, yb, order)?;
                    zero_labels.insert((xb.clone(), yb.clone()), l.clone());
                    l
                }
            }
            Some((xa, ya)) => {
                if xa == xb {
                    EdgeLabel::Right(yb * &ya.inverse())
                } else if ya == yb {
                    EdgeLabel::Left(xa * &xb.inverse())
                } else {
                    return Err(Error::Postcondition(format!(
                        "cover {} ⋖ {} moves both endpoints",
                        iv.poset.keys()[a],
                        iv.poset.keys()[b]
                    )));
                }
            }
        };
        if let Some(t) = label.reflection() {
            if !t.is_reflection() {
                return Err(Error::Postcondition(format!(
                    "label {t:?} is not a reflection"
                )));
            }
        }
        labels.push(label);
    }
    LabeledPoset::new(iv.poset.clone(), labels, order)
}

fn zero_hat_label(
    ctx: &ParabolicContext,
    x: &WeylElement,
    y: &WeylElement,
    order: &ReflectionOrder,
) -> Result<EdgeLabel> {
    let interval = ctx.interval(x, y)?;
    let top = interval.index_of(y).expect("interval contains its top");
    let mut best: Option<(crate::poset::label::LabelKey, EdgeLabel)> = None;
    for &(lo, hi) in &interval.covers {
        if hi != top {
            continue;
        }
        let label = EdgeLabel::Right(y * &interval.elements[lo].inverse());
        let key = order.label_key(&label)?;
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            best = Some((key, label));
        }
    }
    best.map(|(_, l)| l)
        .ok_or_else(|| Error::Postcondition("interval has no lower cover of its top".into()))
}

/// A point of `Z^u_{w,v,>0}` as the pair `(g1, g2)` with `g1` in the negative
/// Marsh–Rietsch set for `(c_+, w)` and `g2` in the positive one for `(v_+,
/// c^{-1} u)`, where `c` is the Bruhat-minimal element with `c <= w` and `v
/// <= c^{-1} u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZSample {
    pub triple: TripleWords,
    pub c: Word,
    pub g1: RatMatrix,
    pub g2: RatMatrix,
}

/// The minimal `c` of a member triple; checks `l(c^{-1} u) = l(c) + l(u)`.
pub fn z_minimal_c(t: &TripleIndex) -> Result<WeylElement> {
    if !t.is_member() {
        return Err(Error::NotMember);
    }
    let cands: Vec<WeylElement> =
        t.w.lower_interval()
            .into_iter()
            .filter(|c| t.v.bruhat_leq(&(&c.inverse() * &t.u)))
            .collect();
    let mins: Vec<&WeylElement> = cands
        .iter()
        .filter(|c| !cands.iter().any(|d| d != *c && d.bruhat_leq(c)))
        .collect();
    let [c] = mins.as_slice() else {
        return Err(Error::AmbiguousMinimum);
    };
    if (&c.inverse() * &t.u).length() != c.length() + t.u.length() {
        return Err(Error::Postcondition(
            "c^{-1} u is not length-additive".into(),
        ));
    }
    Ok((*c).clone())
}

/// Samples `Z^u_{w,v,>0}` with `l(w) + l(u) - l(v)` parameters (leading ones
/// for `g1`). Checks `g1 ∈ B^+ ẇ B^+`, `g2 ∈ B^+ v̇ B^-` and `g1 g2 ∈ B^- u̇
/// B^-`.
pub fn z_sample(
    t: &TripleIndex,
    params: &[Rational],
    group: &PinnedGroup,
    sign: ParamSign,
) -> Result<ZSample> {
    if !t.w.group().same_group(group.weyl()) {
        return Err(Error::GroupMismatch);
    }
    let c = z_minimal_c(t)?;
    let expected = t.dimension() as usize;
    if params.len() != expected {
        return Err(Error::ParameterCount {
            expected,
            got: params.len(),
        });
    }
    let k1 = t.w.length() - c.length();
    let c_inv_u = &c.inverse() * &t.u;
    let g1 = group.sample_mr(
        MrKind::Negative,
        &c,
        t.w.canonical_word(),
        &params[..k1],
        sign,
    )?;
    let g2 = group.sample_mr(
        MrKind::Positive,
        &t.v,
        c_inv_u.canonical_word(),
        &params[k1..],
        sign,
    )?;
    if group.bruhat_stratum(&g1)? != t.w {
        return Err(Error::Postcondition("g1 is not in B+ w B+".into()));
    }
    if group.mixed_stratum(&g2)? != t.v {
        return Err(Error::Postcondition("g2 is not in B+ v B-".into()));
    }
    if group.opposite_bruhat_stratum(&(&g1 * &g2))? != t.u {
        return Err(Error::Postcondition("g1 g2 is not in B- u B-".into()));
    }
    Ok(ZSample {
        triple: t.words(),
        c: c.canonical_word().clone(),
        g1,
        g2,
    })
}

/// Canonical form of the pair `(g1 B^+, g2 g1^{-1})`-type data used to
/// compare samples: both matrices are kept exactly, so equality of the
/// reduced representatives `(g1 column echelon, g1 g2)` decides equality.
pub fn z_sample_key(s: &ZSample) -> (RatMatrix, RatMatrix) {
    (s.g1.column_echelon_mod_upper(), &s.g1 * &s.g2)
}

/// The face poset `{(w', u') : w' <= w, u' <= u, (w', u') != (e, e)}`,
/// ordered componentwise, rank `l(w') + l(u') - 1`. The last element is
/// `(w, u)`.
#[derive(Clone, Debug)]
pub struct LinkFacePoset {
    pub pairs: Vec<(WeylElement, WeylElement)>,
    pub poset: FinitePoset,
}

pub fn link_face_poset(w: &WeylElement, u: &WeylElement) -> Result<LinkFacePoset> {
    if !w.group().same_group(u.group()) {
        return Err(Error::GroupMismatch);
    }
    if w.is_identity() && u.is_identity() {
        return Err(Error::TrivialPair);
    }
    let mut pairs: Vec<(WeylElement, WeylElement)> = Vec::new();
    for a in w.lower_interval() {
        for b in u.lower_interval() {
            if !(a.is_identity() && b.is_identity()) {
                pairs.push((a.clone(), b));
            }
        }
    }
    let rank = |p: &(WeylElement, WeylElement)| (p.0.length() + p.1.length()) as i64 - 1;
    pairs.sort_by(|x, y| (rank(x), &x.0, &x.1).cmp(&(rank(y), &y.0, &y.1)));
    let ranks: Vec<i64> = pairs.iter().map(rank).collect();
    let mut covers = Vec::new();
    for (j, b) in pairs.iter().enumerate() {
        for (i, a) in pairs.iter().enumerate() {
            if ranks[i] + 1 == ranks[j] && a.0.bruhat_leq(&b.0) && a.1.bruhat_leq(&b.1) {
                covers.push((i, j));
            }
        }
    }
    let keys = pairs
        .iter()
        .map(|(a, b)| format!("({}, {})", a.key(), b.key()))
        .collect();
    let poset = FinitePoset::new(keys, covers, Some(ranks))?;
    Ok(LinkFacePoset { pairs, poset })
}

/// Order complex of the boundary `{(w', u') < (w, u)}` of the link face
/// poset.
pub fn link_boundary_complex(w: &WeylElement, u: &WeylElement) -> Result<SimplicialComplex> {
    let link = link_face_poset(w, u)?;
    let n = link.poset.len();
    let below: Vec<usize> = (0..n - 1).collect();
    order_complex(&link.poset.subposet(&below), ComplexMode::Full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::{is_sphere_signature, reduced_homology};
    use crate::poset::label::{verify_el, ChainReading};

    fn a(n: usize) -> CartanMatrix {
        CartanMatrix::type_a(n)
    }

    #[test]
    fn extension_examples() {
        let tc = extend_cartan(&a(1)).unwrap();
        assert_eq!(
            tc.extended().cartan().rows(),
            vec![vec![2, -2], vec![-2, 2]]
        );
        let tc2 = extend_cartan(&a(2)).unwrap();
        assert_eq!(
            tc2.extended().cartan().rows(),
            vec![vec![2, -1, -2], vec![-1, 2, -2], vec![-2, -2, 2]]
        );
        assert!(matches!(
            extend_cartan(&CartanMatrix::type_b(2)),
            Err(Error::NotSymmetrizable)
        ));
    }

    #[test]
    fn th_examples() {
        let tc = extend_cartan(&a(1)).unwrap();
        let e = tc.base().identity();
        let s1 = tc.base().from_word(&[0]).unwrap();
        let t = tc.th(&e, &e).unwrap();
        assert_eq!(t.length(), 1);
        assert_eq!(t.canonical_word().letters(), &[1]);
        assert_eq!(tc.th(&s1, &s1).unwrap().length(), 3);
    }

    #[test]
    fn membership_examples() {
        let g = WeylGroup::new(a(1));
        let (e, s1) = (g.identity(), g.from_word(&[0]).unwrap());
        assert!(q_member(&s1, &e, &e));
        assert!(!q_member(&e, &s1, &e));
        assert!(q_member(&s1, &s1, &e));
        let t = |w: &WeylElement, v: &WeylElement, u: &WeylElement| {
            TripleIndex::new(w.clone(), v.clone(), u.clone()).unwrap()
        };
        let x = t(&e, &s1, &s1);
        assert!(x.is_member());
        assert!(q_leq(&x, &x).unwrap());
        assert!(q_leq(&t(&e, &s1, &e), &t(&s1, &e, &s1)).is_err());
        assert!(q_leq(&t(&e, &e, &e), &t(&s1, &e, &s1)).unwrap());
        assert!(!q_leq(&t(&s1, &e, &e), &t(&e, &e, &e)).unwrap());
    }

    #[test]
    fn q_interval_examples() {
        let g = WeylGroup::new(a(1));
        let (e, s1) = (g.identity(), g.from_word(&[0]).unwrap());
        let iv =
            q_interval_hat(&TripleIndex::new(e.clone(), e.clone(), e.clone()).unwrap()).unwrap();
        assert_eq!(iv.poset.len(), 2);
        let top = TripleIndex::new(s1.clone(), e.clone(), s1.clone()).unwrap();
        let iv = q_interval_hat(&top).unwrap();
        assert!(iv.poset.check_pure().pure);
        assert!(iv.poset.check_thin().unwrap().thin);
        let keys: Vec<&str> = iv.poset.keys().iter().map(String::as_str).collect();
        assert!(
            keys.contains(&"(e, e, e)")
                && keys.contains(&"(1, 1, e)")
                && keys.contains(&"(1, 1, 1)")
        );
        let tc = extend_cartan(&a(1)).unwrap();
        let order = tc.reflection_order().unwrap();
        let lp = q_el_label(&iv, &tc, &order).unwrap();
        assert!(verify_el(&lp, ChainReading::TopDown).ok);
        assert!(matches!(
            q_interval_hat(&TripleIndex::new(e.clone(), s1.clone(), e.clone()).unwrap()),
            Err(Error::NotMember)
        ));
    }

    #[test]
    fn z_sample_examples() {
        let sl2 = PinnedGroup::new(2).unwrap();
        let g = sl2.weyl();
        let (e, s1) = (g.identity(), g.from_word(&[0]).unwrap());
        let trip = |w: &WeylElement, v: &WeylElement, u: &WeylElement| {
            TripleIndex::new(w.clone(), v.clone(), u.clone()).unwrap()
        };
        let z = z_sample(&trip(&e, &e, &e), &[], &sl2, ParamSign::Positive).unwrap();
        assert_eq!(z.g1, RatMatrix::identity(2));
        let (p, q) = (Rational::new(2, 1), Rational::new(1, 3));
        let z = z_sample(
            &trip(&s1, &e, &s1),
            &[p.clone(), q.clone()],
            &sl2,
            ParamSign::Positive,
        )
        .unwrap();
        assert_eq!(z.g1, sl2.y(0, &p).unwrap());
        assert_eq!(z.g2, sl2.x(0, &q).unwrap());
        let z = z_sample(&trip(&s1, &s1, &e), &[], &sl2, ParamSign::Positive).unwrap();
        assert_eq!(z.c.letters(), &[0]);
        assert!(matches!(
            z_sample(&trip(&e, &s1, &e), &[], &sl2, ParamSign::Positive),
            Err(Error::NotMember)
        ));
    }

    #[test]
    fn link_examples() {
        let g = WeylGroup::new(a(1));
        let (e, s1) = (g.identity(), g.from_word(&[0]).unwrap());
        assert_eq!(link_face_poset(&s1, &e).unwrap().poset.len(), 1);
        let l = link_face_poset(&s1, &s1).unwrap();
        assert_eq!(l.poset.len(), 3);
        assert_eq!(l.poset.covers().len(), 2);
        assert!(matches!(link_face_poset(&e, &e), Err(Error::TrivialPair)));
        let h = reduced_homology(&link_boundary_complex(&s1, &s1).unwrap()).unwrap();
        assert!(is_sphere_signature(&h, 0));
        let h = reduced_homology(&link_boundary_complex(&s1, &e).unwrap()).unwrap();
        assert!(is_sphere_signature(&h, -1));
    }
}
