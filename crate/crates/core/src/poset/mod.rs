//! Finite posets given by their cover relations: purity and thinness checks,
//! maximal chains and order complexes. Edge labelings live in [`label`].

pub mod label;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finite poset on indices `0..n`, described by its cover relations.
#[derive(Clone, Debug)]
pub struct FinitePoset {
    keys: Vec<String>,
    covers: Vec<(usize, usize)>,
    rank: Option<Vec<i64>>,
    up: Vec<Vec<usize>>,
    down: Vec<Vec<usize>>,
    /// `above[x]` has bit `y` set iff `x <= y`.
    above: Vec<Vec<u64>>,
    /// A linear extension.
    topo: Vec<usize>,
    cover_index: HashMap<(usize, usize), usize>,
}

/// Outcome of [`FinitePoset::check_pure`]: on failure, two maximal chains
/// between the same endpoints with different lengths.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PureReport {
    pub pure: bool,
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
}

/// Outcome of [`FinitePoset::check_thin`]: on failure, the endpoints of a
/// length-2 interval that does not have exactly four elements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThinReport {
    pub thin: bool,
    pub witness: Option<(usize, usize)>,
}

impl FinitePoset {
    /// Builds the poset, rejecting out-of-range or duplicate covers, cycles,
    /// and ranks that do not rise by exactly one along covers.
    pub fn new(
        keys: Vec<String>,
        covers: Vec<(usize, usize)>,
        rank: Option<Vec<i64>>,
    ) -> Result<Self> {
        let n = keys.len();
        if let Some(r) = &rank {
            if r.len() != n {
                return Err(Error::Precondition(format!(
                    "{} ranks for {} elements",
                    r.len(),
                    n
                )));
            }
        }
        let mut up = vec![Vec::new(); n];
        let mut down = vec![Vec::new(); n];
        let mut cover_index = HashMap::new();
        for (k, &(a, b)) in covers.iter().enumerate() {
            if a >= n || b >= n || a == b {
                return Err(Error::Precondition(format!("invalid cover ({a}, {b})")));
            }
            if cover_index.insert((a, b), k).is_some() {
                return Err(Error::Precondition(format!("duplicate cover ({a}, {b})")));
            }
            if let Some(r) = &rank {
                if r[b] != r[a] + 1 {
                    return Err(Error::Precondition(format!(
                        "cover ({a}, {b}) does not raise the rank by one"
                    )));
                }
            }
            up[a].push(b);
            down[b].push(a);
        }
        for list in up.iter_mut().chain(down.iter_mut()) {
            list.sort_unstable();
        }
        // Kahn's algorithm, smallest index first for determinism.
        let mut indeg: Vec<usize> = down.iter().map(Vec::len).collect();
        let mut ready: std::collections::BTreeSet<usize> =
            (0..n).filter(|&i| indeg[i] == 0).collect();
        let mut topo = Vec::with_capacity(n);
        while let Some(x) = ready.pop_first() {
            topo.push(x);
            for &y in &up[x] {
                indeg[y] -= 1;
                if indeg[y] == 0 {
                    ready.insert(y);
                }
            }
        }
        if topo.len() != n {
            return Err(Error::Precondition("cover relation has a cycle".into()));
        }
        let words = n.div_ceil(64);
        let mut above = vec![vec![0u64; words]; n];
        for &x in topo.iter().rev() {
            let mut bits = vec![0u64; words];
            bits[x / 64] |= 1 << (x % 64);
            for &y in &up[x] {
                for (b, o) in bits.iter_mut().zip(&above[y]) {
                    *b |= o;
                }
            }
            above[x] = bits;
        }
        Ok(FinitePoset {
            keys,
            covers,
            rank,
            up,
            down,
            above,
            topo,
            cover_index,
        })
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn keys(&self) -> &[String] {
        &self.keys
    }

    pub fn covers(&self) -> &[(usize, usize)] {
        &self.covers
    }

    pub fn rank(&self) -> Option<&[i64]> {
        self.rank.as_deref()
    }

    pub fn up(&self, x: usize) -> &[usize] {
        &self.up[x]
    }

    pub fn down(&self, x: usize) -> &[usize] {
        &self.down[x]
    }

    /// Position of the cover `(a, b)` in [`covers`](Self::covers).
    pub fn cover_index(&self, a: usize, b: usize) -> Option<usize> {
        self.cover_index.get(&(a, b)).copied()
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.above[a][b / 64] >> (b % 64) & 1 == 1
    }

    /// The unique minimal element, if there is exactly one.
    pub fn minimum(&self) -> Option<usize> {
        let mins: Vec<usize> = (0..self.len())
            .filter(|&x| self.down[x].is_empty())
            .collect();
        (mins.len() == 1).then(|| mins[0])
    }

    pub fn maximum(&self) -> Option<usize> {
        let maxs: Vec<usize> = (0..self.len()).filter(|&x| self.up[x].is_empty()).collect();
        (maxs.len() == 1).then(|| maxs[0])
    }

    /// Elements `z` with `a <= z <= b`, in linear-extension order.
    pub fn interval_elements(&self, a: usize, b: usize) -> Vec<usize> {
        self.topo
            .iter()
            .copied()
            .filter(|&z| self.leq(a, z) && self.leq(z, b))
            .collect()
    }

    /// The induced subposet on `elements` (which must be convex, e.g. an
    /// interval, for the covers to be the restricted covers).
    pub fn subposet(&self, elements: &[usize]) -> FinitePoset {
        let pos: HashMap<usize, usize> =
            elements.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let covers = self
            .covers
            .iter()
            .filter_map(|(a, b)| Some((*pos.get(a)?, *pos.get(b)?)))
            .collect();
        FinitePoset::new(
            elements.iter().map(|&x| self.keys[x].clone()).collect(),
            covers,
            self.rank
                .as_ref()
                .map(|r| elements.iter().map(|&x| r[x]).collect()),
        )
        .expect("subposet of a valid poset")
    }

    /// The opposite poset.
    pub fn dual(&self) -> FinitePoset {
        FinitePoset::new(
            self.keys.clone(),
            self.covers.iter().map(|&(a, b)| (b, a)).collect(),
            self.rank.as_ref().map(|r| r.iter().map(|x| -x).collect()),
        )
        .expect("dual of a valid poset")
    }

    /// All saturated chains from `a` up to `b`, in depth-first order (smallest
    /// index first).
    pub fn maximal_chains(&self, a: usize, b: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![a];
        self.chains_rec(b, &mut stack, &mut out);
        out
    }

    fn chains_rec(&self, b: usize, stack: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let x = *stack.last().expect("nonempty");
        if x == b {
            out.push(stack.clone());
            return;
        }
        for &y in &self.up[x] {
            if self.leq(y, b) {
                stack.push(y);
                self.chains_rec(b, stack, out);
                stack.pop();
            }
        }
    }

    /// Shortest and longest cover-path lengths from `x` to every element,
    /// with predecessors for chain reconstruction (`None` when unreachable).
    #[allow(clippy::type_complexity)]
    fn path_lengths(&self, x: usize) -> (Vec<Option<(usize, usize)>>, Vec<Option<(usize, usize)>>) {
        let n = self.len();
        // (length, predecessor)
        let mut short: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut long: Vec<Option<(usize, usize)>> = vec![None; n];
        short[x] = Some((0, x));
        long[x] = Some((0, x));
        for &z in &self.topo {
            let (Some((ls, _)), Some((ll, _))) = (short[z], long[z]) else {
                continue;
            };
            for &y in &self.up[z] {
                if short[y].is_none_or(|(l, _)| ls + 1 < l) {
                    short[y] = Some((ls + 1, z));
                }
                if long[y].is_none_or(|(l, _)| ll + 1 > l) {
                    long[y] = Some((ll + 1, z));
                }
            }
        }
        (short, long)
    }

    /// Pure: for every comparable pair, all maximal chains between them have
    /// the same length.
    pub fn check_pure(&self) -> PureReport {
        for x in 0..self.len() {
            let (short, long) = self.path_lengths(x);
            for y in 0..self.len() {
                if let (Some((ls, _)), Some((ll, _))) = (short[y], long[y]) {
                    if ls != ll {
                        let rebuild = |t: &[Option<(usize, usize)>]| {
                            let mut chain = vec![y];
                            let mut z = y;
                            while z != x {
                                z = t[z].expect("reachable").1;
                                chain.push(z);
                            }
                            chain.reverse();
                            chain
                        };
                        return PureReport {
                            pure: false,
                            witness: Some((rebuild(&short), rebuild(&long))),
                        };
                    }
                }
            }
        }
        PureReport {
            pure: true,
            witness: None,
        }
    }

    /// Thin: every interval of length two has exactly four elements.
    pub fn check_thin(&self) -> Result<ThinReport> {
        if !self.check_pure().pure {
            return Err(Error::NotPure);
        }
        for x in 0..self.len() {
            let mut middles: HashMap<usize, usize> = HashMap::new();
            for &m in &self.up[x] {
                for &y in &self.up[m] {
                    *middles.entry(y).or_default() += 1;
                }
            }
            let mut ys: Vec<_> = middles.into_iter().collect();
            ys.sort_unstable();
            if let Some(&(y, _)) = ys.iter().find(|&&(_, c)| c != 2) {
                return Ok(ThinReport {
                    thin: false,
                    witness: Some((x, y)),
                });
            }
        }
        Ok(ThinReport {
            thin: true,
            witness: None,
        })
    }

    /// Length of the longest chain in the poset.
    pub fn height(&self) -> usize {
        (0..self.len())
            .filter(|&x| self.down[x].is_empty())
            .filter_map(|x| {
                let (_, long) = self.path_lengths(x);
                long.iter().filter_map(|l| l.map(|(l, _)| l)).max()
            })
            .max()
            .unwrap_or(0)
    }
}

/// Which chains become faces of the order complex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexMode {
    /// All chains of the poset.
    Full,
    /// Chains of the open interval obtained by removing the unique minimum
    /// and maximum.
    OpenInterval,
}

/// A simplicial complex on vertices `0..vertices`, given by its facets.
///
/// `facets = []` is the void complex; `facets = [[]]` is the complex whose
/// only face is the empty simplex (the (-1)-sphere).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    pub vertices: usize,
    pub facets: Vec<Vec<usize>>,
}

impl SimplicialComplex {
    /// Normalizes the facet list: sorts vertices, removes duplicates and
    /// faces contained in other facets.
    pub fn new(vertices: usize, facets: Vec<Vec<usize>>) -> Result<Self> {
        let mut fs: Vec<Vec<usize>> = facets
            .into_iter()
            .map(|mut f| {
                f.sort_unstable();
                f.dedup();
                f
            })
            .collect();
        if fs.iter().flatten().any(|&v| v >= vertices) {
            return Err(Error::Precondition("facet vertex out of range".into()));
        }
        fs.sort();
        fs.dedup();
        let kept: Vec<Vec<usize>> = fs
            .iter()
            .filter(|f| {
                !fs.iter()
                    .any(|g| g.len() > f.len() && f.iter().all(|v| g.binary_search(v).is_ok()))
            })
            .cloned()
            .collect();
        Ok(SimplicialComplex {
            vertices,
            facets: kept,
        })
    }

    pub fn dimension(&self) -> Option<usize> {
        self.facets
            .iter()
            .map(Vec::len)
            .max()
            .and_then(|l| l.checked_sub(1))
    }
}

/// The order complex: vertices are poset elements, faces are chains.
pub fn order_complex(p: &FinitePoset, mode: ComplexMode) -> Result<SimplicialComplex> {
    match mode {
        ComplexMode::Full => {
            if p.is_empty() {
                // The empty chain alone: the (-1)-sphere.
                return SimplicialComplex::new(0, vec![Vec::new()]);
            }
            let mut facets = Vec::new();
            for x in (0..p.len()).filter(|&x| p.down(x).is_empty()) {
                for y in (0..p.len()).filter(|&y| p.up(y).is_empty() && p.leq(x, y)) {
                    facets.extend(p.maximal_chains(x, y));
                }
            }
            SimplicialComplex::new(p.len(), facets)
        }
        ComplexMode::OpenInterval => {
            let (lo, hi) = match (p.minimum(), p.maximum()) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => {
                    return Err(Error::Precondition(
                        "open-interval complex needs a unique minimum and maximum".into(),
                    ))
                }
            };
            // Vertices are the remaining elements in index order.
            let mut index = vec![usize::MAX; p.len()];
            let mut next = 0;
            for (x, slot) in index.iter_mut().enumerate() {
                if x != lo && x != hi {
                    *slot = next;
                    next += 1;
                }
            }
            let facets = p
                .maximal_chains(lo, hi)
                .into_iter()
                .map(|c| {
                    c.into_iter()
                        .filter(|&x| x != lo && x != hi)
                        .map(|x| index[x])
                        .collect()
                })
                .collect();
            SimplicialComplex::new(next, facets)
        }
    }
}
