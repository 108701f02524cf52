//! Reduced integral homology of simplicial complexes through Smith normal
//! forms of the boundary matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poset::SimplicialComplex;

/// Complexes with more faces than this are not processed.
pub const FACE_BUDGET: usize = 50_000;

/// A sparse integer matrix stored by rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    pub rows: usize,
    pub cols: usize,
    /// `entries[r]` maps column to nonzero value.
    pub entries: Vec<BTreeMap<usize, i64>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            entries: vec![BTreeMap::new(); rows],
        }
    }

    pub fn from_dense(m: &[Vec<i64>]) -> Self {
        let cols = m.first().map_or(0, Vec::len);
        let mut s = Self::zeros(m.len(), cols);
        for (r, row) in m.iter().enumerate() {
            for (c, &x) in row.iter().enumerate() {
                if x != 0 {
                    s.entries[r].insert(c, x);
                }
            }
        }
        s
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut m = vec![vec![0; self.cols]; self.rows];
        for (r, row) in self.entries.iter().enumerate() {
            for (&c, &x) in row {
                m[r][c] = x;
            }
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries[r].get(&c).copied().unwrap_or(0)
    }

    /// `self * other`, exact in `i128`; used to check `∂∂ = 0`.
    pub fn mul_is_zero(&self, other: &SparseMatrix) -> bool {
        debug_assert_eq!(self.cols, other.rows);
        for row in &self.entries {
            let mut acc: HashMap<usize, i128> = HashMap::new();
            for (&k, &a) in row {
                for (&c, &b) in &other.entries[k] {
                    *acc.entry(c).or_default() += a as i128 * b as i128;
                }
            }
            if acc.values().any(|&v| v != 0) {
                return false;
            }
        }
        true
    }
}

/// The augmented chain complex of a simplicial complex. `faces[k]` lists the
/// `k`-dimensional faces as sorted vertex tuples (sorted lexicographically);
/// `boundaries[k]` is `∂_k : C_k -> C_{k-1}` as a `|faces[k-1]| x |faces[k]|`
/// matrix, with `boundaries[0]` the augmentation `C_0 -> C_{-1} = Z`.
#[derive(Clone, Debug)]
pub struct ChainComplexZ {
    pub faces: Vec<Vec<Vec<usize>>>,
    pub boundaries: Vec<SparseMatrix>,
    /// Whether the empty face is present (`C_{-1} = Z`).
    pub augmented: bool,
}

/// Builds the boundary matrices with signs `(-1)^i` for deleting the `i`-th
/// vertex of a sorted face, and checks `∂∂ = 0`.
pub fn boundary_matrices(c: &SimplicialComplex) -> Result<ChainComplexZ> {
    let augmented = !c.facets.is_empty();
    let top = c.facets.iter().map(Vec::len).max().unwrap_or(0);
    let mut sets: Vec<BTreeSet<Vec<usize>>> = vec![BTreeSet::new(); top];
    let mut total = 0usize;
    for f in &c.facets {
        let k = f.len();
        if k > 20 {
            return Err(Error::BudgetExceeded {
                what: "face",
                limit: FACE_BUDGET,
            });
        }
        for mask in 1u32..(1 << k) {
            let face: Vec<usize> = (0..k)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| f[i])
                .collect();
            if sets[face.len() - 1].insert(face) {
                total += 1;
                if total > FACE_BUDGET {
                    return Err(Error::BudgetExceeded {
                        what: "face",
                        limit: FACE_BUDGET,
                    });
                }
            }
        }
    }
    let faces: Vec<Vec<Vec<usize>>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
    let mut boundaries = Vec::with_capacity(faces.len());
    for k in 0..faces.len() {
        if k == 0 {
            let mut m = SparseMatrix::zeros(usize::from(augmented), faces[0].len());
            if augmented {
                for v in 0..faces[0].len() {
                    m.entries[0].insert(v, 1);
                }
            }
            boundaries.push(m);
            continue;
        }
        let index: HashMap<&Vec<usize>, usize> = faces[k - 1]
            .iter()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        let mut m = SparseMatrix::zeros(faces[k - 1].len(), faces[k].len());
        for (j, face) in faces[k].iter().enumerate() {
            for i in 0..face.len() {
                let mut sub = face.clone();
                sub.remove(i);
                let r = index[&sub];
                m.entries[r].insert(j, if i % 2 == 0 { 1 } else { -1 });
            }
        }
        boundaries.push(m);
    }
    for k in 1..boundaries.len() {
        if !boundaries[k - 1].mul_is_zero(&boundaries[k]) {
            return Err(Error::Postcondition(format!(
                "boundary of boundary nonzero in degree {k}"
            )));
        }
    }
    Ok(ChainComplexZ {
        faces,
        boundaries,
        augmented,
    })
}

/// Invariant factors `d_1 | d_2 | ...` (all positive) and the rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diag: Vec<BigInt>,
    pub rank: usize,
}

/// Smith normal form of a dense integer matrix.
pub fn smith_normal_form(m: &[Vec<i64>]) -> SmithForm {
    smith_sparse(&SparseMatrix::from_dense(m))
}

/// Smith normal form of a sparse matrix: unit pivots are eliminated first in
/// row-major scan order (each contributes an invariant factor 1); the
/// remaining block is reduced densely over arbitrary-precision integers with
/// the smallest-magnitude pivot, ties broken row-major.
pub fn smith_sparse(m: &SparseMatrix) -> SmithForm {
    let mut rows: Vec<BTreeMap<usize, i64>> = m.entries.clone();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols];
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            col_rows[c].insert(r);
        }
    }
    let mut alive_row = vec![true; m.rows];
    let mut alive_col = vec![true; m.cols];
    let mut units = 0usize;
    let mut queue: BTreeSet<usize> = (0..m.rows).collect();
    let mut overflow = false;
    'outer: while let Some(r) = queue.pop_first() {
        if !alive_row[r] {
            continue;
        }
        let Some((&c, &p)) = rows[r].iter().find(|(_, v)| v.abs() == 1) else {
            continue;
        };
        // Clear column c in every other row using row r.
        let pivot_row = rows[r].clone();
        let others: Vec<usize> = col_rows[c].iter().copied().filter(|&j| j != r).collect();
        for j in others {
            let a = rows[j][&c];
            let factor = a * p; // a / p since p = ±1
            for (&cc, &v) in &pivot_row {
                let cur = rows[j].get(&cc).copied().unwrap_or(0);
                let Some(new) = v.checked_mul(factor).and_then(|x| cur.checked_sub(x)) else {
                    overflow = true;
                    break 'outer;
                };
                if new == 0 {
                    rows[j].remove(&cc);
                    col_rows[cc].remove(&j);
                } else {
                    if cur == 0 {
                        col_rows[cc].insert(j);
                    }
                    rows[j].insert(cc, new);
                }
            }
            queue.insert(j);
        }
        // Remove row r and column c.
        for &cc in pivot_row.keys() {
            col_rows[cc].remove(&r);
        }
        rows[r].clear();
        alive_row[r] = false;
        alive_col[c] = false;
        units += 1;
    }
    if overflow {
        // Start over densely on the original matrix.
        let dense: Vec<Vec<BigInt>> = m
            .to_dense()
            .into_iter()
            .map(|row| row.into_iter().map(BigInt::from).collect())
            .collect();
        let diag = dense_smith(dense);
        let rank = diag.len();
        return SmithForm { diag, rank };
    }
    let rest_rows: Vec<usize> = (0..m.rows)
        .filter(|&r| alive_row[r] && !rows[r].is_empty())
        .collect();
    let rest_cols: Vec<usize> = (0..m.cols).filter(|&c| alive_col[c]).collect();
    let col_pos: HashMap<usize, usize> =
        rest_cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let dense: Vec<Vec<BigInt>> = rest_rows
        .iter()
        .map(|&r| {
            let mut row = vec![BigInt::zero(); rest_cols.len()];
            for (&c, &v) in &rows[r] {
                row[col_pos[&c]] = BigInt::from(v);
            }
            row
        })
        .collect();
    let mut diag = vec![BigInt::one(); units];
    diag.extend(dense_smith(dense));
    let rank = diag.len();
    SmithForm { diag, rank }
}

/// Dense Smith normal form; returns the nonzero invariant factors.
fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // Smallest-magnitude nonzero pivot in the remaining block, row-major ties.
        let mut best: Option<(usize, usize)> = None;
        for r in t..rows {
            for c in t..cols {
                if !a[r][c].is_zero() && best.is_none_or(|(br, bc)| a[r][c].abs() < a[br][bc].abs())
                {
                    best = Some((r, c));
                }
            }
        }
        let Some((pr, pc)) = best else { break };
        a.swap(t, pr);
        for row in a.iter_mut() {
            row.swap(t, pc);
        }
        loop {
            let mut changed = false;
            // Reduce column t.
            for r in t + 1..rows {
                if a[r][t].is_zero() {
                    continue;
                }
                let q = a[r][t].div_floor(&a[t][t]);
                for c in t..cols {
                    let d = &q * &a[t][c];
                    a[r][c] -= d;
                }
                if !a[r][t].is_zero() {
                    a.swap(t, r);
                    changed = true;
                }
            }
            // Reduce row t.
            for c in t + 1..cols {
                if a[t][c].is_zero() {
                    continue;
                }
                let q = a[t][c].div_floor(&a[t][t]);
                for row in a.iter_mut().skip(t) {
                    let d = &q * &row[t];
                    row[c] -= d;
                }
                if !a[t][c].is_zero() {
                    for row in a.iter_mut() {
                        row.swap(t, c);
                    }
                    changed = true;
                }
            }
            if changed {
                continue;
            }
            // Divisibility: fold a non-divisible row into row t.
            let bad =
                (t + 1..rows).find(|&r| (t + 1..cols).any(|c| !(&a[r][c] % &a[t][t]).is_zero()));
            match bad {
                Some(r) => {
                    for c in t..cols {
                        let v = a[r][c].clone();
                        a[t][c] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Reduced homology: `betti[k]` and `torsion[k]` for `k >= 0`, plus the rank
/// of `H~_{-1}` (one exactly for the complex `{∅}`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyProfile {
    pub betti: Vec<usize>,
    pub torsion: Vec<Vec<BigInt>>,
    pub minus_one: usize,
}

impl HomologyProfile {
    /// `Some(d)` when the profile is that of a `d`-sphere (`d >= -1`).
    pub fn sphere_dimension(&self) -> Option<i64> {
        if self.torsion.iter().any(|t| !t.is_empty()) {
            return None;
        }
        let nonzero: Vec<(i64, usize)> = std::iter::once((-1, self.minus_one))
            .chain(self.betti.iter().enumerate().map(|(k, &b)| (k as i64, b)))
            .filter(|&(_, b)| b != 0)
            .collect();
        match nonzero.as_slice() {
            [(d, 1)] => Some(*d),
            _ => None,
        }
    }
}

impl Serialize for HomologyProfile {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            betti: Vec<usize>,
            torsion: Vec<Vec<String>>,
            sphere: Option<i64>,
        }
        Repr {
            betti: self.betti.clone(),
            torsion: self
                .torsion
                .iter()
                .map(|t| t.iter().map(|x| x.to_string()).collect())
                .collect(),
            sphere: self.sphere_dimension(),
        }
        .serialize(s)
    }
}

/// Reduced integral homology of `c` from the augmented chain complex.
pub fn reduced_homology(c: &SimplicialComplex) -> Result<HomologyProfile> {
    let cc = boundary_matrices(c)?;
    let dims = cc.faces.len();
    let forms: Vec<SmithForm> = cc.boundaries.iter().map(smith_sparse).collect();
    let rank = |k: usize| forms.get(k).map_or(0, |f| f.rank);
    let mut betti = Vec::with_capacity(dims);
    let mut torsion = Vec::with_capacity(dims);
    for k in 0..dims {
        betti.push(cc.faces[k].len() - rank(k) - rank(k + 1));
        torsion.push(
            forms
                .get(k + 1)
                .map(|f| f.diag.iter().filter(|d| !d.is_one()).cloned().collect())
                .unwrap_or_default(),
        );
    }
    let minus_one = usize::from(cc.augmented) - rank(0);
    Ok(HomologyProfile {
        betti,
        torsion,
        minus_one,
    })
}

/// True iff the reduced homology is `Z` in degree `d` and zero elsewhere;
/// `d = -1` is the signature of the complex `{∅}`.
pub fn is_sphere_signature(h: &HomologyProfile, d: i64) -> bool {
    h.sphere_dimension() == Some(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(n: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::new(n, facets.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn boundary_examples() {
        let point = boundary_matrices(&complex(1, &[&[0]])).unwrap();
        assert_eq!(point.boundaries.len(), 1);
        let edge = boundary_matrices(&complex(2, &[&[0, 1]])).unwrap();
        assert_eq!(edge.boundaries[1].to_dense(), vec![vec![-1], vec![1]]);
        let tri = boundary_matrices(&complex(3, &[&[0, 1], &[1, 2], &[0, 2]])).unwrap();
        let d1 = tri.boundaries[1].to_dense();
        assert_eq!(d1.len(), 3);
        for c in 0..3 {
            assert_eq!(d1.iter().map(|r| r[c]).sum::<i64>(), 0);
        }
        assert_eq!(smith_sparse(&tri.boundaries[1]).rank, 2);
    }

    #[test]
    fn smith_examples() {
        assert_eq!(
            smith_normal_form(&[vec![1, 0], vec![0, 1]]).diag,
            big(&[1, 1])
        );
        assert_eq!(
            smith_normal_form(&[vec![2, 0], vec![0, 4]]).diag,
            big(&[2, 4])
        );
        assert_eq!(
            smith_normal_form(&[vec![2, 4], vec![6, 8]]).diag,
            big(&[2, 4])
        );
        assert_eq!(
            smith_normal_form(&[vec![2, 0], vec![0, 3]]).diag,
            big(&[1, 6])
        );
        assert_eq!(smith_normal_form(&[vec![0, 0], vec![0, 0]]).rank, 0);
        // Overflowing elimination falls back to the dense path.
        let huge = i64::MAX / 2;
        let f = smith_normal_form(&[vec![1, huge, huge], vec![huge, 1, 3], vec![huge, 5, 1]]);
        assert_eq!(f.rank, 3);
    }

    #[test]
    fn homology_examples() {
        let s0 = reduced_homology(&complex(2, &[&[0], &[1]])).unwrap();
        assert_eq!(s0.betti, vec![1]);
        assert!(is_sphere_signature(&s0, 0));
        let s1 = reduced_homology(&complex(3, &[&[0, 1], &[1, 2], &[0, 2]])).unwrap();
        assert_eq!(s1.betti, vec![0, 1]);
        assert!(is_sphere_signature(&s1, 1));
        assert!(!is_sphere_signature(&s1, 0));
        let ball = reduced_homology(&complex(3, &[&[0, 1, 2]])).unwrap();
        assert!(!is_sphere_signature(&ball, 2));
        assert_eq!(ball.sphere_dimension(), None);
        let empty = reduced_homology(&complex(0, &[&[]])).unwrap();
        assert!(is_sphere_signature(&empty, -1));
        let void = reduced_homology(&SimplicialComplex::new(0, vec![]).unwrap()).unwrap();
        assert_eq!(void.sphere_dimension(), None);
    }

    #[test]
    fn projective_plane_has_torsion() {
        // Six-vertex triangulation of RP^2.
        let rp2: &[&[usize]] = &[
            &[0, 1, 2],
            &[0, 2, 3],
            &[0, 3, 4],
            &[0, 4, 5],
            &[0, 1, 5],
            &[1, 2, 4],
            &[2, 3, 5],
            &[1, 3, 4],
            &[1, 3, 5],
            &[2, 4, 5],
        ];
        let h = reduced_homology(&complex(6, rp2)).unwrap();
        assert_eq!(h.betti, vec![0, 0, 0]);
        assert_eq!(h.torsion[1], big(&[2]));
        let json = serde_json::to_string(&h).unwrap();
        assert_eq!(
            json,
            r#"{"betti":[0,0,0],"torsion":[[],["2"],[]],"sphere":null}"#
        );
    }

    #[test]
    fn face_budget() {
        let f: Vec<usize> = (0..17).collect();
        let c = SimplicialComplex::new(17, vec![f]).unwrap();
        assert!(matches!(
            reduced_homology(&c),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}
