//! Generalized Cartan matrices.

use std::collections::VecDeque;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symmetrizable generalized Cartan matrix `A = (a_ij)`.
///
/// The pairing convention is `<alpha_i, alpha_j^vee> = a_ij`, so the simple
/// reflection `s_i` acts on simple roots by `s_i(alpha_j) = alpha_j - a_ji alpha_i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CartanMatrix {
    size: usize,
    entries: Vec<i64>,
    symmetrizer: Vec<i64>,
    labels: Vec<String>,
}

impl CartanMatrix {
    /// Validates `rows` and solves for a symmetrizer. Node labels default to
    /// `"1"`, `"2"`, ...
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let labels = (1..=rows.len()).map(|i| i.to_string()).collect();
        Self::with_labels(rows, labels)
    }

    pub fn with_labels(rows: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self> {
        let size = rows.len();
        if size == 0 {
            return Err(Error::InvalidCartan("empty matrix".into()));
        }
        if size > 63 {
            return Err(Error::InvalidCartan(
                "rank above 63 is not supported".into(),
            ));
        }
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidCartan("matrix is not square".into()));
        }
        if labels.len() != size {
            return Err(Error::InvalidCartan(format!(
                "{} labels for {} nodes",
                labels.len(),
                size
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidCartan(format!("duplicate label {l:?}")));
            }
        }
        for i in 0..size {
            if rows[i][i] != 2 {
                return Err(Error::InvalidCartan(format!(
                    "diagonal entry ({i},{i}) is not 2"
                )));
            }
            for j in 0..size {
                if i == j {
                    continue;
                }
                if rows[i][j] > 0 {
                    return Err(Error::InvalidCartan(format!("entry ({i},{j}) is positive")));
                }
                if (rows[i][j] == 0) != (rows[j][i] == 0) {
                    return Err(Error::InvalidCartan(format!(
                        "entries ({i},{j}) and ({j},{i}) have different zero pattern"
                    )));
                }
            }
        }
        let entries: Vec<i64> = rows.into_iter().flatten().collect();
        let symmetrizer = solve_symmetrizer(size, &entries)?;
        Ok(CartanMatrix {
            size,
            entries,
            symmetrizer,
            labels,
        })
    }

    /// Finite type `A_n`.
    pub fn type_a(n: usize) -> Self {
        let mut rows = vec![vec![0; n]; n];
        for i in 0..n {
            rows[i][i] = 2;
            if i + 1 < n {
                rows[i][i + 1] = -1;
                rows[i + 1][i] = -1;
            }
        }
        Self::new(rows).expect("type A is a valid Cartan matrix")
    }

    /// Finite type `B_n` (the last node is short).
    pub fn type_b(n: usize) -> Self {
        assert!(n >= 2);
        let mut rows = Self::type_a(n).rows();
        rows[n - 1][n - 2] = -2;
        Self::new(rows).expect("type B is a valid Cartan matrix")
    }

    /// Finite type `C_n` (the last node is long).
    pub fn type_c(n: usize) -> Self {
        assert!(n >= 2);
        let mut rows = Self::type_a(n).rows();
        rows[n - 2][n - 1] = -2;
        Self::new(rows).expect("type C is a valid Cartan matrix")
    }

    pub fn type_g2() -> Self {
        Self::new(vec![vec![2, -1], vec![-3, 2]]).expect("G2 is a valid Cartan matrix")
    }

    /// Affine `A_1^(1)`: `[[2,-2],[-2,2]]`.
    pub fn affine_a1() -> Self {
        Self::new(vec![vec![2, -2], vec![-2, 2]]).expect("affine A1 is a valid Cartan matrix")
    }

    /// Parses names such as `A3`, `B2`, `C3`, `G2`, `A1~` (affine A1) or
    /// `H3,3` for the rank-two matrix `[[2,-3],[-3,2]]`.
    pub fn from_name(name: &str) -> Result<Self> {
        let name = name.trim();
        let bad = || Error::Parse(format!("unknown Cartan type {name:?}"));
        if name == "A1~" {
            return Ok(Self::affine_a1());
        }
        if let Some(rest) = name.strip_prefix('H') {
            let (a, b) = rest.split_once(',').ok_or_else(bad)?;
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            return Self::new(vec![vec![2, -a], vec![-b, 2]]);
        }
        let (kind, rank) = name.split_at(1);
        let rank: usize = rank.parse().map_err(|_| bad())?;
        if rank == 0 {
            return Err(bad());
        }
        match kind {
            "A" => Ok(Self::type_a(rank)),
            "B" if rank >= 2 => Ok(Self::type_b(rank)),
            "C" if rank >= 2 => Ok(Self::type_c(rank)),
            "G" if rank == 2 => Ok(Self::type_g2()),
            _ => Err(bad()),
        }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.size + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    /// Positive integers `d_i` with `d_i a_ij = d_j a_ji`.
    pub fn symmetrizer(&self) -> &[i64] {
        &self.symmetrizer
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// True when the Weyl group is finite (the symmetrized matrix is positive
    /// definite).
    pub fn is_finite_type(&self) -> bool {
        // Sylvester's criterion on D·A, exactly.
        let n = self.size;
        let mut m: Vec<Vec<Ratio<i128>>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Ratio::from_integer((self.symmetrizer[i] * self.entry(i, j)) as i128))
                    .collect()
            })
            .collect();
        for k in 0..n {
            if m[k][k] <= Ratio::from_integer(0) {
                return false;
            }
            for i in k + 1..n {
                let f = m[i][k] / m[k][k];
                for j in k..n {
                    let d = f * m[k][j];
                    m[i][j] -= d;
                }
            }
        }
        true
    }

    pub fn to_config(&self) -> CartanConfig {
        CartanConfig {
            cartan: self.rows(),
            labels: Some(self.labels.clone()),
        }
    }
}

impl fmt::Debug for CartanMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CartanMatrix{:?}", self.rows())
    }
}

/// JSON form: `{"cartan": [[2,-1],[-1,2]], "labels": ["1","2"]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CartanConfig {
    pub cartan: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl CartanConfig {
    pub fn build(self) -> Result<CartanMatrix> {
        match self.labels {
            Some(labels) => CartanMatrix::with_labels(self.cartan, labels),
            None => CartanMatrix::new(self.cartan),
        }
    }
}

fn solve_symmetrizer(size: usize, a: &[i64]) -> Result<Vec<i64>> {
    let mut d: Vec<Option<Ratio<i64>>> = vec![None; size];
    for root in 0..size {
        if d[root].is_some() {
            continue;
        }
        d[root] = Some(Ratio::from_integer(1));
        let mut queue = VecDeque::from([root]);
        while let Some(i) = queue.pop_front() {
            let di = d[i].expect("visited");
            for j in 0..size {
                let (aij, aji) = (a[i * size + j], a[j * size + i]);
                if i == j || aij == 0 {
                    continue;
                }
                // d_i a_ij = d_j a_ji
                let dj = di * Ratio::from_integer(aij) / Ratio::from_integer(aji);
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        queue.push_back(j);
                    }
                    Some(existing) if existing != dj => return Err(Error::NotSymmetrizable),
                    Some(_) => {}
                }
            }
        }
    }
    let d: Vec<Ratio<i64>> = d
        .into_iter()
        .map(|x| x.expect("all nodes visited"))
        .collect();
    let lcm = d.iter().fold(1i64, |acc, x| acc.lcm(x.denom()));
    Ok(d.iter().map(|x| (x * lcm).to_integer()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_matrices() {
        assert!(CartanMatrix::new(vec![vec![2, 1], vec![-1, 2]]).is_err());
        assert!(CartanMatrix::new(vec![vec![2, 0], vec![-1, 2]]).is_err());
        assert!(CartanMatrix::new(vec![vec![1, -1], vec![-1, 2]]).is_err());
        assert!(CartanMatrix::new(vec![vec![2, -1]]).is_err());
        // a_12 a_23 a_31 != a_21 a_32 a_13
        let cyclic = vec![vec![2, -1, -1], vec![-2, 2, -1], vec![-1, -1, 2]];
        assert!(matches!(
            CartanMatrix::new(cyclic),
            Err(Error::NotSymmetrizable)
        ));
    }

    #[test]
    fn symmetrizers() {
        assert_eq!(CartanMatrix::type_a(3).symmetrizer(), &[1, 1, 1]);
        let b2 = CartanMatrix::type_b(2);
        let d = b2.symmetrizer();
        assert_eq!(d[0] * b2.entry(0, 1), d[1] * b2.entry(1, 0));
        let g2 = CartanMatrix::type_g2();
        let d = g2.symmetrizer();
        assert_eq!(d[0] * g2.entry(0, 1), d[1] * g2.entry(1, 0));
    }

    #[test]
    fn finite_type_detection() {
        assert!(CartanMatrix::type_a(3).is_finite_type());
        assert!(CartanMatrix::type_b(2).is_finite_type());
        assert!(CartanMatrix::type_g2().is_finite_type());
        assert!(!CartanMatrix::affine_a1().is_finite_type());
        assert!(!CartanMatrix::from_name("H3,3").unwrap().is_finite_type());
    }

    #[test]
    fn config_round_trip() {
        let cfg: CartanConfig =
            serde_json::from_str(r#"{"cartan": [[2,-1],[-1,2]], "labels": ["a","b"]}"#).unwrap();
        let c = cfg.build().unwrap();
        assert_eq!(c.label_index("b"), Some(1));
        assert_eq!(
            c,
            CartanMatrix::with_labels(vec![vec![2, -1], vec![-1, 2]], vec!["a".into(), "b".into()])
                .unwrap()
        );
    }
}
