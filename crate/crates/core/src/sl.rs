//! Exact realization of the pinning of `SL_n` (type `A_{n-1}`): generators,
//! Bruhat-type stratum identification, Marsh–Rietsch and twisted-cell
//! samplers, the `sigma_r^J` factorization and the total-nonnegativity test.
//!
//! Conventions: `x_i(a) = I + a E_{i,i+1}`, `y_i(a) = I + a E_{i+1,i}` and
//! `ṡ_i = x_i(1) y_i(-1) x_i(1)`, so `ṡ_i e_i = -e_{i+1}` and `ṡ_i e_{i+1} =
//! e_i`. A Weyl group element `w` acts on `{0..n-1}` by composing simple
//! transpositions as functions, and `ẇ` has its nonzero entries at
//! `(w(j), j)`.

use std::fmt;
use std::ops::Mul;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cartan::CartanMatrix;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::twisted::{mr_positive_subexpression, ParabolicContext};
use crate::weyl::{WeylElement, WeylGroup, Word};

/// Largest size accepted by [`tnn_test`].
pub const TNN_MAX_SIZE: usize = 5;

/// An exact rational `n x n` matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = Rational::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        RatMatrix {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Precondition("matrix is not square".into()));
        }
        Ok(RatMatrix {
            n,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_ints(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Rational::from_integer(x)).collect())
                .collect(),
        )
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> &Rational {
        &self.data[r * self.n + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Rational) {
        self.data[r * self.n + c] = v;
    }

    pub fn rows(&self) -> Vec<Vec<Rational>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> RatMatrix {
        let n = self.n;
        let mut t = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                t.data[c * n + r] = self.get(r, c).clone();
            }
        }
        t
    }

    /// The antidiagonal permutation matrix `R` with `R e_j = e_{n-1-j}`.
    pub fn antidiagonal(n: usize) -> RatMatrix {
        let mut m = Self::zero(n);
        for j in 0..n {
            m.data[(n - 1 - j) * n + j] = Rational::one();
        }
        m
    }

    /// `R self R`: reverses both row and column order.
    pub fn reverse_both(&self) -> RatMatrix {
        let n = self.n;
        let mut m = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                m.data[(n - 1 - r) * n + (n - 1 - c)] = self.get(r, c).clone();
            }
        }
        m
    }

    fn reverse_rows(&self) -> RatMatrix {
        let n = self.n;
        let mut m = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                m.data[(n - 1 - r) * n + c] = self.get(r, c).clone();
            }
        }
        m
    }

    fn reverse_cols(&self) -> RatMatrix {
        let n = self.n;
        let mut m = Self::zero(n);
        for r in 0..n {
            for c in 0..n {
                m.data[r * n + (n - 1 - c)] = self.get(r, c).clone();
            }
        }
        m
    }

    pub fn determinant(&self) -> Rational {
        let idx: Vec<usize> = (0..self.n).collect();
        self.minor(&idx, &idx)
    }

    /// Determinant of the submatrix on the given rows and columns.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> Rational {
        let k = rows.len();
        debug_assert_eq!(k, cols.len());
        let mut a: Vec<Vec<Rational>> = rows
            .iter()
            .map(|&r| cols.iter().map(|&c| self.get(r, c).clone()).collect())
            .collect();
        let mut det = Rational::one();
        for t in 0..k {
            let Some(p) = (t..k).find(|&r| !a[r][t].is_zero()) else {
                return Rational::zero();
            };
            if p != t {
                a.swap(p, t);
                det = -det;
            }
            det = &det * &a[t][t];
            for r in t + 1..k {
                if a[r][t].is_zero() {
                    continue;
                }
                let f = &a[r][t] / &a[t][t];
                for c in t..k {
                    let d = &f * &a[t][c];
                    a[r][c] = &a[r][c] - &d;
                }
            }
        }
        det
    }

    /// Leading principal minors `Δ_1, ..., Δ_n`.
    pub fn leading_minors(&self) -> Vec<Rational> {
        (1..=self.n)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                self.minor(&idx, &idx)
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for t in 0..n {
            let p = (t..n)
                .find(|&r| !a.get(r, t).is_zero())
                .ok_or_else(|| Error::Precondition("singular matrix".into()))?;
            if p != t {
                for c in 0..n {
                    a.data.swap(p * n + c, t * n + c);
                    inv.data.swap(p * n + c, t * n + c);
                }
            }
            let piv = a.get(t, t).recip();
            for c in 0..n {
                a.data[t * n + c] = &a.data[t * n + c] * &piv;
                inv.data[t * n + c] = &inv.data[t * n + c] * &piv;
            }
            for r in 0..n {
                if r == t || a.get(r, t).is_zero() {
                    continue;
                }
                let f = a.get(r, t).clone();
                for c in 0..n {
                    let d = &f * &a.data[t * n + c];
                    a.data[r * n + c] = &a.data[r * n + c] - &d;
                    let d = &f * &inv.data[t * n + c];
                    inv.data[r * n + c] = &inv.data[r * n + c] - &d;
                }
            }
        }
        Ok(inv)
    }

    /// `self = L U` with `L` lower unitriangular and `U` upper triangular.
    pub fn lu(&self) -> Result<(RatMatrix, RatMatrix)> {
        let n = self.n;
        let mut l = Self::identity(n);
        let mut u = self.clone();
        for t in 0..n {
            if u.get(t, t).is_zero() {
                return Err(Error::DecompositionFails(format!(
                    "leading minor {} vanishes",
                    t + 1
                )));
            }
            for r in t + 1..n {
                if u.get(r, t).is_zero() {
                    continue;
                }
                let f = u.get(r, t) / u.get(t, t);
                for c in t..n {
                    let d = &f * u.get(t, c);
                    u.data[r * n + c] = u.get(r, c) - &d;
                }
                l.data[r * n + t] = f;
            }
        }
        Ok((l, u))
    }

    /// `self = U L` with `U` upper unitriangular and `L` lower triangular.
    pub fn ul(&self) -> Result<(RatMatrix, RatMatrix)> {
        let (l, u) = self.reverse_both().lu()?;
        Ok((l.reverse_both(), u.reverse_both()))
    }

    pub fn is_upper_triangular(&self) -> bool {
        (0..self.n).all(|r| (0..r).all(|c| self.get(r, c).is_zero()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        self.transpose().is_upper_triangular()
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        self.is_upper_triangular() && (0..self.n).all(|i| self.get(i, i).is_one())
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        self.is_lower_triangular() && (0..self.n).all(|i| self.get(i, i).is_one())
    }

    /// Canonical representative of the coset `self B^+`: reduced column
    /// echelon form with the lowest nonzero entry of each column (its pivot)
    /// scaled to 1 and cleared from all later columns.
    pub fn column_echelon_mod_upper(&self) -> RatMatrix {
        let n = self.n;
        let mut m = self.clone();
        for j in 0..n {
            let Some(r) = (0..n).rev().find(|&r| !m.get(r, j).is_zero()) else {
                continue;
            };
            let inv = m.get(r, j).recip();
            for i in 0..n {
                m.data[i * n + j] = &m.data[i * n + j] * &inv;
            }
            for k in j + 1..n {
                if m.get(r, k).is_zero() {
                    continue;
                }
                let f = m.get(r, k).clone();
                for i in 0..n {
                    let d = &f * &m.data[i * n + j];
                    m.data[i * n + k] = &m.data[i * n + k] - &d;
                }
            }
        }
        m
    }

    /// Rows of `"p/q"` strings.
    pub fn to_fraction_rows(&self) -> Vec<Vec<String>> {
        self.data
            .chunks(self.n)
            .map(|r| r.iter().map(Rational::to_fraction_string).collect())
            .collect()
    }

    pub fn from_fraction_rows(rows: &[Vec<String>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| {
                    r.iter()
                        .map(|s| s.parse())
                        .collect::<Result<Vec<Rational>>>()
                })
                .collect::<Result<Vec<_>>>()?,
        )
    }
}

impl<'a> Mul<&'a RatMatrix> for &'a RatMatrix {
    type Output = RatMatrix;

    fn mul(self, rhs: &'a RatMatrix) -> RatMatrix {
        let n = self.n;
        assert_eq!(n, rhs.n, "matrix size mismatch");
        let mut out = RatMatrix::zero(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..n {
                    let b = rhs.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let prod = a * b;
                    out.data[r * n + c] = &out.data[r * n + c] + &prod;
                }
            }
        }
        out
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.data.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            write!(f, "{}", cells.join(" "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for RatMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_fraction_rows().serialize(s)
    }
}

impl<'de> Deserialize<'de> for RatMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows = Vec::<Vec<String>>::deserialize(d)?;
        Self::from_fraction_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// `SL_n` with its pinning; its Weyl group is that of `A_{n-1}`.
#[derive(Clone, Debug)]
pub struct PinnedGroup {
    n: usize,
    weyl: WeylGroup,
}

/// Kinds of pinning generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    X,
    Y,
    Cochar,
}

/// Which Marsh–Rietsch factor to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MrKind {
    /// `y_i` at skipped letters.
    Negative,
    /// `x_i` at skipped letters.
    Positive,
}

/// Which parameters a sampler accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamSign {
    /// Strictly positive parameters.
    Positive,
    /// Any nonzero parameters.
    Nonzero,
}

impl PinnedGroup {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Precondition("SL_n needs n >= 2".into()));
        }
        Ok(PinnedGroup {
            n,
            weyl: WeylGroup::new(CartanMatrix::type_a(n - 1)),
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn weyl(&self) -> &WeylGroup {
        &self.weyl
    }

    fn check_node(&self, i: usize) -> Result<()> {
        if i + 1 < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                size: self.n - 1,
            })
        }
    }

    /// `x_i(a)`, `y_i(a)` or `α_i^∨(a) = diag(.., a, a^{-1}, ..)`.
    pub fn generator(&self, kind: GeneratorKind, i: usize, a: &Rational) -> Result<RatMatrix> {
        self.check_node(i)?;
        let mut m = RatMatrix::identity(self.n);
        match kind {
            GeneratorKind::X => m.set(i, i + 1, a.clone()),
            GeneratorKind::Y => m.set(i + 1, i, a.clone()),
            GeneratorKind::Cochar => {
                if a.is_zero() {
                    return Err(Error::ZeroParameter(0));
                }
                m.set(i, i, a.clone());
                m.set(i + 1, i + 1, a.recip());
            }
        }
        Ok(m)
    }

    pub fn x(&self, i: usize, a: &Rational) -> Result<RatMatrix> {
        self.generator(GeneratorKind::X, i, a)
    }

    pub fn y(&self, i: usize, a: &Rational) -> Result<RatMatrix> {
        self.generator(GeneratorKind::Y, i, a)
    }

    pub fn cochar(&self, i: usize, a: &Rational) -> Result<RatMatrix> {
        self.generator(GeneratorKind::Cochar, i, a)
    }

    /// `ṡ_i = x_i(1) y_i(-1) x_i(1)`.
    pub fn s_dot(&self, i: usize) -> Result<RatMatrix> {
        let one = Rational::one();
        let x = self.x(i, &one)?;
        Ok(&(&x * &self.y(i, &-&one)?) * &x)
    }

    /// `ẇ = ṡ_{i_1} ... ṡ_{i_k}` for a reduced word.
    pub fn lift_word(&self, word: &Word) -> Result<RatMatrix> {
        let w = self.weyl.from_word(word.letters())?;
        if w.length() != word.len() {
            return Err(Error::NonReducedWord(word.0.clone()));
        }
        let mut m = RatMatrix::identity(self.n);
        for &i in word.letters() {
            m = &m * &self.s_dot(i)?;
        }
        Ok(m)
    }

    /// `ẇ` along the canonical reduced word.
    pub fn lift(&self, w: &WeylElement) -> RatMatrix {
        self.lift_word(w.canonical_word())
            .expect("canonical words are reduced")
    }

    /// The permutation `j -> w(j)` of `{0..n-1}`.
    pub fn permutation(&self, w: &WeylElement) -> Vec<usize> {
        let mut p: Vec<usize> = (0..self.n).collect();
        for &i in w.canonical_word().letters() {
            p.swap(i, i + 1);
        }
        p
    }

    /// The Weyl group element acting on `{0..n-1}` as `perm`.
    pub fn element_of(&self, perm: &[usize]) -> Result<WeylElement> {
        let n = self.n;
        let mut seen = vec![false; n];
        if perm.len() != n
            || perm
                .iter()
                .any(|&x| x >= n || std::mem::replace(&mut seen[x], true))
        {
            return Err(Error::Precondition(format!(
                "{perm:?} is not a permutation"
            )));
        }
        let mut p = perm.to_vec();
        let mut letters = Vec::new();
        while let Some(i) = (0..n - 1).find(|&i| p[i] > p[i + 1]) {
            p.swap(i, i + 1);
            letters.push(i);
        }
        letters.reverse();
        self.weyl.from_word(&letters)
    }

    fn check_size(&self, g: &RatMatrix) -> Result<()> {
        if g.size() == self.n {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "expected a {0}x{0} matrix",
                self.n
            )))
        }
    }

    /// The `w` with `g ∈ B^+ ẇ B^+`.
    pub fn bruhat_stratum(&self, g: &RatMatrix) -> Result<WeylElement> {
        self.check_size(g)?;
        self.element_of(&bruhat_permutation(g)?)
    }

    /// The `v` with `g ∈ B^- v̇ B^+`.
    pub fn birkhoff_stratum(&self, g: &RatMatrix) -> Result<WeylElement> {
        self.check_size(g)?;
        let n = self.n;
        let p = bruhat_permutation(&g.reverse_rows())?;
        self.element_of(&p.iter().map(|&x| n - 1 - x).collect::<Vec<_>>())
    }

    /// The `u` with `g ∈ B^- u̇ B^-`.
    pub fn opposite_bruhat_stratum(&self, g: &RatMatrix) -> Result<WeylElement> {
        self.check_size(g)?;
        let n = self.n;
        let p = bruhat_permutation(&g.reverse_both())?;
        self.element_of(&(0..n).map(|k| n - 1 - p[n - 1 - k]).collect::<Vec<_>>())
    }

    /// The `v` with `g ∈ B^+ v̇ B^-`.
    pub fn mixed_stratum(&self, g: &RatMatrix) -> Result<WeylElement> {
        self.check_size(g)?;
        let n = self.n;
        let p = bruhat_permutation(&g.reverse_cols())?;
        self.element_of(&(0..n).map(|k| p[n - 1 - k]).collect::<Vec<_>>())
    }

    /// `(v, w)` with `g B^+` in the open Richardson cell: `g ∈ B^- v̇ B^+ ∩
    /// B^+ ẇ B^+`; checks `v <= w`.
    pub fn richardson_stratum(&self, g: &RatMatrix) -> Result<(WeylElement, WeylElement)> {
        let v = self.birkhoff_stratum(g)?;
        let w = self.bruhat_stratum(g)?;
        if !v.bruhat_leq(&w) {
            return Err(Error::Postcondition(format!(
                "Richardson cell ({v:?}, {w:?}) would be empty"
            )));
        }
        Ok((v, w))
    }

    /// `(w, u)` with `g ∈ B^+ ẇ B^+ ∩ B^- u̇ B^-`.
    pub fn double_bruhat_stratum(&self, g: &RatMatrix) -> Result<(WeylElement, WeylElement)> {
        Ok((self.bruhat_stratum(g)?, self.opposite_bruhat_stratum(g)?))
    }

    /// `ẇ_{J,0}`.
    pub fn longest_lift(&self, ctx: &ParabolicContext) -> RatMatrix {
        self.lift(
            &ctx.longest_element()
                .expect("parabolic subgroups of SL_n are finite"),
        )
    }

    /// The twisted stratum `(v, w)` of the flag `g ^J B^+`, through `g ↦ g
    /// ẇ_{J,0}`: if `g ẇ_{J,0}` lies in the Richardson cell `(v', w')` then
    /// `(v, w) = (v' w_{J,0}^{-1}, w' w_{J,0}^{-1})`; checks `v <=^J w`.
    pub fn twisted_stratum(
        &self,
        g: &RatMatrix,
        ctx: &ParabolicContext,
    ) -> Result<(WeylElement, WeylElement)> {
        let w0 = ctx
            .longest_element()
            .expect("parabolic subgroups of SL_n are finite");
        let (vp, wp) = self.richardson_stratum(&(g * &self.lift(&w0)))?;
        let w0_inv = w0.inverse();
        let v = &vp * &w0_inv;
        let w = &wp * &w0_inv;
        if !ctx.j_leq(&v, &w)? {
            return Err(Error::Postcondition(format!(
                "twisted cell ({v:?}, {w:?}) would be empty"
            )));
        }
        Ok((v, w))
    }

    /// Whether the flag `g ^J B^+` lies in `ṙ ^J U^- ^J B^+ / ^J B^+`: all
    /// leading principal minors of `(ṙ ẇ_{J,0})^{-1} g ẇ_{J,0}` are nonzero.
    pub fn big_cell_test(
        &self,
        g: &RatMatrix,
        r: &WeylElement,
        ctx: &ParabolicContext,
    ) -> Result<bool> {
        let m = self.longest_lift(ctx);
        let rm_inv = (&self.lift(r) * &m).inverse()?;
        let t = &(&rm_inv * g) * &m;
        Ok(t.leading_minors().iter().all(|d| !d.is_zero()))
    }

    /// Marsh–Rietsch product for the positive subexpression of `v` in the
    /// reduced word `word`: at used letters `ṡ_i^{-1}` (negative kind) or
    /// `ṡ_i` (positive kind), at skipped ones `y_i(a)` or `x_i(a)`. Checks the resulting cell:
    /// `B^- v̇ B^+ ∩ B^+ ẇ B^+` (negative) or `B^+ v̇ B^- ∩ B^- ẇ B^-` (positive).
    pub fn sample_mr(
        &self,
        kind: MrKind,
        v: &WeylElement,
        word: &Word,
        params: &[Rational],
        sign: ParamSign,
    ) -> Result<RatMatrix> {
        let sub = mr_positive_subexpression(v, word)?;
        if params.len() != sub.skips() {
            return Err(Error::ParameterCount {
                expected: sub.skips(),
                got: params.len(),
            });
        }
        check_params(params, sign, 0)?;
        let mut m = RatMatrix::identity(self.n);
        let mut next = params.iter();
        for (&i, &used) in word.letters().iter().zip(&sub.used) {
            // With `x_i(a) = I + a E_{i,i+1}`, the y-side cells are totally
            // nonnegative only when built from `ṡ_i^{-1}`; the x-side cells
            // (their transposes) use `ṡ_i`.
            let factor = if used {
                match kind {
                    MrKind::Negative => self.s_dot(i)?.inverse()?,
                    MrKind::Positive => self.s_dot(i)?,
                }
            } else {
                let a = next.next().expect("counted above");
                match kind {
                    MrKind::Negative => self.y(i, a)?,
                    MrKind::Positive => self.x(i, a)?,
                }
            };
            m = &m * &factor;
        }
        let w = self.weyl.from_word(word.letters())?;
        let (got_v, got_w) = match kind {
            MrKind::Negative => (self.birkhoff_stratum(&m)?, self.bruhat_stratum(&m)?),
            MrKind::Positive => (self.mixed_stratum(&m)?, self.opposite_bruhat_stratum(&m)?),
        };
        if got_v != *v || got_w != w {
            return Err(Error::Postcondition(format!(
                "Marsh–Rietsch sample lands in ({got_v:?}, {got_w:?}) instead of ({v:?}, {w:?})"
            )));
        }
        Ok(m)
    }

    /// A point of `G^J_{(v,w)}`: the negative Marsh–Rietsch factor for
    /// `((v^J c)_+, w^J)` times the positive factor for `((w_J)_+, c^{-1}
    /// v_J)`, with `c` the minimal witness of `v <=^J w`. The parameter count
    /// is `l^J(w) - l^J(v)`; the first factor consumes the leading
    /// parameters. Checks that the flag lands in the twisted cell `(v, w)`.
    /// Uses the canonical reduced words of `w^J`, `c^{-1}` and `v_J`.
    pub fn sample_twisted_cell(
        &self,
        v: &WeylElement,
        w: &WeylElement,
        ctx: &ParabolicContext,
        params: &[Rational],
        sign: ParamSign,
    ) -> Result<CellSample> {
        let w_rep = ctx.decompose(w).0;
        let v_part = ctx.decompose(v).1;
        self.sample_twisted_cell_with_words(
            v,
            w,
            ctx,
            params,
            sign,
            w_rep.canonical_word(),
            v_part.canonical_word(),
        )
    }

    /// [`Self::sample_twisted_cell`] with chosen reduced words for `w^J` and
    /// `v_J`.
    #[allow(clippy::too_many_arguments)]
    pub fn sample_twisted_cell_with_words(
        &self,
        v: &WeylElement,
        w: &WeylElement,
        ctx: &ParabolicContext,
        params: &[Rational],
        sign: ParamSign,
        w_rep_word: &Word,
        v_part_word: &Word,
    ) -> Result<CellSample> {
        let c = ctx.minimal_c(v, w)?;
        let (v_rep, v_part) = ctx.decompose(v);
        let (w_rep, w_part) = ctx.decompose(w);
        for (word, target, name) in [(w_rep_word, &w_rep, "w^J"), (v_part_word, &v_part, "v_J")] {
            if word.len() != target.length() || self.weyl.from_word(word.letters())? != *target {
                return Err(Error::Precondition(format!(
                    "{word:?} is not a reduced word for {name}"
                )));
            }
        }
        let expected = (ctx.j_length(w) - ctx.j_length(v)) as usize;
        if params.len() != expected {
            return Err(Error::ParameterCount {
                expected,
                got: params.len(),
            });
        }
        check_params(params, sign, 0)?;
        let first_v = &v_rep * &c;
        let first_word = w_rep_word.clone();
        let k1 = first_word.len() - first_v.length();
        let second_word = c.inverse().canonical_word().concat(v_part_word);
        let g1 = self.sample_mr(MrKind::Negative, &first_v, &first_word, &params[..k1], sign)?;
        let g2 = self.sample_mr(MrKind::Positive, &w_part, &second_word, &params[k1..], sign)?;
        let matrix = &g1 * &g2;
        let (got_v, got_w) = self.twisted_stratum(&matrix, ctx)?;
        if got_v != *v || got_w != *w {
            return Err(Error::Postcondition(format!(
                "twisted sample lands in ({got_v:?}, {got_w:?}) instead of ({v:?}, {w:?})"
            )));
        }
        Ok(CellSample {
            index: CellIndex::Twisted {
                v: v.canonical_word().clone(),
                w: w.canonical_word().clone(),
                j: ctx.members().to_vec(),
                c: c.canonical_word().clone(),
            },
            parameters: params.to_vec(),
            matrix,
        })
    }

    /// The element `k ∈ ṙ ^J U^- ṙ^{-1}` with `k ṙ ^J B^+ = g ^J B^+`.
    pub fn chart(
        &self,
        g: &RatMatrix,
        r: &WeylElement,
        ctx: &ParabolicContext,
    ) -> Result<RatMatrix> {
        let m = self.longest_lift(ctx);
        let m_inv = m.inverse()?;
        let rd = self.lift(r);
        let rd_inv = rd.inverse()?;
        let t = &(&(&m_inv * &rd_inv) * g) * &m;
        let (l, _) = t.lu()?;
        let rm = &rd * &m;
        Ok(&(&rm * &l) * &(&m_inv * &rd_inv))
    }

    /// Whether `k ∈ ṙ ^J U^- ṙ^{-1}`, i.e. `ẇ_{J,0}^{-1} ṙ^{-1} k ṙ ẇ_{J,0}`
    /// is lower unitriangular.
    pub fn in_conjugated_unipotent(
        &self,
        k: &RatMatrix,
        r: &WeylElement,
        ctx: &ParabolicContext,
    ) -> Result<bool> {
        let rm = &self.lift(r) * &self.longest_lift(ctx);
        let t = &(&rm.inverse()? * k) * &rm;
        Ok(t.is_lower_unitriangular())
    }

    /// `σ^J_r(k) = (g_2, h_2)` where `k = g_1 g_2` (`g_1` lower, `g_2` upper
    /// unitriangular) and `k = h_1 h_2` (`h_1` upper, `h_2` lower
    /// unitriangular), for `k ∈ ṙ ^J U^- ṙ^{-1}`. Both factors are checked to
    /// lie in `ṙ ^J U^- ṙ^{-1}` as well.
    pub fn sigma_factorize(
        &self,
        k: &RatMatrix,
        r: &WeylElement,
        ctx: &ParabolicContext,
    ) -> Result<(RatMatrix, RatMatrix)> {
        if !self.in_conjugated_unipotent(k, r, ctx)? {
            return Err(Error::Precondition(
                "input is not in the conjugated unipotent group".into(),
            ));
        }
        let (g1, u) = k.lu()?;
        let g2 = (&g1.inverse()? * k).clone();
        if !u.is_upper_unitriangular() || !g2.is_upper_unitriangular() {
            return Err(Error::PatternViolation(
                "LU factor is not unitriangular".into(),
            ));
        }
        let (h1, l) = k.ul()?;
        if !l.is_lower_unitriangular() || !h1.is_upper_unitriangular() {
            return Err(Error::PatternViolation(
                "UL factor is not unitriangular".into(),
            ));
        }
        let h2 = l;
        if !self.in_conjugated_unipotent(&g2, r, ctx)? {
            return Err(Error::PatternViolation(
                "g2 leaves the conjugated unipotent group".into(),
            ));
        }
        if !self.in_conjugated_unipotent(&h2, r, ctx)? {
            return Err(Error::PatternViolation(
                "h2 leaves the conjugated unipotent group".into(),
            ));
        }
        Ok((g2, h2))
    }

    /// Inverse of [`sigma_factorize`](Self::sigma_factorize): recovers `k`
    /// from `(g_2, h_2)` through the LU decomposition `g_2 h_2^{-1} = g_1^{-1}
    /// h_1`.
    pub fn sigma_recompose(&self, g2: &RatMatrix, h2: &RatMatrix) -> Result<RatMatrix> {
        let (l, _) = (g2 * &h2.inverse()?).lu()?;
        Ok(&l.inverse()? * g2)
    }

    /// Whether `g ^J B^+ = g' ^J B^+`.
    pub fn same_flag(&self, g: &RatMatrix, g2: &RatMatrix, ctx: &ParabolicContext) -> Result<bool> {
        let m = self.longest_lift(ctx);
        let t = &(&(&m.inverse()? * &g.inverse()?) * g2) * &m;
        Ok(t.is_upper_triangular())
    }

    /// Canonical form of the flag `g ^J B^+`, comparable by equality.
    pub fn flag_key(&self, g: &RatMatrix, ctx: &ParabolicContext) -> RatMatrix {
        (g * &self.longest_lift(ctx)).column_echelon_mod_upper()
    }
}

fn check_params(params: &[Rational], sign: ParamSign, offset: usize) -> Result<()> {
    for (k, a) in params.iter().enumerate() {
        match sign {
            ParamSign::Positive if !a.is_positive() => {
                return Err(Error::NonPositiveParameter(offset + k))
            }
            ParamSign::Nonzero if a.is_zero() => return Err(Error::ZeroParameter(offset + k)),
            _ => {}
        }
    }
    Ok(())
}

/// The permutation `w` (as `j -> w(j)`) with `g ∈ B^+ ẇ B^+`: walking the
/// columns left to right, the lowest nonzero entry of column `j` sits in row
/// `w(j)`; that row is then cleared from the later columns by column
/// operations.
fn bruhat_permutation(g: &RatMatrix) -> Result<Vec<usize>> {
    let n = g.size();
    let mut m = g.clone();
    let mut perm = Vec::with_capacity(n);
    for j in 0..n {
        let r = (0..n)
            .rev()
            .find(|&r| !m.get(r, j).is_zero())
            .ok_or_else(|| Error::Precondition("singular matrix".into()))?;
        perm.push(r);
        for k in j + 1..n {
            if m.get(r, k).is_zero() {
                continue;
            }
            let f = m.get(r, k) / m.get(r, j);
            for i in 0..n {
                let d = &f * m.get(i, j);
                let cur = m.get(i, k) - &d;
                m.set(i, k, cur);
            }
        }
    }
    Ok(perm)
}

/// Total nonnegativity: every minor is `>= 0` (sizes up to [`TNN_MAX_SIZE`]).
pub fn tnn_test(g: &RatMatrix) -> Result<bool> {
    let n = g.size();
    if n > TNN_MAX_SIZE {
        return Err(Error::BudgetExceeded {
            what: "matrix size",
            limit: TNN_MAX_SIZE,
        });
    }
    let subsets: Vec<Vec<usize>> = (1u32..1 << n)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect();
    for rows in &subsets {
        for cols in subsets.iter().filter(|c| c.len() == rows.len()) {
            if g.minor(rows, cols).signum() < 0 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// A random rational `p/q` with `1 <= p, q <= 10`.
pub fn random_positive<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    Rational::new(rng.gen_range(1..=10), rng.gen_range(1..=10))
}

/// The stratum datum of a sample, with elements as canonical words.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CellIndex {
    Flag {
        v: Word,
        w: Word,
    },
    Twisted {
        v: Word,
        w: Word,
        j: Vec<usize>,
        c: Word,
    },
    DoubleBruhat {
        w: Word,
        u: Word,
    },
}

/// A matrix together with the cell it was sampled from and its parameters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellSample {
    pub index: CellIndex,
    #[serde(with = "fraction_list")]
    pub parameters: Vec<Rational>,
    pub matrix: RatMatrix,
}

mod fraction_list {
    use super::Rational;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(Rational::to_fraction_string)
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|x| x.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        Rational::from_integer(n)
    }

    fn ints(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_ints(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn sl2_generators() {
        let g = PinnedGroup::new(2).unwrap();
        let a = Rational::new(3, 2);
        assert_eq!(
            g.x(0, &a).unwrap(),
            RatMatrix::from_rows(vec![vec![q(1), a.clone()], vec![q(0), q(1)]]).unwrap()
        );
        assert_eq!(g.s_dot(0).unwrap(), ints(&[&[0, 1], &[-1, 0]]));
        assert!(g.cochar(0, &a).unwrap().determinant().is_one());
        assert!(g.x(1, &a).is_err());
    }

    #[test]
    fn lift_braid_invariance() {
        let g = PinnedGroup::new(3).unwrap();
        let a = g.lift_word(&Word::new(vec![0, 1, 0])).unwrap();
        let b = g.lift_word(&Word::new(vec![1, 0, 1])).unwrap();
        assert_eq!(a, b);
        assert!(matches!(
            g.lift_word(&Word::new(vec![0, 0])),
            Err(Error::NonReducedWord(_))
        ));
    }

    #[test]
    fn lifts_are_signed_permutations() {
        let g = PinnedGroup::new(4).unwrap();
        for w in g.weyl().elements().unwrap() {
            let m = g.lift(&w);
            let p = g.permutation(&w);
            for j in 0..4 {
                for r in 0..4 {
                    assert_eq!(m.get(r, j).is_zero(), r != p[j]);
                }
            }
            assert_eq!(g.element_of(&p).unwrap(), w);
            assert!(m.determinant().is_one());
        }
    }

    #[test]
    fn permutation_matches_root_action() {
        // w(alpha_j) = e_{w(j)} - e_{w(j+1)} in the simple-root basis.
        let g = PinnedGroup::new(4).unwrap();
        for w in g.weyl().elements().unwrap() {
            let p = g.permutation(&w);
            for j in 0..3 {
                let root = w.root_image(j);
                let (a, b) = (p[j], p[j + 1]);
                let expected: Vec<i64> = (0..3)
                    .map(|k| {
                        let in_ab = |x: usize, y: usize| (x <= k && k < y) as i64;
                        if a < b {
                            in_ab(a, b)
                        } else {
                            -in_ab(b, a)
                        }
                    })
                    .collect();
                assert_eq!(root, expected, "{w:?} j={j}");
            }
        }
    }

    /// Random upper (or lower) triangular matrix with nonzero diagonal.
    fn random_triangular(n: usize, upper: bool, rng: &mut ChaCha8Rng) -> RatMatrix {
        let mut m = RatMatrix::zero(n);
        for r in 0..n {
            for c in 0..n {
                let keep = if upper { c >= r } else { c <= r };
                if keep {
                    let mut x = Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=4));
                    if r == c && x.is_zero() {
                        x = q(1);
                    }
                    m.set(r, c, x);
                }
            }
        }
        m
    }

    #[test]
    fn strata_recovered_from_random_double_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 4] {
            let g = PinnedGroup::new(n).unwrap();
            for w in g.weyl().elements().unwrap() {
                let wd = g.lift(&w);
                for _ in 0..5 {
                    let up = |rng: &mut ChaCha8Rng| random_triangular(n, true, rng);
                    let lo = |rng: &mut ChaCha8Rng| random_triangular(n, false, rng);
                    let m = &(&up(&mut rng) * &wd) * &up(&mut rng);
                    assert_eq!(g.bruhat_stratum(&m).unwrap(), w);
                    let m = &(&lo(&mut rng) * &wd) * &up(&mut rng);
                    assert_eq!(g.birkhoff_stratum(&m).unwrap(), w);
                    let m = &(&lo(&mut rng) * &wd) * &lo(&mut rng);
                    assert_eq!(g.opposite_bruhat_stratum(&m).unwrap(), w);
                    let m = &(&up(&mut rng) * &wd) * &lo(&mut rng);
                    assert_eq!(g.mixed_stratum(&m).unwrap(), w);
                }
            }
        }
    }

    #[test]
    fn stratum_examples() {
        let g = PinnedGroup::new(2).unwrap();
        let w = g.weyl();
        let (e, s1) = (w.identity(), w.from_word(&[0]).unwrap());
        let one = q(1);
        let sd = g.s_dot(0).unwrap();
        let y = g.y(0, &one).unwrap();
        let x = g.x(0, &one).unwrap();
        assert_eq!(g.bruhat_stratum(&RatMatrix::identity(2)).unwrap(), e);
        assert_eq!(g.bruhat_stratum(&sd).unwrap(), s1);
        assert_eq!(g.bruhat_stratum(&y).unwrap(), s1);
        assert_eq!(g.birkhoff_stratum(&y).unwrap(), e);
        assert_eq!(g.birkhoff_stratum(&sd).unwrap(), s1);
        assert_eq!(g.richardson_stratum(&y).unwrap(), (e.clone(), s1.clone()));
        assert_eq!(g.richardson_stratum(&sd).unwrap(), (s1.clone(), s1.clone()));
        assert_eq!(
            g.double_bruhat_stratum(&sd).unwrap(),
            (s1.clone(), s1.clone())
        );
        assert_eq!(
            g.double_bruhat_stratum(&(&y * &x)).unwrap(),
            (s1.clone(), s1.clone())
        );
        assert_eq!(
            g.double_bruhat_stratum(&RatMatrix::identity(2)).unwrap(),
            (e.clone(), e)
        );
    }

    #[test]
    fn twisted_stratum_examples() {
        let g = PinnedGroup::new(3).unwrap();
        let w = g.weyl();
        let id = RatMatrix::identity(3);
        for ctx in ParabolicContext::all_subsets(w) {
            let (v, ww) = g.twisted_stratum(&id, &ctx).unwrap();
            assert!(v.is_identity() && ww.is_identity());
        }
        let empty = ParabolicContext::empty(w);
        let y = g.y(1, &q(2)).unwrap();
        assert_eq!(
            g.twisted_stratum(&y, &empty).unwrap(),
            g.richardson_stratum(&y).unwrap()
        );
    }

    #[test]
    fn big_cell_examples() {
        let g = PinnedGroup::new(2).unwrap();
        let w = g.weyl();
        let e = w.identity();
        let empty = ParabolicContext::empty(w);
        assert!(!g.big_cell_test(&g.s_dot(0).unwrap(), &e, &empty).unwrap());
        assert!(g
            .big_cell_test(&g.y(0, &q(1)).unwrap(), &e, &empty)
            .unwrap());
        let full = ParabolicContext::full(w);
        let s1 = w.from_word(&[0]).unwrap();
        let m = g.longest_lift(&full);
        let member = &(&(&g.lift(&s1) * &m) * &g.y(0, &q(3)).unwrap()) * &m.inverse().unwrap();
        assert!(g.big_cell_test(&member, &s1, &full).unwrap());
    }

    #[test]
    fn mr_examples() {
        let g3 = PinnedGroup::new(3).unwrap();
        let w = g3.weyl();
        let s2 = w.from_word(&[1]).unwrap();
        let (a, c) = (Rational::new(2, 3), Rational::new(5, 1));
        let m = g3
            .sample_mr(
                MrKind::Negative,
                &s2,
                &Word::new(vec![0, 1, 0]),
                &[a.clone(), c.clone()],
                ParamSign::Positive,
            )
            .unwrap();
        let expected = &(&g3.y(0, &a).unwrap() * &g3.s_dot(1).unwrap().inverse().unwrap())
            * &g3.y(0, &c).unwrap();
        assert_eq!(m, expected);
        let w0 = w.from_word(&[0, 1, 0]).unwrap();
        let m = g3
            .sample_mr(
                MrKind::Negative,
                &w0,
                &Word::new(vec![0, 1, 0]),
                &[],
                ParamSign::Positive,
            )
            .unwrap();
        assert_eq!(m, g3.lift(&w0));
        let g2 = PinnedGroup::new(2).unwrap();
        let e = g2.weyl().identity();
        let m = g2
            .sample_mr(
                MrKind::Negative,
                &e,
                &Word::new(vec![0]),
                &[q(1)],
                ParamSign::Positive,
            )
            .unwrap();
        assert_eq!(m, g2.y(0, &q(1)).unwrap());
        assert!(matches!(
            g2.sample_mr(
                MrKind::Negative,
                &e,
                &Word::new(vec![0]),
                &[],
                ParamSign::Positive
            ),
            Err(Error::ParameterCount {
                expected: 1,
                got: 0
            })
        ));
        assert!(matches!(
            g2.sample_mr(
                MrKind::Negative,
                &e,
                &Word::new(vec![0]),
                &[q(-1)],
                ParamSign::Positive
            ),
            Err(Error::NonPositiveParameter(0))
        ));
    }

    #[test]
    fn twisted_cell_examples() {
        let g = PinnedGroup::new(3).unwrap();
        let w = g.weyl();
        let ctx = ParabolicContext::new(w, &[1]).unwrap();
        let (s1, s2) = (w.from_word(&[0]).unwrap(), w.from_word(&[1]).unwrap());
        let sample = g
            .sample_twisted_cell(
                &s2,
                &s1,
                &ctx,
                &[q(2), Rational::new(1, 3)],
                ParamSign::Positive,
            )
            .unwrap();
        assert_eq!(
            g.twisted_stratum(&sample.matrix, &ctx).unwrap(),
            (s2.clone(), s1.clone())
        );
        let w0 = w.from_word(&[0, 1, 0]).unwrap();
        let sample = g
            .sample_twisted_cell(&w.identity(), &w0, &ctx, &[q(4)], ParamSign::Positive)
            .unwrap();
        assert!(matches!(&sample.index, CellIndex::Twisted { c, .. } if c.letters() == [1]));
        assert!(g
            .sample_twisted_cell(&w0, &w0, &ctx, &[], ParamSign::Positive)
            .is_ok());
        assert!(matches!(
            g.sample_twisted_cell(&s1, &w0, &ctx, &[q(1)], ParamSign::Positive),
            Err(Error::NotComparable)
        ));
    }

    #[test]
    fn sigma_examples() {
        let g = PinnedGroup::new(3).unwrap();
        let w = g.weyl();
        let empty = ParabolicContext::empty(w);
        let e = w.identity();
        let id = RatMatrix::identity(3);
        assert_eq!(
            g.sigma_factorize(&id, &e, &empty).unwrap(),
            (id.clone(), id.clone())
        );
        let lower = &g.y(0, &q(2)).unwrap() * &g.y(1, &q(3)).unwrap();
        assert_eq!(
            g.sigma_factorize(&lower, &e, &empty).unwrap(),
            (id.clone(), lower.clone())
        );
        // r = s1, k = ṙ y_2(b) ṙ^{-1}
        let s1 = w.from_word(&[0]).unwrap();
        let rd = g.lift(&s1);
        let k = &(&rd * &g.y(1, &q(5)).unwrap()) * &rd.inverse().unwrap();
        let (g2, h2) = g.sigma_factorize(&k, &s1, &empty).unwrap();
        assert_eq!(g.sigma_recompose(&g2, &h2).unwrap(), k);
        assert!(g
            .sigma_factorize(&g.x(0, &q(1)).unwrap(), &e, &empty)
            .is_err());
    }

    #[test]
    fn tnn_examples() {
        let g = PinnedGroup::new(2).unwrap();
        assert!(tnn_test(&RatMatrix::identity(2)).unwrap());
        assert!(tnn_test(&(&g.y(0, &q(1)).unwrap() * &g.x(0, &q(1)).unwrap())).unwrap());
        assert!(!tnn_test(&g.x(0, &q(-1)).unwrap()).unwrap());
        assert!(tnn_test(&RatMatrix::identity(6)).is_err());
    }

    #[test]
    fn linear_algebra() {
        let m = ints(&[&[2, 1, 0], &[4, 3, 1], &[0, 2, 5]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, RatMatrix::identity(3));
        let (l, u) = m.lu().unwrap();
        assert!(l.is_lower_unitriangular() && u.is_upper_triangular());
        assert_eq!(&l * &u, m);
        let (u2, l2) = m.ul().unwrap();
        assert!(u2.is_upper_unitriangular() && l2.is_lower_triangular());
        assert_eq!(&u2 * &l2, m);
        assert_eq!(m.determinant(), q(2 * 3 * 5 - 2 * 2 - 4 * 5));
        let json = serde_json::to_string(&m).unwrap();
        let back: RatMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        assert!(json.contains("\"2/1\""));
    }

    #[test]
    fn echelon_is_a_coset_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = PinnedGroup::new(4).unwrap();
        for w in g.weyl().elements().unwrap().iter().step_by(3) {
            let m = &random_triangular(4, false, &mut rng) * &g.lift(w);
            let b = random_triangular(4, true, &mut rng);
            assert_eq!(
                m.column_echelon_mod_upper(),
                (&m * &b).column_echelon_mod_upper()
            );
        }
    }
}
