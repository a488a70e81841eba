//! Symmetric integer bilinear forms.
//!
//! All invariants are computed exactly: determinants by fraction-free (Bareiss)
//! elimination over big integers, signatures by symmetric congruence reduction
//! over big rationals. Nothing here touches floating point.
//!
//! The E8 form is the negative-definite one: the Gram matrix of the E8 Dynkin
//! diagram with `-2` on the diagonal and `+1` for every edge. Vertices `0..=6`
//! form a chain and vertex `7` hangs off vertex `4`, so the arms out of the
//! trivalent vertex have lengths 1, 2 and 4.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticForm {
    n: usize,
    entries: Vec<i64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    Negative,
    Positive,
    Indefinite,
    ZeroRank,
}

/// Positive, negative and zero eigenvalue counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inertia {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// On-disk matrix format shared with the command line: `{"n": 2, "rows": [[0,1],[1,0]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub n: usize,
    pub rows: Vec<Vec<i64>>,
}

impl QuadraticForm {
    /// The rank-0 form.
    pub fn empty() -> Self {
        QuadraticForm {
            n: 0,
            entries: Vec::new(),
        }
    }

    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedMatrix(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let q = QuadraticForm { n, entries };
        q.check_symmetric()?;
        Ok(q)
    }

    fn check_symmetric(&self) -> Result<()> {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let (a, b) = (self.get(i, j), self.get(j, i));
                if a != b {
                    return Err(Error::Asymmetric {
                        row: i,
                        col: j,
                        a,
                        b,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn from_matrix_file(file: MatrixFile) -> Result<Self> {
        if file.rows.len() != file.n {
            return Err(Error::MalformedMatrix(format!(
                "declared n = {} but {} rows given",
                file.n,
                file.rows.len()
            )));
        }
        Self::from_rows(file.rows)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: MatrixFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedMatrix(e.to_string()))?;
        Self::from_matrix_file(file)
    }

    pub fn to_matrix_file(&self) -> MatrixFile {
        MatrixFile {
            n: self.n,
            rows: self.rows(),
        }
    }

    /// Diagonal form.
    pub fn diagonal(diag: &[i64]) -> Self {
        let n = diag.len();
        let mut entries = vec![0; n * n];
        for (i, &d) in diag.iter().enumerate() {
            entries[i * n + i] = d;
        }
        QuadraticForm { n, entries }
    }

    /// Tridiagonal form with the given diagonal and `1` on both off-diagonals.
    pub fn chain(diag: &[i64]) -> Self {
        let mut q = Self::diagonal(diag);
        for i in 1..q.n {
            q.set_sym(i - 1, i, 1);
        }
        q
    }

    /// Linear chain of `len` entries equal to `-2`.
    pub fn minus_two_chain(len: usize) -> Self {
        Self::chain(&vec![-2; len])
    }

    pub fn hyperbolic() -> Self {
        QuadraticForm {
            n: 2,
            entries: vec![0, 1, 1, 0],
        }
    }

    pub fn e8() -> Self {
        let mut q = Self::minus_two_chain(7);
        q = q.direct_sum(&Self::diagonal(&[-2]));
        q.set_sym(4, 7, 1);
        q
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    fn set_sym(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
        self.entries[j * self.n + i] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        (0..self.n)
            .map(|i| self.entries[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    pub fn diag(&self) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn direct_sum(&self, other: &QuadraticForm) -> QuadraticForm {
        let n = self.n + other.n;
        let mut entries = vec![0; n * n];
        for i in 0..self.n {
            entries[i * n..i * n + self.n]
                .copy_from_slice(&self.entries[i * self.n..(i + 1) * self.n]);
        }
        for i in 0..other.n {
            let row = (self.n + i) * n + self.n;
            entries[row..row + other.n]
                .copy_from_slice(&other.entries[i * other.n..(i + 1) * other.n]);
        }
        QuadraticForm { n, entries }
    }

    /// `k` orthogonal copies of `self`.
    pub fn scaled_copies(&self, k: usize) -> QuadraticForm {
        (0..k).fold(QuadraticForm::empty(), |acc, _| acc.direct_sum(self))
    }

    /// The form of the orientation-reversed manifold.
    pub fn negate(&self) -> QuadraticForm {
        QuadraticForm {
            n: self.n,
            entries: self.entries.iter().map(|&x| -x).collect(),
        }
    }

    /// Fraction-free Gaussian elimination (Bareiss). Every intermediate value is
    /// a minor of the input, so all divisions are exact.
    pub fn determinant(&self) -> BigInt {
        let n = self.n;
        if n == 0 {
            return BigInt::one();
        }
        let mut a: Vec<Vec<BigInt>> = self
            .rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigInt::from).collect())
            .collect();
        let mut prev = BigInt::one();
        let mut negate = false;
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        negate = !negate;
                    }
                    None => return BigInt::zero(),
                }
            }
            let (head, tail) = a.split_at_mut(k + 1);
            let pivot_row = &head[k];
            let pivot = &pivot_row[k];
            for row in tail.iter_mut() {
                let factor = row[k].clone();
                for j in (k + 1)..n {
                    if factor.is_zero() && (row[j].is_zero() || *pivot == prev) {
                        continue;
                    }
                    let v = pivot * &row[j] - &factor * &pivot_row[j];
                    row[j] = v / &prev;
                }
                row[k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det = a[n - 1][n - 1].clone();
        if negate {
            -det
        } else {
            det
        }
    }

    /// Exact inertia by symmetric congruence over the rationals.
    ///
    /// Each step either uses a nonzero diagonal pivot, or (when the remaining
    /// diagonal vanishes) replaces `e_i` by `e_i + e_j` for some nonzero `q(e_i, e_j)`,
    /// which creates the diagonal entry `2 q(e_i, e_j)`.
    pub fn inertia(&self) -> Inertia {
        let n = self.n;
        let mut a: Vec<Vec<BigRational>> = self
            .rows()
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| BigRational::from_integer(BigInt::from(x)))
                    .collect()
            })
            .collect();
        let mut inertia = Inertia {
            positive: 0,
            negative: 0,
            zero: 0,
        };
        // Active indices are permuted to the front as they are consumed.
        for k in 0..n {
            let pivot = (k..n).find(|&i| !a[i][i].is_zero());
            let p = match pivot {
                Some(p) => p,
                None => {
                    let off = (k..n)
                        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                        .find(|&(i, j)| !a[i][j].is_zero());
                    match off {
                        None => {
                            inertia.zero += n - k;
                            break;
                        }
                        Some((i, j)) => {
                            // e_i <- e_i + e_j: row i += row j, then column i += column j.
                            for c in k..n {
                                let v = a[j][c].clone();
                                a[i][c] += v;
                            }
                            for r in k..n {
                                let v = a[r][j].clone();
                                a[r][i] += v;
                            }
                            i
                        }
                    }
                }
            };
            a.swap(k, p);
            for row in a.iter_mut() {
                row.swap(k, p);
            }
            let piv = a[k][k].clone();
            if piv.is_positive() {
                inertia.positive += 1;
            } else {
                inertia.negative += 1;
            }
            for i in (k + 1)..n {
                if a[i][k].is_zero() {
                    continue;
                }
                let f = &a[i][k] / &piv;
                for j in (k + 1)..n {
                    if a[k][j].is_zero() {
                        continue;
                    }
                    let v = &f * &a[k][j];
                    a[i][j] -= v;
                }
                a[i][k] = BigRational::zero();
            }
            for j in (k + 1)..n {
                a[k][j] = BigRational::zero();
            }
        }
        inertia
    }

    pub fn signature(&self) -> i64 {
        let i = self.inertia();
        i.positive as i64 - i.negative as i64
    }

    pub fn is_even(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i) % 2 == 0)
    }

    pub fn is_unimodular(&self) -> bool {
        self.determinant().abs().is_one()
    }

    /// Classification by signature against rank.
    pub fn definiteness(&self) -> Definiteness {
        let sig = self.signature();
        let n = self.n as i64;
        if n == 0 {
            Definiteness::ZeroRank
        } else if sig == n {
            Definiteness::Positive
        } else if sig == -n {
            Definiteness::Negative
        } else {
            Definiteness::Indefinite
        }
    }

    /// `x^T Q y`.
    pub fn pair(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0;
        for i in 0..self.n {
            if x[i] == 0 {
                continue;
            }
            for j in 0..self.n {
                s += x[i] * self.get(i, j) * y[j];
            }
        }
        s
    }

    /// Appends one row and column.
    pub(crate) fn bordered(&self, column: &[i64], corner: i64) -> QuadraticForm {
        let n = self.n + 1;
        let mut entries = vec![0; n * n];
        for i in 0..self.n {
            entries[i * n..i * n + self.n]
                .copy_from_slice(&self.entries[i * self.n..(i + 1) * self.n]);
            entries[i * n + self.n] = column[i];
            entries[self.n * n + i] = column[i];
        }
        entries[n * n - 1] = corner;
        QuadraticForm { n, entries }
    }

    pub(crate) fn map_entries(&self, f: impl Fn(usize, usize, i64) -> i64) -> QuadraticForm {
        let n = self.n;
        let mut entries = self.entries.clone();
        for i in 0..n {
            for j in 0..n {
                entries[i * n + j] = f(i, j, self.get(i, j));
            }
        }
        QuadraticForm { n, entries }
    }

    pub(crate) fn remove_index(&self, k: usize) -> QuadraticForm {
        let keep: Vec<usize> = (0..self.n).filter(|&i| i != k).collect();
        let n = keep.len();
        let mut entries = Vec::with_capacity(n * n);
        for &i in &keep {
            for &j in &keep {
                entries.push(self.get(i, j));
            }
        }
        QuadraticForm { n, entries }
    }
}

/// Rank, signature and determinant of a form, for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormSummary {
    pub rank: usize,
    pub signature: i64,
    pub determinant: BigInt,
    pub even: bool,
    pub unimodular: bool,
    pub definiteness: Definiteness,
}

impl From<&QuadraticForm> for FormSummary {
    fn from(q: &QuadraticForm) -> Self {
        let determinant = q.determinant();
        let inertia = q.inertia();
        let signature = inertia.positive as i64 - inertia.negative as i64;
        let n = q.rank() as i64;
        let definiteness = if n == 0 {
            Definiteness::ZeroRank
        } else if signature == n {
            Definiteness::Positive
        } else if signature == -n {
            Definiteness::Negative
        } else {
            Definiteness::Indefinite
        };
        FormSummary {
            rank: q.rank(),
            signature,
            unimodular: determinant.abs().is_one(),
            determinant,
            even: q.is_even(),
            definiteness,
        }
    }
}

/// Whether an even unimodular form of the given rank and signature exists.
///
/// Signature must be divisible by 8 and bounded by the rank, with rank and
/// signature of equal parity. Definite forms then have rank divisible by 8
/// automatically; indefinite ones are `aE8 ⊕ bH`.
pub fn even_unimodular_exists(rank: u64, sig: i64) -> bool {
    let abs = sig.unsigned_abs();
    sig % 8 == 0 && abs <= rank && (rank - abs) % 2 == 0
}

/// For an indefinite even unimodular form, the unique `(a, b)` with form `≅ aE8 ⊕ bH`.
///
/// `a` counts negative-definite E8 summands; a negative `a` means `|a|` copies of `-E8`.
pub fn classify_indefinite_even(rank: u64, sig: i64) -> Result<(i64, u64)> {
    if !even_unimodular_exists(rank, sig) {
        return Err(Error::NoSuchForm { rank, sig });
    }
    if rank == sig.unsigned_abs() {
        return Err(Error::DefiniteForm { rank, sig });
    }
    let a = -sig / 8;
    let b = (rank - 8 * a.unsigned_abs()) / 2;
    Ok((a, b))
}

/// Human-readable name of the even unimodular form with given rank and signature,
/// e.g. `"E8"`, `"-E8 ⊕ H"`, `"4E8 ⊕ 6H"`. Definite forms of rank above 8 are
/// not determined by these invariants and are named by rank only.
pub fn describe_even_unimodular(rank: u64, sig: i64) -> Option<String> {
    if !even_unimodular_exists(rank, sig) {
        return None;
    }
    if rank == 0 {
        return Some("0".to_string());
    }
    let e8 = |a: i64| -> String {
        match a {
            1 => "E8".into(),
            -1 => "-E8".into(),
            a if a > 0 => format!("{a}E8"),
            a => format!("-{}E8", -a),
        }
    };
    if rank == sig.unsigned_abs() {
        let a = -sig / 8;
        return Some(if a.abs() == 1 {
            e8(a)
        } else {
            format!("definite even rank {rank}, signature {sig}")
        });
    }
    let (a, b) = classify_indefinite_even(rank, sig).ok()?;
    let h = if b == 1 { "H".to_string() } else { format!("{b}H") };
    Some(if a == 0 {
        h
    } else {
        format!("{} ⊕ {h}", e8(a))
    })
}
