//! Negative continued fractions, linear plumbings and the characteristic-sublink
//! procedure that turns a chain of unknots into an even-framed surgery diagram.
//!
//! Everything here works at the level of linking matrices: a framed link is
//! represented by its linking matrix (framings on the diagonal), a blow-up is a
//! bordering of that matrix and a blow-down a Schur complement along a `±1`
//! diagonal entry.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::bound::{Bound, Estimate};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;

/// `[a_1, ..., a_n]^-` with every `a_i >= 2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NegCF(Vec<i64>);

impl NegCF {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidContinuedFraction("empty expansion".into()));
        }
        if let Some(a) = coeffs.iter().find(|&&a| a < 2) {
            return Err(Error::InvalidContinuedFraction(format!(
                "coefficient {a} < 2"
            )));
        }
        Ok(NegCF(coeffs))
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A sublink of a framed link, recorded as its indicator vector over GF(2).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CharSublink {
    indicator: Vec<bool>,
}

impl CharSublink {
    pub fn new(indicator: Vec<bool>) -> Self {
        CharSublink { indicator }
    }

    pub fn zero(n: usize) -> Self {
        CharSublink {
            indicator: vec![false; n],
        }
    }

    pub fn indicator(&self) -> &[bool] {
        &self.indicator
    }

    /// Number of components in the sublink.
    pub fn count(&self) -> usize {
        self.indicator.iter().filter(|&&b| b).count()
    }

    pub fn is_zero(&self) -> bool {
        self.count() == 0
    }

    pub fn members(&self) -> impl Iterator<Item = usize> + '_ {
        self.indicator
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| i)
    }

    /// Whether `Q x ≡ diag(Q) (mod 2)`.
    pub fn is_characteristic_for(&self, q: &QuadraticForm) -> bool {
        if self.indicator.len() != q.rank() {
            return false;
        }
        (0..q.rank()).all(|i| {
            let s: i64 = self.members().map(|j| q.get(i, j)).sum();
            (s - q.get(i, i)).rem_euclid(2) == 0
        })
    }
}

impl std::fmt::Display for CharSublink {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.indicator {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// The canonical expansion of `p/q`, `0 < q < p`, `gcd(p, q) = 1`.
pub fn neg_cf(p: i64, q: i64) -> Result<NegCF> {
    if p <= 1 {
        return Err(Error::InvalidLens {
            p,
            q,
            reason: "p must be at least 2",
        });
    }
    if q <= 0 || q >= p {
        return Err(Error::InvalidLens {
            p,
            q,
            reason: "q must satisfy 0 < q < p",
        });
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidLens {
            p,
            q,
            reason: "p and q must be coprime",
        });
    }
    let (mut num, mut den) = (p, q);
    let mut coeffs = Vec::new();
    while den > 0 {
        // num/den = a - r/den with 0 <= r < den
        let a = (num + den - 1) / den;
        coeffs.push(a);
        let r = a * den - num;
        num = den;
        den = r;
    }
    NegCF::new(coeffs)
}

/// Evaluates `a_1 - 1/(a_2 - 1/(...))` in lowest terms.
pub fn cf_to_fraction(cf: &NegCF) -> (i64, i64) {
    let mut num = 1i64;
    let mut den = 0i64;
    for &a in cf.coeffs().iter().rev() {
        let next = a * num - den;
        den = num;
        num = next;
    }
    let g = num.gcd(&den);
    (num / g, den / g)
}

/// Linking matrix of the chain of unknots with framings `-a_i`.
pub fn linking_matrix(cf: &NegCF) -> QuadraticForm {
    let diag: Vec<i64> = cf.coeffs().iter().map(|&a| -a).collect();
    QuadraticForm::chain(&diag)
}

/// Solves `A x = b` over GF(2). Returns a particular solution and a kernel basis.
fn solve_mod2(a: &[Vec<bool>], b: &[bool]) -> Option<(Vec<bool>, Vec<Vec<bool>>)> {
    let n = b.len();
    let words = (n + 1).div_ceil(64);
    let bit = |v: &Vec<u64>, j: usize| (v[j / 64] >> (j % 64)) & 1 == 1;
    // augmented rows: columns 0..n are A, column n is b
    let mut rows: Vec<Vec<u64>> = (0..n)
        .map(|i| {
            let mut w = vec![0u64; words];
            for j in 0..n {
                if a[i][j] {
                    w[j / 64] |= 1 << (j % 64);
                }
            }
            if b[i] {
                w[n / 64] |= 1 << (n % 64);
            }
            w
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| bit(&rows[i], c)) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && bit(row, c) {
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| bit(row, n)) {
        return None;
    }
    let mut particular = vec![false; n];
    for (i, &c) in pivot_cols.iter().enumerate() {
        particular[c] = bit(&rows[i], n);
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut v = vec![false; n];
            v[f] = true;
            for (i, &c) in pivot_cols.iter().enumerate() {
                v[c] = bit(&rows[i], f);
            }
            v
        })
        .collect();
    Some((particular, kernel))
}

/// All characteristic sublinks of a framed link with linking matrix `q`,
/// i.e. all solutions of `Q x ≡ diag(Q) (mod 2)`, in lexicographic order
/// (component 0 most significant, unset before set).
///
/// The solution set is a coset of the mod-2 kernel, so its size is a power of
/// two; for matrices with large mod-2 nullity the list is exponentially long.
pub fn characteristic_sublinks(q: &QuadraticForm) -> Vec<CharSublink> {
    let n = q.rank();
    let a: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| q.get(i, j).rem_euclid(2) == 1).collect())
        .collect();
    let b: Vec<bool> = (0..n).map(|i| q.get(i, i).rem_euclid(2) == 1).collect();
    let Some((particular, kernel)) = solve_mod2(&a, &b) else {
        return Vec::new();
    };
    let mut out = Vec::with_capacity(1 << kernel.len());
    for mask in 0u64..(1u64 << kernel.len()) {
        let mut v = particular.clone();
        for (k, basis) in kernel.iter().enumerate() {
            if (mask >> k) & 1 == 1 {
                for (x, &y) in v.iter_mut().zip(basis) {
                    *x ^= y;
                }
            }
        }
        out.push(CharSublink::new(v));
    }
    out.sort();
    out
}

/// Number of components `ℓ'' = n + Σ_{i ∈ L'} (a_i - 1) - ℓ'` of the even-framed
/// link obtained from the chain by blowing up each characteristic component
/// `a_i - 1` times and then blowing it down.
pub fn even_framing_count(cf: &NegCF, x: &CharSublink) -> Result<u64> {
    if !x.is_characteristic_for(&linking_matrix(cf)) {
        return Err(Error::NotCharacteristic);
    }
    let a = cf.coeffs();
    let extra: i64 = x.members().map(|i| a[i] - 1).sum();
    Ok((a.len() as i64 + extra - x.count() as i64) as u64)
}

/// Blow up a `sign`-framed unknot whose linking numbers with the existing
/// components are `link`. Framings and linkings of the old components change by
/// `sign * link_i * link_j`, so that [`blow_down`] on the new index is the inverse
/// and the boundary 3-manifold is unchanged.
pub fn blow_up(q: &QuadraticForm, sign: i64, link: &[i64]) -> Result<QuadraticForm> {
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!(
            "blow-up sign must be ±1, got {sign}"
        )));
    }
    if link.len() != q.rank() {
        return Err(Error::LinkLength {
            got: link.len(),
            expected: q.rank(),
        });
    }
    let shifted = q.map_entries(|i, j, v| v + sign * link[i] * link[j]);
    Ok(shifted.bordered(link, sign))
}

/// Blow down component `k`, whose framing must be `±1`:
/// `Q'[i][j] = Q[i][j] - ε Q[i][k] Q[j][k]` with `ε = Q[k][k]`.
pub fn blow_down(q: &QuadraticForm, k: usize) -> Result<QuadraticForm> {
    if k >= q.rank() {
        return Err(Error::IndexOutOfRange {
            index: k,
            rank: q.rank(),
        });
    }
    let eps = q.get(k, k);
    if eps.abs() != 1 {
        return Err(Error::NotBlowDownable {
            index: k,
            entry: eps,
        });
    }
    let col: Vec<i64> = (0..q.rank()).map(|i| q.get(i, k)).collect();
    Ok(q
        .map_entries(|i, j, v| v - eps * col[i] * col[j])
        .remove_index(k))
}

/// Runs the blow-up/blow-down procedure on the chain for `p/q` and returns the
/// linking matrix of the resulting even-framed link.
///
/// Characteristic components of a chain are never adjacent, so each one is
/// handled independently: `a_i - 1` meridians framed `+1` bring its framing to
/// `-1`, and it is then blown down.
pub fn even_chain_presentation(p: i64, q: i64, x: &CharSublink) -> Result<QuadraticForm> {
    let cf = neg_cf(p, q)?;
    let mut m = linking_matrix(&cf);
    if !x.is_characteristic_for(&m) {
        return Err(Error::NotCharacteristic);
    }
    // Track where each original component currently sits.
    let mut position: Vec<Option<usize>> = (0..cf.len()).map(Some).collect();
    for i in x.members() {
        let idx = position[i].expect("characteristic components are distinct");
        let framing = m.get(idx, idx);
        let blow_ups = -1 - framing;
        for _ in 0..blow_ups {
            let mut link = vec![0; m.rank()];
            link[idx] = 1;
            m = blow_up(&m, 1, &link)?;
        }
        m = blow_down(&m, idx)?;
        position[i] = None;
        for pos in position.iter_mut().flatten() {
            if *pos > idx {
                *pos -= 1;
            }
        }
    }
    Ok(m)
}

/// Per-characteristic-sublink detail of [`chain_upper_bound`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinStructureCount {
    pub sublink: String,
    pub components: u64,
    /// The all-`(-2)` chain with the empty sublink: the spin structure that
    /// extends over the plumbing.
    pub plumbing_spin_structure: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainBound {
    pub p: i64,
    pub q: i64,
    pub per_spin_structure: Vec<SpinStructureCount>,
    pub bound: Bound,
}

impl ChainBound {
    pub fn value(&self) -> u64 {
        self.bound.upper_value().expect("chain bound always has an upper end")
    }
}

/// Upper bound on ε(L(p,q)) from even-framed presentations of the canonical chain,
/// minimised over characteristic sublinks (one per spin structure).
pub fn chain_upper_bound(p: i64, q: i64) -> Result<ChainBound> {
    let cf = neg_cf(p, q)?;
    let all_twos = cf.coeffs().iter().all(|&a| a == 2);
    let per: Vec<SpinStructureCount> = characteristic_sublinks(&linking_matrix(&cf))
        .into_iter()
        .map(|x| {
            let components = even_framing_count(&cf, &x)?;
            Ok(SpinStructureCount {
                sublink: x.to_string(),
                components,
                plumbing_spin_structure: all_twos && x.is_zero(),
            })
        })
        .collect::<Result<_>>()?;
    let best = per
        .iter()
        .map(|s| s.components)
        .min()
        .expect("a chain always has a characteristic sublink");
    let bound = Bound::upper(Estimate::unconditional(
        best,
        format!("even-framed surgery on the blown-up chain for {p}/{q}"),
    ));
    Ok(ChainBound {
        p,
        q,
        per_spin_structure: per,
        bound,
    })
}
