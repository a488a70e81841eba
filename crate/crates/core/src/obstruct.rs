//! Lower bounds from spin splittings.
//!
//! An embedding `Y ⊂ #_m S²×S²` cuts the closed manifold into two spin pieces
//! `U` (with `∂U = Y`) and `V` (with `∂V = -Y`). Their second Betti numbers add up
//! to `2m` and their signatures cancel. Every known spin filling `W` of `Y` can be
//! glued to `V`, and `-W` to `U`, giving closed spin manifolds that must satisfy
//! Rokhlin's theorem and the 10/8 (or conjectural 11/8) inequality. The search
//! below enumerates all `(b2(U), σ(U))` compatible with these constraints; the
//! first `m` admitting one is a lower bound for ε(Y).

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::bound::{Assumption, Estimate};
use crate::error::{Error, Result};
use crate::forms::{describe_even_unimodular, even_unimodular_exists};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Furuta's `b2 >= (10/8)|σ| + 2` for closed spin manifolds with `σ != 0`.
    Furuta10_8,
    /// 10/8 together with the conjectural `b2 >= (11/8)|σ|`.
    Assume11_8,
    /// Only Rokhlin's theorem and the algebra of even forms.
    RokhlinOnly,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Furuta10_8 => "10/8",
            Mode::Assume11_8 => "11/8",
            Mode::RokhlinOnly => "Rokhlin",
        })
    }
}

/// `(b2, σ)` of a spin 4-manifold whose boundary is a rational homology sphere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinFilling {
    pub b2: u64,
    pub sigma: i64,
}

impl SpinFilling {
    pub fn new(b2: u64, sigma: i64) -> Result<Self> {
        if sigma.unsigned_abs() > b2 {
            return Err(Error::InvalidFilling {
                b2,
                sigma,
                reason: "|sigma| exceeds b2",
            });
        }
        if (b2 as i64 - sigma).rem_euclid(2) != 0 {
            return Err(Error::InvalidFilling {
                b2,
                sigma,
                reason: "b2 and sigma must have the same parity",
            });
        }
        Ok(SpinFilling { b2, sigma })
    }

    /// A negative-definite filling of rank `b2`.
    pub fn negative_definite(b2: u64) -> Self {
        SpinFilling {
            b2,
            sigma: -(b2 as i64),
        }
    }
}

/// Everything known about `Y` that constrains how it can split `#_m S²×S²`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitConstraints {
    /// Rokhlin invariant of the spin structure, as a residue mod 16.
    pub mu: Option<u8>,
    pub fillings: Vec<SpinFilling>,
    /// Integral homology sphere: the pieces have even unimodular forms.
    pub zhs: bool,
    /// No definite spin filling of nonzero rank exists (on either side).
    pub forbid_definite: bool,
    /// Required parity of `b2` of each piece.
    pub b2_parity: Option<u8>,
    pub mode: Mode,
}

impl Default for SplitConstraints {
    fn default() -> Self {
        SplitConstraints {
            mu: None,
            fillings: Vec::new(),
            zhs: false,
            forbid_definite: false,
            b2_parity: None,
            mode: Mode::Furuta10_8,
        }
    }
}

impl SplitConstraints {
    pub fn new(mode: Mode) -> Self {
        SplitConstraints {
            mode,
            ..Default::default()
        }
    }

    pub fn with_mu(mut self, mu: i64) -> Self {
        self.mu = Some(mu.rem_euclid(16) as u8);
        self
    }

    pub fn with_filling(mut self, f: SpinFilling) -> Self {
        self.fillings.push(f);
        self
    }

    pub fn with_zhs(mut self) -> Self {
        self.zhs = true;
        self
    }

    pub fn with_forbid_definite(mut self) -> Self {
        self.forbid_definite = true;
        self
    }

    pub fn with_b2_parity(mut self, parity: u8) -> Self {
        self.b2_parity = Some(parity);
        self
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    /// Checks consistency and returns the Rokhlin residue in force, if any.
    ///
    /// Without an explicit `mu`, the fillings determine it.
    pub fn effective_mu(&self) -> Result<Option<u8>> {
        let mut mu = self.mu;
        if mu.is_some_and(|m| m >= 16) {
            return Err(Error::InconsistentConstraints(format!(
                "mu = {} is not a residue mod 16",
                mu.unwrap()
            )));
        }
        for f in &self.fillings {
            SpinFilling::new(f.b2, f.sigma)?;
            let r = rokhlin_mu(f);
            match mu {
                None => mu = Some(r),
                Some(m) if m != r => {
                    return Err(Error::InconsistentConstraints(format!(
                        "filling (b2 = {}, sigma = {}) has sigma ≡ {r} (mod 16), expected {m}",
                        f.b2, f.sigma
                    )))
                }
                _ => {}
            }
        }
        if let Some(p) = self.b2_parity {
            if p > 1 {
                return Err(Error::InconsistentConstraints(format!(
                    "b2 parity must be 0 or 1, got {p}"
                )));
            }
        }
        if self.zhs {
            if let Some(m) = mu {
                if m % 8 != 0 {
                    return Err(Error::InconsistentConstraints(format!(
                        "an integral homology sphere has mu ∈ {{0, 8}}, got {m}"
                    )));
                }
            }
            if self.b2_parity == Some(1) {
                return Err(Error::InconsistentConstraints(
                    "even unimodular pieces have even b2".into(),
                ));
            }
        }
        Ok(mu)
    }
}

/// Rokhlin invariant of the boundary spin structure: `σ mod 16` in `0..16`.
pub fn rokhlin_mu(f: &SpinFilling) -> u8 {
    f.sigma.rem_euclid(16) as u8
}

/// Whether a closed spin 4-manifold with these invariants is allowed in `mode`.
pub fn closed_spin_ok(b2: u64, sigma: i64, mode: Mode) -> Result<bool> {
    if sigma.rem_euclid(16) != 0 {
        return Err(Error::SignatureNotRokhlin(sigma));
    }
    if sigma.unsigned_abs() > b2 {
        return Err(Error::InvalidFilling {
            b2,
            sigma,
            reason: "|sigma| exceeds b2",
        });
    }
    let b = b2 as i128;
    let s = sigma.unsigned_abs() as i128;
    let furuta = sigma == 0 || 8 * b >= 10 * s + 16;
    Ok(match mode {
        Mode::RokhlinOnly => true,
        Mode::Furuta10_8 => furuta,
        Mode::Assume11_8 => furuta && 8 * b >= 11 * s,
    })
}

/// `(b2, σ)` of the piece `U`; `V` is then `(2m - b2, -σ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub b_u: u64,
    pub s_u: i64,
    pub b_v: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rejection {
    /// No signature of the right residue fits in `|σ| <= min(b_U, b_V)`.
    NoSignatureFits { b_u: u64, b_v: u64 },
    Parity { b_u: u64, b_v: u64, parity: u8 },
    NotEvenUnimodular { piece: char, rank: u64, sig: i64 },
    DefiniteForbidden { piece: char, rank: u64, sig: i64 },
    ClosedInequality {
        filling: usize,
        glued_to: char,
        b2: u64,
        sigma: i64,
        mode: Mode,
    },
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::NoSignatureFits { b_u, b_v } => write!(
                f,
                "b2(U) = {b_u}, b2(V) = {b_v}: no admissible signature of the required residue"
            ),
            Rejection::Parity { b_u, b_v, parity } => {
                write!(f, "b2(U) = {b_u}, b2(V) = {b_v}: pieces must have b2 ≡ {parity} (mod 2)")
            }
            Rejection::NotEvenUnimodular { piece, rank, sig } => write!(
                f,
                "{piece}: no even unimodular form of rank {rank}, signature {sig}"
            ),
            Rejection::DefiniteForbidden { piece, rank, sig } => write!(
                f,
                "{piece}: form {} is definite, but no definite spin filling exists",
                describe_even_unimodular(*rank, *sig)
                    .unwrap_or_else(|| format!("(rank {rank}, signature {sig})"))
            ),
            Rejection::ClosedInequality {
                filling,
                glued_to,
                b2,
                sigma,
                mode,
            } => {
                let w = if *glued_to == 'V' { "W" } else { "-W" };
                write!(
                    f,
                    "{w}{filling} ∪ {glued_to} is closed spin with b2 = {b2}, sigma = {sigma}, violating {mode}"
                )
            }
        }
    }
}

/// Verdict on one candidate `(b_U, σ_U)` at a given `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub b_u: u64,
    pub b_v: u64,
    pub s_u: Option<i64>,
    /// Description of the piece forms when they are even unimodular.
    pub forms: Option<(String, String)>,
    pub rejections: Vec<Rejection>,
}

impl Candidate {
    pub fn accepted(&self) -> bool {
        self.rejections.is_empty()
    }
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.s_u {
            Some(s) => write!(
                f,
                "U: (b2 {}, sigma {s}), V: (b2 {}, sigma {})",
                self.b_u, self.b_v, -s
            )?,
            None => write!(f, "U: b2 {}, V: b2 {}", self.b_u, self.b_v)?,
        }
        if let Some((u, v)) = &self.forms {
            write!(f, " [Q_U = {u}, Q_V = {v}]")?;
        }
        if self.accepted() {
            write!(f, ": feasible")
        } else {
            let reasons: Vec<String> = self.rejections.iter().map(|r| r.to_string()).collect();
            write!(f, ": rejected ({})", reasons.join("; "))
        }
    }
}

/// All candidates examined at one value of `m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelReport {
    pub m: u64,
    pub feasible: bool,
    pub candidates: Vec<Candidate>,
}

fn signature_candidates(min_b: u64, mu: Option<u8>) -> Vec<i64> {
    let lim = min_b as i64;
    match mu {
        None => (-lim..=lim).collect(),
        Some(r) => {
            let r = r as i64;
            // smallest s >= -lim with s ≡ r (mod 16)
            let start = -lim + (r + lim).rem_euclid(16);
            (start..=lim).step_by(16).collect()
        }
    }
}

fn check(
    c: &SplitConstraints,
    b_u: u64,
    b_v: u64,
    s_u: i64,
    stop_early: bool,
) -> Result<Vec<Rejection>> {
    let mut out = Vec::new();
    let s_v = -s_u;
    if c.zhs {
        for (piece, b, s) in [('U', b_u, s_u), ('V', b_v, s_v)] {
            if !even_unimodular_exists(b, s) {
                out.push(Rejection::NotEvenUnimodular {
                    piece,
                    rank: b,
                    sig: s,
                });
                if stop_early {
                    return Ok(out);
                }
            }
        }
    }
    if c.forbid_definite {
        for (piece, b, s) in [('U', b_u, s_u), ('V', b_v, s_v)] {
            if b > 0 && b == s.unsigned_abs() {
                out.push(Rejection::DefiniteForbidden {
                    piece,
                    rank: b,
                    sig: s,
                });
                if stop_early {
                    return Ok(out);
                }
            }
        }
    }
    for (i, w) in c.fillings.iter().enumerate() {
        let gluings = [
            ('V', w.b2 + b_v, w.sigma + s_v),
            ('U', w.b2 + b_u, -w.sigma + s_u),
        ];
        for (glued_to, b2, sigma) in gluings {
            if !closed_spin_ok(b2, sigma, c.mode)? {
                out.push(Rejection::ClosedInequality {
                    filling: i,
                    glued_to,
                    b2,
                    sigma,
                    mode: c.mode,
                });
                if stop_early {
                    return Ok(out);
                }
            }
        }
    }
    Ok(out)
}

fn parity_ok(c: &SplitConstraints, b_u: u64, b_v: u64) -> bool {
    c.b2_parity
        .map_or(true, |p| b_u % 2 == p as u64 && b_v % 2 == p as u64)
}

/// Whether some splitting of `#_m S²×S²` is compatible with `c`.
pub fn feasible(m: u64, c: &SplitConstraints) -> Result<Option<Witness>> {
    let mu = c.effective_mu()?;
    for b_u in 0..=2 * m {
        let b_v = 2 * m - b_u;
        if !parity_ok(c, b_u, b_v) {
            continue;
        }
        for s_u in signature_candidates(b_u.min(b_v), mu) {
            if check(c, b_u, b_v, s_u, true)?.is_empty() {
                return Ok(Some(Witness { b_u, s_u, b_v }));
            }
        }
    }
    Ok(None)
}

/// Every candidate at level `m` with the reasons it fails, for traces.
pub fn explain(m: u64, c: &SplitConstraints) -> Result<LevelReport> {
    let mu = c.effective_mu()?;
    let mut candidates = Vec::new();
    for b_u in 0..=2 * m {
        let b_v = 2 * m - b_u;
        if !parity_ok(c, b_u, b_v) {
            candidates.push(Candidate {
                b_u,
                b_v,
                s_u: None,
                forms: None,
                rejections: vec![Rejection::Parity {
                    b_u,
                    b_v,
                    parity: c.b2_parity.unwrap_or(0),
                }],
            });
            continue;
        }
        let sigs = signature_candidates(b_u.min(b_v), mu);
        if sigs.is_empty() {
            candidates.push(Candidate {
                b_u,
                b_v,
                s_u: None,
                forms: None,
                rejections: vec![Rejection::NoSignatureFits { b_u, b_v }],
            });
        }
        for s_u in sigs {
            let forms = if c.zhs {
                describe_even_unimodular(b_u, s_u).zip(describe_even_unimodular(b_v, -s_u))
            } else {
                None
            };
            candidates.push(Candidate {
                b_u,
                b_v,
                s_u: Some(s_u),
                forms,
                rejections: check(c, b_u, b_v, s_u, false)?,
            });
        }
    }
    let feasible = candidates.iter().any(Candidate::accepted);
    Ok(LevelReport {
        m,
        feasible,
        candidates,
    })
}

/// Level beyond which a feasible splitting is guaranteed for consistent constraints.
fn search_limit(c: &SplitConstraints) -> u64 {
    let worst = c
        .fillings
        .iter()
        .map(|f| f.b2 + f.sigma.unsigned_abs())
        .max()
        .unwrap_or(0);
    4 * worst + 64
}

/// The least `m` for which [`feasible`] holds: a lower bound on ε(Y).
pub fn min_embedding_lower(c: &SplitConstraints) -> Result<u64> {
    min_embedding_lower_with_witness(c).map(|(m, _)| m)
}

pub fn min_embedding_lower_with_witness(c: &SplitConstraints) -> Result<(u64, Witness)> {
    c.effective_mu()?;
    let limit = search_limit(c);
    for m in 0..=limit {
        if let Some(w) = feasible(m, c)? {
            return Ok((m, w));
        }
    }
    Err(Error::SearchExhausted { limit })
}

/// Runs the search and tags the result: in 11/8 mode the value is reported as
/// conditional only when it beats what 10/8 alone gives.
pub fn engine_estimate(c: &SplitConstraints, citation: &str) -> Result<Estimate> {
    match c.mode {
        Mode::Assume11_8 => {
            let furuta = min_embedding_lower(&c.clone().with_mode(Mode::Furuta10_8))?;
            let conj = min_embedding_lower(c)?;
            Ok(if conj > furuta {
                Estimate::new(
                    conj,
                    Assumption::Assumes11_8,
                    format!("{citation}; spin splitting search assuming 11/8"),
                )
            } else {
                Estimate::unconditional(
                    furuta,
                    format!("{citation}; spin splitting search with Furuta 10/8"),
                )
            })
        }
        mode => Ok(Estimate::unconditional(
            min_embedding_lower(c)?,
            format!("{citation}; spin splitting search ({mode})"),
        )),
    }
}

fn ceil_div(a: u64, b: u64) -> u64 {
    a.div_ceil(b)
}

/// Closed-form lower bound from one negative-definite spin filling of rank `b0`:
/// `⌈(b0 + 8)/9⌉` under 10/8 and `⌈3 b0 / 19⌉` under 11/8.
pub fn definite_lower_closed_form(b0: u64, mode: Mode) -> Result<u64> {
    if b0 == 0 {
        return Err(Error::InvalidArgument(
            "closed form needs a filling of positive rank".into(),
        ));
    }
    match mode {
        Mode::Furuta10_8 => Ok(ceil_div(b0 + 8, 9)),
        Mode::Assume11_8 => Ok(ceil_div(3 * b0, 19)),
        Mode::RokhlinOnly => Err(Error::InvalidArgument(
            "no closed form without a 10/8 or 11/8 inequality".into(),
        )),
    }
}

/// Parity of `b2` of any spin filling of the branched double cover of a link
/// with `link_components` components.
pub fn spin_filling_b2_parity(link_components: u64) -> u8 {
    ((link_components + 1) % 2) as u8
}
