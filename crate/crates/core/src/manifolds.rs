//! Lens spaces, Brieskorn spheres, knot surgeries and the per-family bounds
//! assembled from the lower-level engines.

use num_integer::{Integer, Roots};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::bound::{Assumption, Bound, Estimate};
use crate::error::{Error, Result};
use crate::kirby::{chain_upper_bound, characteristic_sublinks, even_chain_presentation, linking_matrix, neg_cf};
use crate::obstruct::{
    definite_lower_closed_form, engine_estimate, min_embedding_lower, rokhlin_mu,
    spin_filling_b2_parity, Mode, SpinFilling, SplitConstraints,
};

fn is_square(n: u64) -> bool {
    let r = n.sqrt();
    r * r == n
}

/// `L(p, q)` with `0 < q < p`, `gcd(p, q) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LensSpace {
    p: i64,
    q: i64,
}

impl LensSpace {
    /// Reduces `q` modulo `p`.
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if p < 2 {
            return Err(Error::InvalidLens {
                p,
                q,
                reason: "p must be at least 2",
            });
        }
        let r = q.rem_euclid(p);
        if r == 0 || p.gcd(&r) != 1 {
            return Err(Error::InvalidLens {
                p,
                q,
                reason: "p and q must be coprime",
            });
        }
        Ok(LensSpace { p, q: r })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    /// Orientation reversal: `-L(p, q) = L(p, p - q)`.
    pub fn reverse(&self) -> LensSpace {
        LensSpace {
            p: self.p,
            q: self.p - self.q,
        }
    }

    /// The `q'` with `q q' ≡ 1 (mod p)`.
    pub fn inverse_q(&self) -> i64 {
        // p >= 2 and gcd = 1, so the extended gcd gives an inverse
        let e = self.q.extended_gcd(&self.p);
        e.x.rem_euclid(self.p)
    }

    /// Orientation-preserving diffeomorphism: `q' ≡ q^{±1} (mod p)`.
    pub fn is_diffeomorphic(&self, other: &LensSpace) -> bool {
        self.p == other.p
            && (self.q == other.q || (self.q * other.q).rem_euclid(self.p) == 1 % self.p)
    }

    /// `q`-values giving `±L(p, q)`: `q`, its inverse, and those of the reverse.
    pub fn representatives(&self) -> Vec<i64> {
        let mut reps = vec![
            self.q,
            self.inverse_q(),
            self.reverse().q,
            self.reverse().inverse_q(),
        ];
        reps.sort_unstable();
        reps.dedup();
        reps
    }
}

impl fmt::Display for LensSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L({},{})", self.p, self.q)
    }
}

/// No lens space embeds in `S⁴`.
pub fn lens_basic_lower(l: &LensSpace) -> Bound {
    Bound::lower(Estimate::unconditional(
        1,
        format!("H_1({l}) is cyclic of order {}, not of the form G ⊕ G", l.p),
    ))
}

/// Components of the two-bridge link whose branched double cover is `L(p, q)`.
pub fn branched_link_components(l: &LensSpace) -> u64 {
    if l.p % 2 == 1 {
        1
    } else {
        2
    }
}

/// Spin fillings of `L(p, q)`, one per spin structure, from even presentations of the chain.
pub fn lens_spin_fillings(l: &LensSpace) -> Result<Vec<SpinFilling>> {
    let cf = neg_cf(l.p, l.q)?;
    characteristic_sublinks(&linking_matrix(&cf))
        .iter()
        .map(|x| {
            let m = even_chain_presentation(l.p, l.q, x)?;
            SpinFilling::new(m.rank() as u64, m.signature())
        })
        .collect()
}

/// Minimum over spin structures of the splitting search, tagged as in
/// [`engine_estimate`].
fn lens_engine_lower(l: &LensSpace, mode: Mode) -> Result<Estimate> {
    let parity = spin_filling_b2_parity(branched_link_components(l));
    let fillings = lens_spin_fillings(l)?;
    let best = |mode: Mode| -> Result<u64> {
        let mut best = u64::MAX;
        for f in &fillings {
            let c = SplitConstraints::new(mode)
                .with_filling(*f)
                .with_b2_parity(parity);
            best = best.min(min_embedding_lower(&c)?);
        }
        Ok(best)
    };
    let furuta = best(Mode::Furuta10_8)?;
    let citation = format!(
        "spin splitting search, minimum over {} spin structure(s) of {l} with fillings from even chain presentations",
        fillings.len()
    );
    if mode == Mode::Assume11_8 {
        let conj = best(Mode::Assume11_8)?;
        if conj > furuta {
            return Ok(Estimate::new(conj, Assumption::Assumes11_8, citation + ", assuming 11/8"));
        }
    }
    if mode == Mode::RokhlinOnly {
        return Ok(Estimate::unconditional(best(Mode::RokhlinOnly)?, citation));
    }
    Ok(Estimate::unconditional(furuta, citation + ", 10/8"))
}

/// Every bound on ε(L(p, q)) derivable from the lens space alone.
pub fn lens_bounds(l: &LensSpace, mode: Mode) -> Result<Bound> {
    let mut bound = lens_basic_lower(l);
    if l.p % 2 == 1 && !is_square(l.p as u64) {
        bound.raise_lower(Estimate::unconditional(
            2,
            format!(
                "|H_1| = {} is odd and not a square, so {l} bounds no rational ball and cannot embed in S²×S²",
                l.p
            ),
        ));
    }
    bound.raise_lower(lens_engine_lower(l, mode)?);
    for q in l.representatives() {
        bound.lower_upper(chain_upper_bound(l.p, q)?.bound.upper.expect("chain bound has an upper end"));
    }
    Ok(bound)
}

/// `Σ(p, q, r)` with `2 <= p < q < r` pairwise coprime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Brieskorn {
    p: i64,
    q: i64,
    r: i64,
}

impl Brieskorn {
    pub fn new(p: i64, q: i64, r: i64) -> Result<Self> {
        let err = |reason| Err(Error::InvalidBrieskorn { p, q, r, reason });
        if p < 2 || q < 2 || r < 2 {
            return err("entries must be at least 2");
        }
        if p.gcd(&q) != 1 || p.gcd(&r) != 1 || q.gcd(&r) != 1 {
            return err("entries must be pairwise coprime");
        }
        let mut v = [p, q, r];
        v.sort_unstable();
        Ok(Brieskorn {
            p: v[0],
            q: v[1],
            r: v[2],
        })
    }

    pub fn triple(&self) -> (i64, i64, i64) {
        (self.p, self.q, self.r)
    }
}

impl fmt::Display for Brieskorn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ({},{},{})", self.p, self.q, self.r)
    }
}

/// The Milnor fiber: `b2 = (p-1)(q-1)(r-1)`, signature by the lattice-point count
/// over `0 < i < p, 0 < j < q, 0 < k < r` of `s = i/p + j/q + k/r mod 2`,
/// `+1` on `(0, 1)` and `-1` on `(1, 2)`.
pub fn milnor_fiber(b: &Brieskorn) -> SpinFilling {
    let (p, q, r) = b.triple();
    let n = p * q * r;
    let mut sigma = 0i64;
    for i in 1..p {
        for j in 1..q {
            let partial = i * q * r + j * p * r;
            for k in 1..r {
                // s * N, reduced mod 2N; never a multiple of N since the entries are coprime
                let s = (partial + k * p * q) % (2 * n);
                if s < n {
                    sigma += 1;
                } else {
                    sigma -= 1;
                }
            }
        }
    }
    SpinFilling {
        b2: ((p - 1) * (q - 1) * (r - 1)) as u64,
        sigma,
    }
}

pub fn brieskorn_mu(b: &Brieskorn) -> u8 {
    rokhlin_mu(&milnor_fiber(b))
}

/// `Σ(p, q, pqn ± 1)`: returns `n` when the largest entry has this form.
pub fn torus_knot_surgery_index(b: &Brieskorn) -> Option<i64> {
    let (p, q, r) = b.triple();
    let pq = p * q;
    [r - 1, r + 1]
        .into_iter()
        .find(|c| c % pq == 0 && c / pq >= 1)
        .map(|c| c / pq)
}

/// Membership in one of the four families `M_n` bounding spin definite
/// manifolds with `b2 = 8n`: `Σ(4n-2, 4n-1, 8n-3)`, `Σ(4n-1, 4n, 8n-1)`,
/// `Σ(4n-2, 4n-1, 8n²-4n+1)`, `Σ(4n-1, 4n, 8n²-1)`. Returns `n`.
pub fn tange_family_index(b: &Brieskorn) -> Option<i64> {
    let (p, q, r) = b.triple();
    if q != p + 1 {
        return None;
    }
    match p % 4 {
        2 => {
            let n = (p + 2) / 4;
            (r == 8 * n - 3 || r == 8 * n * n - 4 * n + 1).then_some(n)
        }
        3 => {
            let n = (p + 1) / 4;
            (r == 8 * n - 1 || r == 8 * n * n - 1).then_some(n)
        }
        _ => None,
    }
}

/// Lower bound from a spin definite filling with `b2 = 8n`; grows without bound in `n`.
pub fn tange_lower(n: u64, mode: Mode) -> Result<Bound> {
    if n == 0 {
        return Err(Error::InvalidArgument("family index must be positive".into()));
    }
    let citation = format!("spin definite filling with b2 = {}", 8 * n);
    let furuta = definite_lower_closed_form(8 * n, Mode::Furuta10_8)?;
    let e = match mode {
        Mode::Assume11_8 => {
            let conj = definite_lower_closed_form(8 * n, Mode::Assume11_8)?;
            if conj > furuta {
                Estimate::new(conj, Assumption::Assumes11_8, citation + ", assuming 11/8")
            } else {
                Estimate::unconditional(furuta, citation + ", 10/8")
            }
        }
        Mode::Furuta10_8 => Estimate::unconditional(furuta, citation + ", 10/8"),
        Mode::RokhlinOnly => Estimate::unconditional(0, citation),
    };
    Ok(Bound::lower(e))
}

/// `p q + p r + q r = -1` for odd, pairwise coprime `|p|, |q|, |r| > 1`.
///
/// Returns `Ok(None)` when the identity fails.
pub fn fintushel_stern_exact_two(p: i64, q: i64, r: i64) -> Result<Option<Bound>> {
    let err = |reason| Err(Error::InvalidBrieskorn { p, q, r, reason });
    if [p, q, r].iter().any(|x| x.abs() <= 1) {
        return err("entries must have absolute value greater than 1");
    }
    if [p, q, r].iter().any(|x| x % 2 == 0) {
        return err("entries must be odd");
    }
    if p.gcd(&q) != 1 || p.gcd(&r) != 1 || q.gcd(&r) != 1 {
        return err("entries must be pairwise coprime");
    }
    if p * q + p * r + q * r != -1 {
        return Ok(None);
    }
    Ok(Some(Bound::exact(Estimate::unconditional(
        2,
        format!("({p})({q}) + ({p})({r}) + ({q})({r}) = -1: bounds a rational ball built from one 1-handle and one 2-handle"),
    ))))
}

/// Tries every sign pattern on an all-odd triple.
pub fn fintushel_stern_signs(b: &Brieskorn) -> Option<(i64, i64, i64)> {
    let (p, q, r) = b.triple();
    if p % 2 == 0 || q % 2 == 0 || r % 2 == 0 {
        return None;
    }
    for s in 0..8 {
        let sign = |bit: i64| if s & bit == 0 { 1 } else { -1 };
        let (a, b, c) = (sign(1) * p, sign(2) * q, sign(4) * r);
        if a * b + a * c + b * c == -1 {
            return Some((a, b, c));
        }
    }
    None
}

/// Constraints for the splitting search on a Brieskorn sphere.
///
/// `d_zero` asserts that the correction term vanishes, so no definite spin filling exists.
pub fn brieskorn_constraints(b: &Brieskorn, mode: Mode, d_zero: bool) -> SplitConstraints {
    let mut c = SplitConstraints::new(mode)
        .with_mu(brieskorn_mu(b) as i64)
        .with_zhs();
    if d_zero {
        c = c.with_forbid_definite();
    }
    c
}

pub fn brieskorn_bounds(b: &Brieskorn, mode: Mode, d_zero: bool) -> Result<Bound> {
    let (p, q, r) = b.triple();
    let generic = ((p - 1) * (q - 1) * (r - 1)) as u64;
    let mut bound = Bound::upper(Estimate::unconditional(
        generic,
        format!("Milnor fiber has {generic} even-framed 2-handles; doubling"),
    ));
    if let Some(n) = torus_knot_surgery_index(b) {
        if n % 2 == 0 {
            bound.lower_upper(Estimate::unconditional(
                2,
                format!("{b} is -1/{n} surgery on a torus knot, n even: two even-framed components after a slam dunk"),
            ));
        } else if q == p + 1 && p % 2 == 0 && r == p * q * n + 1 {
            let v = ((p + 1) * (p + 1) + 1) as u64;
            bound.lower_upper(Estimate::unconditional(
                v,
                format!("{b} is -1/{n} surgery on T({p},{q}), n odd, p even: blow-ups leave {v} even-framed components"),
            ));
        }
    }
    if let Some((x, y, z)) = fintushel_stern_signs(b) {
        if let Some(fs) = fintushel_stern_exact_two(x, y, z)? {
            bound = bound.intersect(fs);
        }
    }
    let c = brieskorn_constraints(b, mode, d_zero);
    let mut citation = format!("integral homology sphere with Rokhlin invariant {}", c.mu.unwrap_or(0));
    if d_zero {
        citation.push_str(", d = 0 rules out definite spin fillings");
        if p == 2 && q == 3 && (r - 1) % 6 == 0 {
            citation.push_str(" (Ozsváth–Szabó: d(Σ(2,3,6n+1)) = 0)");
        }
    }
    bound.raise_lower(engine_estimate(&c, &citation)?);
    if let Some(n) = tange_family_index(b) {
        bound = bound.intersect(tange_lower(n as u64, mode)?);
    }
    Ok(bound)
}

/// Knot-independent bounds on ε(S³_{p/q}(K)).
pub fn surgery_eps_bounds(p: i64, q: i64) -> Result<Bound> {
    if q == 0 && p.abs() != 1 {
        return Err(Error::InvalidSurgery {
            p,
            q,
            reason: "q = 0 requires |p| = 1",
        });
    }
    if p.gcd(&q) != 1 {
        return Err(Error::InvalidSurgery {
            p,
            q,
            reason: "p and q must be coprime",
        });
    }
    let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
    if q == 0 {
        return Ok(Bound::exact(Estimate::unconditional(0, "∞ surgery returns S³"))
            .with_note("degenerate surgery coefficient"));
    }
    if p == 0 {
        return Ok(Bound::trivial().with_note("0-surgery has infinite H_1; no knot-independent bound"));
    }
    let ap = p.unsigned_abs();
    let mut bound = Bound::trivial();
    if ap > 1 {
        bound.raise_lower(Estimate::unconditional(
            1,
            format!("H_1 = Z/{ap} is not of the form G ⊕ G"),
        ));
    }
    if q == 1 && ap % 2 == 0 {
        bound.lower_upper(Estimate::unconditional(1, format!("even integral surgery ({p}) is one even-framed 2-handle")));
    }
    if q == 1 && ap % 2 == 1 && ap > 1 && !is_square(ap) {
        bound.raise_lower(Estimate::unconditional(
            2,
            format!("|H_1| = {ap} is odd and not a square: bounds no rational ball"),
        ));
    }
    if ap == 1 && q % 2 == 0 {
        bound.lower_upper(Estimate::unconditional(
            2,
            format!("{p}/{q} surgery: a reverse slam dunk gives two even-framed components"),
        ));
    }
    if ap == 1 && bound.upper.is_none() {
        bound = bound.with_note("integral homology sphere; no knot-independent bound");
    }
    Ok(bound)
}

/// Branched double cover of a knot with Seifert genus `genus` and unknotting number `unknotting`.
pub fn dbc_upper(genus: u64, unknotting: u64) -> Bound {
    let m = genus.min(unknotting);
    Bound::upper(Estimate::unconditional(
        2 * m,
        format!("branched double cover, min(g, u) = {m}"),
    ))
}

/// `ε(M # N) <= ε(M) + ε(N)`.
pub fn connected_sum(a: &Bound, b: &Bound) -> Bound {
    match (&a.upper, &b.upper) {
        (Some(x), Some(y)) => Bound::upper(Estimate::new(
            x.value + y.value,
            x.assumption.join(y.assumption),
            format!("connected sum of ({}) and ({})", x.citation, y.citation),
        )),
        _ => Bound::trivial(),
    }
}

/// `ε(-M) = ε(M)`.
pub fn reverse(a: &Bound) -> Bound {
    a.clone()
}

/// `ε(M # -M) <= ε(M)`.
pub fn sum_with_reverse(a: &Bound) -> Bound {
    match &a.upper {
        Some(u) => Bound::upper(Estimate::new(
            u.value,
            u.assumption,
            format!("M # -M embeds wherever M does ({})", u.citation),
        )),
        None => Bound::trivial(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lens_normalization() {
        let l = LensSpace::new(7, 9).unwrap();
        assert_eq!((l.p(), l.q()), (7, 2));
        assert_eq!(l.reverse().reverse(), l);
        assert!(l.is_diffeomorphic(&LensSpace::new(7, 4).unwrap()));
        assert!(!l.is_diffeomorphic(&LensSpace::new(7, 3).unwrap()));
        assert!(LensSpace::new(6, 3).is_err());
        assert!(LensSpace::new(1, 0).is_err());
        assert_eq!(LensSpace::new(2, 1).unwrap().inverse_q(), 1);
    }

    #[test]
    fn branched_links() {
        assert_eq!(branched_link_components(&LensSpace::new(7, 1).unwrap()), 1);
        assert_eq!(branched_link_components(&LensSpace::new(8, 3).unwrap()), 2);
        assert_eq!(branched_link_components(&LensSpace::new(2, 1).unwrap()), 2);
    }

    #[test]
    fn basic_lens_lower() {
        for (p, q) in [(2, 1), (4, 1), (9, 1)] {
            assert_eq!(lens_basic_lower(&LensSpace::new(p, q).unwrap()).lower_value(), 1);
        }
    }

    #[test]
    fn lens_bound_examples() {
        let b = lens_bounds(&LensSpace::new(3, 1).unwrap(), Mode::Furuta10_8).unwrap();
        assert_eq!(b.exact_value(), Some(2));
        let b = lens_bounds(&LensSpace::new(6, 1).unwrap(), Mode::Furuta10_8).unwrap();
        assert_eq!(b.exact_value(), Some(1));
        let b = lens_bounds(&LensSpace::new(12, 11).unwrap(), Mode::Furuta10_8).unwrap();
        assert_eq!(b.exact_value(), Some(1));
        let b = lens_bounds(&LensSpace::new(13, 12).unwrap(), Mode::Furuta10_8).unwrap();
        assert_eq!((b.lower_value(), b.upper_value()), (10, Some(12)));
    }

    #[test]
    fn milnor_fibers() {
        let f = |p, q, r| milnor_fiber(&Brieskorn::new(p, q, r).unwrap());
        assert_eq!(f(2, 3, 5), SpinFilling { b2: 8, sigma: -8 });
        assert_eq!(f(2, 3, 7), SpinFilling { b2: 12, sigma: -8 });
        assert_eq!(f(2, 3, 11), SpinFilling { b2: 20, sigma: -16 });
        assert_eq!(f(5, 3, 2), f(2, 3, 5));
    }

    #[test]
    fn brieskorn_examples() {
        let b = |p, q, r| Brieskorn::new(p, q, r).unwrap();
        let poincare = brieskorn_bounds(&b(2, 3, 5), Mode::Furuta10_8, false).unwrap();
        assert_eq!(poincare.exact_value(), Some(8));
        let s237 = brieskorn_bounds(&b(2, 3, 7), Mode::Furuta10_8, true).unwrap();
        assert_eq!(s237.exact_value(), Some(10));
        let s2313 = brieskorn_bounds(&b(2, 3, 13), Mode::Furuta10_8, false).unwrap();
        assert_eq!(s2313.upper_value(), Some(2));
        assert_eq!(s2313.lower_value(), 0);
        assert!(Brieskorn::new(2, 4, 5).is_err());
    }

    #[test]
    fn fintushel_stern_family() {
        for p in (5..40).step_by(2) {
            let r = (p * p - 2 * p - 1) / 2;
            if (p - 2).gcd(&r) != 1 || p.gcd(&r) != 1 || r % 2 == 0 {
                continue;
            }
            let fs = fintushel_stern_exact_two(-(p - 2), p, r).unwrap().unwrap();
            assert_eq!(fs.exact_value(), Some(2));
            let b = Brieskorn::new(p - 2, p, r).unwrap();
            assert!(fintushel_stern_signs(&b).is_some());
            assert_eq!(brieskorn_mu(&b), 0);
        }
        assert!(fintushel_stern_exact_two(3, 5, -7).unwrap().is_none());
        assert!(fintushel_stern_exact_two(2, 5, 7).is_err());
        assert!(fintushel_stern_exact_two(3, 9, 7).is_err());
    }

    #[test]
    fn tange_values() {
        assert_eq!(tange_lower(1, Mode::Furuta10_8).unwrap().lower_value(), 2);
        assert_eq!(tange_lower(9, Mode::Furuta10_8).unwrap().lower_value(), 9);
        assert_eq!(tange_lower(10, Mode::Furuta10_8).unwrap().lower_value(), 10);
        let b = |p, q, r| Brieskorn::new(p, q, r).unwrap();
        assert_eq!(tange_family_index(&b(6, 7, 13)), Some(2));
        assert_eq!(tange_family_index(&b(7, 8, 31)), Some(2));
        assert_eq!(tange_family_index(&b(2, 3, 7)), None);
    }

    #[test]
    fn surgery_clauses() {
        assert_eq!(surgery_eps_bounds(6, 1).unwrap().exact_value(), Some(1));
        let b7 = surgery_eps_bounds(7, 1).unwrap();
        assert_eq!((b7.lower_value(), b7.upper_value()), (2, None));
        let b9 = surgery_eps_bounds(9, 1).unwrap();
        assert_eq!((b9.lower_value(), b9.upper_value()), (1, None));
        assert_eq!(surgery_eps_bounds(1, 4).unwrap().upper_value(), Some(2));
        assert!(surgery_eps_bounds(4, 2).is_err());
        assert!(surgery_eps_bounds(3, 0).is_err());
        assert!(!surgery_eps_bounds(0, 1).unwrap().notes.is_empty());
    }

    #[test]
    fn sum_rules() {
        let two = Bound::exact(Estimate::unconditional(2, "x"));
        assert_eq!(connected_sum(&two, &two).upper_value(), Some(4));
        let eight = Bound::exact(Estimate::unconditional(8, "y"));
        assert_eq!(reverse(&eight).exact_value(), Some(8));
        let five = Bound::upper(Estimate::unconditional(5, "z"));
        assert_eq!(sum_with_reverse(&five).upper_value(), Some(5));
        assert_eq!(dbc_upper(1, 1).upper_value(), Some(2));
        assert_eq!(dbc_upper(0, 0).upper_value(), Some(0));
        assert_eq!(dbc_upper(3, 1).upper_value(), Some(2));
    }
}
