//! Splittings of `#_n K3`-type manifolds into two definite spin pieces.
//!
//! `Y_n` splits `4nE8 ⊕ 6nH` into a negative-definite piece with form
//! `4nE8 ⊕ nQ` (`Q` the six-vertex `-2` chain) and a positive-definite piece of
//! rank `6n`. `Z_n` splits `16nE8 ⊕ 24nH ≅ 19nE8 ⊕ -3nE8` into definite pieces
//! of ranks `152n` and `24n`.

use serde::{Deserialize, Serialize};

use crate::bound::{Bound, Estimate};
use crate::error::{Error, Result};
use crate::forms::{FormSummary, QuadraticForm};
use crate::obstruct::{engine_estimate, Mode, SpinFilling, SplitConstraints};

/// Above this rank the `U_n` invariants are computed block by block.
pub const ASSEMBLED_RANK_LIMIT: usize = 304;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitReport {
    pub n: u64,
    pub u_form: FormSummary,
    pub v_rank: u64,
    /// Rank and signature of the closed manifold being split.
    pub ambient_rank: u64,
    pub ambient_signature: i64,
    pub fillings: Vec<SpinFilling>,
    pub eps: Bound,
}

/// The six-vertex linear chain of `-2` spheres; determinant 7.
pub fn q6() -> QuadraticForm {
    QuadraticForm::minus_two_chain(6)
}

/// `4nE8 ⊕ nQ`.
pub fn yn_u_form(n: usize) -> QuadraticForm {
    QuadraticForm::e8()
        .scaled_copies(4 * n)
        .direct_sum(&q6().scaled_copies(n))
}

fn block_summary(blocks: &[(FormSummary, u64)]) -> FormSummary {
    let mut rank = 0;
    let mut signature = 0;
    let mut determinant = num_bigint::BigInt::from(1);
    let mut even = true;
    for (s, k) in blocks {
        rank += s.rank * *k as usize;
        signature += s.signature * *k as i64;
        determinant *= s.determinant.pow(*k as u32);
        even &= s.even;
    }
    let q = FormSummary {
        rank,
        signature,
        unimodular: determinant == 1.into() || determinant == (-1).into(),
        determinant,
        even,
        definiteness: blocks
            .first()
            .map(|(s, _)| s.definiteness)
            .unwrap_or(crate::forms::Definiteness::ZeroRank),
    };
    // every block here shares one definiteness
    debug_assert!(blocks.iter().all(|(s, _)| s.definiteness == q.definiteness));
    q
}

fn check_nonzero(n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidArgument("construction index must be positive".into()));
    }
    Ok(())
}

fn invariant(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("construction invariant failed: {what}")))
    }
}

pub fn yn_construction(n: u64, mode: Mode) -> Result<SplitReport> {
    check_nonzero(n)?;
    let rank = 38 * n as usize;
    let u_form = if rank <= ASSEMBLED_RANK_LIMIT {
        FormSummary::from(&yn_u_form(n as usize))
    } else {
        block_summary(&[
            (FormSummary::from(&QuadraticForm::e8()), 4 * n),
            (FormSummary::from(&q6()), n),
        ])
    };
    let ambient_rank = 44 * n;
    let ambient_signature = -32 * n as i64;
    let v_rank = 6 * n;
    invariant(u_form.rank == rank, "rank(U_n) = 38n")?;
    invariant(u_form.signature == -(rank as i64), "U_n negative definite")?;
    invariant(
        u_form.determinant.magnitude() == &num_bigint::BigUint::from(7u32).pow(n as u32),
        "|det U_n| = 7^n",
    )?;
    invariant(u_form.even, "U_n even")?;
    invariant(u_form.rank as u64 + v_rank == ambient_rank, "ranks add to 44n")?;
    invariant(
        u_form.signature + v_rank as i64 == ambient_signature,
        "signatures add to -32n",
    )?;

    let filling = SpinFilling::negative_definite(38 * n);
    let c = SplitConstraints::new(mode).with_filling(filling);
    let mut eps = Bound::upper(Estimate::unconditional(
        v_rank,
        format!("doubling the positive-definite piece of rank {v_rank}"),
    ));
    eps.raise_lower(engine_estimate(
        &c,
        &format!("negative-definite spin filling of rank {}", 38 * n),
    )?);
    Ok(SplitReport {
        n,
        u_form,
        v_rank,
        ambient_rank,
        ambient_signature,
        fillings: vec![filling],
        eps,
    })
}

pub fn zn_construction(n: u64, mode: Mode) -> Result<SplitReport> {
    check_nonzero(n)?;
    let e8 = FormSummary::from(&QuadraticForm::e8());
    let h = FormSummary::from(&QuadraticForm::hyperbolic());
    let mut e8_pos = e8.clone();
    e8_pos.signature = -e8.signature;
    e8_pos.definiteness = crate::forms::Definiteness::Positive;

    // 16nE8 ⊕ 24nH against 19nE8 ⊕ -3nE8
    let lhs_rank = (16 * n) as usize * e8.rank + (24 * n) as usize * h.rank;
    let lhs_sig = 16 * n as i64 * e8.signature + 24 * n as i64 * h.signature;
    let big = block_summary(&[(e8.clone(), 19 * n)]);
    let small = block_summary(&[(FormSummary::from(&QuadraticForm::e8().negate()), 3 * n)]);
    invariant(lhs_rank == big.rank + small.rank, "ranks agree")?;
    invariant(lhs_sig == big.signature + small.signature, "signatures agree")?;
    invariant(lhs_rank as u64 == 176 * n && lhs_sig == -128 * n as i64, "rank 176n, signature -128n")?;

    let fillings = vec![
        SpinFilling::negative_definite(big.rank as u64),
        SpinFilling::negative_definite(small.rank as u64),
    ];
    let mut c = SplitConstraints::new(mode).with_zhs();
    for f in &fillings {
        c = c.with_filling(*f);
    }
    let v_rank = small.rank as u64;
    let mut eps = Bound::upper(Estimate::unconditional(
        v_rank,
        format!("doubling the definite piece of rank {v_rank}"),
    ));
    eps.raise_lower(engine_estimate(
        &c,
        &format!(
            "negative-definite spin fillings of ranks {} and {}",
            big.rank, small.rank
        ),
    )?);
    Ok(SplitReport {
        n,
        u_form: big,
        v_rank,
        ambient_rank: lhs_rank as u64,
        ambient_signature: lhs_sig,
        fillings,
        eps,
    })
}
