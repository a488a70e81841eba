use embnum_core::bound::Assumption;
use embnum_core::forms::{Definiteness, QuadraticForm};
use embnum_core::obstruct::{definite_lower_closed_form, Mode};
use embnum_core::splitcon::{q6, yn_construction, yn_u_form, zn_construction};
use num_bigint::BigInt;
use num_traits::{Pow, Signed};

#[test]
fn six_chain() {
    let q = q6();
    assert_eq!(q.rank(), 6);
    assert_eq!(q.determinant(), BigInt::from(7));
    assert_eq!(q.definiteness(), Definiteness::Negative);
    assert!(q.is_even());
}

#[test]
fn assembled_definite_piece() {
    for n in 1..=4usize {
        let u = yn_u_form(n);
        assert_eq!(u.rank(), 38 * n);
        assert_eq!(u.signature(), -38 * n as i64);
        assert_eq!(u.determinant().abs(), BigInt::from(7).pow(n as u32));
        assert!(u.is_even());
        // gluing a rank-6n positive piece recovers the closed manifold's rank and signature
        let v = QuadraticForm::diagonal(&vec![1; 6 * n]);
        let closed = u.direct_sum(&v);
        assert_eq!(closed.rank(), 44 * n);
        assert_eq!(closed.signature(), -32 * n as i64);
    }
}

#[test]
fn yn_is_exactly_six_n_under_11_8() {
    for n in 1..=4u64 {
        let r = yn_construction(n, Mode::Assume11_8).unwrap();
        assert_eq!(r.eps.exact_value(), Some(6 * n), "n = {n}");
        assert_eq!((r.ambient_rank, r.ambient_signature), (44 * n, -32 * n as i64));
        assert_eq!(r.u_form.rank as u64 + r.v_rank, r.ambient_rank);
    }
}

#[test]
fn yn_large_n_uses_blocks() {
    for n in [8u64, 9, 20] {
        let r = yn_construction(n, Mode::Furuta10_8).unwrap();
        assert_eq!(r.u_form.rank as u64, 38 * n);
        assert_eq!(r.u_form.determinant, BigInt::from(7).pow(n as u32));
        assert_eq!(r.eps.upper_value(), Some(6 * n));
        assert!(r.eps.is_consistent());
    }
}

#[test]
fn yn_furuta_mode_is_weaker() {
    for n in 1..=6u64 {
        let r = yn_construction(n, Mode::Furuta10_8).unwrap();
        let closed = definite_lower_closed_form(38 * n, Mode::Furuta10_8).unwrap();
        assert!(r.eps.lower_value() >= closed);
        assert!(r.eps.lower_value() <= 6 * n);
    }
}

#[test]
fn yn_tagging_boundary() {
    // the mod-16 residue of -38n plus 10/8 already pins 6n for small n
    for n in 1..=5u64 {
        let r = yn_construction(n, Mode::Assume11_8).unwrap();
        assert_eq!(r.eps.exact_value(), Some(6 * n));
        assert_eq!(r.eps.assumption(), Assumption::Unconditional, "n = {n}");
    }
    let f = yn_construction(6, Mode::Furuta10_8).unwrap();
    assert_eq!((f.eps.lower_value(), f.eps.upper_value()), (34, Some(36)));
    let c = yn_construction(6, Mode::Assume11_8).unwrap();
    assert_eq!(c.eps.exact_value(), Some(36));
    assert_eq!(c.eps.assumption(), Assumption::Assumes11_8);
}

#[test]
fn z1() {
    let r = zn_construction(1, Mode::Assume11_8).unwrap();
    assert_eq!(r.eps.exact_value(), Some(24));
    // at n = 1 the 10/8 inequality already forces |s_U| = 24
    assert_eq!(r.eps.assumption(), Assumption::Unconditional);
    assert_eq!((r.ambient_rank, r.ambient_signature), (176, -128));
    assert_eq!(definite_lower_closed_form(152, Mode::Furuta10_8).unwrap(), 18);
    assert_eq!(definite_lower_closed_form(152, Mode::Assume11_8).unwrap(), 24);
    let f = zn_construction(1, Mode::Furuta10_8).unwrap();
    assert!(f.eps.lower_value() >= 18);
    assert_eq!(f.eps.upper_value(), Some(24));
}

#[test]
fn z2_needs_11_8() {
    let f = zn_construction(2, Mode::Furuta10_8).unwrap();
    assert_eq!((f.eps.lower_value(), f.eps.upper_value()), (38, Some(48)));
    let c = zn_construction(2, Mode::Assume11_8).unwrap();
    assert_eq!(c.eps.exact_value(), Some(48));
    assert_eq!(c.eps.assumption(), Assumption::Assumes11_8);
}

#[test]
fn zero_index_rejected() {
    assert!(yn_construction(0, Mode::Furuta10_8).is_err());
    assert!(zn_construction(0, Mode::Furuta10_8).is_err());
}
