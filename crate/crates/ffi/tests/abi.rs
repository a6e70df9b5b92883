use std::ffi::CStr;
use std::ptr;

use degdiv_ffi::*;

fn last_error() -> String {
    let p = degdiv_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn subgroup(p: u32, gens: &[[i64; 4]]) -> *mut DegdivSubgroup {
    let flat: Vec<i64> = gens.iter().flatten().copied().collect();
    let mut h = ptr::null_mut();
    let status = unsafe { degdiv_subgroup_new(p, flat.as_ptr(), gens.len(), &mut h) };
    assert_eq!(status, DegdivStatus::Ok);
    assert!(!h.is_null());
    h
}

#[test]
fn borel_and_sl2_handles() {
    // Upper unipotent plus a diagonal generator: a Borel subgroup of order 20 at p = 5.
    let h = subgroup(5, &[[1, 1, 0, 1], [2, 0, 0, 1]]);
    let (mut order, mut class, mut index, mut verdict) =
        (0u64, DegdivClass::ContainsSl, 0u64, DegdivVerdict::Pass);
    unsafe {
        assert_eq!(degdiv_subgroup_order(h, &mut order), DegdivStatus::Ok);
        assert_eq!(degdiv_subgroup_classify(h, &mut class), DegdivStatus::Ok);
        assert_eq!(degdiv_subgroup_det_index(h, &mut index), DegdivStatus::Ok);
        assert_eq!(degdiv_subgroup_verify(h, &mut verdict), DegdivStatus::Ok);
        degdiv_subgroup_free(h);
    }
    assert_eq!((order, class, index, verdict), (20, DegdivClass::Borel, 1, DegdivVerdict::NotApplicable));

    let sl = subgroup(7, &[[1, 1, 0, 1], [1, 0, 1, 1]]);
    unsafe {
        assert_eq!(degdiv_subgroup_order(sl, &mut order), DegdivStatus::Ok);
        assert_eq!(degdiv_subgroup_classify(sl, &mut class), DegdivStatus::Ok);
        assert_eq!(degdiv_subgroup_det_index(sl, &mut index), DegdivStatus::Ok);
        assert_eq!(degdiv_subgroup_verify(sl, &mut verdict), DegdivStatus::Ok);
        degdiv_subgroup_free(sl);
    }
    assert_eq!((order, class, index, verdict), (336, DegdivClass::ContainsSl, 6, DegdivVerdict::Pass));
}

#[test]
fn errors_set_status_and_message() {
    let mut h = ptr::null_mut();
    let m = [1i64, 1, 0, 1];
    assert_eq!(unsafe { degdiv_subgroup_new(9, m.as_ptr(), 1, &mut h) }, DegdivStatus::NotPrime);
    assert!(last_error().contains('9'));
    assert!(h.is_null());

    let singular = [1i64, 2, 2, 4];
    assert_eq!(unsafe { degdiv_subgroup_new(5, singular.as_ptr(), 1, &mut h) }, DegdivStatus::InvalidArgument);
    assert!(!last_error().is_empty());

    assert_eq!(unsafe { degdiv_subgroup_new(5, ptr::null(), 1, &mut h) }, DegdivStatus::NullPointer);
    assert_eq!(unsafe { degdiv_subgroup_new(5, m.as_ptr(), 1, ptr::null_mut()) }, DegdivStatus::NullPointer);

    let mut order = 0u64;
    assert_eq!(unsafe { degdiv_subgroup_order(ptr::null(), &mut order) }, DegdivStatus::NullPointer);

    let mut v = 0u64;
    assert_eq!(unsafe { degdiv_euler_phi(12, &mut v) }, DegdivStatus::Ok);
    assert!(degdiv_last_error_message().is_null());
    unsafe { degdiv_subgroup_free(ptr::null_mut()) };
}

#[test]
fn trivial_subgroup_from_no_generators() {
    let mut h = ptr::null_mut();
    assert_eq!(unsafe { degdiv_subgroup_new(3, ptr::null(), 0, &mut h) }, DegdivStatus::Ok);
    let mut order = 0u64;
    assert_eq!(unsafe { degdiv_subgroup_order(h, &mut order) }, DegdivStatus::Ok);
    assert_eq!(order, 1);
    unsafe { degdiv_subgroup_free(h) };
}

#[test]
fn scalar_functions() {
    let mut v = 0u64;
    unsafe {
        assert_eq!(degdiv_euler_phi(36, &mut v), DegdivStatus::Ok);
        assert_eq!(v, 12);
        assert_eq!(degdiv_euler_phi(0, &mut v), DegdivStatus::InvalidArgument);

        let mut e = 0u32;
        assert_eq!(degdiv_glm_order(2, 2, 1, &mut v, &mut e), DegdivStatus::Ok);
        assert_eq!(v * 2u64.pow(e), 6);
        assert_eq!(degdiv_glm_order(2, 3, 2, &mut v, &mut e), DegdivStatus::Ok);
        assert_eq!(v * 3u64.pow(e), 3888);
        assert_eq!(degdiv_glm_order(2, 4, 1, &mut v, &mut e), DegdivStatus::NotPrime);
        assert_eq!(degdiv_glm_order(2, 3, 1, &mut v, ptr::null_mut()), DegdivStatus::NullPointer);

        assert_eq!(degdiv_genus_x1(13, &mut v), DegdivStatus::Ok);
        assert_eq!(v, 2);
        assert_eq!(degdiv_genus_x1(0, &mut v), DegdivStatus::InvalidArgument);

        let gens = [3u64, 5];
        assert_eq!(degdiv_stable_bound(gens.as_ptr(), gens.len(), &mut v), DegdivStatus::Ok);
        assert_eq!(v, 8);
        assert_eq!(degdiv_stable_bound(gens.as_ptr(), 0, &mut v), DegdivStatus::InvalidArgument);

        assert_eq!(degdiv_cm_constant(1, &mut v), DegdivStatus::Ok);
        assert_eq!(v, 144);
    }
}
