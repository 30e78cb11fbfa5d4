use cavity_core::fock::{self, operator_norm};
use cavity_core::weyl::{
    ccr_residual, lindblad_channel_crosscheck, physical_norm, recover_ladder, semigroup_law_residual,
    semigroup_on_label, weyl_operator,
};
use cavity_core::{CavityParams, Complex64, FockDim};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dim(n: usize) -> FockDim {
    FockDim::new(n).unwrap()
}

fn kappa_free() -> CavityParams {
    CavityParams::new(1.0, 0.4, 0.0).unwrap()
}

fn disc(rng: &mut ChaCha8Rng, r_max: f64) -> Complex64 {
    Complex64::from_polar(
        r_max * rng.random::<f64>().sqrt(),
        rng.random_range(0.0..std::f64::consts::TAU),
    )
}

#[test]
fn semigroup_law_fuzz() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let p = CavityParams::reference();
    let worst = (0..1000)
        .map(|_| {
            let (t, s) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
            let z = disc(&mut rng, 3.0);
            semigroup_law_residual(t, s, z, &p).unwrap()
        })
        .fold(0.0, f64::max);
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn crosscheck_reference_case() {
    let d = lindblad_channel_crosscheck(Complex64::new(0.4, 0.0), 1.0, dim(40), &kappa_free(), 1e-3).unwrap();
    assert!(d < 1e-4, "{d}");
}

#[test]
fn crosscheck_rejects_noise() {
    let err = lindblad_channel_crosscheck(Complex64::new(0.4, 0.0), 1.0, dim(20), &CavityParams::reference(), 1e-2);
    assert!(err.is_err());
}

#[test]
fn ladder_recovery_second_order() {
    let p = kappa_free();
    let d = dim(40);
    let lambda = (-p.complex_rate()).exp();
    let a = fock::annihilation(d);
    let adag = fock::creation(d);
    let errs: Vec<(f64, f64)> = [1e-3, 5e-4]
        .iter()
        .map(|&h| {
            let (a_t, adag_t) = recover_ladder(1.0, d, &p, h).unwrap();
            (
                physical_norm(&(a_t - &a * lambda)),
                physical_norm(&(adag_t - &adag * lambda.conj())),
            )
        })
        .collect();
    assert!(errs[0].0 < 1e-5, "{}", errs[0].0);
    assert!(errs[0].1 < 1e-5, "{}", errs[0].1);
    let ratio = errs[0].0 / errs[1].0;
    assert!((3.5..=4.5).contains(&ratio), "{ratio}");
}

#[test]
fn ccr_converges_with_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let (f, h) = (disc(&mut rng, 0.5), disc(&mut rng, 0.5));
        let r: Vec<f64> = [20, 40, 60].iter().map(|&n| ccr_residual(f, h, dim(n))).collect();
        assert!(r[2] < 1e-6, "{r:?}");
        assert!(r[1] <= r[0] + 1e-14 && r[2] <= r[1] + 1e-14, "{r:?}");
    }
}

#[test]
fn ccr_worsens_at_low_dimension() {
    let f = Complex64::new(0.5, 0.0);
    let h = Complex64::new(0.0, 0.5);
    assert!(ccr_residual(f, h, dim(10)) > ccr_residual(f, h, dim(40)));
}

#[test]
fn truncated_weyl_is_unitary() {
    let z = Complex64::new(0.3, 0.4);
    let defect = |n| {
        let w = weyl_operator(z, dim(n));
        operator_norm(&(w.adjoint() * &w - fock::identity(dim(n))))
    };
    for n in [10, 20, 40, 60] {
        assert!(defect(n) < 1e-12, "dim={n}");
    }
}

proptest! {
    #[test]
    fn coefficient_in_unit_interval(t in 0.0f64..50.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let img = semigroup_on_label(Complex64::new(re, im), t, &CavityParams::reference()).unwrap();
        prop_assert!(img.coefficient > 0.0 && img.coefficient <= 1.0);
        prop_assert!(img.label.0.norm() <= (re * re + im * im).sqrt() + 1e-15);
    }
}
