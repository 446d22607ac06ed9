use proptest::prelude::*;

use tcl_core::channels::{dpi_check, random_channel, QuantumChannel};
use tcl_core::counterexamples::{lemma33_mid_closed_form, lemma33_mid_r, lemma33_negative_r, lemma33_negative_r_limit};
use tcl_core::functionals::{phi, psi, renyi_alpha_z, ParamPoint};
use tcl_core::linalg::{random_psd, CMatrix, PsdMatrix, RandomSpec};
use tcl_core::regions::{classify, Exponent, ExponentTriple, RegionStatus};

fn psd(seed: u64, dim: usize) -> PsdMatrix {
    random_psd(&RandomSpec::new(seed, dim)).unwrap()
}

fn state(seed: u64, dim: usize) -> PsdMatrix {
    let m = psd(seed, dim);
    let tr = m.matrix().trace().re;
    m.scale(1.0 / tr).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_swaps_arguments_with_exponents(seed in 0u64..10_000, dim in 2usize..5,
                                          p in 0.1f64..2.0, q in -1.0f64..2.0, s in 0.2f64..3.0) {
        prop_assume!(q.abs() > 0.05);
        let (a, b) = (psd(seed, dim), psd(seed + 1, dim));
        let pt = ParamPoint::new(p, q, s).unwrap();
        let lhs = phi(&a, &b, &pt).unwrap();
        let rhs = phi(&b, &a, &pt.swapped()).unwrap();
        prop_assert!(rel(lhs, rhs) < 1e-10, "{lhs} vs {rhs}");
    }

    #[test]
    fn phi_is_homogeneous(seed in 0u64..10_000, lam in 0.1f64..10.0, mu in 0.1f64..10.0,
                          p in 0.1f64..2.0, q in -1.0f64..-0.05, s in 0.2f64..3.0) {
        let (a, b) = (psd(seed, 3), psd(seed + 7, 3));
        let pt = ParamPoint::new(p, q, s).unwrap();
        let base = phi(&a, &b, &pt).unwrap();
        let scaled = phi(&a.scale(lam).unwrap(), &b.scale(mu).unwrap(), &pt).unwrap();
        let expected = lam.powf(q * s) * mu.powf(p * s) * base;
        prop_assert!(rel(scaled, expected) < 1e-10, "{scaled} vs {expected}");
    }

    #[test]
    fn middle_family_closed_form_matches(r in 0.01f64..0.99) {
        let res = lemma33_mid_r(r).unwrap();
        let closed = lemma33_mid_closed_form(r);
        prop_assert!(res.margin < 0.0);
        prop_assert!(rel(res.margin, -closed * closed) < 1e-10);
    }
}

#[test]
fn psi_with_identity_is_phi_exactly() {
    let (a, b) = (psd(1, 3), psd(2, 3));
    let pt = ParamPoint::new(1.5, -0.5, 2.0).unwrap();
    assert_eq!(psi(&CMatrix::identity(3), &a, &b, &pt).unwrap(), phi(&a, &b, &pt).unwrap());
}

#[test]
fn negative_r_family_approaches_its_limit() {
    for r in [-1.0, -0.5, -0.1, 0.2, 0.45] {
        let res = lemma33_negative_r(r, 1e-10).unwrap();
        let limit = lemma33_negative_r_limit(r);
        assert!((res.margin - limit).abs() < 1e-8, "r={r}: {} vs {limit}", res.margin);
        assert!(res.margin < 0.0);
    }
}

#[test]
fn large_s_point_is_classified_convex() {
    let e = |s: &str| s.parse::<Exponent>().unwrap();
    let c = classify(&ExponentTriple::new(e("3/2"), e("-1/2"), e("2")).unwrap());
    assert_eq!(c.convexity.status, RegionStatus::ProvenConvex);
}

#[test]
fn depolarizing_channel_erases_distinguishability() {
    let (rho, sigma) = (state(3, 3), state(4, 3));
    let ch = QuantumChannel::fully_depolarizing(3, 2).unwrap();
    let r = dpi_check(&rho, &sigma, 1.5, &ch).unwrap();
    assert!(r.d_after.abs() < 1e-12);
    assert!(r.margin >= 0.0);
}

// Isometric embeddings into a larger output space leave rank-deficient
// outputs; small eigenvalues there must not masquerade as DPI violations.
#[test]
fn rank_deficient_outputs_respect_dpi() {
    for seed in 0..100 {
        let ch = random_channel(2, 4, 1, seed).unwrap();
        let (rho, sigma) = (state(1000 + seed, 2), state(5000 + seed, 2));
        for alpha in [1.1, 1.5, 2.0] {
            let r = dpi_check(&rho, &sigma, alpha, &ch).unwrap();
            assert!(r.margin > -1e-12, "seed {seed}, alpha {alpha}: {}", r.margin);
        }
    }
}

#[test]
fn renyi_of_identical_states_is_zero() {
    let rho = state(11, 4);
    assert!(renyi_alpha_z(&rho, &rho, 1.7, 0.85).unwrap().abs() < 1e-12);
}
