use kinflow_core::kinetic::*;
use kinflow_core::FluxFunction;
use proptest::prelude::*;

fn state() -> impl Strategy<Value = KinState> {
    (0.0..=1.0f64, 0.0..=1.0f64).prop_map(|(rho, s)| KinState::new(rho, s * rho).unwrap())
}

#[test]
fn region_is_enforced() {
    assert!(KinState::new(0.5, 0.6).is_err());
    assert!(KinState::new(1.1, 0.2).is_err());
    assert!(KinState::new(0.5, -0.1).is_err());
    assert!(KinState::new(0.5, 0.5).is_ok());
    assert!(relax_exact(KinState::new(0.5, 0.1).unwrap(), 0.1, 0.0, &FluxFunction::lwr()).is_err());
}

#[test]
fn speed_clamp_is_reported() {
    assert_eq!(lambda1(0.0), (0.0, false));
    let (l, clamped) = lambda1(1.0);
    assert!(clamped && l.is_finite() && l < -1e8);
}

proptest! {
    #[test]
    fn invariants_reconstruct_the_state(s in state()) {
        let back = s.characteristic().to_state();
        prop_assert!((back.rho - s.rho).abs() < 1e-12 && (back.q - s.q).abs() < 1e-12);
        prop_assert!((s.f0() + s.f1() - s.rho).abs() < 1e-15);
        prop_assert!(s.f0() >= -1e-15 && s.f1() >= -1e-15);
    }

    #[test]
    fn eigenvalues_bracket_zero(s in state()) {
        prop_assume!(s.z() < 1.0 - 1e-6);
        let (l1, l2) = s.eigenvalues().unwrap();
        prop_assert!(l1 <= 0.0 && l2 == 1.0);
    }

    // Subcharacteristic condition on the equilibrium manifold.
    #[test]
    fn equilibrium_is_subcharacteristic(rho in 0.0..0.999f64) {
        let f = FluxFunction::lwr();
        let z = equilibrium_z(rho, &f);
        let s = KinState::from_rho_z(rho, z);
        prop_assert!((s.q - f.flux(rho)).abs() < 1e-14);
        let (l1, _) = lambda1(z);
        prop_assert!(l1 <= f.slope(rho) + 1e-12 && f.slope(rho) <= 1.0);
    }

    // A uniform state sees its own flux through every interface.
    #[test]
    fn interface_flux_is_consistent(s in state()) {
        let (q, zq) = interface_flux(s.z(), s.w());
        prop_assert!((q - s.q).abs() < 1e-12);
        prop_assert_eq!(zq, s.z());
    }

    #[test]
    fn relaxation_moves_towards_equilibrium(s in state(), dt in 0.0..1.0f64, eps in 1e-4..1.0f64) {
        let f = FluxFunction::lwr();
        prop_assume!(s.rho < 1.0);
        let r = relax_exact(s, dt, eps, &f).unwrap();
        let z_eq = equilibrium_z(s.rho, &f);
        prop_assert_eq!(r.rho, s.rho);
        prop_assert!((r.z() - z_eq).abs() <= (s.z() - z_eq).abs() + 1e-15);
        prop_assert!(-1e-15 <= r.q && r.q <= r.rho + 1e-15);
    }

    #[test]
    fn relaxation_is_a_semigroup(s in state(), a in 0.0..0.5f64, b in 0.0..0.5f64) {
        let f = FluxFunction::lwr();
        prop_assume!(s.rho < 1.0);
        let once = relax_z(s.rho, s.z(), a + b, 0.1, &f);
        let twice = relax_z(s.rho, relax_z(s.rho, s.z(), a, 0.1, &f), b, 0.1, &f);
        prop_assert!((once - twice).abs() < 1e-14);
    }
}

#[test]
fn stiff_limit_reaches_equilibrium() {
    let f = FluxFunction::lwr();
    let s = relax_exact(KinState::new(0.3, 0.0).unwrap(), 1.0, 1e-6, &f).unwrap();
    assert!((s.q - f.flux(0.3)).abs() < 1e-15);
}
