mod common;

use spinbath_core::evolution::{BathPropagator, CouplingConfig};
use spinbath_core::linalg::{max_abs_diff, CMatrix};
use spinbath_core::spin::BathSpec;

fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// An unpolarized bath is rotation invariant, so the two-qubit channel
/// commutes with joint rotations of Alice's qubits.
#[test]
fn unpolarized_channel_is_su2_covariant() {
    let mut rng = common::rng(11);
    for spins in [3, 6, 9] {
        let prop = BathPropagator::new(&BathSpec::unpolarized(spins).unwrap(), CouplingConfig::new(0.9, -0.3)).unwrap();
        for k in 0..4 {
            let channel = prop.channel(0.4 + 0.7 * k as f64);
            let u = common::random_su2(&mut rng);
            let uu = kron(&u, &u);
            let rho = common::random_density(&mut rng, 4);
            let lhs = channel.apply(&(&uu * &rho * uu.adjoint()));
            let rhs = &uu * channel.apply(&rho) * uu.adjoint();
            assert!(max_abs_diff(&lhs, &rhs) < 1e-12);
        }
    }
}

/// A bath polarized along z only keeps rotations about z.
#[test]
fn polarized_channel_keeps_only_axial_symmetry() {
    let mut rng = common::rng(12);
    let prop = BathPropagator::new(&BathSpec::polarized(8).unwrap(), CouplingConfig::new(1.0, 0.5)).unwrap();
    let channel = prop.channel(1.1);
    let rho = common::random_density(&mut rng, 4);
    let phase = |phi: f64| {
        let mut u = CMatrix::zeros(2, 2);
        u[(0, 0)] = num_complex::Complex64::from_polar(1.0, -phi / 2.0);
        u[(1, 1)] = num_complex::Complex64::from_polar(1.0, phi / 2.0);
        u
    };
    let rz = kron(&phase(0.83), &phase(0.83));
    let lhs = channel.apply(&(&rz * &rho * rz.adjoint()));
    let rhs = &rz * channel.apply(&rho) * rz.adjoint();
    assert!(max_abs_diff(&lhs, &rhs) < 1e-12);

    let u = common::random_su2(&mut rng);
    let uu = kron(&u, &u);
    let lhs = channel.apply(&(&uu * &rho * uu.adjoint()));
    let rhs = &uu * channel.apply(&rho) * uu.adjoint();
    assert!(max_abs_diff(&lhs, &rhs) > 1e-6);
}
