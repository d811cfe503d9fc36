use eigenscale::eigen::{dense_ground_state, ground_state};
use eigenscale::models::{build_hubbard, build_ising, Boundary};
use eigenscale::varmin::{evaluate_at, optimize};
use eigenscale::{HubbardSpec, IsingSpec, LanczosConfig};

/// Periodic transverse-field chain, even parity sector (the ground sector
/// for g > 1): modes k = (2m − 1)π/L.
fn ising_free_fermion(length: usize, g: f64) -> f64 {
    -(1..=length)
        .map(|m| {
            let k = (2 * m - 1) as f64 * std::f64::consts::PI / length as f64;
            (1.0 + g * g - 2.0 * g * k.cos()).sqrt()
        })
        .sum::<f64>()
}

#[test]
fn ising_energies_match_free_fermions() {
    for length in [4, 6, 8, 10] {
        let m = build_ising(&IsingSpec::new(length, 10.0)).unwrap();
        let p = ground_state(&m, &LanczosConfig::default()).unwrap();
        let expected = ising_free_fermion(length, 10.0);
        assert!(
            (p.value - expected).abs() < 1e-9,
            "L={length}: {} vs {expected}",
            p.value
        );
        assert!(p.vector.iter().all(|&x| x > 0.0));
    }
}

#[test]
fn small_ising_chain_matches_dense_oracle() {
    let m = build_ising(&IsingSpec::new(3, 1.0)).unwrap();
    assert_eq!(m.dim(), 8);
    let dense = dense_ground_state(&m).unwrap();
    let lanczos = ground_state(&m, &LanczosConfig::default()).unwrap();
    assert!((dense.value - lanczos.value).abs() < 1e-10);
}

#[test]
fn hubbard_free_limit() {
    let m = build_hubbard(&HubbardSpec::half_filled_four_site(0.0)).unwrap();
    let p = dense_ground_state(&m).unwrap();
    assert!((p.value / 4.0 + std::f64::consts::SQRT_2).abs() < 1e-12);
}

#[test]
fn hubbard_lanczos_matches_dense() {
    for u in [0.0, 1.0, 4.0] {
        let m = build_hubbard(&HubbardSpec::half_filled_four_site(u)).unwrap();
        let d = dense_ground_state(&m).unwrap();
        let l = ground_state(&m, &LanczosConfig::default()).unwrap();
        assert!((d.value - l.value).abs() < 1e-10, "U={u}");
    }
}

#[test]
fn periodic_hubbard_has_positive_elements() {
    let mut spec = HubbardSpec::half_filled_four_site(1.0);
    spec.boundary = Boundary::Periodic;
    let m = build_hubbard(&spec).unwrap();
    assert!(m.max_off_diagonal().unwrap() > 0.0);
}

#[test]
fn ising_variational_parameters() {
    // c per length under the ŝ = −S/‖S‖ orientation.
    let expected = [(4, 0.000623), (6, -0.04132), (8, -0.03108)];
    for (length, c_ref) in expected {
        let m = build_ising(&IsingSpec::new(length, 10.0)).unwrap();
        let r = optimize(&m).unwrap();
        let c = r.c.unwrap();
        assert!(((c - c_ref) / c_ref).abs() < 0.01, "L={length}: c={c}");
        assert!((evaluate_at(&m, c).unwrap() - r.energy).abs() < 1e-12 * r.energy.abs());
    }
}

#[test]
fn variational_energy_is_close_for_the_free_hubbard_chain() {
    let m = build_hubbard(&HubbardSpec::half_filled_four_site(0.0)).unwrap();
    let r = optimize(&m).unwrap();
    let exact = dense_ground_state(&m).unwrap().value;
    let r = r.with_exact(exact);
    assert!(r.energy >= exact);
    assert!(r.relative_error.unwrap() < 5e-3);
}
