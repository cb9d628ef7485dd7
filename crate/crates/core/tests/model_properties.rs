use proptest::prelude::*;
use transmon_core::model::{build_gr, couple_with_resonator};
use transmon_core::spectra::{
    eigenvalues, invert_closed_form, invert_parameters, refine_parameters, spectral_features,
    Measurements,
};
use transmon_core::system::System;
use transmon_core::{EnergyParams, ModelSpec, Variant};

const REFERENCE: EnergyParams = EnergyParams::REFERENCE;

fn params(ec: f64, ratio: f64, g: f64) -> EnergyParams {
    EnergyParams::new(ec, ec * ratio, g, 6.99).unwrap()
}

fn small_spec(v: Variant) -> ModelSpec {
    let spec = ModelSpec::default_for(v).with_resonator_levels(3);
    match v {
        Variant::Cpb => spec.with_charge_cutoff(12).with_transmon_levels(6),
        Variant::R => spec,
        _ => spec.with_transmon_levels(6),
    }
}

#[test]
fn cpb_spectrum_is_converged_in_charge_cutoff() {
    let a = spectral_features(&ModelSpec::default_for(Variant::Cpb).with_charge_cutoff(30), &REFERENCE).unwrap();
    let b = spectral_features(&ModelSpec::default_for(Variant::Cpb).with_charge_cutoff(40), &REFERENCE).unwrap();
    assert!((a.omega01 - b.omega01).abs() < 1e-9);
    assert!((a.anharmonicity.unwrap() - b.anharmonicity.unwrap()).abs() < 1e-9);
}

#[test]
fn uncoupled_gr_reproduces_closed_forms() {
    let f = spectral_features(&ModelSpec::default_for(Variant::Gr), &REFERENCE.with_g(0.0)).unwrap();
    let expected = (8.0 * REFERENCE.ec * REFERENCE.ej).sqrt() - REFERENCE.ec;
    assert!((f.omega01 - expected).abs() < 1e-9);
    assert!((f.omega01 - 4.9699).abs() < 1e-4);
    assert!((f.anharmonicity.unwrap() + REFERENCE.ec).abs() < 1e-9);
}

#[test]
fn do3_tracks_cpb_within_measured_bands() {
    let cpb = spectral_features(&ModelSpec::default_for(Variant::Cpb), &REFERENCE).unwrap();
    let do3 = spectral_features(&ModelSpec::default_for(Variant::Do3), &REFERENCE).unwrap();
    assert!((cpb.omega01 - do3.omega01).abs() < 3e-3);
    assert!((cpb.anharmonicity.unwrap() - do3.anharmonicity.unwrap()).abs() < 25e-3);
}

#[test]
fn cpb_drive_elements_are_nearest_neighbour() {
    let sys = System::build(&ModelSpec::default_for(Variant::Cpb), &REFERENCE.with_g(0.0)).unwrap();
    let n_r = sys.resonator_levels();
    let d = sys.drive().matrix();
    let prefactor = REFERENCE.eta().charge_prefactor();
    for j in 0..2 {
        let nn = d[(j * n_r, (j + 1) * n_r)].norm();
        let nnn = d[(j * n_r, (j + 2) * n_r)].norm();
        let harmonic = ((j + 1) as f64).sqrt() * prefactor;
        assert!((nn - harmonic).abs() < 0.1 * harmonic, "j={j}: {nn} vs {harmonic}");
        assert!(nnn < 0.05 * nn, "j={j}: {nnn} vs {nn}");
    }
}

#[test]
fn closed_form_inversion_is_dispersive_estimate() {
    let spec = ModelSpec::default_for(Variant::Gr);
    let f = spectral_features(&spec, &REFERENCE).unwrap();
    let m = Measurements::from_features(&f, REFERENCE.omega_r).unwrap();
    let p = invert_parameters(&m, &spec).unwrap();
    assert!(((p.ec - REFERENCE.ec) / REFERENCE.ec).abs() < 1e-3);
    assert!(((p.ej - REFERENCE.ej) / REFERENCE.ej).abs() < 1e-3);
    assert!(((p.g - REFERENCE.g) / REFERENCE.g).abs() < 0.03);
}

#[test]
fn inversion_round_trip_recovers_reference_params() {
    for v in [Variant::Cpb, Variant::Do3, Variant::Gr] {
        let spec = ModelSpec::default_for(v);
        let f = spectral_features(&spec, &REFERENCE).unwrap();
        let m = Measurements::from_features(&f, REFERENCE.omega_r).unwrap();
        let p = refine_parameters(&m, &spec, &invert_closed_form(&m).unwrap()).unwrap();
        for (got, want) in [(p.ec, REFERENCE.ec), (p.ej, REFERENCE.ej), (p.g, REFERENCE.g)] {
            assert!(((got - want) / want).abs() < 1e-3, "{v}: {got} vs {want}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn coupled_hamiltonians_are_hermitian(ec in 0.2f64..0.5, ratio in 20.0f64..100.0, g in 0.0f64..0.05) {
        let p = params(ec, ratio, g);
        for v in Variant::ALL {
            let sys = System::build(&small_spec(v), &p).unwrap();
            prop_assert!(sys.h0().residual() < 1e-12, "{v}: {}", sys.h0().residual());
            prop_assert!(sys.drive().residual() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_spectrum_is_tensor_sum(ec in 0.2f64..0.5, ratio in 20.0f64..100.0) {
        let p = params(ec, ratio, 0.0);
        for v in Variant::ALL {
            let sys = System::build(&small_spec(v), &p).unwrap();
            let mut sums: Vec<f64> = sys
                .transmon_energies()
                .iter()
                .flat_map(|e| (0..sys.resonator_levels()).map(move |k| e + k as f64 * p.omega_r))
                .collect();
            sums.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let got = eigenvalues(sys.h0()).unwrap();
            for (a, b) in got.iter().zip(&sums) {
                prop_assert!((a - b).abs() < 1e-9 * (1.0 + b.abs()), "{v}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn gr_coupling_phase_is_a_gauge_choice(ec in 0.2f64..0.5, ratio in 20.0f64..100.0, g in 0.001f64..0.05) {
        let p = params(ec, ratio, g);
        let n_t = 6;
        let h = build_gr(&p, Variant::Gr, n_t).unwrap();
        let position = couple_with_resonator(&h, &ModelSpec::new(Variant::Gr, n_t, 4).unwrap(), &p).unwrap();
        let momentum = couple_with_resonator(&h, &ModelSpec::new(Variant::Do3, n_t, 4).unwrap(), &p).unwrap();
        let a = eigenvalues(&position).unwrap();
        let b = eigenvalues(&momentum).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}");
        }
    }
}
