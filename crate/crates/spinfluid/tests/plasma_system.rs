//! Tests for the N-fluid system: decoupling, mean-field contraction,
//! conservation, closed-form two-spin dynamics, and the product-form
//! diagnostics.

use spinfluid::hydro::step_hydro;
use spinfluid::identities::gentle_identity_spinor;
use spinfluid::madelung::forward_transform;
use spinfluid::plasma::{
    assemble_product_diagnostics, homogeneous_two_spin_oracle, interaction_energy_double_sum,
    mean_field_potential, step_plasma, total_plasma_energy, total_spin_moment, InteractionKernel,
    Plasma, Species,
};
use spinfluid::rng::CounterRng;
use spinfluid::{FieldConfig, Grid, HydroState, PhysParams, SpectralOps};

fn species_from_seed(n: usize, l: f64, seed: u64) -> Species {
    let grid = Grid::line(n, l).unwrap();
    let ops = SpectralOps::new(&grid);
    let psi = gentle_identity_spinor(&ops, &CounterRng::new(seed));
    let state = forward_transform(&ops, &psi, &FieldConfig::free(), &PhysParams::natural())
        .unwrap();
    Species {
        ops,
        state,
        params: PhysParams::natural(),
        fields: FieldConfig::free(),
    }
}

fn homogeneous_species(n: usize, l: f64, spin: [f64; 3]) -> Species {
    let grid = Grid::line(n, l).unwrap();
    let ops = SpectralOps::new(&grid);
    Species {
        state: HydroState::uniform(&grid, spin),
        ops,
        params: PhysParams::natural(),
        fields: FieldConfig::free(),
    }
}

#[test]
fn zero_kernel_gives_zero_potential() {
    let plasma = Plasma {
        species: vec![species_from_seed(32, 2.0, 1), species_from_seed(32, 2.0, 2)],
        kernel: InteractionKernel::None,
        dealias: true,
        renormalize_spin: true,
    };
    let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
    let (phi, dphi) = mean_field_potential(&plasma, &states, 0).unwrap();
    assert!(phi.max_abs() == 0.0 && dphi.max_abs() == 0.0);
}

#[test]
fn constant_kernel_is_normalization_count() {
    // V_ij = c with unit species masses: Phi_i = (N - 1) c
    let plasma = Plasma {
        species: vec![species_from_seed(32, 2.0, 1), species_from_seed(32, 2.0, 2)],
        kernel: InteractionKernel::Constant(0.37),
        dealias: true,
        renormalize_spin: true,
    };
    let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
    let (phi, dphi) = mean_field_potential(&plasma, &states, 0).unwrap();
    for v in &phi.data {
        assert!((v - 0.37).abs() < 1e-14);
    }
    assert!(dphi.max_abs() == 0.0);
}

#[test]
fn uniform_spin_spin_potential_is_moment_contraction() {
    // Phi_1 = -J s_1 . <s_2> with <s_2> = int rho_2 s_2 dV
    let j = 0.25;
    let plasma = Plasma {
        species: vec![species_from_seed(48, 2.0, 5), species_from_seed(48, 2.0, 6)],
        kernel: InteractionKernel::SpinSpinUniform { j },
        dealias: true,
        renormalize_spin: true,
    };
    let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
    let (phi, _) = mean_field_potential(&plasma, &states, 0).unwrap();
    // independent quadrature of the moment
    let sp2 = &plasma.species[1];
    let dv = sp2.ops.grid().cell_volume();
    let mut m2 = [0.0; 3];
    for i in 0..sp2.state.rho.len() {
        for c in 0..3 {
            m2[c] += sp2.state.rho.data[i] * sp2.state.s.comps[c][i] * dv;
        }
    }
    for i in 0..phi.len() {
        let s1 = states[0].s.at(i);
        let expected = -j * (s1[0] * m2[0] + s1[1] * m2[1] + s1[2] * m2[2]);
        assert!((phi.data[i] - expected).abs() < 1e-14);
    }
}

#[test]
fn decoupled_plasma_is_bitwise_standalone() {
    let mut plasma = Plasma {
        species: vec![species_from_seed(48, 2.0, 7), species_from_seed(48, 2.0, 8)],
        kernel: InteractionKernel::None,
        dealias: true,
        renormalize_spin: true,
    };
    let standalone: Vec<HydroState> = plasma
        .species
        .iter()
        .map(|sp| {
            let mut st = sp.state.clone();
            for _ in 0..5 {
                let (next, _) =
                    step_hydro(&sp.ops, &st, &sp.fields, &sp.params, 1e-3, true, true).unwrap();
                st = next;
            }
            st
        })
        .collect();
    for step in 0..5 {
        let _ = step;
        step_plasma(&mut plasma, 1e-3, 0.0).unwrap();
    }
    for (sp, exp) in plasma.species.iter().zip(&standalone) {
        assert_eq!(sp.state.rho.data, exp.rho.data, "rho not bitwise equal");
        for c in 0..3 {
            assert_eq!(sp.state.u.comps[c], exp.u.comps[c], "u not bitwise equal");
            assert_eq!(sp.state.s.comps[c], exp.s.comps[c], "s not bitwise equal");
        }
    }
}

#[test]
fn homogeneous_two_spin_dynamics_matches_closed_form() {
    let j = 0.4;
    let s1 = [0.8, 0.0, 0.6];
    let s2 = [0.0, 0.6, -0.8];
    let mut plasma = Plasma {
        species: vec![
            homogeneous_species(16, 2.0, s1),
            homogeneous_species(16, 2.0, s2),
        ],
        kernel: InteractionKernel::SpinSpinUniform { j },
        dealias: false,
        renormalize_spin: true,
    };
    let m0 = total_spin_moment(&plasma);
    let dt = 1e-3;
    let steps = 2000;
    for _ in 0..steps {
        step_plasma(&mut plasma, dt, 0.0).unwrap();
    }
    let t = dt * steps as f64;
    let params = &plasma.species[0].params;
    let (s1_t, s2_t) = homogeneous_two_spin_oracle(s1, s2, j, params.c_g, params.hbar, t);
    for (sp, expected) in plasma.species.iter().zip([s1_t, s2_t]) {
        let got = sp.state.s.at(0);
        for c in 0..3 {
            assert!(
                (got[c] - expected[c]).abs() < 1e-9,
                "spin component {c}: {} vs {}",
                got[c],
                expected[c]
            );
        }
    }
    // total moment conserved (mutual torques cancel by symmetry)
    let m1 = total_spin_moment(&plasma);
    for c in 0..3 {
        assert!((m1[c] - m0[c]).abs() < 1e-8, "moment drift {}", (m1[c] - m0[c]).abs());
    }
}

#[test]
fn coupled_energy_is_conserved() {
    let mut plasma = Plasma {
        species: vec![species_from_seed(48, 2.0, 11), species_from_seed(48, 2.0, 12)],
        kernel: InteractionKernel::SpinSpinUniform { j: 0.1 },
        dealias: true,
        renormalize_spin: true,
    };
    plasma.validate().unwrap();
    let e0 = total_plasma_energy(&plasma).unwrap();
    for _ in 0..200 {
        step_plasma(&mut plasma, 2e-4, 0.0).unwrap();
    }
    let e1 = total_plasma_energy(&plasma).unwrap();
    let drift = (e1 - e0).abs() / e0.abs();
    assert!(drift < 1e-6, "energy drift {drift}");
}

#[test]
fn interaction_energy_dual_forms_agree() {
    for kernel in [
        InteractionKernel::SpinSpinUniform { j: 0.3 },
        InteractionKernel::Constant(0.2),
    ] {
        let plasma = Plasma {
            species: vec![species_from_seed(48, 2.0, 13), species_from_seed(48, 2.0, 14)],
            kernel,
            dealias: true,
            renormalize_spin: true,
        };
        let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
        let mut phi_form = 0.0;
        for (i, sp) in plasma.species.iter().enumerate() {
            let (phi, _) = mean_field_potential(&plasma, &states, i).unwrap();
            let mut density = spinfluid::ScalarField::zeros(sp.ops.grid());
            for p in 0..density.len() {
                density.data[p] = sp.state.rho.data[p] * phi.data[p];
            }
            phi_form += 0.5 * sp.ops.integrate(&density);
        }
        let double_sum = interaction_energy_double_sum(&plasma).unwrap();
        assert!(
            (phi_form - double_sum).abs() < 1e-12,
            "{phi_form} vs {double_sum}"
        );
    }
}

#[test]
fn species_interchange_commutes_with_evolution() {
    // symmetric initial data and kernel: swapping species labels commutes
    // with stepping to round-off
    let make = |seed_a: u64, seed_b: u64| -> Plasma {
        Plasma {
            species: vec![
                species_from_seed(32, 2.0, seed_a),
                species_from_seed(32, 2.0, seed_b),
            ],
            kernel: InteractionKernel::SpinSpinUniform { j: 0.2 },
            dealias: false,
            renormalize_spin: true,
        }
    };
    let mut forward = make(21, 22);
    let mut swapped = make(22, 21);
    for _ in 0..20 {
        step_plasma(&mut forward, 5e-4, 0.0).unwrap();
        step_plasma(&mut swapped, 5e-4, 0.0).unwrap();
    }
    for c in 0..3 {
        for i in 0..forward.species[0].state.rho.len() {
            let a = forward.species[0].state.s.comps[c][i];
            let b = swapped.species[1].state.s.comps[c][i];
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn product_diagnostics_equilibrium_and_generic() {
    // equilibrium: all residuals at round-off
    let eq = Plasma {
        species: vec![
            homogeneous_species(16, 2.0, [0.0, 0.0, 1.0]),
            homogeneous_species(16, 2.0, [1.0, 0.0, 0.0]),
        ],
        kernel: InteractionKernel::None,
        dealias: false,
        renormalize_spin: true,
    };
    let report = assemble_product_diagnostics(&eq).unwrap();
    assert!(report.continuity_max_residual < 1e-13);
    assert!(report.momentum_max_residual < 1e-13);
    assert!(report.torque_max_residual < 1e-13);
    assert!((report.product_mass - 1.0).abs() < 1e-12);

    // generic coupled state
    let coupled = Plasma {
        species: vec![species_from_seed(32, 2.0, 31), species_from_seed(32, 2.0, 32)],
        kernel: InteractionKernel::SpinSpinUniform { j: 0.1 },
        dealias: false,
        renormalize_spin: true,
    };
    let report = assemble_product_diagnostics(&coupled).unwrap();
    assert!(
        report.continuity_max_residual < 1e-9,
        "continuity residual {}",
        report.continuity_max_residual
    );
    assert!(report.momentum_max_residual < 1e-9);
    assert!(report.torque_max_residual < 1e-9);
    assert!((report.product_mass - 1.0).abs() < 1e-10);
    assert_eq!(report.cells, 32 * 32);
}

#[test]
fn product_budget_is_enforced() {
    let big = Plasma {
        species: vec![
            homogeneous_species(64, 2.0, [0.0, 0.0, 1.0]),
            homogeneous_species(64, 2.0, [0.0, 0.0, 1.0]),
        ],
        kernel: InteractionKernel::None,
        dealias: false,
        renormalize_spin: true,
    };
    let err = assemble_product_diagnostics(&big).unwrap_err();
    assert!(err.to_string().contains("budget"), "{err}");
}

#[test]
fn convolution_kernel_runs_and_conserves_energy() {
    let grid = Grid::line(48, 2.0).unwrap();
    let w = spinfluid::ScalarField::from_fn(&grid, |x| {
        let d = (x[0] - 1.0).abs().min(2.0 - (x[0] - 1.0).abs());
        (-d * d / 0.08).exp()
    });
    let mut plasma = Plasma {
        species: vec![species_from_seed(48, 2.0, 41), species_from_seed(48, 2.0, 42)],
        kernel: InteractionKernel::SpinSpinConvolution { j: 0.15, w },
        dealias: true,
        renormalize_spin: true,
    };
    plasma.validate().unwrap();
    let e0 = total_plasma_energy(&plasma).unwrap();
    let dual0 = interaction_energy_double_sum(&plasma).unwrap();
    // dual-form consistency for the convolution kernel as well
    let states: Vec<HydroState> = plasma.species.iter().map(|s| s.state.clone()).collect();
    let mut phi_form = 0.0;
    for (i, sp) in plasma.species.iter().enumerate() {
        let (phi, _) = mean_field_potential(&plasma, &states, i).unwrap();
        let mut density = spinfluid::ScalarField::zeros(sp.ops.grid());
        for p in 0..density.len() {
            density.data[p] = sp.state.rho.data[p] * phi.data[p];
        }
        phi_form += 0.5 * sp.ops.integrate(&density);
    }
    assert!((phi_form - dual0).abs() < 1e-12);
    for _ in 0..100 {
        step_plasma(&mut plasma, 2e-4, 0.0).unwrap();
    }
    let e1 = total_plasma_energy(&plasma).unwrap();
    assert!((e1 - e0).abs() / e0.abs() < 1e-6, "drift {}", (e1 - e0).abs() / e0.abs());
}
