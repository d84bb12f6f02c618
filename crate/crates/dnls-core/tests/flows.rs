mod common;

use std::f64::consts::PI;

use common::smooth_field;
use dnls_core::flows::{evolve, export_trajectory, flow_map, Flow, FlowConfig, MONITOR_BASE_COLUMNS};
use dnls_core::{FieldState, Grid, KappaSet};
use num_complex::Complex64;

fn single_mode(grid: Grid, m: i64, amp: Complex64) -> FieldState {
    let mut c = vec![Complex64::new(0.0, 0.0); grid.modes()];
    c[grid.index(m).unwrap()] = amp;
    FieldState::from_coefficients(grid, c).unwrap()
}

/// A e^{i(kx − ωt)} with ω = k² + k|A|² solves q_t = i q_xx − (|q|²q)_x.
#[test]
fn plane_wave_rotates_at_the_dispersion_frequency() {
    let g = Grid::new(32, 2.0 * PI).unwrap();
    let amp = Complex64::new(0.6, 0.3);
    let q0 = single_mode(g, 3, amp);
    let t = 0.5;
    let got = flow_map(&q0, Flow::Dnls, 1.0, 1e-3, t, 2.0).unwrap();
    let k = 3.0;
    let omega = k * k + k * amp.norm_sqr();
    let want = single_mode(g, 3, amp * Complex64::from_polar(1.0, -omega * t));
    assert!(got.l2_distance(&want) < 1e-10, "{}", got.l2_distance(&want));
}

#[test]
fn dnls_step_error_is_fourth_order() {
    let q0 = smooth_field(Grid::new(64, 2.0 * PI).unwrap(), 5, 0.5, 1.0, 11);
    let t = 0.2;
    let reference = flow_map(&q0, Flow::Dnls, 1.0, 2.5e-4, t, 2.0).unwrap();
    let err = |dt: f64| flow_map(&q0, Flow::Dnls, 1.0, dt, t, 2.0).unwrap().l2_distance(&reference);
    let (coarse, fine) = (err(4e-3), err(2e-3));
    let order = (coarse / fine).log2();
    assert!((3.5..4.6).contains(&order), "observed order {order:.2} ({coarse:.2e}, {fine:.2e})");
}

#[test]
fn flows_commute_with_phase_rotation() {
    let q0 = smooth_field(Grid::unit(64).unwrap(), 4, 0.5, 0.5, 3);
    let phase = Complex64::from_polar(1.0, 1.1);
    for flow in [Flow::Dnls, Flow::Hk, Flow::Diff] {
        let a = flow_map(&q0.scaled(phase), flow, 16.0, 1e-3, 0.02, 4.0).unwrap();
        let b = flow_map(&q0, flow, 16.0, 1e-3, 0.02, 4.0).unwrap().scaled(phase);
        assert!(a.l2_distance(&b) < 1e-12 * q0.l2_norm(), "{flow:?}");
    }
}

/// Translation invariance keeps a single Fourier mode single under every
/// flow, and mass conservation pins its modulus.
#[test]
fn single_mode_keeps_its_modulus() {
    let g = Grid::unit(32).unwrap();
    let amp = Complex64::new(0.2, -0.1);
    let q0 = single_mode(g, 2, amp);
    for flow in [Flow::Hk, Flow::Diff] {
        let q = flow_map(&q0, flow, 8.0, 1e-3, 0.05, 4.0).unwrap();
        let stray: f64 = (0..g.modes())
            .filter(|&i| g.wavenumber(i) != 2)
            .map(|i| q.coefficients()[i].norm())
            .fold(0.0, f64::max);
        assert!(stray < 1e-14, "{flow:?}: {stray:e}");
        assert!((q.coefficient(2).norm() - amp.norm()).abs() < 1e-12, "{flow:?}");
    }
}

#[test]
fn hk_flow_conserves_mass_and_probes() {
    let q0 = smooth_field(Grid::unit(64).unwrap(), 4, 0.5, 0.8, 5);
    let cfg = FlowConfig::new(Flow::Hk, 5e-4, 0.05)
        .with_kappa(16.0)
        .with_probes(KappaSet::new(vec![8.0, 32.0]).unwrap())
        .with_stride(10);
    let traj = evolve(&q0, &cfg).unwrap();
    assert!(traj.halted.is_none());
    let first = &traj.monitors[0];
    for r in &traj.monitors {
        // mass is conserved up to the RK4 step error
        assert!((r.m - first.m).abs() < 1e-8 * first.m, "mass {} vs {}", r.m, first.m);
        for k in [8.0, 32.0] {
            let (a, a0) = (r.a_at(k).unwrap(), first.a_at(k).unwrap());
            assert!((a - a0).norm() < 1e-8 * a0.norm(), "kappa {k}");
        }
    }
}

#[test]
fn exported_monitors_have_one_row_per_record() {
    let q0 = smooth_field(Grid::new(64, 4.0).unwrap(), 3, 0.5, 0.5, 9);
    let cfg = FlowConfig::new(Flow::Dnls, 1e-3, 0.01)
        .with_probes(KappaSet::new(vec![2.0]).unwrap())
        .with_stride(5);
    let traj = evolve(&q0, &cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    export_trajectory(&traj, dir.path()).unwrap();
    let text = std::fs::read_to_string(dir.path().join("monitors.csv")).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&header[..4], &MONITOR_BASE_COLUMNS);
    assert_eq!(header.len(), 7);
    assert_eq!(lines.count(), traj.times.len());
    assert_eq!(traj.times, vec![0.0, 0.005, 0.01]);
    assert!(dir.path().join("snap_000002.bin").exists());
}
