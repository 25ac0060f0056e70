use ovlab_core::fields::{ModelParams, SymTensorField};
use ovlab_core::initial;
use ovlab_core::solver::*;
use ovlab_core::spectral::Grid;

fn main() {
    let g = Grid::new(64, 64).unwrap();
    let u0 = initial::random_smooth_velocity(&g, 2024, 1.0, 4).unwrap();
    for prep in ["well-prepared", "zero", "random"] {
        let mut etotals = Vec::new();
        for eps in [0.1f64, 0.05, 0.025] {
            let tau0 = match prep {
                "well-prepared" => initial::well_prepared_stress(&u0),
                "zero" => SymTensorField::zeros(&g),
                _ => initial::random_smooth_stress(&g, 77, 1.0, 4).unwrap(),
            };
            let params = ModelParams { epsilon: eps, voigt: true, ..Default::default() };
            let state = SimState::new(u0.clone(), tau0, params).unwrap();
            let cfg = StepperConfig { dt: 1e-2, eps_dt_cap_factor: 1.0, ..Default::default() };
            let te = eps.powf(-2.0/3.0);
            let out = run(SystemKind::VoigtOldroydB, state, &cfg, &RunOptions { t_end: te, ..Default::default() }, &mut NullObserver).unwrap();
            assert!(out.blowup.is_none());
            etotals.push(out.ledger.e_total());
        }
        let max = etotals.iter().cloned().fold(f64::MIN, f64::max);
        let min = etotals.iter().cloned().fold(f64::MAX, f64::min);
        println!("{prep}: E_totals = {:?} ratio = {:.3}", etotals.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>(), max/min);
    }
}
