use phasetip_core::cycles::CycleSearchCfg;
use phasetip_core::integrate::IntegratorConfig;
use phasetip_core::models::{GlyParams, ModelParams, ParamKey};
use phasetip_core::regions::fold_hopf_junction;
use std::time::Instant;

fn main() {
    let params = ModelParams::Gly(GlyParams {
        v: 0.39, sigma_i: 0.52, k_half: 10.0, l: 3.6e6, sigma_m: 10.0, n: 5, q: 1.0, k_s: 0.06,
    });
    let icfg = IntegratorConfig::default();
    let ccfg = CycleSearchCfg::default();
    let axis1: Vec<f64> = (0..13).map(|k| 0.34 + 0.01 * k as f64).collect();
    let t0 = Instant::now();
    match fold_hopf_junction(&params, (ParamKey::V, ParamKey::SigmaI), &axis1, 0.56, &icfg, &ccfg) {
        Ok((v, s)) => {
            let d = ((v - 0.3914_f64).powi(2) + (s - 0.5195_f64).powi(2)).sqrt();
            println!("junction at ({v:.4}, {s:.4}); dist to paper GH = {d:.4}  [{:?}]", t0.elapsed());
        }
        Err(e) => println!("failed: {e} [{:?}]", t0.elapsed()),
    }
}
