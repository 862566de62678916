use kpeaks_core::radial::*;

fn main() {
    let cfg = ShootingConfig::default();
    // bypass the residual gate: record but don't enforce
    let gs = match solve_ground_state(1.0f64, 3.0, 1e-2, &cfg) {
        Ok(g) => g,
        Err(e) => { eprintln!("{e}"); return; }
    };
    let p = &gs.profile;
    let n = p.grid.len();
    println!("n = {n}, u0 = {:.15}, anchor = {}", gs.u0, p.tail.anchor);
    let mut worst = (0usize, 0.0f64);
    for i in 1..n-1 {
        let lo = i.saturating_sub(2).min(n-5);
        let xs = &p.grid.nodes[lo..lo+5];
        let us = &p.values[lo..lo+5];
        let w1 = fd_weights::<f64,5>(p.grid.nodes[i], xs, 1);
        let w2 = fd_weights::<f64,5>(p.grid.nodes[i], xs, 2);
        let mut d1 = 0.0; let mut d2 = 0.0;
        for k in 0..5 { d1 += w1[k]*us[k]; d2 += w2[k]*us[k]; }
        let r = p.grid.nodes[i];
        let res = (-d2 - 2.0/r*d1 + p.values[i] - p.values[i].powi(3)).abs();
        if res > worst.1 { worst = (i, res); }
        if i % 120 == 0 || res > 1e-7 {
            println!("i={i:4} r={r:10.5} h={:9.3e} u={:12.5e} res={res:9.3e}", p.grid.nodes[i+1]-p.grid.nodes[i], p.values[i]);
        }
    }
    println!("worst: i={} r={} res={:e}", worst.0, p.grid.nodes[worst.0], worst.1);
}
