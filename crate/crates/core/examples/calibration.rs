//! Prints the calibrated quantities the default solver constants were
//! frozen against: the low/high cost asymmetry, the engineered fidelity
//! gap and its dependence on the pressure gradient, and the log-layer
//! match of the sublayer-resolving solver. Run with --release.

use mfscale_core::metrics::{fidelity_gap_report, nearest_neighbor_interpolate, nmae};
use mfscale_core::solver::{
    delta_plus_estimate, generate_pool, law_of_the_wall, solve_case, tau_w_flat_plate,
    FidelityLevel, FlowCase,
};

fn main() {
    println!("== case table: iterations / work / tau gap vs beta ==");
    println!(
        "{:>9} {:>6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "re", "beta", "it_lo", "it_hi", "w_lo", "w_hi", "tau_gap%", "u_gap%"
    );
    for re in [1.2e4, 5e4, 1e5, 2e5, 9e5] {
        for beta in [-0.2, 0.0, 0.25, 0.5] {
            let case = FlowCase::new(re, beta, 0).unwrap();
            let pair = solve_case(&case, FidelityLevel::Low)
                .and_then(|lo| solve_case(&case, FidelityLevel::High).map(|hi| (lo, hi)));
            let (lo, hi) = match pair {
                Ok(p) => p,
                Err(e) => {
                    println!("{:>9.3e} {:>6.2} rejected: {}", re, beta, e);
                    continue;
                }
            };
            let tau_gap = (lo.tau_w - hi.tau_w).abs() / hi.tau_w * 100.0;
            let mapped =
                nearest_neighbor_interpolate(&lo.mesh.node_y, &lo.u, &hi.mesh.node_y).unwrap();
            let u_gap = nmae(&mapped, &hi.u).unwrap() * 100.0;
            println!(
                "{:>9.3e} {:>6.2} {:>9} {:>9} {:>9} {:>9} {:>9.3} {:>9.3}",
                re,
                beta,
                lo.work_units / lo.mesh.n_nodes as u64,
                hi.work_units / hi.mesh.n_nodes as u64,
                lo.work_units,
                hi.work_units,
                tau_gap,
                u_gap
            );
        }
    }

    println!("\n== pool statistics (128 cases, seed 1) ==");
    let pool = generate_pool(128, 1).unwrap();
    println!("pairs kept: {}", pool.len());
    println!("mean cost ratio: {:.4}  (band [2.5, 3.5])", pool.mean_cost_ratio());
    println!(
        "avg work: low {:.1}  high {:.1}",
        pool.cost_model.avg_cost_low, pool.cost_model.avg_cost_high
    );
    let gap = fidelity_gap_report(&pool).unwrap();
    println!(
        "pool gap: nmae_u {:.5}  nmae_tau {:.5}  ratio {:.2}  (need > 5)",
        gap.nmae_u,
        gap.nmae_tau,
        gap.nmae_tau / gap.nmae_u
    );

    println!("\n== pool gap ratio across seeds ==");
    for (n, seed) in [(128usize, 0u64), (128, 1), (128, 2), (128, 3), (611, 7)] {
        let p = generate_pool(n, seed).unwrap();
        let g = fidelity_gap_report(&p).unwrap();
        println!(
            "n {:>4} seed {:>2}: kept {:>4}  cost ratio {:.4}  nmae_u {:.5}  nmae_tau {:.5}  ratio {:.2}",
            n,
            seed,
            p.len(),
            p.mean_cost_ratio(),
            g.nmae_u,
            g.nmae_tau,
            g.nmae_tau / g.nmae_u
        );
    }

    println!("\n== high-fidelity log-layer match at beta = 0 ==");
    for re in [3e4, 1e5, 1e6] {
        let case = FlowCase::new(re, 0.0, 0).unwrap();
        let hi = solve_case(&case, FidelityLevel::High).unwrap();
        let u_tau = hi.tau_w.sqrt();
        let dplus = delta_plus_estimate(re);
        let mut worst: f64 = 0.0;
        let mut n_checked = 0;
        for (y, u) in hi.mesh.node_y.iter().zip(&hi.u) {
            let yp = y * u_tau * re;
            if yp > 30.0 && yp < 0.3 * dplus {
                let u_wall = law_of_the_wall(yp).unwrap() * u_tau;
                worst = worst.max((u - u_wall).abs() / u_wall);
                n_checked += 1;
            }
        }
        let tau0 = tau_w_flat_plate(re);
        println!(
            "re {:>8.1e}: tau_w {:.6} (corr {:.6}, dev {:+.1}%)  log-layer nodes {}  worst dev {:.2}%",
            re,
            hi.tau_w,
            tau0,
            (hi.tau_w / tau0 - 1.0) * 100.0,
            n_checked,
            worst * 100.0
        );
    }

    println!("\n== equilibrium tau agreement and divergence ==");
    for re in [3e4, 2e5] {
        let zero = FlowCase::new(re, 0.0, 0).unwrap();
        let strong = FlowCase::new(re, 0.5, 0).unwrap();
        let gap_of = |case: &FlowCase| {
            let lo = solve_case(case, FidelityLevel::Low).unwrap();
            let hi = solve_case(case, FidelityLevel::High).unwrap();
            (lo.tau_w - hi.tau_w).abs() / hi.tau_w
        };
        let g0 = gap_of(&zero);
        let g5 = gap_of(&strong);
        println!(
            "re {:>8.1e}: gap(0) {:.4}  gap(0.5) {:.4}  ratio {:.1}  (need gap(0) < 0.05, ratio >= 3)",
            re, g0, g5, g5 / g0.max(1e-12)
        );
    }
}
