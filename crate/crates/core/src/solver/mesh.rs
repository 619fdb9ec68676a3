use crate::error::{Error, Result};

use super::{delta_plus_estimate, u_tau_flat_plate, FidelityLevel, FlowCase, SolverParams};

/// Wall-normal solution-output mesh.
///
/// `node_y[0]` is the first cell center (the wall point y = 0 is not a
/// node); nodes 1.. form a geometric chain from a fidelity-shared chain
/// start up to the slice edge at y = 1. The solver refines each segment
/// internally for quadrature, so `node_y` is where solutions are reported,
/// while accuracy and cost still scale with `n_nodes`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub node_y: Vec<f64>,
    /// Wall distance of the first cell center in wall units, evaluated with
    /// the provisional flat-plate friction velocity available at build time.
    pub first_center_yplus: f64,
    pub n_nodes: usize,
}

impl Mesh {
    /// Checks every structural invariant; used at build time and by tests.
    pub fn validate(&self, fidelity: FidelityLevel) -> Result<()> {
        if self.node_y.len() != self.n_nodes || self.n_nodes < 2 {
            return Err(Error::Contract(format!(
                "mesh claims {} nodes, holds {}",
                self.n_nodes,
                self.node_y.len()
            )));
        }
        for (i, w) in self.node_y.windows(2).enumerate() {
            if !(w[1] > w[0]) {
                return Err(Error::Contract(format!(
                    "node_y not strictly increasing at index {i}"
                )));
            }
        }
        let first = self.node_y[0];
        let last = *self.node_y.last().unwrap();
        if first <= 0.0 || last > 1.0 {
            return Err(Error::Contract(format!(
                "nodes outside (0, 1]: first {first}, last {last}"
            )));
        }
        // Geometric stretching applies from the second node on; the first
        // interval (cell center to chain start) is exempt.
        let chain = &self.node_y[1..];
        if chain.len() >= 3 {
            let r0 = chain[1] / chain[0];
            for w in chain.windows(2) {
                let r = w[1] / w[0];
                if (r - r0).abs() > 1e-9 {
                    return Err(Error::Contract(format!(
                        "chain stretching ratio drifts: {r} vs {r0}"
                    )));
                }
            }
        }
        match fidelity {
            FidelityLevel::High => {
                if self.first_center_yplus >= 1.0 {
                    return Err(Error::Contract(format!(
                        "high-fidelity first cell center y+ = {} not < 1",
                        self.first_center_yplus
                    )));
                }
            }
            FidelityLevel::Low => {
                if !(30.0..=300.0).contains(&self.first_center_yplus) {
                    return Err(Error::Contract(format!(
                        "low-fidelity first cell center y+ = {} outside [30, 300]",
                        self.first_center_yplus
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Default node count per fidelity. The ratio 94/48 ~ 1.96 mirrors the
/// roughly 1.9x node asymmetry of the reference fidelity pair while
/// letting every low chain node coincide with an alternate high chain
/// node (the high chain halves each low chain step).
pub fn default_n_nodes(fidelity: FidelityLevel) -> usize {
    let p = SolverParams::default();
    match fidelity {
        FidelityLevel::Low => p.n_low,
        FidelityLevel::High => p.n_high,
    }
}

/// Target y+ of the low-fidelity first cell center for this case.
pub(crate) fn low_center_yplus(re_delta: f64, p: &SolverParams) -> f64 {
    (p.yplus_low_fraction * delta_plus_estimate(re_delta))
        .clamp(p.yplus_low_min, p.yplus_low_max)
}

/// Builds the output mesh for a fidelity with the default node count.
pub fn build_mesh(case: &FlowCase, fidelity: FidelityLevel, n_nodes: usize) -> Result<Mesh> {
    build_mesh_with(case, fidelity, n_nodes, &SolverParams::default())
}

pub fn build_mesh_with(
    case: &FlowCase,
    fidelity: FidelityLevel,
    n_nodes: usize,
    p: &SolverParams,
) -> Result<Mesh> {
    if n_nodes < 8 {
        return Err(Error::Config(format!(
            "n_nodes = {n_nodes} violates the lower bound n_nodes >= 8"
        )));
    }
    let re = case.re_delta;
    let u_tau0 = u_tau_flat_plate(re);
    let yc_low_plus = low_center_yplus(re, p);
    let yb_plus = p.chain_start_factor * yc_low_plus;
    let y_b = yb_plus / (re * u_tau0);

    let (first, first_yplus) = match fidelity {
        FidelityLevel::High => {
            let yp = p.yplus_high_center;
            (yp / (re * u_tau0), yp)
        }
        FidelityLevel::Low => (yc_low_plus / (re * u_tau0), yc_low_plus),
    };
    if y_b <= first {
        return Err(Error::Config(format!(
            "chain start y = {y_b} does not clear the first cell center {first}; \
             violated bound: chain start > first cell center"
        )));
    }
    if y_b >= 1.0 {
        return Err(Error::Config(format!(
            "chain start y = {y_b} violates the bound chain start < 1"
        )));
    }

    let mut node_y = Vec::with_capacity(n_nodes);
    node_y.push(first);
    let m = n_nodes - 1; // chain nodes from y_b to 1.0
    let ratio = (1.0 / y_b).powf(1.0 / (m as f64 - 1.0));
    for k in 0..m {
        node_y.push(y_b * ratio.powi(k as i32));
    }
    // The closed-form power lands within a few ulp of 1; pin the edge node.
    node_y[n_nodes - 1] = 1.0;

    let mesh = Mesh { node_y, first_center_yplus: first_yplus, n_nodes };
    mesh.validate(fidelity)?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn case(re: f64, beta: f64) -> FlowCase {
        FlowCase::new(re, beta, 0).unwrap()
    }

    #[test]
    fn high_fidelity_first_center_below_one() {
        let m = build_mesh(&case(1e5, 0.0), FidelityLevel::High, 94).unwrap();
        assert!(m.first_center_yplus < 1.0);
        m.validate(FidelityLevel::High).unwrap();
    }

    #[test]
    fn low_fidelity_first_center_in_band() {
        let m = build_mesh(&case(1e5, 0.0), FidelityLevel::Low, 48).unwrap();
        assert!((30.0..=300.0).contains(&m.first_center_yplus));
        m.validate(FidelityLevel::Low).unwrap();
    }

    #[test]
    fn band_holds_across_reynolds_range() {
        for &re in &[1e4, 3e4, 1e5, 3e5, 1e6] {
            let m = build_mesh(&case(re, 0.0), FidelityLevel::Low, 48).unwrap();
            assert!(
                (30.0..=300.0).contains(&m.first_center_yplus),
                "re {re}: y+ {}",
                m.first_center_yplus
            );
            let h = build_mesh(&case(re, 0.0), FidelityLevel::High, 94).unwrap();
            assert!(h.first_center_yplus < 1.0);
        }
    }

    #[test]
    fn chain_ratio_constant_within_tolerance() {
        for fid in FidelityLevel::ALL {
            let m = build_mesh(&case(2e4, 0.3), fid, default_n_nodes(fid)).unwrap();
            let chain = &m.node_y[1..];
            let r0 = chain[1] / chain[0];
            for w in chain.windows(2) {
                assert!((w[1] / w[0] - r0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn edge_node_exactly_one() {
        let m = build_mesh(&case(1e5, 0.0), FidelityLevel::High, 94).unwrap();
        assert_eq!(*m.node_y.last().unwrap(), 1.0);
    }

    #[test]
    fn low_chain_nodes_nest_in_high_chain() {
        // With the default 48/94 split, low chain node k sits on high chain
        // node 2k, so the outer coverage of the two meshes coincides.
        let lo = build_mesh(&case(1e5, 0.0), FidelityLevel::Low, 48).unwrap();
        let hi = build_mesh(&case(1e5, 0.0), FidelityLevel::High, 94).unwrap();
        for k in 0..47 {
            let y_lo = lo.node_y[1 + k];
            let y_hi = hi.node_y[1 + 2 * k];
            assert!(
                ((y_lo - y_hi) / y_lo).abs() < 1e-9,
                "k = {k}: {y_lo} vs {y_hi}"
            );
        }
    }

    #[test]
    fn rejects_too_few_nodes() {
        let err = build_mesh(&case(1e5, 0.0), FidelityLevel::High, 7).unwrap_err();
        assert!(err.to_string().contains("n_nodes >= 8"));
    }

    #[test]
    fn default_node_ratio_near_1_9() {
        let lo = default_n_nodes(FidelityLevel::Low) as f64;
        let hi = default_n_nodes(FidelityLevel::High) as f64;
        let ratio = hi / lo;
        assert!((1.8..=2.0).contains(&ratio), "node ratio {ratio}");
    }
}
