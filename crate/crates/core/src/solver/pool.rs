use std::fs;
use std::io::Write as _;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::compose::CostModel;
use crate::error::{Error, Result};

use super::{
    solve_case_with, FidelityLevel, FieldSolution, FlowCase, Mesh, SolverParams, BETA_P_MAX,
    BETA_P_MIN, RE_DELTA_MAX, RE_DELTA_MIN,
};

/// One matched pair of solutions for a case.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolPair {
    pub case: FlowCase,
    pub low: FieldSolution,
    pub high: FieldSolution,
}

impl PoolPair {
    pub fn solution(&self, fidelity: FidelityLevel) -> &FieldSolution {
        match fidelity {
            FidelityLevel::Low => &self.low,
            FidelityLevel::High => &self.high,
        }
    }
}

/// The population of matched low/high-fidelity solved cases available for
/// composition, ordered by case_id.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePool {
    pub pairs: Vec<PoolPair>,
    pub cost_model: CostModel,
    /// Generation inputs kept for manifest identity and sweep resume checks.
    pub requested_cases: usize,
    pub seed: u64,
}

impl SamplePool {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, case_id: u32) -> Option<&PoolPair> {
        self.pairs.iter().find(|p| p.case.case_id == case_id)
    }

    pub fn mean_cost_ratio(&self) -> f64 {
        let (lo, hi) = self.pairs.iter().fold((0.0, 0.0), |(l, h), p| {
            (l + p.low.work_units as f64, h + p.high.work_units as f64)
        });
        hi / lo
    }

    pub fn total_cost(&self, fidelity: FidelityLevel) -> f64 {
        self.pairs
            .iter()
            .map(|p| p.solution(fidelity).work_units as f64)
            .sum()
    }

    /// Full invariant check for calibrated default pools: matched converged
    /// pairs and the engineered mean cost asymmetry.
    pub fn validate(&self) -> Result<()> {
        if self.pairs.len() < 2 {
            return Err(Error::PoolGeneration(format!(
                "pool holds {} pairs, need at least 2",
                self.pairs.len()
            )));
        }
        for p in &self.pairs {
            if !p.low.converged || !p.high.converged {
                return Err(Error::PoolGeneration(format!(
                    "case {} kept an unconverged solution",
                    p.case.case_id
                )));
            }
        }
        let ratio = self.mean_cost_ratio();
        if !(2.5..=3.5).contains(&ratio) {
            return Err(Error::PoolGeneration(format!(
                "mean cost ratio {ratio} outside the calibrated band [2.5, 3.5]"
            )));
        }
        Ok(())
    }
}

/// Samples cases (Re log-uniform, beta_p uniform), solves both fidelities
/// in parallel, drops pairs where either solve is rejected or unconverged,
/// and records the realized cost model. Deterministic given the seed.
pub fn generate_pool(n_cases: usize, seed: u64) -> Result<SamplePool> {
    generate_pool_with(n_cases, seed, &SolverParams::default())
}

pub fn generate_pool_with(n_cases: usize, seed: u64, p: &SolverParams) -> Result<SamplePool> {
    if n_cases < 2 {
        return Err(Error::PoolGeneration(format!(
            "n_cases = {n_cases}, need at least 2"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln_lo = RE_DELTA_MIN.ln();
    let ln_hi = RE_DELTA_MAX.ln();
    let cases: Vec<FlowCase> = (0..n_cases)
        .map(|i| {
            let re = rng.random_range(ln_lo..ln_hi).exp();
            let beta = rng.random_range(BETA_P_MIN..BETA_P_MAX);
            FlowCase::new(re, beta, i as u32).expect("sampled case inside admissible box")
        })
        .collect();

    let pairs: Vec<Option<PoolPair>> = cases
        .par_iter()
        .map(|case| {
            let low = solve_case_with(case, FidelityLevel::Low, p).ok()?;
            let high = solve_case_with(case, FidelityLevel::High, p).ok()?;
            if !low.converged || !high.converged {
                return None;
            }
            Some(PoolPair { case: *case, low, high })
        })
        .collect();
    let pairs: Vec<PoolPair> = pairs.into_iter().flatten().collect();

    if pairs.len() < 2 {
        return Err(Error::PoolGeneration(format!(
            "only {} of {n_cases} cases converged at both fidelities",
            pairs.len()
        )));
    }
    let n = pairs.len() as f64;
    let avg_low = pairs.iter().map(|p| p.low.work_units as f64).sum::<f64>() / n;
    let avg_high = pairs.iter().map(|p| p.high.work_units as f64).sum::<f64>() / n;
    let cost_model = CostModel::new(avg_low, avg_high)?;
    Ok(SamplePool { pairs, cost_model, requested_cases: n_cases, seed })
}

// ---------------------------------------------------------------------------
// Persistence: a JSON manifest plus one CSV field file per (case, fidelity).
// Field file columns: node_y,u,tau_w (tau_w repeated on every row so each
// file is self-contained). Numbers use shortest round-trip formatting, so
// identical pools serialize byte-identically.
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize, Deserialize)]
struct ManifestSolution {
    path: String,
    n_nodes: usize,
    first_center_yplus: f64,
    tau_w: f64,
    work_units: u64,
    converged: bool,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestPair {
    case_id: u32,
    re_delta: f64,
    beta_p: f64,
    low: ManifestSolution,
    high: ManifestSolution,
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    requested_cases: usize,
    seed: u64,
    cost_model: CostModel,
    pairs: Vec<ManifestPair>,
}

fn field_file_name(case_id: u32, fidelity: FidelityLevel) -> String {
    format!("fields/case_{case_id:04}_{}.csv", fidelity.tag())
}

fn write_field_file(dir: &Path, sol: &FieldSolution) -> Result<String> {
    let rel = field_file_name(sol.case.case_id, sol.fidelity);
    let path = dir.join(&rel);
    let mut body = String::with_capacity(sol.mesh.n_nodes * 48);
    body.push_str("node_y,u,tau_w\n");
    for (y, u) in sol.mesh.node_y.iter().zip(&sol.u) {
        body.push_str(&format!("{y},{u},{}\n", sol.tau_w));
    }
    let mut f = fs::File::create(&path)?;
    f.write_all(body.as_bytes())?;
    Ok(rel)
}

fn manifest_entry(dir: &Path, sol: &FieldSolution) -> Result<ManifestSolution> {
    let path = write_field_file(dir, sol)?;
    Ok(ManifestSolution {
        path,
        n_nodes: sol.mesh.n_nodes,
        first_center_yplus: sol.mesh.first_center_yplus,
        tau_w: sol.tau_w,
        work_units: sol.work_units,
        converged: sol.converged,
    })
}

/// Writes `manifest.json` plus `fields/` under `dir`.
pub fn save_pool(pool: &SamplePool, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir.join("fields"))?;
    let mut pairs = Vec::with_capacity(pool.pairs.len());
    for p in &pool.pairs {
        pairs.push(ManifestPair {
            case_id: p.case.case_id,
            re_delta: p.case.re_delta,
            beta_p: p.case.beta_p,
            low: manifest_entry(dir, &p.low)?,
            high: manifest_entry(dir, &p.high)?,
        });
    }
    let manifest = Manifest {
        requested_cases: pool.requested_cases,
        seed: pool.seed,
        cost_model: pool.cost_model.clone(),
        pairs,
    };
    let mut body = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Error::Parse(format!("manifest encode: {e}")))?;
    body.push('\n');
    fs::write(dir.join("manifest.json"), body)?;
    Ok(())
}

fn read_field_file(path: &Path) -> Result<(Vec<f64>, Vec<f64>, f64)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "node_y,u,tau_w")) => {}
        other => {
            return Err(Error::Parse(format!(
                "{}: line 1: expected header node_y,u,tau_w, got {:?}",
                path.display(),
                other.map(|(_, l)| l)
            )))
        }
    }
    let mut node_y = Vec::new();
    let mut u = Vec::new();
    let mut tau_w = f64::NAN;
    for (idx, line) in lines {
        let mut cols = line.split(',');
        let parse = |s: Option<&str>, what: &str| -> Result<f64> {
            s.and_then(|v| v.parse::<f64>().ok()).ok_or_else(|| {
                Error::Parse(format!(
                    "{}: line {}: bad {what}",
                    path.display(),
                    idx + 1
                ))
            })
        };
        node_y.push(parse(cols.next(), "node_y")?);
        u.push(parse(cols.next(), "u")?);
        tau_w = parse(cols.next(), "tau_w")?;
    }
    Ok((node_y, u, tau_w))
}

fn load_solution(
    dir: &Path,
    case: FlowCase,
    fidelity: FidelityLevel,
    m: &ManifestSolution,
) -> Result<FieldSolution> {
    let (node_y, u, tau_w) = read_field_file(&dir.join(&m.path))?;
    if node_y.len() != m.n_nodes {
        return Err(Error::Parse(format!(
            "{}: holds {} nodes, manifest says {}",
            m.path,
            node_y.len(),
            m.n_nodes
        )));
    }
    if (tau_w - m.tau_w) != 0.0 {
        return Err(Error::Parse(format!(
            "{}: tau_w column {tau_w} disagrees with manifest {}",
            m.path, m.tau_w
        )));
    }
    let mesh = Mesh {
        node_y,
        first_center_yplus: m.first_center_yplus,
        n_nodes: m.n_nodes,
    };
    mesh.validate(fidelity)?;
    Ok(FieldSolution {
        case,
        fidelity,
        mesh,
        u,
        tau_w: m.tau_w,
        work_units: m.work_units,
        converged: m.converged,
    })
}

pub fn load_pool(dir: &Path) -> Result<SamplePool> {
    let text = fs::read_to_string(dir.join("manifest.json"))?;
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("manifest.json: {e}")))?;
    let mut pairs = Vec::with_capacity(manifest.pairs.len());
    for mp in &manifest.pairs {
        let case = FlowCase::new(mp.re_delta, mp.beta_p, mp.case_id)?;
        pairs.push(PoolPair {
            case,
            low: load_solution(dir, case, FidelityLevel::Low, &mp.low)?,
            high: load_solution(dir, case, FidelityLevel::High, &mp.high)?,
        });
    }
    Ok(SamplePool {
        pairs,
        cost_model: manifest.cost_model,
        requested_cases: manifest.requested_cases,
        seed: manifest.seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_pool_of_two() {
        let pool = generate_pool(2, 11).unwrap();
        assert!(pool.len() >= 2);
        for p in &pool.pairs {
            assert!(p.low.converged && p.high.converged);
            assert_eq!(p.case.case_id, p.low.case.case_id);
        }
    }

    #[test]
    fn rejects_degenerate_request() {
        assert!(generate_pool(1, 0).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let a = generate_pool(6, 42).unwrap();
        let b = generate_pool(6, 42).unwrap();
        assert_eq!(a, b);
        let c = generate_pool(6, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn cost_ratio_in_calibrated_band() {
        let pool = generate_pool(24, 3).unwrap();
        let ratio = pool.mean_cost_ratio();
        assert!(
            (2.5..=3.5).contains(&ratio),
            "mean cost ratio {ratio} outside [2.5, 3.5]"
        );
    }

    #[test]
    fn roundtrip_and_byte_identical_manifests() {
        let pool = generate_pool(4, 9).unwrap();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        save_pool(&pool, d1.path()).unwrap();
        save_pool(&pool, d2.path()).unwrap();
        let m1 = std::fs::read(d1.path().join("manifest.json")).unwrap();
        let m2 = std::fs::read(d2.path().join("manifest.json")).unwrap();
        assert_eq!(m1, m2);
        let loaded = load_pool(d1.path()).unwrap();
        assert_eq!(loaded, pool);
    }
}
