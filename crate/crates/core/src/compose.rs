//! Budget-constrained dataset composition.
//!
//! A composition request is (D_b, D_c): a total cost budget and a target
//! high-fidelity share. Counts are first estimated from the pool's average
//! per-sample costs, drawn at random, then repaired against realized costs
//! and greedily topped up. The result is always feasible (total cost within
//! budget) and maximal (no remaining sample fits the slack).

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solver::{FidelityLevel, SamplePool};

/// Realized average per-sample costs of a pool, in work units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub avg_cost_low: f64,
    pub avg_cost_high: f64,
}

impl CostModel {
    pub fn new(avg_cost_low: f64, avg_cost_high: f64) -> Result<Self> {
        if !(avg_cost_low.is_finite() && avg_cost_high.is_finite())
            || avg_cost_low <= 0.0
            || avg_cost_high <= avg_cost_low
        {
            return Err(Error::Domain(format!(
                "cost model needs 0 < avg_cost_low < avg_cost_high, got ({avg_cost_low}, {avg_cost_high})"
            )));
        }
        Ok(Self { avg_cost_low, avg_cost_high })
    }
}

/// How the composition fraction D_c is interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionMode {
    /// D_c is the share of the *budget* spent on high fidelity.
    BudgetShare,
    /// D_c is the share of the sample *count* that is high fidelity.
    CountShare,
}

impl CompositionMode {
    pub fn tag(self) -> &'static str {
        match self {
            CompositionMode::BudgetShare => "budget_share",
            CompositionMode::CountShare => "count_share",
        }
    }
}

impl std::fmt::Display for CompositionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for CompositionMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "budget_share" => Ok(CompositionMode::BudgetShare),
            "count_share" => Ok(CompositionMode::CountShare),
            other => Err(Error::Config(format!(
                "unknown composition mode {other:?}, expected budget_share or count_share"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DatasetBudgetSpec {
    pub budget_db: f64,
    pub composition_dc: f64,
    pub mode: CompositionMode,
}

impl DatasetBudgetSpec {
    pub fn new(budget_db: f64, composition_dc: f64, mode: CompositionMode) -> Result<Self> {
        if !budget_db.is_finite() || budget_db <= 0.0 {
            return Err(Error::Config(format!(
                "budget_db must be positive and finite, got {budget_db}"
            )));
        }
        if !(0.0..=1.0).contains(&composition_dc) {
            return Err(Error::Config(format!(
                "composition_dc must lie in [0, 1], got {composition_dc}"
            )));
        }
        Ok(Self { budget_db, composition_dc, mode })
    }
}

/// A composed dataset: sorted case ids per fidelity plus realized totals.
/// `achieved_dc` is always the realized high-fidelity *budget* share,
/// whichever mode produced the selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub low_ids: Vec<u32>,
    pub high_ids: Vec<u32>,
    pub total_cost: f64,
    pub achieved_dc: f64,
}

impl Selection {
    pub fn n_samples(&self) -> usize {
        self.low_ids.len() + self.high_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.n_samples() == 0
    }
}

/// One selectable sample: a (case, fidelity) slot with its realized cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleCost {
    pub case_id: u32,
    pub fidelity: FidelityLevel,
    pub cost: f64,
}

/// Cost view of a pool: the sample universe composition operates on.
#[derive(Debug, Clone, PartialEq)]
pub struct PoolCosts {
    pub samples: Vec<SampleCost>,
    pub cost_model: CostModel,
}

impl PoolCosts {
    pub fn from_pool(pool: &SamplePool) -> Self {
        let mut samples = Vec::with_capacity(2 * pool.len());
        for fidelity in FidelityLevel::ALL {
            for p in &pool.pairs {
                samples.push(SampleCost {
                    case_id: p.case.case_id,
                    fidelity,
                    cost: p.solution(fidelity).work_units as f64,
                });
            }
        }
        Self { samples, cost_model: pool.cost_model.clone() }
    }

    fn ids(&self, fidelity: FidelityLevel) -> Vec<u32> {
        let mut ids: Vec<u32> = self
            .samples
            .iter()
            .filter(|s| s.fidelity == fidelity)
            .map(|s| s.case_id)
            .collect();
        ids.sort_unstable();
        ids
    }

    fn cost_of(&self, case_id: u32, fidelity: FidelityLevel) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.case_id == case_id && s.fidelity == fidelity)
            .map(|s| s.cost)
    }
}

/// floor() with a 1e-9 relative guard so that exact-ratio budgets (for
/// example 67 / 13.4) do not lose a whole count to division round-off.
fn guarded_floor(x: f64) -> usize {
    let adjusted = x * (1.0 + 1e-9);
    if adjusted < 0.0 {
        0
    } else {
        adjusted.floor() as usize
    }
}

/// Estimates per-fidelity sample counts whose expected cost fits the budget.
/// Returns (n_low, n_high).
pub fn estimate_counts(spec: &DatasetBudgetSpec, costs: &CostModel) -> (usize, usize) {
    let db = spec.budget_db;
    let dc = spec.composition_dc;
    match spec.mode {
        CompositionMode::BudgetShare => {
            let n_high = guarded_floor(dc * db / costs.avg_cost_high);
            let n_low = guarded_floor((1.0 - dc) * db / costs.avg_cost_low);
            (n_low, n_high)
        }
        CompositionMode::CountShare => {
            let per_sample = dc * costs.avg_cost_high + (1.0 - dc) * costs.avg_cost_low;
            let n = guarded_floor(db / per_sample);
            let n_high = guarded_floor(n as f64 * dc);
            (n - n_high, n_high)
        }
    }
}

struct Working<'a> {
    costs: &'a PoolCosts,
    low: Vec<u32>,
    high: Vec<u32>,
    cost_low: f64,
    cost_high: f64,
}

impl<'a> Working<'a> {
    fn from_selection(sel: &Selection, costs: &'a PoolCosts) -> Result<Self> {
        let mut w = Working { costs, low: Vec::new(), high: Vec::new(), cost_low: 0.0, cost_high: 0.0 };
        for &(fidelity, ids) in
            &[(FidelityLevel::Low, &sel.low_ids), (FidelityLevel::High, &sel.high_ids)]
        {
            for &id in ids {
                let cost = costs.cost_of(id, fidelity).ok_or_else(|| {
                    Error::Compose(format!("selection references {fidelity} case {id} absent from pool"))
                })?;
                w.push(fidelity, id, cost);
            }
        }
        Ok(w)
    }

    fn push(&mut self, fidelity: FidelityLevel, id: u32, cost: f64) {
        match fidelity {
            FidelityLevel::Low => {
                self.low.push(id);
                self.cost_low += cost;
            }
            FidelityLevel::High => {
                self.high.push(id);
                self.cost_high += cost;
            }
        }
    }

    fn total(&self) -> f64 {
        self.cost_low + self.cost_high
    }

    /// Realized high-fidelity share in the units the active mode targets.
    fn high_share(&self, mode: CompositionMode) -> f64 {
        match mode {
            CompositionMode::BudgetShare => {
                let t = self.total();
                if t > 0.0 { self.cost_high / t } else { 0.0 }
            }
            CompositionMode::CountShare => {
                let n = self.low.len() + self.high.len();
                if n > 0 { self.high.len() as f64 / n as f64 } else { 0.0 }
            }
        }
    }

    fn contains(&self, fidelity: FidelityLevel, id: u32) -> bool {
        match fidelity {
            FidelityLevel::Low => self.low.contains(&id),
            FidelityLevel::High => self.high.contains(&id),
        }
    }

    /// Drops selected samples until the total fits the budget. Each round
    /// removes from the fidelity whose realized share most exceeds its
    /// target: the cheapest sample whose removal already restores
    /// feasibility, otherwise the most expensive one. Ties break to the
    /// lower case id.
    fn repair(&mut self, spec: &DatasetBudgetSpec) {
        while self.total() > spec.budget_db {
            let share_high = self.high_share(spec.mode);
            let excess_high = share_high - spec.composition_dc;
            let excess_low = (1.0 - share_high) - (1.0 - spec.composition_dc);
            let mut fidelity = if excess_high >= excess_low {
                FidelityLevel::High
            } else {
                FidelityLevel::Low
            };
            if self.selected(fidelity).is_empty() {
                fidelity = fidelity.other();
            }
            let over = self.total() - spec.budget_db;
            let victims: Vec<(f64, u32)> = self
                .selected(fidelity)
                .iter()
                .map(|&id| (self.costs.cost_of(id, fidelity).expect("selected sample exists"), id))
                .collect();
            let feasible = victims.iter().filter(|(c, _)| *c >= over);
            let pick = feasible
                .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
                .copied()
                .or_else(|| {
                    victims
                        .iter()
                        .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
                        .copied()
                })
                .expect("victim fidelity is nonempty");
            self.remove(fidelity, pick.1, pick.0);
        }
    }

    fn selected(&self, fidelity: FidelityLevel) -> &[u32] {
        match fidelity {
            FidelityLevel::Low => &self.low,
            FidelityLevel::High => &self.high,
        }
    }

    fn remove(&mut self, fidelity: FidelityLevel, id: u32, cost: f64) {
        match fidelity {
            FidelityLevel::Low => {
                self.low.retain(|&x| x != id);
                self.cost_low -= cost;
            }
            FidelityLevel::High => {
                self.high.retain(|&x| x != id);
                self.cost_high -= cost;
            }
        }
    }

    /// Adds unselected samples while any fits the remaining slack, each time
    /// the one that brings the realized share closest to the target. Ties
    /// break to lower cost, then lower case id, then Low before High.
    fn fill(&mut self, spec: &DatasetBudgetSpec) {
        loop {
            let slack = spec.budget_db - self.total();
            let mut best: Option<(f64, f64, u32, u8, SampleCost)> = None;
            for s in &self.costs.samples {
                if s.cost > slack || self.contains(s.fidelity, s.case_id) {
                    continue;
                }
                let share_after = match spec.mode {
                    CompositionMode::BudgetShare => {
                        let high_after = self.cost_high
                            + if s.fidelity == FidelityLevel::High { s.cost } else { 0.0 };
                        high_after / (self.total() + s.cost)
                    }
                    CompositionMode::CountShare => {
                        let n_after = (self.low.len() + self.high.len() + 1) as f64;
                        let high_after = self.high.len() as f64
                            + if s.fidelity == FidelityLevel::High { 1.0 } else { 0.0 };
                        high_after / n_after
                    }
                };
                let key = (
                    (share_after - spec.composition_dc).abs(),
                    s.cost,
                    s.case_id,
                    match s.fidelity {
                        FidelityLevel::Low => 0u8,
                        FidelityLevel::High => 1u8,
                    },
                    *s,
                );
                let better = match &best {
                    None => true,
                    Some(b) => {
                        (key.0, key.1, key.2, key.3)
                            < (b.0, b.1, b.2, b.3)
                    }
                };
                if better {
                    best = Some(key);
                }
            }
            match best {
                Some((_, _, _, _, s)) => self.push(s.fidelity, s.case_id, s.cost),
                None => break,
            }
        }
    }

    fn into_selection(mut self) -> Selection {
        self.low.sort_unstable();
        self.high.sort_unstable();
        let total = self.total();
        let achieved_dc = if total > 0.0 { self.cost_high / total } else { 0.0 };
        Selection {
            low_ids: self.low,
            high_ids: self.high,
            total_cost: total,
            achieved_dc,
        }
    }
}

/// Composes a dataset from a solved pool. Counts are estimated from average
/// costs, the draw is a seeded shuffle without replacement per fidelity, and
/// the result is repaired and topped up against realized per-sample costs.
pub fn compose_dataset(pool: &SamplePool, spec: &DatasetBudgetSpec, seed: u64) -> Result<Selection> {
    compose_from_costs(&PoolCosts::from_pool(pool), spec, seed)
}

pub fn compose_from_costs(costs: &PoolCosts, spec: &DatasetBudgetSpec, seed: u64) -> Result<Selection> {
    if costs.samples.is_empty() {
        return Err(Error::Compose("pool is empty".into()));
    }
    let cheapest = costs
        .samples
        .iter()
        .map(|s| s.cost)
        .min_by(f64::total_cmp)
        .expect("nonempty");
    if cheapest > spec.budget_db {
        return Err(Error::Compose(format!(
            "budget {} affords no sample (cheapest costs {cheapest})",
            spec.budget_db
        )));
    }

    let (n_low, n_high) = estimate_counts(spec, &costs.cost_model);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Working {
        costs,
        low: Vec::new(),
        high: Vec::new(),
        cost_low: 0.0,
        cost_high: 0.0,
    };
    for (fidelity, want) in [(FidelityLevel::Low, n_low), (FidelityLevel::High, n_high)] {
        let mut ids = costs.ids(fidelity);
        ids.shuffle(&mut rng);
        for &id in ids.iter().take(want.min(ids.len())) {
            let cost = costs.cost_of(id, fidelity).expect("id from pool");
            w.push(fidelity, id, cost);
        }
    }
    w.repair(spec);
    w.fill(spec);
    Ok(w.into_selection())
}

/// Repairs an arbitrary selection to feasibility and maximality against the
/// pool. Idempotent: applying it to its own output changes nothing.
pub fn greedy_repair(selection: &Selection, pool: &SamplePool, spec: &DatasetBudgetSpec) -> Result<Selection> {
    greedy_repair_costs(selection, &PoolCosts::from_pool(pool), spec)
}

pub fn greedy_repair_costs(
    selection: &Selection,
    costs: &PoolCosts,
    spec: &DatasetBudgetSpec,
) -> Result<Selection> {
    let mut w = Working::from_selection(selection, costs)?;
    w.repair(spec);
    w.fill(spec);
    Ok(w.into_selection())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn model(low: f64, high: f64) -> CostModel {
        CostModel::new(low, high).unwrap()
    }

    fn spec(db: f64, dc: f64, mode: CompositionMode) -> DatasetBudgetSpec {
        DatasetBudgetSpec::new(db, dc, mode).unwrap()
    }

    /// The worked pool from the composition contract: low costs
    /// {1.0, 0.9, 1.1}, two affordable high samples {3.0, 3.2}. A third
    /// high slot is priced far above any budget used here so the matched
    /// structure keeps the intended five-sample universe.
    fn example_costs() -> PoolCosts {
        let mk = |case_id, fidelity, cost| SampleCost { case_id, fidelity, cost };
        PoolCosts {
            samples: vec![
                mk(0, FidelityLevel::Low, 1.0),
                mk(1, FidelityLevel::Low, 0.9),
                mk(2, FidelityLevel::Low, 1.1),
                mk(0, FidelityLevel::High, 3.0),
                mk(1, FidelityLevel::High, 3.2),
                mk(2, FidelityLevel::High, 1e9),
            ],
            cost_model: model(1.0, 3.1),
        }
    }

    #[test]
    fn count_arithmetic_budget_share() {
        let costs = model(4.8, 13.4);
        let (n_low, n_high) =
            estimate_counts(&spec(134.0, 0.5, CompositionMode::BudgetShare), &costs);
        assert_eq!((n_low, n_high), (13, 5));
        let (n_low, n_high) =
            estimate_counts(&spec(134.0, 0.0, CompositionMode::BudgetShare), &costs);
        assert_eq!((n_low, n_high), (27, 0));
        let (n_low, n_high) =
            estimate_counts(&spec(134.0, 1.0, CompositionMode::BudgetShare), &costs);
        assert_eq!((n_low, n_high), (0, 10));
    }

    #[test]
    fn count_arithmetic_count_share() {
        let costs = model(4.8, 13.4);
        let s = spec(134.0, 0.5, CompositionMode::CountShare);
        let (n_low, n_high) = estimate_counts(&s, &costs);
        // per-sample expectation 9.1, floor(134 / 9.1) = 14, split 7/7
        assert_eq!((n_low, n_high), (7, 7));
        let expected = n_high as f64 * 13.4 + n_low as f64 * 4.8;
        assert!(expected <= 134.0 + 1e-9);
    }

    #[test]
    fn expected_cost_never_exceeds_budget() {
        let costs = model(4.8, 13.4);
        for mode in [CompositionMode::BudgetShare, CompositionMode::CountShare] {
            for db in [10.0, 47.3, 134.0, 960.1] {
                for dc10 in 0..=10 {
                    let s = spec(db, dc10 as f64 / 10.0, mode);
                    let (n_low, n_high) = estimate_counts(&s, &costs);
                    let expected = n_low as f64 * 4.8 + n_high as f64 * 13.4;
                    assert!(expected <= db * (1.0 + 1e-9), "{mode} db={db} dc={dc10}");
                }
            }
        }
    }

    /// Hand trace for the worked example (Db = 5.0, Dc = 0.6, seed = 3):
    /// 1. estimates: n_high = floor(0.6*5/3.1) = 0, n_low = floor(0.4*5/1.0) = 2
    /// 2. the seeded low draw picks ids {1, 2} (cost 2.0); no high draw
    /// 3. repair: 2.0 <= 5.0, no-op
    /// 4. fill: slack 3.0; high 0 lands the share at exactly 3/5 = 0.6
    ///    (low 0 would leave it at 0), so high 0 enters; slack is now 0 and
    ///    nothing fits, confirmed maximal by the exhaustive scan below.
    #[test]
    fn worked_example_budget_five() {
        let costs = example_costs();
        let s = spec(5.0, 0.6, CompositionMode::BudgetShare);
        let sel = compose_from_costs(&costs, &s, 3).unwrap();
        assert_eq!(sel.low_ids, vec![1, 2]);
        assert_eq!(sel.high_ids, vec![0]);
        assert!((sel.total_cost - 5.0).abs() < 1e-12);
        assert!((sel.achieved_dc - 0.6).abs() < 1e-12);
        // maximality: no unselected sample fits the remaining slack
        let slack = 5.0 - sel.total_cost;
        for sample in &costs.samples {
            let picked = match sample.fidelity {
                FidelityLevel::Low => sel.low_ids.contains(&sample.case_id),
                FidelityLevel::High => sel.high_ids.contains(&sample.case_id),
            };
            assert!(picked || sample.cost > slack, "{sample:?} still fits");
        }
    }

    #[test]
    fn dc_zero_selects_no_high() {
        let costs = example_costs();
        let sel =
            compose_from_costs(&costs, &spec(5.0, 0.0, CompositionMode::BudgetShare), 7).unwrap();
        assert!(sel.high_ids.is_empty());
        assert_eq!(sel.low_ids, vec![0, 1, 2]);
        assert!((sel.total_cost - 3.0).abs() < 1e-12);
        assert_eq!(sel.achieved_dc, 0.0);
    }

    #[test]
    fn unconstrained_budget_takes_everything_affordable() {
        let mk = |case_id, fidelity, cost| SampleCost { case_id, fidelity, cost };
        let costs = PoolCosts {
            samples: vec![
                mk(0, FidelityLevel::Low, 1.0),
                mk(1, FidelityLevel::Low, 1.2),
                mk(0, FidelityLevel::High, 3.0),
                mk(1, FidelityLevel::High, 3.5),
            ],
            cost_model: model(1.1, 3.25),
        };
        let sel =
            compose_from_costs(&costs, &spec(100.0, 0.5, CompositionMode::BudgetShare), 0).unwrap();
        assert_eq!(sel.low_ids, vec![0, 1]);
        assert_eq!(sel.high_ids, vec![0, 1]);
        assert!((sel.total_cost - 8.7).abs() < 1e-12);
    }

    #[test]
    fn infeasible_budget_is_an_error() {
        let costs = example_costs();
        let err = compose_from_costs(&costs, &spec(0.5, 0.5, CompositionMode::BudgetShare), 0);
        assert!(err.is_err());
    }

    #[test]
    fn repair_is_idempotent() {
        let costs = example_costs();
        let s = spec(5.0, 0.6, CompositionMode::BudgetShare);
        // deliberately over-budget and unsorted input
        let bloated = Selection {
            low_ids: vec![2, 0, 1],
            high_ids: vec![1, 0],
            total_cost: f64::NAN,
            achieved_dc: f64::NAN,
        };
        let once = greedy_repair_costs(&bloated, &costs, &s).unwrap();
        let twice = greedy_repair_costs(&once, &costs, &s).unwrap();
        assert_eq!(once, twice);
        assert!(once.total_cost <= 5.0);
    }

    #[test]
    fn determinism_across_calls() {
        let costs = example_costs();
        let s = spec(5.0, 0.4, CompositionMode::BudgetShare);
        let a = compose_from_costs(&costs, &s, 99).unwrap();
        let b = compose_from_costs(&costs, &s, 99).unwrap();
        assert_eq!(a, b);
    }

    /// Brute-force oracle: on pools of at most 12 samples the greedy result
    /// must land within one maximum sample cost of the knapsack optimum.
    fn brute_force_best(costs: &PoolCosts, db: f64) -> f64 {
        let n = costs.samples.len();
        let mut best = 0.0f64;
        for mask in 0u32..(1 << n) {
            let total: f64 = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| costs.samples[i].cost)
                .sum();
            if total <= db && total > best {
                best = total;
            }
        }
        best
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn greedy_within_one_max_cost_of_optimum(
            seed in 0u64..1000,
            n_pairs in 2usize..=6,
            db_frac in 0.15f64..0.9,
            dc in 0.0f64..=1.0,
        ) {
            use rand::Rng;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut samples = Vec::new();
            for id in 0..n_pairs as u32 {
                samples.push(SampleCost {
                    case_id: id,
                    fidelity: FidelityLevel::Low,
                    cost: rng.random_range(0.5..2.0),
                });
                samples.push(SampleCost {
                    case_id: id,
                    fidelity: FidelityLevel::High,
                    cost: rng.random_range(2.5..6.0),
                });
            }
            let total: f64 = samples.iter().map(|s| s.cost).sum();
            let max_cost = samples.iter().map(|s| s.cost).fold(0.0, f64::max);
            let costs = PoolCosts { samples, cost_model: model(1.2, 4.2) };
            let db = total * db_frac;
            let s = spec(db, dc, CompositionMode::BudgetShare);
            if let Ok(sel) = compose_from_costs(&costs, &s, seed ^ 0xabcd) {
                prop_assert!(sel.total_cost <= db * (1.0 + 1e-12));
                let best = brute_force_best(&costs, db);
                prop_assert!(
                    sel.total_cost >= best - max_cost - 1e-9,
                    "greedy {} vs optimum {} (max cost {})",
                    sel.total_cost, best, max_cost
                );
            }
        }

        #[test]
        fn selections_feasible_and_maximal(
            seed in 0u64..500,
            db in 4.0f64..40.0,
            dc in 0.0f64..=1.0,
        ) {
            let costs = example_costs();
            let s = spec(db, dc, CompositionMode::BudgetShare);
            let sel = compose_from_costs(&costs, &s, seed).unwrap();
            prop_assert!(sel.total_cost <= db * (1.0 + 1e-12));
            let slack = db - sel.total_cost;
            for sample in &costs.samples {
                let picked = match sample.fidelity {
                    FidelityLevel::Low => sel.low_ids.contains(&sample.case_id),
                    FidelityLevel::High => sel.high_ids.contains(&sample.case_id),
                };
                prop_assert!(picked || sample.cost > slack);
            }
            // ids sorted and unique
            prop_assert!(sel.low_ids.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(sel.high_ids.windows(2).all(|w| w[0] < w[1]));
        }
    }
}
