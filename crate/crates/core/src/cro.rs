//! Coral reefs optimization with substrate layers.
//!
//! The reef is a fixed grid of cells, partitioned into contiguous blocks, one
//! per substrate. Each iteration every coral either broadcast-spawns through
//! its cell's substrate operator or broods a self-mutated larva; larvae then
//! compete for cells, and a few of the worst corals are depredated. A global
//! archive keeps the best solution ever evaluated.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::encoding::{Genome, SearchSpace};
use crate::error::{Error, Result};
use crate::frf::{FitnessEvaluator, FitnessValue};
use crate::operators::{OperatorContext, OperatorParams, SubstrateKind, SubstrateTag};

/// Something the reef can minimise.
pub trait Objective {
    fn evaluate(&self, genome: &Genome) -> Result<FitnessValue>;
}

impl<F> Objective for F
where
    F: Fn(&Genome) -> Result<FitnessValue>,
{
    fn evaluate(&self, genome: &Genome) -> Result<FitnessValue> {
        self(genome)
    }
}

/// Remembers fitness by exact genome bits; the objective is pure, so a hit
/// returns what a fresh evaluation would.
pub struct Memoized<'a, O: ?Sized> {
    inner: &'a O,
    seen: RefCell<HashMap<Vec<u64>, FitnessValue>>,
    hits: Cell<u64>,
}

impl<'a, O: Objective + ?Sized> Memoized<'a, O> {
    pub fn new(inner: &'a O) -> Self {
        Memoized { inner, seen: RefCell::new(HashMap::new()), hits: Cell::new(0) }
    }

    pub fn hits(&self) -> u64 {
        self.hits.get()
    }
}

impl<O: Objective + ?Sized> Objective for Memoized<'_, O> {
    fn evaluate(&self, genome: &Genome) -> Result<FitnessValue> {
        let key: Vec<u64> = genome.0.iter().map(|x| x.to_bits()).collect();
        if let Some(v) = self.seen.borrow().get(&key) {
            self.hits.set(self.hits.get() + 1);
            return Ok(*v);
        }
        let v = self.inner.evaluate(genome)?;
        self.seen.borrow_mut().insert(key, v);
        Ok(v)
    }
}

/// The damper design problem: decode, assemble, take the refined FRF peak.
#[derive(Clone, Debug)]
pub struct TmdProblem {
    pub evaluator: FitnessEvaluator,
    pub space: SearchSpace,
}

impl Objective for TmdProblem {
    fn evaluate(&self, genome: &Genome) -> Result<FitnessValue> {
        self.evaluator.evaluate(&self.space.decode(genome)?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CroParams {
    pub reef_rows: usize,
    pub reef_cols: usize,
    /// Initial occupation fraction.
    pub rho: f64,
    /// Probability that a coral broadcast-spawns rather than broods.
    pub f_b: f64,
    /// Settlement attempts per larva.
    pub n_att: usize,
    /// Depredation probability per candidate.
    pub p_d: f64,
    /// Fraction of the worst corals exposed to depredation.
    pub f_d: f64,
    /// Iterations.
    pub alpha: usize,
    pub substrates: Vec<SubstrateTag>,
    pub operators: OperatorParams,
    /// Stop at the first iteration boundary where this many evaluations
    /// have been spent, instead of after `alpha` iterations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evaluations: Option<u64>,
}

impl Default for CroParams {
    fn default() -> Self {
        CroParams {
            reef_rows: 10,
            reef_cols: 12,
            rho: 0.6,
            f_b: 0.97,
            n_att: 3,
            p_d: 0.05,
            f_d: 0.1,
            alpha: 1000,
            substrates: SubstrateTag::ALL.to_vec(),
            operators: OperatorParams::default(),
            max_evaluations: None,
        }
    }
}

impl CroParams {
    pub fn reef_size(&self) -> usize {
        self.reef_rows * self.reef_cols
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParams(m));
        if self.reef_size() == 0 {
            return fail("reef has no cells".into());
        }
        if !(self.rho > 0.0 && self.rho < 1.0) {
            return fail(format!("rho must lie in (0, 1), got {}", self.rho));
        }
        if !(self.f_b > 0.0 && self.f_b <= 1.0) {
            return fail(format!("f_b must lie in (0, 1], got {}", self.f_b));
        }
        if self.n_att == 0 {
            return fail("n_att must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p_d) {
            return fail(format!("p_d must lie in [0, 1], got {}", self.p_d));
        }
        if !(self.f_d > 0.0 && self.f_d < 1.0) {
            return fail(format!("f_d must lie in (0, 1), got {}", self.f_d));
        }
        if self.alpha == 0 {
            return fail("alpha must be at least 1".into());
        }
        if self.substrates.is_empty() {
            return fail("at least one substrate is required".into());
        }
        if self.substrates.len() > self.reef_size() {
            return fail("more substrates than reef cells".into());
        }
        self.operators.validate().map_err(Error::InvalidParams)
    }

    pub fn kinds(&self) -> Vec<SubstrateKind> {
        self.substrates.iter().map(|t| SubstrateKind::from_tag(*t, &self.operators)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Coral {
    pub genome: Genome,
    pub fitness: FitnessValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    /// Broadcast spawning through substrate `index` of the run's list.
    Broadcast(usize),
    Brooding,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Larva {
    pub coral: Coral,
    pub origin: Origin,
    /// Cell of the parent coral.
    pub parent_cell: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reef {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<Option<Coral>>,
    /// Substrate index per cell; fixed for the run.
    pub substrate_of: Vec<usize>,
}

impl Reef {
    /// Empty reef with the substrates laid out in contiguous equal blocks;
    /// remainder cells go to the last substrate.
    pub fn empty(rows: usize, cols: usize, n_substrates: usize) -> Self {
        let size = rows * cols;
        let block = size / n_substrates;
        let substrate_of = (0..size).map(|c| (c / block).min(n_substrates - 1)).collect();
        Reef { rows, cols, cells: vec![None; size], substrate_of }
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }

    pub fn occupied(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    pub fn occupied_cells(&self) -> impl Iterator<Item = (usize, &Coral)> {
        self.cells.iter().enumerate().filter_map(|(i, c)| c.as_ref().map(|c| (i, c)))
    }

    /// Cell of the best coral; the lowest index wins ties.
    pub fn best_cell(&self) -> Option<usize> {
        self.occupied_cells()
            .min_by(|a, b| a.1.fitness.value.total_cmp(&b.1.fitness.value).then(a.0.cmp(&b.0)))
            .map(|(i, _)| i)
    }

    pub fn best(&self) -> Option<&Coral> {
        self.best_cell().and_then(|i| self.cells[i].as_ref())
    }
}

/// Fills `round(rho * size)` random cells (at least one) with evaluated
/// random genomes.
pub fn initialize<O: Objective + ?Sized, R: Rng + ?Sized>(
    params: &CroParams,
    space: &SearchSpace,
    objective: &O,
    rng: &mut R,
) -> Result<Reef> {
    params.validate()?;
    let mut reef = Reef::empty(params.reef_rows, params.reef_cols, params.substrates.len());
    let size = reef.size();
    let count = ((params.rho * size as f64).round() as usize).clamp(1, size);
    let mut cells = sample(rng, size, count).into_vec();
    cells.sort_unstable();
    for cell in cells {
        let genome = space.random_genome(rng);
        let fitness = objective.evaluate(&genome)?;
        reef.cells[cell] = Some(Coral { genome, fitness });
    }
    Ok(reef)
}

/// Copy of the genome with each gene perturbed (probability `1 / len`) by
/// Gaussian noise of deviation `0.1 x` its interval width.
pub fn brooding<R: Rng + ?Sized>(coral: &Coral, space: &SearchSpace, rng: &mut R) -> Genome {
    let base = &coral.genome;
    let prob = 1.0 / base.len() as f64;
    let genes = base
        .0
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if rng.gen::<f64>() < prob {
                let z: f64 = StandardNormal.sample(rng);
                x + z * 0.1 * space.bounds(i).width()
            } else {
                x
            }
        })
        .collect();
    space.repair(&Genome(genes))
}

/// Mate pool for a broadcast coral: other broadcasters of its substrate, or
/// of the whole reef when the substrate is too thin, or (degenerate reef)
/// the coral itself.
fn mate_pool(cell: usize, arity: usize, local: &[usize], all: &[usize]) -> Vec<usize> {
    let local_others: Vec<usize> = local.iter().copied().filter(|&c| c != cell).collect();
    if local_others.len() >= arity.max(1) {
        return local_others;
    }
    let mut others: Vec<usize> = all.iter().copied().filter(|&c| c != cell).collect();
    if others.len() < arity.max(1) {
        others.push(cell);
    }
    others
}

/// One larva per coral, in cell order, each repaired and evaluated.
pub fn spawn_phase<O: Objective + ?Sized, R: Rng + ?Sized>(
    reef: &Reef,
    params: &CroParams,
    space: &SearchSpace,
    objective: &O,
    iteration: usize,
    rng: &mut R,
) -> Result<Vec<Larva>> {
    let kinds = params.kinds();
    let occupied: Vec<usize> = reef.occupied_cells().map(|(i, _)| i).collect();
    let spawns: Vec<bool> = occupied.iter().map(|_| rng.gen::<f64>() < params.f_b).collect();
    let broadcasters: Vec<usize> = occupied.iter().zip(&spawns).filter(|(_, b)| **b).map(|(c, _)| *c).collect();
    let mut by_substrate = vec![Vec::new(); kinds.len()];
    for &c in &broadcasters {
        by_substrate[reef.substrate_of[c]].push(c);
    }
    let coral = |c: usize| reef.cells[c].as_ref().expect("occupied cell");
    let ctx = OperatorContext::new(iteration, params.alpha, space);

    let mut larvae = Vec::with_capacity(occupied.len());
    for (&cell, &broadcast) in occupied.iter().zip(&spawns) {
        let parent = coral(cell);
        let (genome, origin) = if broadcast {
            let s = reef.substrate_of[cell];
            let kind = &kinds[s];
            let pool = mate_pool(cell, kind.arity(), &by_substrate[s], &broadcasters);
            let genome = match kind {
                SubstrateKind::Gaussian(_) => kind.apply(&parent.genome, &[], &ctx, rng),
                SubstrateKind::HarmonySearch(_) => {
                    let mut memory: Vec<&Genome> = pool.iter().map(|&c| &coral(c).genome).collect();
                    if !pool.contains(&cell) {
                        memory.push(&parent.genome);
                    }
                    kind.apply(&parent.genome, &memory, &ctx, rng)
                }
                SubstrateKind::DifferentialEvolution(_) => {
                    let members: Vec<&Genome> = pool.iter().map(|&c| &coral(c).genome).collect();
                    kind.apply(&parent.genome, &members, &ctx, rng)
                }
                SubstrateKind::TwoPoint | SubstrateKind::MultiPoint(_) => {
                    let mate = pool[rng.gen_range(0..pool.len())];
                    kind.apply(&parent.genome, &[&coral(mate).genome], &ctx, rng)
                }
            };
            (genome, Origin::Broadcast(s))
        } else {
            (brooding(parent, space, rng), Origin::Brooding)
        };
        larvae.push((genome, origin, cell));
    }

    larvae
        .into_iter()
        .map(|(genome, origin, parent_cell)| {
            let fitness = objective.evaluate(&genome)?;
            Ok(Larva { coral: Coral { genome, fitness }, origin, parent_cell })
        })
        .collect()
}

/// Each larva tries up to `n_att` random cells: it takes the first empty
/// one, or evicts an occupant with strictly worse fitness.
pub fn settle<R: Rng + ?Sized>(reef: &mut Reef, larvae: Vec<Larva>, params: &CroParams, rng: &mut R) -> usize {
    let size = reef.size();
    let mut settled = 0;
    for larva in larvae {
        for _ in 0..params.n_att {
            let cell = rng.gen_range(0..size);
            let take = match &reef.cells[cell] {
                None => true,
                Some(occupant) => larva.coral.fitness.value < occupant.fitness.value,
            };
            if take {
                reef.cells[cell] = Some(larva.coral);
                settled += 1;
                break;
            }
        }
    }
    settled
}

/// Removes each of the worst `ceil(f_d * occupied)` corals with probability
/// `p_d`. The best coral is never removed.
pub fn depredate<R: Rng + ?Sized>(reef: &mut Reef, params: &CroParams, rng: &mut R) -> usize {
    let Some(best) = reef.best_cell() else { return 0 };
    let mut ranked: Vec<(usize, f64)> = reef.occupied_cells().map(|(i, c)| (i, c.fitness.value)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let candidates = (params.f_d * ranked.len() as f64).ceil() as usize;
    let mut removed = 0;
    for &(cell, _) in ranked.iter().take(candidates) {
        if cell == best {
            continue;
        }
        if rng.gen::<f64>() < params.p_d {
            reef.cells[cell] = None;
            removed += 1;
        }
    }
    removed
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub rng_seed: u64,
    pub substrates: Vec<SubstrateTag>,
    /// Best-ever fitness after each iteration.
    pub best_per_iteration: Vec<f64>,
    /// Substrate (index into `substrates`) that produced the iteration's
    /// best broadcast larva; `None` if no coral broadcast.
    pub iteration_winners: Vec<Option<usize>>,
    pub evaluations_used: u64,
    pub final_best: Coral,
}

impl RunReport {
    pub fn iterations(&self) -> usize {
        self.best_per_iteration.len()
    }

    /// `counts[k][s]`: wins of substrate `s` over iterations `0..=k`.
    pub fn substrate_best_counts(&self) -> Vec<Vec<u64>> {
        let mut running = vec![0u64; self.substrates.len()];
        self.iteration_winners
            .iter()
            .map(|w| {
                if let Some(s) = w {
                    running[*s] += 1;
                }
                running.clone()
            })
            .collect()
    }

    /// Cumulative fraction of iterations each substrate won.
    pub fn substrate_ratios(&self) -> Vec<Vec<f64>> {
        self.substrate_best_counts()
            .into_iter()
            .enumerate()
            .map(|(k, counts)| counts.into_iter().map(|c| c as f64 / (k + 1) as f64).collect())
            .collect()
    }
}

/// Observer for per-iteration reef state, used by tests and diagnostics.
pub trait Monitor {
    fn iteration(&mut self, _iteration: usize, _reef: &Reef) {}
}

impl Monitor for () {}

pub fn run<O: Objective + ?Sized>(objective: &O, params: &CroParams, space: &SearchSpace, rng_seed: u64) -> Result<RunReport> {
    run_monitored(objective, params, space, rng_seed, &mut ())
}

pub fn run_monitored<O: Objective + ?Sized, M: Monitor + ?Sized>(
    objective: &O,
    params: &CroParams,
    space: &SearchSpace,
    rng_seed: u64,
    monitor: &mut M,
) -> Result<RunReport> {
    params.validate()?;
    let memo = Memoized::new(objective);
    let objective = &memo;
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut reef = initialize(params, space, objective, &mut rng)?;
    let mut evaluations = reef.occupied() as u64;
    let mut archive = reef.best().cloned().expect("initialised reef is non-empty");

    let mut best_per_iteration = Vec::with_capacity(params.alpha);
    let mut iteration_winners = Vec::with_capacity(params.alpha);
    // a budgeted run may outlast alpha; bound it anyway.
    let hard_cap = params.alpha.saturating_mul(100);
    let mut k = 0;
    loop {
        let done = match params.max_evaluations {
            Some(budget) => evaluations >= budget || k >= hard_cap,
            None => k >= params.alpha,
        };
        if done {
            break;
        }
        let larvae = spawn_phase(&reef, params, space, objective, k, &mut rng)?;
        evaluations += larvae.len() as u64;

        let mut winner: Option<(f64, usize)> = None;
        for larva in &larvae {
            if let Origin::Broadcast(s) = larva.origin {
                if winner.map_or(true, |(v, _)| larva.coral.fitness.value < v) {
                    winner = Some((larva.coral.fitness.value, s));
                }
            }
            if larva.coral.fitness.value < archive.fitness.value {
                archive = larva.coral.clone();
            }
        }

        settle(&mut reef, larvae, params, &mut rng);
        depredate(&mut reef, params, &mut rng);

        best_per_iteration.push(archive.fitness.value);
        iteration_winners.push(winner.map(|(_, s)| s));
        monitor.iteration(k, &reef);
        k += 1;
    }

    Ok(RunReport {
        rng_seed,
        substrates: params.substrates.clone(),
        best_per_iteration,
        iteration_winners,
        evaluations_used: evaluations,
        final_best: archive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space() -> SearchSpace {
        SearchSpace::new(2, [0.0, 50.0].into(), [0.0, 0.3].into(), [0.0, 0.05].into(), 2).unwrap()
    }

    fn sphere(genome: &Genome) -> Result<FitnessValue> {
        let target = [20.0, 30.0, 0.1, 0.2, 0.01, 0.04, 1.0, 2.0];
        let scale = [50.0, 50.0, 0.3, 0.3, 0.05, 0.05, 1.0, 1.0];
        let value = genome.0.iter().zip(target).zip(scale).map(|((x, t), s)| ((x - t) / s).powi(2)).sum();
        Ok(FitnessValue { value, argmax_floor: 1, argmax_omega: 0.0 })
    }

    fn coral(value: f64) -> Coral {
        Coral { genome: Genome(vec![1.0; 8]), fitness: FitnessValue { value, argmax_floor: 1, argmax_omega: 0.0 } }
    }

    fn larva(value: f64) -> Larva {
        Larva { coral: coral(value), origin: Origin::Brooding, parent_cell: 0 }
    }

    #[test]
    fn initial_occupation() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let reef = initialize(&CroParams::default(), &space(), &sphere, &mut rng).unwrap();
        assert_eq!(reef.size(), 120);
        assert_eq!(reef.occupied(), 72);
        for s in 0..5 {
            assert_eq!(reef.substrate_of.iter().filter(|&&x| x == s).count(), 24);
        }
        let tiny = CroParams { rho: 0.001, ..CroParams::default() };
        let reef = initialize(&tiny, &space(), &sphere, &mut rng).unwrap();
        assert_eq!(reef.occupied(), 1);
    }

    #[test]
    fn remainder_cells_go_to_last_substrate() {
        let reef = Reef::empty(3, 4, 5);
        let counts: Vec<usize> = (0..5).map(|s| reef.substrate_of.iter().filter(|&&x| x == s).count()).collect();
        assert_eq!(counts, vec![2, 2, 2, 2, 4]);
        assert!(reef.substrate_of.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn full_broadcast_has_no_brooders() {
        let params = CroParams { f_b: 1.0, ..CroParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let reef = initialize(&params, &space(), &sphere, &mut rng).unwrap();
        let larvae = spawn_phase(&reef, &params, &space(), &sphere, 0, &mut rng).unwrap();
        assert_eq!(larvae.len(), reef.occupied());
        assert!(larvae.iter().all(|l| matches!(l.origin, Origin::Broadcast(_))));
        assert!(larvae.windows(2).all(|w| w[0].parent_cell < w[1].parent_cell));
        for l in &larvae {
            let Origin::Broadcast(s) = l.origin else { unreachable!() };
            assert_eq!(s, reef.substrate_of[l.parent_cell]);
        }
    }

    #[test]
    fn lone_coral_reproduces_with_itself() {
        let s = space();
        for tag in SubstrateTag::ALL {
            let params = CroParams { f_b: 1.0, substrates: vec![tag], ..CroParams::default() };
            let mut reef = Reef::empty(10, 12, 1);
            let g = s.random_genome(&mut ChaCha8Rng::seed_from_u64(5));
            let fitness = sphere(&g).unwrap();
            reef.cells[17] = Some(Coral { genome: g, fitness });
            let larvae = spawn_phase(&reef, &params, &s, &sphere, 0, &mut ChaCha8Rng::seed_from_u64(6)).unwrap();
            assert_eq!(larvae.len(), 1);
            assert!(s.is_feasible(&larvae[0].coral.genome));
        }
    }

    #[test]
    fn brooding_is_feasible_and_seeded() {
        let s = space();
        let parent = Coral { genome: s.random_genome(&mut ChaCha8Rng::seed_from_u64(9)), fitness: coral(0.0).fitness };
        let a = brooding(&parent, &s, &mut ChaCha8Rng::seed_from_u64(4));
        let b = brooding(&parent, &s, &mut ChaCha8Rng::seed_from_u64(4));
        assert_eq!(a, b);
        assert!(s.is_feasible(&a));
        let frozen = SearchSpace::new(1, [7.0, 7.0].into(), [0.1, 0.1].into(), [0.02, 0.02].into(), 1).unwrap();
        let parent = Coral { genome: Genome(vec![7.0, 0.1, 0.02, 1.0]), fitness: coral(0.0).fitness };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert_eq!(brooding(&parent, &frozen, &mut rng), parent.genome);
        }
    }

    #[test]
    fn settlement_rules() {
        let params = CroParams { n_att: 3, ..CroParams::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(3);

        let mut empty = Reef::empty(10, 12, 5);
        assert_eq!(settle(&mut empty, vec![larva(5.0)], &params, &mut rng), 1);
        assert_eq!(empty.occupied(), 1);

        let mut full = Reef::empty(10, 12, 5);
        full.cells.iter_mut().for_each(|c| *c = Some(coral(1.0)));
        assert_eq!(settle(&mut full, vec![larva(2.0)], &params, &mut rng), 0);
        assert_eq!(settle(&mut full, vec![larva(1.0)], &params, &mut rng), 0);
        assert!(full.occupied_cells().all(|(_, c)| c.fitness.value == 1.0));
        assert_eq!(settle(&mut full, vec![larva(0.5)], &params, &mut rng), 1);
    }

    #[test]
    fn depredation_rules() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut reef = Reef::empty(10, 12, 5);
        for i in 0..72 {
            reef.cells[i] = Some(coral(i as f64));
        }
        let no_predation = CroParams { p_d: 0.0, ..CroParams::default() };
        let before = reef.clone();
        assert_eq!(depredate(&mut reef, &no_predation, &mut rng), 0);
        assert_eq!(reef, before);

        let certain = CroParams { p_d: 1.0, f_d: 0.1, ..CroParams::default() };
        assert_eq!(depredate(&mut reef, &certain, &mut rng), 8);
        assert!(reef.occupied_cells().all(|(_, c)| c.fitness.value < 64.0));

        let mut lone = Reef::empty(10, 12, 5);
        lone.cells[3] = Some(coral(1.0));
        let lone_before = lone.clone();
        assert_eq!(depredate(&mut lone, &certain, &mut rng), 0);
        assert_eq!(lone, lone_before);
    }

    #[test]
    fn single_iteration_report() {
        let params = CroParams { alpha: 1, p_d: 0.0, f_b: 1.0, ..CroParams::default() };
        let report = run(&sphere, &params, &space(), 11).unwrap();
        assert_eq!(report.iterations(), 1);
        assert_eq!(report.substrate_best_counts().len(), 1);
        assert!(report.iteration_winners[0].is_some());
    }

    #[test]
    fn seeded_runs_repeat() {
        let params = CroParams { alpha: 40, ..CroParams::default() };
        let a = run(&sphere, &params, &space(), 5).unwrap();
        let b = run(&sphere, &params, &space(), 5).unwrap();
        assert_eq!(a, b);
        let c = run(&sphere, &params, &space(), 6).unwrap();
        assert_ne!(a.best_per_iteration, c.best_per_iteration);
        assert!(a.best_per_iteration.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn evaluation_budget_stops_runs() {
        let params = CroParams { alpha: 10, max_evaluations: Some(1000), ..CroParams::default() };
        let report = run(&sphere, &params, &space(), 5).unwrap();
        assert!(report.evaluations_used >= 1000);
        assert!(report.evaluations_used < 1000 + 120);
    }

    #[test]
    fn invalid_params_rejected() {
        let bad = [
            CroParams { rho: 1.0, ..CroParams::default() },
            CroParams { f_b: 0.0, ..CroParams::default() },
            CroParams { n_att: 0, ..CroParams::default() },
            CroParams { p_d: 1.5, ..CroParams::default() },
            CroParams { f_d: 0.0, ..CroParams::default() },
            CroParams { alpha: 0, ..CroParams::default() },
            CroParams { substrates: vec![], ..CroParams::default() },
        ];
        for p in bad {
            assert!(matches!(p.validate(), Err(Error::InvalidParams(_))), "{p:?}");
        }
    }
}
