//! Exploration operators, one per substrate layer. Every operator returns a
//! repaired genome.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::encoding::{Genome, SearchSpace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SubstrateTag {
    #[serde(rename = "HS")]
    HarmonySearch,
    #[serde(rename = "DE")]
    DifferentialEvolution,
    #[serde(rename = "2Px")]
    TwoPoint,
    #[serde(rename = "GM")]
    Gaussian,
    #[serde(rename = "MPx")]
    MultiPoint,
}

impl SubstrateTag {
    pub const ALL: [SubstrateTag; 5] = [
        SubstrateTag::HarmonySearch,
        SubstrateTag::DifferentialEvolution,
        SubstrateTag::TwoPoint,
        SubstrateTag::Gaussian,
        SubstrateTag::MultiPoint,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            SubstrateTag::HarmonySearch => "HS",
            SubstrateTag::DifferentialEvolution => "DE",
            SubstrateTag::TwoPoint => "2Px",
            SubstrateTag::Gaussian => "GM",
            SubstrateTag::MultiPoint => "MPx",
        }
    }
}

impl fmt::Display for SubstrateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SubstrateTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hs" | "harmony-search" => Ok(SubstrateTag::HarmonySearch),
            "de" | "differential-evolution" => Ok(SubstrateTag::DifferentialEvolution),
            "2px" | "two-point" => Ok(SubstrateTag::TwoPoint),
            "gm" | "gaussian" => Ok(SubstrateTag::Gaussian),
            "mpx" | "multi-point" => Ok(SubstrateTag::MultiPoint),
            other => Err(format!("unknown substrate '{other}' (expected HS, DE, 2Px, GM or MPx)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HsParams {
    /// Harmony memory considering rate.
    pub hmcr: f64,
    /// Pitch adjusting rate.
    pub par: f64,
    /// Pitch bandwidth as a fraction of the gene's interval width.
    pub bandwidth: f64,
}

impl Default for HsParams {
    fn default() -> Self {
        HsParams { hmcr: 0.9, par: 0.3, bandwidth: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DeParams {
    pub scale: f64,
    pub crossover_rate: f64,
}

impl Default for DeParams {
    fn default() -> Self {
        DeParams { scale: 0.6, crossover_rate: 0.9 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianParams {
    /// Deviation at the first iteration, as a fraction of interval width.
    pub start_fraction: f64,
    /// Deviation at the last iteration.
    pub end_fraction: f64,
    /// Per-gene mutation probability; `None` means one gene per genome on
    /// average.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gene_probability: Option<f64>,
}

impl Default for GaussianParams {
    fn default() -> Self {
        GaussianParams { start_fraction: 0.2, end_fraction: 0.02, gene_probability: None }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MultiPointParams {
    /// Fixed number of cut points; `None` is uniform crossover.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorParams {
    pub hs: HsParams,
    pub de: DeParams,
    pub gaussian: GaussianParams,
    pub multi_point: MultiPointParams,
}

impl OperatorParams {
    pub fn validate(&self) -> Result<(), String> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if !unit(self.hs.hmcr) || !unit(self.hs.par) || !(self.hs.bandwidth >= 0.0) {
            return Err(format!("harmony search parameters out of range: {:?}", self.hs));
        }
        if !(self.de.scale >= 0.0) || !unit(self.de.crossover_rate) {
            return Err(format!("differential evolution parameters out of range: {:?}", self.de));
        }
        let g = &self.gaussian;
        if !(g.start_fraction >= 0.0) || !(g.end_fraction >= 0.0) || g.gene_probability.is_some_and(|p| !unit(p)) {
            return Err(format!("gaussian mutation parameters out of range: {g:?}"));
        }
        if self.multi_point.points == Some(0) {
            return Err("multi-point crossover needs at least one cut point".into());
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SubstrateKind {
    HarmonySearch(HsParams),
    DifferentialEvolution(DeParams),
    TwoPoint,
    Gaussian(GaussianParams),
    MultiPoint(MultiPointParams),
}

impl SubstrateKind {
    pub fn from_tag(tag: SubstrateTag, params: &OperatorParams) -> Self {
        match tag {
            SubstrateTag::HarmonySearch => SubstrateKind::HarmonySearch(params.hs),
            SubstrateTag::DifferentialEvolution => SubstrateKind::DifferentialEvolution(params.de),
            SubstrateTag::TwoPoint => SubstrateKind::TwoPoint,
            SubstrateTag::Gaussian => SubstrateKind::Gaussian(params.gaussian),
            SubstrateTag::MultiPoint => SubstrateKind::MultiPoint(params.multi_point),
        }
    }

    pub fn tag(&self) -> SubstrateTag {
        match self {
            SubstrateKind::HarmonySearch(_) => SubstrateTag::HarmonySearch,
            SubstrateKind::DifferentialEvolution(_) => SubstrateTag::DifferentialEvolution,
            SubstrateKind::TwoPoint => SubstrateTag::TwoPoint,
            SubstrateKind::Gaussian(_) => SubstrateTag::Gaussian,
            SubstrateKind::MultiPoint(_) => SubstrateTag::MultiPoint,
        }
    }

    /// Mates the operator draws besides the base coral.
    pub fn arity(&self) -> usize {
        match self {
            SubstrateKind::HarmonySearch(_) => 1,
            SubstrateKind::DifferentialEvolution(_) => 3,
            SubstrateKind::TwoPoint | SubstrateKind::MultiPoint(_) => 1,
            SubstrateKind::Gaussian(_) => 0,
        }
    }

    /// `mates` is the harmony memory for HS, `[a, b, c]` for DE and the
    /// second parent for crossovers.
    pub fn apply<R: Rng + ?Sized>(&self, base: &Genome, mates: &[&Genome], ctx: &OperatorContext, rng: &mut R) -> Genome {
        match self {
            SubstrateKind::HarmonySearch(p) => hs_operator(base, mates, p, ctx, rng),
            SubstrateKind::DifferentialEvolution(p) => de_operator(base, mates, p, ctx, rng),
            SubstrateKind::TwoPoint => two_point_crossover(base, mates[0], ctx, rng),
            SubstrateKind::Gaussian(p) => gaussian_mutation(base, p, ctx, rng),
            SubstrateKind::MultiPoint(p) => multi_point_crossover(base, mates[0], p, ctx, rng),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OperatorContext<'a> {
    pub iteration: usize,
    pub max_iterations: usize,
    pub space: &'a SearchSpace,
}

impl<'a> OperatorContext<'a> {
    pub fn new(iteration: usize, max_iterations: usize, space: &'a SearchSpace) -> Self {
        OperatorContext { iteration, max_iterations, space }
    }

    /// Run progress `k / alpha`, saturating at 1 for budget-extended runs.
    pub fn progress(&self) -> f64 {
        (self.iteration as f64 / self.max_iterations.max(1) as f64).min(1.0)
    }
}

pub fn hs_operator<R: Rng + ?Sized>(
    base: &Genome,
    memory: &[&Genome],
    p: &HsParams,
    ctx: &OperatorContext,
    rng: &mut R,
) -> Genome {
    let space = ctx.space;
    let genes = (0..base.len())
        .map(|i| {
            if rng.gen::<f64>() < p.hmcr {
                let mut x = memory[rng.gen_range(0..memory.len())].0[i];
                if rng.gen::<f64>() < p.par {
                    let width = space.bounds(i).width();
                    x += rng.gen_range(-1.0..=1.0) * p.bandwidth * width;
                }
                x
            } else {
                space.sample_gene(i, rng)
            }
        })
        .collect();
    space.repair(&Genome(genes))
}

/// DE/rand/1/bin: draws `a, b, c` from `pool` (distinct when possible).
pub fn de_operator<R: Rng + ?Sized>(
    base: &Genome,
    pool: &[&Genome],
    p: &DeParams,
    ctx: &OperatorContext,
    rng: &mut R,
) -> Genome {
    let picks: Vec<usize> = if pool.len() >= 3 {
        sample(rng, pool.len(), 3).into_vec()
    } else {
        (0..3).map(|_| rng.gen_range(0..pool.len())).collect()
    };
    de_with_vectors(base, pool[picks[0]], pool[picks[1]], pool[picks[2]], p, ctx, rng)
}

pub fn de_with_vectors<R: Rng + ?Sized>(
    base: &Genome,
    a: &Genome,
    b: &Genome,
    c: &Genome,
    p: &DeParams,
    ctx: &OperatorContext,
    rng: &mut R,
) -> Genome {
    let forced = rng.gen_range(0..base.len());
    let genes = (0..base.len())
        .map(|i| {
            if i == forced || rng.gen::<f64>() < p.crossover_rate {
                a.0[i] + p.scale * (b.0[i] - c.0[i])
            } else {
                base.0[i]
            }
        })
        .collect();
    ctx.space.repair(&Genome(genes))
}

pub fn two_point_crossover<R: Rng + ?Sized>(
    parent1: &Genome,
    parent2: &Genome,
    ctx: &OperatorContext,
    rng: &mut R,
) -> Genome {
    let mut cuts = sample(rng, parent1.len() + 1, 2).into_vec();
    cuts.sort_unstable();
    two_point_with_cuts(parent1, parent2, cuts[0], cuts[1], ctx)
}

/// Genes in `[first, second)` come from `parent2`, the rest from `parent1`.
pub fn two_point_with_cuts(parent1: &Genome, parent2: &Genome, first: usize, second: usize, ctx: &OperatorContext) -> Genome {
    let genes = (0..parent1.len())
        .map(|i| if (first..second).contains(&i) { parent2.0[i] } else { parent1.0[i] })
        .collect();
    ctx.space.repair(&Genome(genes))
}

/// Deviation of the Gaussian substrate at the context's iteration for a
/// gene interval of width `width`.
pub fn gaussian_delta(p: &GaussianParams, progress: f64, width: f64) -> f64 {
    (p.start_fraction + progress * (p.end_fraction - p.start_fraction)) * width
}

pub fn gaussian_mutation<R: Rng + ?Sized>(base: &Genome, p: &GaussianParams, ctx: &OperatorContext, rng: &mut R) -> Genome {
    let space = ctx.space;
    let prob = p.gene_probability.unwrap_or(1.0 / base.len() as f64);
    let progress = ctx.progress();
    let genes = base
        .0
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            if rng.gen::<f64>() < prob {
                let z: f64 = StandardNormal.sample(rng);
                x + z * gaussian_delta(p, progress, space.bounds(i).width())
            } else {
                x
            }
        })
        .collect();
    space.repair(&Genome(genes))
}

pub fn multi_point_crossover<R: Rng + ?Sized>(
    parent1: &Genome,
    parent2: &Genome,
    p: &MultiPointParams,
    ctx: &OperatorContext,
    rng: &mut R,
) -> Genome {
    let len = parent1.len();
    let genes: Vec<f64> = match p.points {
        None => (0..len).map(|i| if rng.gen::<bool>() { parent1.0[i] } else { parent2.0[i] }).collect(),
        Some(k) => {
            let k = k.min(len.saturating_sub(1)).max(1);
            let mut cuts = if len > 1 { sample(rng, len - 1, k).into_vec() } else { Vec::new() };
            cuts.iter_mut().for_each(|c| *c += 1);
            cuts.sort_unstable();
            let mut from_second = false;
            let mut next = cuts.into_iter().peekable();
            (0..len)
                .map(|i| {
                    while next.peek() == Some(&i) {
                        next.next();
                        from_second = !from_second;
                    }
                    if from_second { parent2.0[i] } else { parent1.0[i] }
                })
                .collect()
        }
    };
    ctx.space.repair(&Genome(genes))
}
