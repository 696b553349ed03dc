//! Flat real-valued genome for a fixed number of dampers.
//!
//! Layout is `[ω_1..ω_M, ξ_1..ξ_M, m_1..m_M, fb_1..fb_M]`. Floor genes are
//! stored as reals so every operator can treat the genome uniformly; repair
//! rounds them back onto the integer floor set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tmd::{TmdDesign, TmdUnit};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lo && x <= self.hi
    }
}

impl From<[f64; 2]> for Interval {
    fn from([lo, hi]: [f64; 2]) -> Self {
        Interval { lo, hi }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneKind {
    Omega,
    Xi,
    Mass,
    Floor,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    n_tmds: usize,
    omega: Interval,
    xi: Interval,
    mass: Interval,
    floors: (usize, usize),
    pinned_floors: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Genome(pub Vec<f64>);

impl SearchSpace {
    /// Free placement over floors `1..=n_floors`.
    pub fn new(n_tmds: usize, omega: Interval, xi: Interval, mass: Interval, n_floors: usize) -> Result<Self> {
        let space = SearchSpace { n_tmds, omega, xi, mass, floors: (1, n_floors), pinned_floors: None };
        space.validate()?;
        Ok(space)
    }

    /// Fixed-location variant: floor genes frozen to `floors`.
    pub fn with_pinned_floors(mut self, floors: Vec<usize>) -> Result<Self> {
        if floors.len() != self.n_tmds {
            return Err(Error::InvalidSpace(format!("{} pinned floors for {} dampers", floors.len(), self.n_tmds)));
        }
        self.pinned_floors = Some(floors);
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        for (name, iv) in [("omega", self.omega), ("xi", self.xi), ("mass", self.mass)] {
            if !(iv.lo <= iv.hi) || !iv.lo.is_finite() || !iv.hi.is_finite() {
                return Err(Error::InvalidSpace(format!("{name} bounds [{}, {}] are not an interval", iv.lo, iv.hi)));
            }
            if iv.lo < 0.0 {
                return Err(Error::InvalidSpace(format!("{name} lower bound must be non-negative")));
            }
        }
        if self.floors.0 < 1 || self.floors.1 < self.floors.0 {
            return Err(Error::InvalidSpace("floor set is empty".into()));
        }
        if let Some(p) = &self.pinned_floors {
            if let Some(f) = p.iter().find(|f| **f < self.floors.0 || **f > self.floors.1) {
                return Err(Error::InvalidSpace(format!("pinned floor {f} outside the building")));
            }
        }
        Ok(())
    }

    pub fn n_tmds(&self) -> usize {
        self.n_tmds
    }

    pub fn genome_len(&self) -> usize {
        4 * self.n_tmds
    }

    pub fn n_floors(&self) -> usize {
        self.floors.1
    }

    pub fn pinned_floors(&self) -> Option<&[usize]> {
        self.pinned_floors.as_deref()
    }

    pub fn gene_kind(&self, idx: usize) -> GeneKind {
        match idx / self.n_tmds {
            0 => GeneKind::Omega,
            1 => GeneKind::Xi,
            2 => GeneKind::Mass,
            _ => GeneKind::Floor,
        }
    }

    pub fn bounds(&self, idx: usize) -> Interval {
        match self.gene_kind(idx) {
            GeneKind::Omega => self.omega,
            GeneKind::Xi => self.xi,
            GeneKind::Mass => self.mass,
            GeneKind::Floor => match &self.pinned_floors {
                Some(p) => {
                    let f = p[idx - 3 * self.n_tmds] as f64;
                    Interval::new(f, f)
                }
                None => Interval::new(self.floors.0 as f64, self.floors.1 as f64),
            },
        }
    }

    /// Uniform draw for one gene; floor genes are uniform over integers.
    pub fn sample_gene<R: Rng + ?Sized>(&self, idx: usize, rng: &mut R) -> f64 {
        let b = self.bounds(idx);
        match self.gene_kind(idx) {
            GeneKind::Floor => rng.gen_range(b.lo as usize..=b.hi as usize) as f64,
            _ if b.width() == 0.0 => b.lo,
            _ => rng.gen_range(b.lo..=b.hi),
        }
    }

    pub fn random_genome<R: Rng + ?Sized>(&self, rng: &mut R) -> Genome {
        Genome((0..self.genome_len()).map(|i| self.sample_gene(i, rng)).collect())
    }

    pub fn repair_gene(&self, idx: usize, x: f64) -> f64 {
        let b = self.bounds(idx);
        let x = if x.is_nan() { b.lo } else { x };
        match self.gene_kind(idx) {
            GeneKind::Floor => b.clamp(x.round()),
            _ => b.clamp(x),
        }
    }

    pub fn repair(&self, genome: &Genome) -> Genome {
        Genome(genome.0.iter().enumerate().map(|(i, &x)| self.repair_gene(i, x)).collect())
    }

    pub fn is_feasible(&self, genome: &Genome) -> bool {
        genome.0.len() == self.genome_len()
            && genome.0.iter().enumerate().all(|(i, &x)| {
                self.bounds(i).contains(x) && (self.gene_kind(i) != GeneKind::Floor || x.fract() == 0.0)
            })
    }

    pub fn decode(&self, genome: &Genome) -> Result<TmdDesign> {
        if genome.0.len() != self.genome_len() {
            return Err(Error::InvalidGenome(format!(
                "genome has {} genes, expected {}",
                genome.0.len(),
                self.genome_len()
            )));
        }
        if !self.is_feasible(genome) {
            return Err(Error::InvalidGenome("genome is outside the search space; repair it first".into()));
        }
        let m = self.n_tmds;
        let g = &genome.0;
        Ok(TmdDesign::new(
            (0..m).map(|j| TmdUnit::new(g[j], g[m + j], g[2 * m + j], g[3 * m + j] as usize)).collect(),
        ))
    }

    /// Inverse of [`decode`](Self::decode); not repaired.
    pub fn encode(&self, design: &TmdDesign) -> Result<Genome> {
        if design.len() != self.n_tmds {
            return Err(Error::InvalidDesign(format!("{} dampers, space expects {}", design.len(), self.n_tmds)));
        }
        let u = &design.units;
        let genes = u
            .iter()
            .map(|t| t.omega)
            .chain(u.iter().map(|t| t.xi))
            .chain(u.iter().map(|t| t.mass))
            .chain(u.iter().map(|t| t.floor as f64))
            .collect();
        Ok(Genome(genes))
    }
}

impl Genome {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn space(n_floors: usize, m: usize) -> SearchSpace {
        SearchSpace::new(m, [0.0, 50.0].into(), [0.0, 0.3].into(), [0.0, 0.05].into(), n_floors).unwrap()
    }

    #[test]
    fn degenerate_interval_is_constant() {
        let s = SearchSpace::new(2, [7.0, 7.0].into(), [0.0, 0.3].into(), [0.0, 0.05].into(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let g = s.random_genome(&mut rng);
            assert_eq!(&g.0[..2], &[7.0, 7.0]);
        }
    }

    #[test]
    fn single_floor_set() {
        let s = space(4, 3).with_pinned_floors(vec![2, 2, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = s.random_genome(&mut rng);
        assert_eq!(&g.0[9..], &[2.0, 2.0, 2.0]);
        assert_eq!(s.repair(&Genome(vec![0.0; 12])).0[9..], [2.0, 2.0, 2.0]);
    }

    #[test]
    fn uniform_mean_of_omega_genes() {
        let s = space(2, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mean = (0..10_000).map(|_| s.random_genome(&mut rng).0[0]).sum::<f64>() / 10_000.0;
        assert!((24.0..=26.0).contains(&mean), "{mean}");
    }

    #[test]
    fn floor_genes_cover_every_floor() {
        let s = space(4, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = [0usize; 5];
        for _ in 0..4000 {
            seen[s.random_genome(&mut rng).0[3] as usize] += 1;
        }
        assert_eq!(seen[0], 0);
        assert!(seen[1..].iter().all(|&c| (850..=1150).contains(&c)), "{seen:?}");
    }

    #[test]
    fn repair_examples() {
        let s = space(4, 1);
        let g = s.repair(&Genome(vec![63.2, -0.1, 0.02, 1.4]));
        assert_eq!(g.0, vec![50.0, 0.0, 0.02, 1.0]);
        assert_eq!(s.repair(&Genome(vec![1.0, 0.1, 0.02, 9.7])).0[3], 4.0);
        assert_eq!(s.repair(&Genome(vec![1.0, 0.1, 0.02, -3.0])).0[3], 1.0);
        let feasible = Genome(vec![12.5, 0.1, 0.02, 3.0]);
        assert_eq!(s.repair(&feasible), feasible);
    }

    #[test]
    fn decode_requires_repair() {
        let s = space(2, 1);
        assert!(matches!(s.decode(&Genome(vec![60.0, 0.1, 0.02, 1.0])), Err(Error::InvalidGenome(_))));
        assert!(matches!(s.decode(&Genome(vec![10.0, 0.1, 0.02, 1.5])), Err(Error::InvalidGenome(_))));
        assert!(matches!(s.decode(&Genome(vec![10.0])), Err(Error::InvalidGenome(_))));
    }

    #[test]
    fn decode_layout() {
        let s = space(4, 4);
        let design = TmdDesign::new(vec![
            TmdUnit::new(9.8264, 0.0985, 0.05, 4),
            TmdUnit::new(10.5978, 0.1070, 0.05, 4),
            TmdUnit::new(21.3608, 0.2398, 0.05, 4),
            TmdUnit::new(31.8252, 0.3000, 0.05, 1),
        ]);
        let g = s.encode(&design).unwrap();
        assert_eq!(&g.0[12..], &[4.0, 4.0, 4.0, 1.0]);
        let back = s.decode(&g).unwrap();
        assert_eq!(back, design);
        let fb: Vec<usize> = back.units.iter().map(|u| u.floor).collect();
        assert_eq!(fb, vec![4, 4, 4, 1]);
    }

    #[test]
    fn bad_spaces_rejected() {
        assert!(SearchSpace::new(1, [5.0, 1.0].into(), [0.0, 0.3].into(), [0.0, 0.05].into(), 2).is_err());
        assert!(SearchSpace::new(1, [0.0, 1.0].into(), [0.0, 0.3].into(), [0.0, 0.05].into(), 0).is_err());
        assert!(space(2, 2).with_pinned_floors(vec![3, 1]).is_err());
        assert!(space(2, 2).with_pinned_floors(vec![1]).is_err());
    }
}
