//! Synthetic multivariate marked patterns with a known coupling structure.
//!
//! Random streams: every draw comes from ChaCha20 seeded with
//! `seed_from_u64(seed)`. Type `t` uses stream `t` for its own locations and
//! marks, drawn per point in the order `x, y, mark`. A coupled target `b`
//! takes the extra draws for its coupled points (jitter `dx, dy`, then the
//! independent mark component) from stream `2^32 + b`. Adding types or
//! couplings therefore never perturbs the draws of other types, and a
//! coupling with `rho = 0` reproduces the independent generator exactly.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::pattern::{MarkedPoint, MarkedPointPattern, Window};
use crate::{Error, Result};

const COUPLING_STREAM_OFFSET: u64 = 1 << 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coupling {
    pub source: usize,
    pub target: usize,
    /// Fraction of target points tied to source points, and the mark correlation.
    pub rho: f64,
    /// Isotropic normal displacement scale, unit-square units.
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationSpec {
    pub num_types: usize,
    pub points_per_type: usize,
    pub seed: u64,
    pub couplings: Vec<Coupling>,
}

impl SimulationSpec {
    pub fn independent(num_types: usize, points_per_type: usize, seed: u64) -> Self {
        Self {
            num_types,
            points_per_type,
            seed,
            couplings: Vec::new(),
        }
    }

    pub fn with_coupling(mut self, coupling: Coupling) -> Self {
        self.couplings.push(coupling);
        self
    }

    /// Ground-truth edges as `(low, high)` pairs, excluding `rho = 0` couplings.
    pub fn coupled_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = self
            .couplings
            .iter()
            .filter(|c| c.rho > 0.0)
            .map(|c| (c.source.min(c.target), c.source.max(c.target)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    pub fn type_names(&self) -> Vec<String> {
        (1..=self.num_types).map(|i| format!("t{i}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidSimulation(msg));
        if self.num_types < 2 {
            return invalid(format!("need at least 2 types, got {}", self.num_types));
        }
        if self.points_per_type < 1 {
            return invalid(String::from("points per type must be at least 1"));
        }
        let mut targeted = vec![false; self.num_types];
        for c in &self.couplings {
            if c.source >= self.num_types || c.target >= self.num_types {
                return invalid(format!("coupling ({}, {}) references an unknown type", c.source, c.target));
            }
            if c.source == c.target {
                return invalid(format!("coupling of type {} with itself", c.source));
            }
            if !(0.0..=1.0).contains(&c.rho) {
                return invalid(format!("rho {} outside [0, 1]", c.rho));
            }
            if !(c.sigma >= 0.0) || !c.sigma.is_finite() {
                return invalid(format!("sigma {} must be finite and >= 0", c.sigma));
            }
            if targeted[c.target] {
                return invalid(format!("type {} is the target of more than one coupling", c.target));
            }
            targeted[c.target] = true;
        }
        self.generation_order().map(|_| ())
    }

    /// Types ordered so that every coupling source precedes its target.
    fn generation_order(&self) -> Result<Vec<usize>> {
        let d = self.num_types;
        let mut source_of = vec![None; d];
        for c in &self.couplings {
            source_of[c.target] = Some(c.source);
        }
        let mut done = vec![false; d];
        let mut order = Vec::with_capacity(d);
        while order.len() < d {
            let before = order.len();
            for t in 0..d {
                if !done[t] && source_of[t].map_or(true, |s| done[s]) {
                    done[t] = true;
                    order.push(t);
                }
            }
            if order.len() == before {
                return Err(Error::InvalidSimulation(String::from("couplings form a cycle")));
            }
        }
        Ok(order)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Folds `v` back into `[0, 1]` by mirror reflection at the edges.
fn reflect(v: f64) -> f64 {
    let t = v - 2.0 * libm::floor(v / 2.0);
    if t > 1.0 {
        2.0 - t
    } else {
        t
    }
}

fn uniform_points(rng: &mut ChaCha20Rng, type_id: usize, count: usize, out: &mut Vec<MarkedPoint>) {
    for _ in 0..count {
        let x: f64 = rng.random();
        let y: f64 = rng.random();
        let mark: f64 = rng.sample(StandardNormal);
        out.push(MarkedPoint { x, y, type_id, mark });
    }
}

/// Generates the pattern described by `spec` (any number of couplings).
pub fn simulate(spec: &SimulationSpec) -> Result<MarkedPointPattern> {
    spec.validate()?;
    let n = spec.points_per_type;
    let mut per_type: Vec<Vec<MarkedPoint>> = vec![Vec::new(); spec.num_types];
    for t in spec.generation_order()? {
        let mut pts = Vec::with_capacity(n);
        let mut base = stream(spec.seed, t as u64);
        match spec.couplings.iter().find(|c| c.target == t) {
            None => uniform_points(&mut base, t, n, &mut pts),
            Some(c) => {
                let coupled = libm::round(c.rho * n as f64) as usize;
                let mut extra = stream(spec.seed, COUPLING_STREAM_OFFSET + t as u64);
                let noise_scale = libm::sqrt(1.0 - c.rho * c.rho);
                for src in per_type[c.source].iter().take(coupled) {
                    let dx: f64 = extra.sample(StandardNormal);
                    let dy: f64 = extra.sample(StandardNormal);
                    let e: f64 = extra.sample(StandardNormal);
                    pts.push(MarkedPoint {
                        x: reflect(src.x + c.sigma * dx),
                        y: reflect(src.y + c.sigma * dy),
                        type_id: t,
                        mark: c.rho * src.mark + noise_scale * e,
                    });
                }
                uniform_points(&mut base, t, n - coupled, &mut pts);
            }
        }
        per_type[t] = pts;
    }
    MarkedPointPattern::new(per_type.concat(), Window::unit(), spec.type_names())
}

/// `d` independent binomial patterns with standard normal marks.
pub fn simulate_independent(spec: &SimulationSpec) -> Result<MarkedPointPattern> {
    if !spec.couplings.is_empty() {
        return Err(Error::InvalidSimulation(String::from(
            "independent simulation takes no couplings",
        )));
    }
    simulate(spec)
}

/// Pattern with exactly one coupled pair.
pub fn simulate_coupled_pair(spec: &SimulationSpec) -> Result<MarkedPointPattern> {
    if spec.couplings.len() != 1 {
        return Err(Error::InvalidSimulation(format!(
            "expected exactly one coupling, got {}",
            spec.couplings.len()
        )));
    }
    simulate(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coupled(rho: f64, sigma: f64) -> SimulationSpec {
        SimulationSpec::independent(3, 200, 11).with_coupling(Coupling {
            source: 0,
            target: 2,
            rho,
            sigma,
        })
    }

    #[test]
    fn independent_counts_and_determinism() {
        let spec = SimulationSpec::independent(3, 200, 42);
        let a = simulate_independent(&spec).unwrap();
        let b = simulate_independent(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 600);
        assert!(a.types().iter().all(|t| t.count == 200));
        assert!(a.is_unit_square());
        let other = simulate_independent(&SimulationSpec::independent(3, 200, 43)).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn adding_types_keeps_earlier_draws() {
        let small = simulate(&SimulationSpec::independent(2, 50, 5)).unwrap();
        let large = simulate(&SimulationSpec::independent(4, 50, 5)).unwrap();
        assert_eq!(small.points(), &large.points()[..100]);
    }

    #[test]
    fn zero_rho_matches_independent() {
        let ind = simulate(&SimulationSpec::independent(3, 200, 11)).unwrap();
        let zero = simulate_coupled_pair(&coupled(0.0, 0.05)).unwrap();
        assert_eq!(ind, zero);
        assert!(coupled(0.0, 0.05).coupled_pairs().is_empty());
    }

    #[test]
    fn perfect_coupling_duplicates_source() {
        let p = simulate_coupled_pair(&coupled(1.0, 0.0)).unwrap();
        let a: Vec<_> = p.points_of_type(0).map(|q| (q.x, q.y, q.mark)).collect();
        let b: Vec<_> = p.points_of_type(2).map(|q| (q.x, q.y, q.mark)).collect();
        assert_eq!(a, b);
        assert_eq!(coupled(1.0, 0.0).coupled_pairs(), vec![(0, 2)]);
    }

    #[test]
    fn jitter_stays_in_window() {
        let p = simulate(&coupled(0.9, 0.3)).unwrap();
        assert!(p.points().iter().all(|q| (0.0..=1.0).contains(&q.x) && (0.0..=1.0).contains(&q.y)));
        assert_eq!(reflect(-0.25), 0.25);
        assert_eq!(reflect(1.25), 0.75);
        assert_eq!(reflect(2.5), 0.5);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(simulate(&SimulationSpec::independent(1, 10, 0)).is_err());
        assert!(simulate(&SimulationSpec::independent(2, 0, 0)).is_err());
        assert!(simulate(&coupled(1.5, 0.0)).is_err());
        assert!(simulate(&coupled(0.5, -1.0)).is_err());
        assert!(simulate_independent(&coupled(0.5, 0.1)).is_err());
        assert!(simulate_coupled_pair(&SimulationSpec::independent(2, 5, 0)).is_err());
        let cycle = SimulationSpec::independent(2, 5, 0)
            .with_coupling(Coupling { source: 0, target: 1, rho: 0.5, sigma: 0.0 })
            .with_coupling(Coupling { source: 1, target: 0, rho: 0.5, sigma: 0.0 });
        assert!(simulate(&cycle).is_err());
        let self_loop = SimulationSpec::independent(2, 5, 0)
            .with_coupling(Coupling { source: 1, target: 1, rho: 0.5, sigma: 0.0 });
        assert!(simulate(&self_loop).is_err());
    }

    #[test]
    fn chained_couplings_resolve_order() {
        // 2 <- 1 <- 0 declared out of order
        let spec = SimulationSpec::independent(3, 20, 3)
            .with_coupling(Coupling { source: 1, target: 2, rho: 1.0, sigma: 0.0 })
            .with_coupling(Coupling { source: 0, target: 1, rho: 1.0, sigma: 0.0 });
        let p = simulate(&spec).unwrap();
        let t0: Vec<_> = p.points_of_type(0).map(|q| (q.x, q.y)).collect();
        let t2: Vec<_> = p.points_of_type(2).map(|q| (q.x, q.y)).collect();
        assert_eq!(t0, t2);
    }
}
