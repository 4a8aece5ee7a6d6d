use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::eval::Env;
use super::ExprError;

/// Width of the band excluded next to a singular interval endpoint.
pub const SINGULAR_GUARD: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoordKind {
    /// Closed interval `[lo, hi]`.
    Interval,
    /// Angle of period 2π starting at `lo`; `hi` is `lo + 2π`.
    Angle,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordRange {
    pub name: String,
    pub lo: f64,
    pub hi: f64,
    pub kind: CoordKind,
    pub singular_lo: bool,
    pub singular_hi: bool,
}

impl CoordRange {
    pub fn interval(name: &str, lo: f64, hi: f64) -> Self {
        CoordRange {
            name: name.to_string(),
            lo,
            hi,
            kind: CoordKind::Interval,
            singular_lo: false,
            singular_hi: false,
        }
    }

    pub fn angle(name: &str) -> Self {
        CoordRange {
            name: name.to_string(),
            lo: 0.0,
            hi: TAU,
            kind: CoordKind::Angle,
            singular_lo: false,
            singular_hi: false,
        }
    }

    /// Marks endpoints where the chart degenerates; sampling keeps a
    /// [`SINGULAR_GUARD`] distance from them.
    pub fn singular(mut self, lo: bool, hi: bool) -> Self {
        self.singular_lo = lo;
        self.singular_hi = hi;
        self
    }

    pub fn is_angle(&self) -> bool {
        self.kind == CoordKind::Angle
    }

    /// Effective sampling interval after guard bands.
    pub fn sampling_interval(&self) -> (f64, f64) {
        match self.kind {
            CoordKind::Angle => (self.lo, self.lo + TAU),
            CoordKind::Interval => {
                let lo = if self.singular_lo {
                    self.lo + SINGULAR_GUARD
                } else {
                    self.lo
                };
                let hi = if self.singular_hi {
                    self.hi - SINGULAR_GUARD
                } else {
                    self.hi
                };
                (lo, hi)
            }
        }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        let (lo, hi) = self.sampling_interval();
        match self.kind {
            CoordKind::Angle => lo + rng.random::<f64>() * TAU,
            CoordKind::Interval if hi == lo => lo,
            CoordKind::Interval => lo + rng.random::<f64>() * (hi - lo),
        }
    }
}

/// Product of coordinate ranges; the sampling domain of a chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DomainBox {
    ranges: Vec<CoordRange>,
}

impl DomainBox {
    pub fn new(ranges: Vec<CoordRange>) -> Result<Self, ExprError> {
        for (i, r) in ranges.iter().enumerate() {
            if ranges[..i].iter().any(|q| q.name == r.name) {
                return Err(ExprError::Domain(format!(
                    "duplicate coordinate `{}`",
                    r.name
                )));
            }
            let (lo, hi) = r.sampling_interval();
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(ExprError::Domain(format!(
                    "empty interval for `{}`: [{}, {}]",
                    r.name, r.lo, r.hi
                )));
            }
        }
        Ok(DomainBox { ranges })
    }

    pub fn ranges(&self) -> &[CoordRange] {
        &self.ranges
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.ranges.iter().map(|r| r.name.as_str())
    }

    pub fn range(&self, name: &str) -> Option<&CoordRange> {
        self.ranges.iter().find(|r| r.name == name)
    }

    /// Copy of the box with one interval coordinate narrowed to `[lo, hi]`.
    pub fn restrict(&self, name: &str, lo: f64, hi: f64) -> Result<Self, ExprError> {
        let mut ranges = self.ranges.clone();
        let r = ranges
            .iter_mut()
            .find(|r| r.name == name)
            .ok_or_else(|| ExprError::Unassigned(name.to_string()))?;
        r.lo = lo;
        r.hi = hi;
        r.singular_lo &= lo <= self.range(name).unwrap().lo;
        r.singular_hi &= hi >= self.range(name).unwrap().hi;
        DomainBox::new(ranges)
    }

    /// Deterministic sample points: identical seeds give identical points.
    pub fn sample_points(&self, count: usize, seed: u64, params: &Env) -> Vec<Env> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut env = Env {
                    coords: Default::default(),
                    params: params.params.clone(),
                };
                for r in &self.ranges {
                    let v = r.sample(&mut rng);
                    env.coords.insert(r.name.clone(), v);
                }
                env
            })
            .collect()
    }

    /// Evenly spaced values of one interval coordinate, the others taken
    /// at their midpoints.
    pub fn grid_along(&self, name: &str, count: usize, params: &Env) -> Vec<Env> {
        let mid: Vec<(String, f64)> = self
            .ranges
            .iter()
            .map(|r| {
                let (lo, hi) = r.sampling_interval();
                (r.name.clone(), 0.5 * (lo + hi))
            })
            .collect();
        let (lo, hi) = self
            .range(name)
            .map(|r| r.sampling_interval())
            .unwrap_or((0.0, 0.0));
        (0..count)
            .map(|i| {
                let t = if count == 1 {
                    0.0
                } else {
                    i as f64 / (count - 1) as f64
                };
                let mut env = Env {
                    coords: mid.iter().cloned().collect(),
                    params: params.params.clone(),
                };
                env.set_coord(name, lo + t * (hi - lo));
                env
            })
            .collect()
    }
}
