//! Seeded random points of the stability region.
//!
//! Sample `index` under `seed` is drawn from its own ChaCha8 stream, so any
//! subset of samples can be generated in any order with identical results.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::filter::{RootKind, DEFAULT_STABILITY_MARGIN};
use crate::kahler::ModelPoint;
use crate::C;

/// Tuples with two roots closer than this are redrawn.
pub const DEFAULT_MIN_SEPARATION: f64 = 1e-4;

/// Redraws allowed per sample before giving up.
const MAX_ATTEMPTS: usize = 1 << 20;

/// Numbers of poles and zeros.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModelShape {
    pub p: usize,
    pub q: usize,
}

impl ModelShape {
    pub fn ar(p: usize) -> Self {
        Self { p, q: 0 }
    }

    pub fn arma(p: usize, q: usize) -> Self {
        Self { p, q }
    }

    pub fn dimension(&self) -> usize {
        self.p + self.q
    }

    pub fn kinds(&self) -> Vec<RootKind> {
        core::iter::repeat_n(RootKind::Pole, self.p)
            .chain(core::iter::repeat_n(RootKind::Zero, self.q))
            .collect()
    }
}

/// Polydisk radius and separation used when drawing points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplingRegion {
    pub radius: f64,
    pub min_separation: f64,
}

impl Default for SamplingRegion {
    fn default() -> Self {
        Self {
            radius: 1.0 - DEFAULT_STABILITY_MARGIN,
            min_separation: DEFAULT_MIN_SEPARATION,
        }
    }
}

/// A drawn point and the number of tuples rejected before it.
#[derive(Clone, Debug, PartialEq)]
pub struct Draw {
    pub point: ModelPoint,
    pub rejected: usize,
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn uniform_disk(rng: &mut ChaCha8Rng, radius: f64) -> C {
    let r = radius * libm::sqrt(unit_f64(rng));
    let t = 2.0 * PI * unit_f64(rng);
    C::new(r * libm::cos(t), r * libm::sin(t))
}

/// Uniform point of the polydisk `|ξ^i| ≤ region.radius`, conditioned on
/// pairwise separation. Panics if `region` admits no point, which only
/// happens for a separation comparable to the radius.
pub fn draw(shape: ModelShape, region: SamplingRegion, seed: u64, index: u64) -> Draw {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let kinds = shape.kinds();
    for rejected in 0..MAX_ATTEMPTS {
        let params: Vec<C> = (0..shape.dimension())
            .map(|_| uniform_disk(&mut rng, region.radius))
            .collect();
        let point = ModelPoint::new(params, kinds.clone()).expect("radius below 1");
        if point.min_pairwise_distance() >= region.min_separation {
            return Draw { point, rejected };
        }
    }
    panic!("no admissible point after {MAX_ATTEMPTS} draws");
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn draws_are_keyed_by_seed_and_index() {
        let shape = ModelShape::arma(2, 1);
        let region = SamplingRegion::default();
        let a = draw(shape, region, 7, 3);
        let b = draw(shape, region, 7, 3);
        assert_eq!(a, b);
        assert_ne!(draw(shape, region, 7, 4).point, a.point);
        assert_ne!(draw(shape, region, 8, 3).point, a.point);
        assert_eq!(a.point.kinds(), shape.kinds());
    }

    #[test]
    fn draws_respect_region() {
        let region = SamplingRegion {
            radius: 0.9,
            min_separation: 0.05,
        };
        for i in 0..500 {
            let d = draw(ModelShape::arma(2, 2), region, 11, i);
            assert!(d.point.params().iter().all(|p| p.norm() <= 0.9));
            assert!(d.point.min_pairwise_distance() >= 0.05);
        }
    }

    #[test]
    fn tight_separation_forces_rejections() {
        let region = SamplingRegion {
            radius: 0.5,
            min_separation: 0.6,
        };
        let total: usize = (0..50).map(|i| draw(ModelShape::ar(2), region, 1, i).rejected).sum();
        assert!(total > 0);
    }
}
