#![allow(dead_code)]

use cepgeo_core::kahler::ModelPoint;
use cepgeo_core::sampling::{draw, SamplingRegion};
use cepgeo_core::{ComplexScalar as C, FilterSpec, ModelShape, ValidatedFilter};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPS: f64 = 1e-6;

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn region(radius: f64, min_separation: f64) -> SamplingRegion {
    SamplingRegion { radius, min_separation }
}

pub fn point(shape: ModelShape, seed: u64, index: u64, radius: f64, sep: f64) -> ModelPoint {
    draw(shape, region(radius, sep), seed, index).point
}

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Random shape with 1 to 4 roots, roots in `|ξ| ≤ 0.9`, separated by 0.05.
pub fn random_filter(seed: u64, index: u64, unit_gain: bool) -> ValidatedFilter {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    rng.set_stream(index);
    let (p, q) = loop {
        let p = (rng.next_u64() % 3) as usize;
        let q = (rng.next_u64() % 3) as usize;
        if p + q > 0 {
            break (p, q);
        }
    };
    let gain_term = if unit_gain { 1.0 } else { 0.2 + 3.0 * unit(&mut rng) };
    let m = point(ModelShape::arma(p, q), seed, index, 0.9, 0.05);
    let (poles, zeros) = m.params().split_at(p);
    FilterSpec::with_gain_term(gain_term)
        .poles(poles.iter().copied())
        .zeros(zeros.iter().copied())
        .validate(EPS)
        .unwrap()
}
