//! Synthetic stand-ins for image descriptors.
//!
//! A fixed pool of part prototypes plays the role of recurring local image
//! structures. Prototypes are non-negative, unit-norm and clipped at 0.2
//! before renormalization, like gradient-histogram descriptors. Every
//! object mixes all parts in proportions drawn from a Dirichlet
//! distribution; its descriptors are noisy copies of the prototypes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Normal};

use super::{ObjectDescriptors, DESCRIPTOR_DIM};
use crate::error::{Error, Result};

const CLIP: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub parts: usize,
    pub descriptors_per_object: usize,
    /// Dirichlet concentration of the per-object part proportions.
    pub concentration: f64,
    /// Standard deviation of the per-component noise.
    pub noise: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            parts: 37,
            descriptors_per_object: 120,
            concentration: 0.5,
            noise: 0.01,
        }
    }
}

impl SyntheticConfig {
    fn validate(&self) -> Result<()> {
        if self.parts == 0 || self.descriptors_per_object == 0 {
            return Err(Error::InvalidParam(
                "parts and descriptors_per_object must be positive".into(),
            ));
        }
        if !(self.concentration > 0.0 && self.noise >= 0.0) {
            return Err(Error::InvalidParam(
                "concentration must be positive and noise non-negative".into(),
            ));
        }
        Ok(())
    }
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn clip_normalize(v: &mut [f64]) {
    normalize(v);
    v.iter_mut().for_each(|x| *x = x.min(CLIP));
    normalize(v);
}

fn dirichlet(rng: &mut ChaCha8Rng, k: usize, concentration: f64) -> Vec<f64> {
    let gamma = Gamma::new(concentration, 1.0).expect("valid shape");
    let mut w: Vec<f64> = (0..k).map(|_| gamma.sample(rng)).collect();
    let total: f64 = w.iter().sum();
    if total > 0.0 {
        w.iter_mut().for_each(|x| *x /= total);
    } else {
        w.iter_mut().for_each(|x| *x = 1.0 / k as f64);
    }
    w
}

fn pick(rng: &mut ChaCha8Rng, w: &[f64]) -> usize {
    let mut u: f64 = rng.gen();
    for (i, &p) in w.iter().enumerate() {
        if u < p {
            return i;
        }
        u -= p;
    }
    w.len() - 1
}

/// One descriptor block per name, deterministic in `seed`.
pub fn generate(
    names: &[String],
    cfg: &SyntheticConfig,
    seed: u64,
) -> Result<Vec<ObjectDescriptors>> {
    Ok(generate_labeled(names, cfg, seed)?.0)
}

/// Like [`generate`], also returning the part index of every descriptor.
pub fn generate_labeled(
    names: &[String],
    cfg: &SyntheticConfig,
    seed: u64,
) -> Result<(Vec<ObjectDescriptors>, Vec<Vec<usize>>)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = Normal::<f64>::new(0.0, 1.0).expect("valid sd");
    let parts: Vec<Vec<f64>> = (0..cfg.parts)
        .map(|_| {
            let mut p: Vec<f64> = (0..DESCRIPTOR_DIM)
                .map(|_| unit.sample(&mut rng).abs())
                .collect();
            clip_normalize(&mut p);
            p
        })
        .collect();
    let noise = Normal::<f64>::new(0.0, cfg.noise).expect("valid sd");

    let mut out = Vec::with_capacity(names.len());
    let mut labels = Vec::with_capacity(names.len());
    for name in names {
        let w = dirichlet(&mut rng, cfg.parts, cfg.concentration);
        let mut descriptors = Vec::with_capacity(cfg.descriptors_per_object);
        let mut object_labels = Vec::with_capacity(cfg.descriptors_per_object);
        for _ in 0..cfg.descriptors_per_object {
            let p = pick(&mut rng, &w);
            let mut d: Vec<f64> = parts[p]
                .iter()
                .map(|&v| (v + noise.sample(&mut rng)).max(0.0))
                .collect();
            clip_normalize(&mut d);
            descriptors.push(d);
            object_labels.push(p);
        }
        out.push(ObjectDescriptors {
            name: name.clone(),
            descriptors,
        });
        labels.push(object_labels);
    }
    Ok((out, labels))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("obj{i}")).collect()
    }

    #[test]
    fn shape_and_norms() {
        let cfg = SyntheticConfig::default();
        let objs = generate(&names(3), &cfg, 9).unwrap();
        assert_eq!(objs.len(), 3);
        for o in &objs {
            assert_eq!(o.descriptors.len(), cfg.descriptors_per_object);
            for d in &o.descriptors {
                assert_eq!(d.len(), DESCRIPTOR_DIM);
                assert!(d.iter().all(|&v| v >= 0.0));
                let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn labels_follow_descriptors() {
        let cfg = SyntheticConfig::default();
        let (objs, labels) = generate_labeled(&names(2), &cfg, 1).unwrap();
        for (o, l) in objs.iter().zip(&labels) {
            assert_eq!(o.descriptors.len(), l.len());
            assert!(l.iter().all(|&p| p < cfg.parts));
        }
    }

    #[test]
    fn deterministic_in_seed() {
        let cfg = SyntheticConfig::default();
        assert_eq!(
            generate(&names(4), &cfg, 5).unwrap(),
            generate(&names(4), &cfg, 5).unwrap()
        );
        assert_ne!(
            generate(&names(4), &cfg, 5).unwrap(),
            generate(&names(4), &cfg, 6).unwrap()
        );
    }

    #[test]
    fn invalid_config() {
        let cfg = SyntheticConfig {
            concentration: 0.0,
            ..SyntheticConfig::default()
        };
        assert!(generate(&names(1), &cfg, 0).is_err());
    }
}
