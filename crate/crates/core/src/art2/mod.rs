//! ART2 network extended with recurrent context units.
//!
//! Besides the usual F1/F2 layers the network keeps a context vector `uc`,
//! a leaky integral of the noise-suppressed F1 activity. It is rescaled after
//! every presentation and copied into the first half of the interface vector
//! `pc`; the second half of `pc` mirrors the context part of the top-down
//! row of the current F2 candidate. Committed F2 rows span `2n` components:
//! a pattern half and a context half.

mod snapshot;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// Vigilance decrement applied after each failed recognition search.
pub const RECOGNITION_RHO_STEP: f64 = 0.005;
/// Lowest vigilance reached while relaxing during recognition.
pub const RECOGNITION_RHO_FLOOR: f64 = 0.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Art2Params {
    /// Number of F1 units (input size).
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// Reset weight.
    pub c: f64,
    /// F2 winner activity.
    pub d: f64,
    /// Guard added to every norm used as a divisor.
    pub e: f64,
    /// Noise suppression threshold.
    pub theta: f64,
    pub alpha: f64,
    /// Vigilance.
    pub rho: f64,
    pub epochs: usize,
    pub n_iter: usize,
    /// Weight of the previous context value in the context recurrence.
    pub back: f64,
    /// Influence of the context on F2 competition and reset.
    pub cw: f64,
    pub d_ctx: f64,
    pub alpha_ctx: f64,
}

impl Art2Params {
    /// Context-module parameter block used by the word learning simulations.
    pub fn context_module(n: usize) -> Self {
        Art2Params {
            n,
            a: 10.0,
            b: 10.0,
            c: 0.1,
            d: 0.9,
            e: 0.0001,
            theta: 0.0739221,
            alpha: 0.8,
            rho: 0.999,
            epochs: 1,
            n_iter: 1,
            back: 0.9,
            cw: 0.0002,
            d_ctx: 0.9,
            alpha_ctx: 0.8,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::InvalidParam(format!(
                    "{name} = {v} is outside [0, 1]"
                )))
            }
        };
        if self.n == 0 {
            return Err(Error::InvalidParam("n must be at least 1".into()));
        }
        if !(self.a > 0.0 && self.b > 0.0) {
            return Err(Error::InvalidParam("a and b must be positive".into()));
        }
        unit("c", self.c)?;
        if !(0.0..1.0).contains(&self.d) {
            return Err(Error::InvalidParam(format!(
                "d = {} is outside [0, 1)",
                self.d
            )));
        }
        if self.e.is_nan() || self.e <= 0.0 {
            return Err(Error::InvalidParam("e must be positive".into()));
        }
        if self.theta.is_nan() || self.theta < 0.0 {
            return Err(Error::InvalidParam("theta must be non-negative".into()));
        }
        unit("alpha", self.alpha)?;
        unit("rho", self.rho)?;
        unit("back", self.back)?;
        unit("cw", self.cw)?;
        unit("d_ctx", self.d_ctx)?;
        unit("alpha_ctx", self.alpha_ctx)?;
        if self.epochs == 0 || self.n_iter == 0 {
            return Err(Error::InvalidParam(
                "epochs and n_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// F1 layer activities.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct F1 {
    pub u: Vec<f64>,
    pub w: Vec<f64>,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub r: Vec<f64>,
    pub s: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainOutcome {
    pub group: usize,
    pub created: bool,
    /// Iterations of the reset loop for this presentation.
    pub searches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Art2Network {
    params: Art2Params,
    f1: F1,
    uc: Vec<f64>,
    pc: Vec<f64>,
    /// One `2n` row per committed F2 unit.
    top_down: Vec<Vec<f64>>,
    bottom_up: Vec<Vec<f64>>,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn scaled(v: &[f64], e: f64) -> Vec<f64> {
    let k = e + norm(v);
    v.iter().map(|x| x / k).collect()
}

impl Art2Network {
    pub fn new(params: Art2Params) -> Result<Self> {
        params.validate()?;
        let n = params.n;
        Ok(Art2Network {
            f1: F1 {
                u: vec![0.0; n],
                w: vec![0.0; n],
                p: vec![0.0; n],
                q: vec![0.0; n],
                r: vec![0.0; n],
                s: vec![0.0; n],
                x: vec![0.0; n],
                v: vec![0.0; n],
            },
            uc: vec![0.0; n],
            pc: vec![0.0; 2 * n],
            top_down: Vec::new(),
            bottom_up: Vec::new(),
            params,
        })
    }

    pub fn params(&self) -> &Art2Params {
        &self.params
    }

    pub fn group_count(&self) -> usize {
        self.top_down.len()
    }

    pub fn f1(&self) -> &F1 {
        &self.f1
    }

    /// Current context units, the representation handed to the association
    /// layer.
    pub fn context_vector(&self) -> Vec<f64> {
        self.uc.clone()
    }

    pub fn interface_context(&self) -> &[f64] {
        &self.pc
    }

    pub fn top_down(&self, group: usize) -> Option<&[f64]> {
        self.top_down.get(group).map(Vec::as_slice)
    }

    pub fn bottom_up(&self, group: usize) -> Option<&[f64]> {
        self.bottom_up.get(group).map(Vec::as_slice)
    }

    /// Overwrites the context units, e.g. to start a sequence from a known
    /// context.
    pub fn set_context(&mut self, uc: &[f64]) -> Result<()> {
        check_dim(self.params.n, uc.len())?;
        self.uc.copy_from_slice(uc);
        self.pc[..self.params.n].copy_from_slice(uc);
        Ok(())
    }

    fn suppress(&self, x: f64) -> f64 {
        noise_suppress(x, self.params.theta)
    }

    /// F1 initialisation and first update for stimulus `s`, then the context
    /// recurrence and its rescale.
    fn present(&mut self, s: &[f64]) -> Result<()> {
        check_dim(self.params.n, s.len())?;
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("ART2 stimulus"));
        }
        let n = self.params.n;
        let e = self.params.e;
        self.f1.s = s.to_vec();
        self.f1.u = vec![0.0; n];
        self.f1.w = s.to_vec();
        self.f1.p = vec![0.0; n];
        self.f1.q = vec![0.0; n];
        self.f1.x = scaled(s, e);
        self.f1.v = self.f1.x.iter().map(|&x| self.suppress(x)).collect();

        // u = v/(e+|v|), w = s + a u, p = u, then x, q, v
        self.f1.u = scaled(&self.f1.v, e);
        self.f1.p = self.f1.u.clone();
        self.settle_f1();

        let back = self.params.back;
        for i in 0..n {
            let fu = self.suppress(self.f1.u[i]);
            self.uc[i] = back * self.uc[i] + (1.0 - back) * fu;
        }
        self.uc = scaled(&self.uc, e);
        self.pc[..n].copy_from_slice(&self.uc);
        Ok(())
    }

    /// Recomputes `w`, `x`, `q` and `v` from the current `s`, `u` and `p`.
    fn settle_f1(&mut self) {
        let p = &self.params;
        let f1 = &mut self.f1;
        f1.w = f1.s.iter().zip(&f1.u).map(|(s, u)| s + p.a * u).collect();
        f1.x = scaled(&f1.w, p.e);
        f1.q = scaled(&f1.p, p.e);
        let theta = p.theta;
        f1.v =
            f1.x.iter()
                .zip(&f1.q)
                .map(|(&x, &q)| noise_suppress(x, theta) + p.b * noise_suppress(q, theta))
                .collect();
    }

    /// F2 activations of the committed units.
    pub fn f2_activations(&self) -> Vec<f64> {
        let n = self.params.n;
        let cw = self.params.cw;
        let p = &self.f1.p;
        self.bottom_up
            .iter()
            .map(|row| {
                let pattern: f64 = row[..n].iter().zip(p).map(|(b, p)| b * p).sum();
                let context: f64 = row[n..].iter().zip(p).map(|(b, p)| b * p).sum();
                (1.0 - cw) * pattern + cw * context
            })
            .collect()
    }

    /// Matches the current F1 state against committed unit `j`. Leaves F1 in
    /// the post-check state and returns the norm of `r`.
    fn match_unit(&mut self, j: usize) -> f64 {
        let n = self.params.n;
        let Art2Params { c, d, e, cw, .. } = self.params;
        let t = &self.top_down[j];
        self.f1.u = scaled(&self.f1.v, e);
        self.f1.p = self
            .f1
            .u
            .iter()
            .zip(&t[..n])
            .map(|(u, t)| u + d * t)
            .collect();
        self.pc[n..].copy_from_slice(&t[n..]);
        let denom = e + norm(&self.f1.u) + c * norm(&self.f1.p) + cw * norm(&self.pc);
        self.f1.r = self
            .f1
            .u
            .iter()
            .zip(&self.f1.p)
            .map(|(u, p)| (u + c * p + cw) / denom)
            .collect();
        norm(&self.f1.r)
    }

    /// Reset loop over committed units at vigilance `rho`. Returns the
    /// resonating unit (if any) and the number of loop iterations.
    fn search(&mut self, rho: f64) -> (Option<usize>, usize) {
        let y = self.f2_activations();
        let mut enabled = vec![true; y.len()];
        let mut iterations = 0;
        loop {
            iterations += 1;
            let best = (0..y.len())
                .filter(|&j| enabled[j])
                .fold(None, |best: Option<usize>, j| match best {
                    Some(b) if y[b] >= y[j] => Some(b),
                    _ => Some(j),
                });
            let Some(j) = best else {
                return (None, iterations);
            };
            let r = self.match_unit(j);
            if r < rho - self.params.e {
                enabled[j] = false;
            } else {
                self.settle_f1();
                return (Some(j), iterations);
            }
        }
    }

    fn commit_unit(&mut self) -> usize {
        let n = self.params.n;
        let init = 0.5 / ((1.0 - self.params.d) * (n as f64).sqrt());
        self.top_down.push(vec![0.0; 2 * n]);
        self.bottom_up.push(vec![init; 2 * n]);
        self.top_down.len() - 1
    }

    fn learn(&mut self, j: usize) {
        let n = self.params.n;
        let Art2Params {
            alpha,
            d,
            alpha_ctx,
            d_ctx,
            e,
            ..
        } = self.params;
        let keep = 1.0 + alpha * d * (d - 1.0);
        let keep_ctx = 1.0 + alpha_ctx * d_ctx * (d_ctx - 1.0);
        for _ in 0..self.params.n_iter {
            for rows in [&mut self.top_down, &mut self.bottom_up] {
                let row = &mut rows[j];
                for i in 0..n {
                    row[i] = alpha * d * self.f1.u[i] + keep * row[i];
                    row[i + n] = alpha_ctx * d_ctx * self.uc[i] + keep_ctx * row[i + n];
                }
                let k = norm(row);
                if k > 0.0 {
                    row.iter_mut().for_each(|v| *v /= k);
                }
            }
            let t = &self.top_down[j];
            self.f1.u = scaled(&self.f1.v, e);
            self.f1.p = self
                .f1
                .u
                .iter()
                .zip(&t[..n])
                .map(|(u, t)| u + d * t)
                .collect();
            self.settle_f1();
        }
    }

    /// Presents one training stimulus: context update, F2 search under the
    /// configured vigilance, and learning on the resonating (or newly
    /// committed) unit.
    pub fn train_pattern(&mut self, s: &[f64]) -> Result<TrainOutcome> {
        self.present(s)?;
        let (found, searches) = self.search(self.params.rho);
        let (group, created) = match found {
            Some(j) => (j, false),
            None => {
                let j = self.commit_unit();
                // a fresh unit has a zero top-down row
                self.f1.u = scaled(&self.f1.v, self.params.e);
                self.f1.p = self.f1.u.clone();
                (j, true)
            }
        };
        self.learn(group);
        Ok(TrainOutcome {
            group,
            created,
            searches,
        })
    }

    /// Trains on a sequence for the configured number of epochs.
    pub fn train(&mut self, stimuli: &[Vec<f64>]) -> Result<Vec<TrainOutcome>> {
        let mut out = Vec::with_capacity(stimuli.len() * self.params.epochs);
        for _ in 0..self.params.epochs {
            for s in stimuli {
                out.push(self.train_pattern(s)?);
            }
        }
        Ok(out)
    }

    /// Recognition without weight storage. Vigilance starts at the
    /// configured value and is relaxed by [`RECOGNITION_RHO_STEP`] after
    /// every failed search down to [`RECOGNITION_RHO_FLOOR`]; if nothing
    /// resonates even there the unit with the highest F2 activation is
    /// returned. The context units advance as in training.
    pub fn recognize_pattern(&mut self, s: &[f64]) -> Result<usize> {
        if self.top_down.is_empty() {
            check_dim(self.params.n, s.len())?;
            return Err(Error::NoGroups);
        }
        self.present(s)?;
        let settled = self.f1.clone();
        let mut rho = self.params.rho;
        loop {
            self.f1 = settled.clone();
            if let (Some(j), _) = self.search(rho) {
                return Ok(j);
            }
            if rho <= RECOGNITION_RHO_FLOOR {
                break;
            }
            rho = (rho - RECOGNITION_RHO_STEP).max(RECOGNITION_RHO_FLOOR);
        }
        self.f1 = settled;
        let y = self.f2_activations();
        let best = (1..y.len()).fold(0, |b, j| if y[j] > y[b] { j } else { b });
        Ok(best)
    }
}

/// `x` if `x >= theta`, zero otherwise.
pub fn noise_suppress(x: f64, theta: f64) -> f64 {
    if x >= theta {
        x
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(n: usize) -> Art2Params {
        Art2Params::context_module(n)
    }

    #[test]
    fn suppression_boundary() {
        let th = 0.0739221;
        assert_eq!(noise_suppress(th, th), th);
        assert_eq!(noise_suppress(0.0, th), 0.0);
        assert_eq!(noise_suppress(0.05, th), 0.0);
        assert_eq!(noise_suppress(0.5, th), 0.5);
    }

    #[test]
    fn first_stimulus_creates_group() {
        let mut net = Art2Network::new(params(2)).unwrap();
        let out = net.train_pattern(&[0.6, 0.8]).unwrap();
        assert!(out.created);
        assert_eq!(out.group, 0);
        assert_eq!(net.group_count(), 1);
    }

    #[test]
    fn repeated_stimulus_resonates() {
        let mut p = params(2);
        p.back = 1.0; // context pinned at zero
        let mut net = Art2Network::new(p).unwrap();
        net.train_pattern(&[0.6, 0.8]).unwrap();
        let out = net.train_pattern(&[0.6, 0.8]).unwrap();
        assert_eq!(
            out,
            TrainOutcome {
                group: 0,
                created: false,
                searches: 1
            }
        );
        assert_eq!(net.context_vector(), vec![0.0, 0.0]);
    }

    #[test]
    fn orthogonal_stimuli_split() {
        let mut p = params(2);
        p.back = 1.0;
        let mut net = Art2Network::new(p).unwrap();
        let a = net.train_pattern(&[1.0, 0.0]).unwrap();
        let b = net.train_pattern(&[0.0, 1.0]).unwrap();
        assert!(a.created && b.created);
        assert_ne!(a.group, b.group);
        assert_eq!(b.searches, 2);
    }

    #[test]
    fn fresh_context_is_zero() {
        let net = Art2Network::new(params(5)).unwrap();
        assert_eq!(net.context_vector(), vec![0.0; 5]);
    }

    #[test]
    fn context_after_one_stimulus() {
        // x = s/(e+|s|), v = f(x), u = v/(e+|v|); uc = 0.1 f(u) rescaled
        let e = 1e-4;
        let s = [0.6, 0.8];
        let x: Vec<f64> = s.iter().map(|v| v / (e + 1.0)).collect();
        let nx = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let u: Vec<f64> = x.iter().map(|v| v / (e + nx)).collect();
        let raw: Vec<f64> = u.iter().map(|v| 0.1 * v).collect();
        let nr = (raw[0] * raw[0] + raw[1] * raw[1]).sqrt();
        let expect: Vec<f64> = raw.iter().map(|v| v / (e + nr)).collect();

        let mut net = Art2Network::new(params(2)).unwrap();
        net.train_pattern(&s).unwrap();
        let uc = net.context_vector();
        assert_abs_diff_eq!(uc[0], expect[0], epsilon = 1e-12);
        assert_abs_diff_eq!(uc[1], expect[1], epsilon = 1e-12);
    }

    #[test]
    fn identical_stimuli_keep_context_direction() {
        let mut net = Art2Network::new(params(3)).unwrap();
        let s = [0.2, 0.5, 0.9];
        net.train_pattern(&s).unwrap();
        net.train_pattern(&s).unwrap();
        let uc = net.context_vector();
        let ns = norm(&s);
        let nu = norm(&uc);
        for i in 0..3 {
            assert_abs_diff_eq!(uc[i] / nu, s[i] / ns, epsilon = 1e-9);
        }
    }

    #[test]
    fn recognition_finds_stored_and_nearest() {
        let mut p = params(2);
        p.back = 1.0;
        let mut net = Art2Network::new(p).unwrap();
        net.train_pattern(&[1.0, 0.0]).unwrap();
        net.train_pattern(&[0.0, 1.0]).unwrap();
        let weights = (net.top_down.clone(), net.bottom_up.clone());

        assert_eq!(net.recognize_pattern(&[1.0, 0.0]).unwrap(), 0);
        assert_eq!(net.recognize_pattern(&[0.0, 1.0]).unwrap(), 1);

        // brute force: y_j = sum_i b_ij u_i with u the normalised input
        let s = [0.9, 0.3];
        let ns = norm(&s);
        let u = [s[0] / ns, s[1] / ns];
        let y: Vec<f64> = weights
            .1
            .iter()
            .map(|row| row[0] * u[0] + row[1] * u[1])
            .collect();
        let nearest = if y[0] >= y[1] { 0 } else { 1 };
        assert_eq!(net.recognize_pattern(&s).unwrap(), nearest);
        assert_eq!(nearest, 0);
        assert_eq!((net.top_down.clone(), net.bottom_up.clone()), weights);
    }

    #[test]
    fn recognition_requires_groups() {
        let mut net = Art2Network::new(params(2)).unwrap();
        assert!(matches!(
            net.recognize_pattern(&[1.0, 0.0]),
            Err(Error::NoGroups)
        ));
    }

    #[test]
    fn bad_input_rejected() {
        let mut net = Art2Network::new(params(2)).unwrap();
        assert!(matches!(
            net.train_pattern(&[f64::NAN, 0.0]),
            Err(Error::NonFinite(_))
        ));
        assert!(net.train_pattern(&[1.0]).is_err());
    }

    #[test]
    fn invalid_params() {
        let mut p = params(2);
        p.d = 1.0;
        assert!(Art2Network::new(p).is_err());
        let mut p = params(2);
        p.n_iter = 0;
        assert!(Art2Network::new(p).is_err());
    }
}
