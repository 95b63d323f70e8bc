//! Model parameter blocks and the flat `key = value` parameter file.
//!
//! ```text
//! # comments start with '#'
//! visual.a_t = 0.985
//! visual.lp = 0.15%
//! visual.maxcomp = 0.021*S
//! visual.e_n = 12e-6*e_b
//! association.n_max = none
//! context.rho = 0.999
//! pipeline.context_granularity = trial
//! representation.histogram_weighting = counts
//! ```
//!
//! `S` is the length of the stream the layer is trained on. Values of
//! `maxcomp` may be an integer or a multiple of `S`; `e_n` may be absolute
//! or a multiple of `e_b`; `lp` may carry a `%` suffix.

use std::fmt::{self, Write as _};
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::art2::Art2Params;
use crate::error::{Error, Result};
use crate::som::MapParams;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum MaxComp {
    Fixed(usize),
    /// Multiple of the training stream length, floored, at least 1.
    PerStimulus(f64),
}

impl MaxComp {
    pub fn resolve(self, stream_len: usize) -> usize {
        match self {
            MaxComp::Fixed(n) => n.max(1),
            MaxComp::PerStimulus(f) => ((f * stream_len as f64).floor() as usize).max(1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum NeighborRate {
    Absolute(f64),
    /// Multiple of the winner rate `e_b`.
    RelativeToWinner(f64),
}

/// LARFDSSOM block of one layer, before the stream length is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub a_t: f64,
    pub lp: f64,
    pub beta: f64,
    pub maxcomp: MaxComp,
    pub e_b: f64,
    pub e_n: NeighborRate,
    pub s: f64,
    pub c: f64,
    pub n_max: Option<usize>,
    pub epsilon: f64,
}

impl LayerParams {
    pub fn visual() -> Self {
        LayerParams {
            a_t: 0.985,
            lp: 0.0015,
            beta: 0.1,
            maxcomp: MaxComp::PerStimulus(0.021),
            e_b: 0.0005,
            e_n: NeighborRate::RelativeToWinner(12e-6),
            s: 0.00758176,
            c: 0.5,
            n_max: None,
            epsilon: 1e-9,
        }
    }

    pub fn auditory() -> Self {
        LayerParams {
            a_t: 0.935,
            lp: 0.00001,
            beta: 0.1,
            maxcomp: MaxComp::PerStimulus(2.0),
            e_b: 0.1,
            e_n: NeighborRate::RelativeToWinner(14e-6),
            s: 0.00394,
            c: 0.5,
            n_max: None,
            epsilon: 1e-9,
        }
    }

    pub fn association() -> Self {
        LayerParams {
            a_t: 0.999,
            lp: 0.175211,
            beta: 0.870879,
            maxcomp: MaxComp::Fixed(10000),
            e_b: 0.465091,
            e_n: NeighborRate::RelativeToWinner(0.0134102),
            s: 1.31357,
            c: 0.986745,
            n_max: None,
            epsilon: 1e-9,
        }
    }

    pub fn e_n(&self) -> f64 {
        match self.e_n {
            NeighborRate::Absolute(v) => v,
            NeighborRate::RelativeToWinner(f) => f * self.e_b,
        }
    }

    pub fn map_params(&self, stream_len: usize) -> MapParams {
        MapParams {
            a_t: self.a_t,
            lp: self.lp,
            beta: self.beta,
            maxcomp: self.maxcomp.resolve(stream_len),
            e_b: self.e_b,
            e_n: self.e_n(),
            s: self.s,
            conn_thr: self.c,
            n_max: self.n_max,
            epsilon: self.epsilon,
        }
    }
}

/// When the context network is presented with a multisensory input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContextGranularity {
    /// Once per trial, with the mean visual histogram of its referents.
    Trial,
    /// Once per (word stream, referent) pair.
    Pair,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Weighting {
    Counts,
    Binary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub visual: LayerParams,
    pub auditory: LayerParams,
    pub association: LayerParams,
    /// Context block; `n` is replaced by the representation size at build time.
    pub context: Art2Params,
    pub context_granularity: ContextGranularity,
    pub histogram_weighting: Weighting,
    pub codebook_passes: usize,
}

/// Visual activation threshold used by default. The reference block's
/// 0.985 merges unit-norm 128-d descriptors into a single cluster.
pub const CALIBRATED_VISUAL_A_T: f64 = 0.995;

impl Default for ModelParams {
    fn default() -> Self {
        let mut p = ModelParams::table1();
        p.visual.a_t = CALIBRATED_VISUAL_A_T;
        p
    }
}

impl ModelParams {
    /// The reference parameter blocks, unmodified.
    pub fn table1() -> Self {
        ModelParams {
            visual: LayerParams::visual(),
            auditory: LayerParams::auditory(),
            association: LayerParams::association(),
            context: Art2Params::context_module(0),
            context_granularity: ContextGranularity::Trial,
            histogram_weighting: Weighting::Counts,
            codebook_passes: 2,
        }
    }
}

const LAYER_KEYS: [&str; 10] = [
    "a_t", "lp", "beta", "maxcomp", "e_b", "e_n", "s", "c", "n_max", "epsilon",
];
const CONTEXT_KEYS: [&str; 14] = [
    "a",
    "b",
    "c",
    "d",
    "e",
    "theta",
    "alpha",
    "rho",
    "epochs",
    "n_iter",
    "back",
    "cw",
    "d_ctx",
    "alpha_ctx",
];

impl ModelParams {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Applies the assignments in `text` on top of the defaults.
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        let mut p = ModelParams::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::parse(source, i + 1, msg);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err("expected `key = value`".into()))?;
            p.set(key.trim(), value.trim()).map_err(err)?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let (section, name) = key
            .split_once('.')
            .ok_or_else(|| format!("unknown key `{key}`"))?;
        match section {
            "visual" => set_layer(&mut self.visual, name, value),
            "auditory" => set_layer(&mut self.auditory, name, value),
            "association" => set_layer(&mut self.association, name, value),
            "context" => set_context(&mut self.context, name, value),
            "pipeline" if name == "context_granularity" => {
                self.context_granularity = match value {
                    "trial" => ContextGranularity::Trial,
                    "pair" => ContextGranularity::Pair,
                    _ => return Err(format!("`{key}` must be `trial` or `pair`")),
                };
                Ok(())
            }
            "representation" if name == "histogram_weighting" => {
                self.histogram_weighting = match value {
                    "counts" => Weighting::Counts,
                    "binary" => Weighting::Binary,
                    _ => return Err(format!("`{key}` must be `counts` or `binary`")),
                };
                Ok(())
            }
            "representation" if name == "codebook_passes" => {
                self.codebook_passes = num(value)?;
                Ok(())
            }
            _ => Err(format!("unknown key `{key}`")),
        }
        .map_err(|e| {
            if e.starts_with("unknown key") {
                format!("unknown key `{key}`")
            } else {
                e
            }
        })
    }

    pub fn validate(&self) -> Result<()> {
        for layer in [&self.visual, &self.auditory, &self.association] {
            layer.map_params(1).validate()?;
        }
        let mut ctx = self.context.clone();
        ctx.n = 1;
        ctx.validate()?;
        if self.codebook_passes == 0 {
            return Err(Error::InvalidParam(
                "codebook_passes must be at least 1".into(),
            ));
        }
        Ok(())
    }

    /// Canonical text form; parsing it back yields an equal value.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (name, layer) in [
            ("visual", &self.visual),
            ("auditory", &self.auditory),
            ("association", &self.association),
        ] {
            for key in LAYER_KEYS {
                writeln!(out, "{name}.{key} = {}", layer_value(layer, key)).unwrap();
            }
        }
        let c = &self.context;
        let ctx = [
            format!("{:?}", c.a),
            format!("{:?}", c.b),
            format!("{:?}", c.c),
            format!("{:?}", c.d),
            format!("{:?}", c.e),
            format!("{:?}", c.theta),
            format!("{:?}", c.alpha),
            format!("{:?}", c.rho),
            c.epochs.to_string(),
            c.n_iter.to_string(),
            format!("{:?}", c.back),
            format!("{:?}", c.cw),
            format!("{:?}", c.d_ctx),
            format!("{:?}", c.alpha_ctx),
        ];
        for (key, v) in CONTEXT_KEYS.iter().zip(ctx) {
            writeln!(out, "context.{key} = {v}").unwrap();
        }
        let gran = match self.context_granularity {
            ContextGranularity::Trial => "trial",
            ContextGranularity::Pair => "pair",
        };
        let weight = match self.histogram_weighting {
            Weighting::Counts => "counts",
            Weighting::Binary => "binary",
        };
        writeln!(out, "pipeline.context_granularity = {gran}").unwrap();
        writeln!(out, "representation.histogram_weighting = {weight}").unwrap();
        writeln!(
            out,
            "representation.codebook_passes = {}",
            self.codebook_passes
        )
        .unwrap();
        out
    }

    /// Hex SHA-256 of [`ModelParams::to_text`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_text().as_bytes());
        digest.iter().fold(String::with_capacity(64), |mut s, b| {
            write!(s, "{b:02x}").unwrap();
            s
        })
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    v.parse::<T>().map_err(|e| format!("bad value `{v}`: {e}"))
}

/// `"0.021*S"` / `"0.021S"` -> `Some("0.021")`.
fn strip_factor<'a>(v: &'a str, symbol: &str) -> Option<&'a str> {
    let v = v.strip_suffix(symbol)?.trim_end();
    Some(v.strip_suffix('*').unwrap_or(v).trim_end())
}

fn set_layer(l: &mut LayerParams, name: &str, v: &str) -> std::result::Result<(), String> {
    match name {
        "a_t" => l.a_t = num(v)?,
        "lp" => {
            l.lp = match v.strip_suffix('%') {
                Some(p) => num::<f64>(p.trim())? / 100.0,
                None => num(v)?,
            }
        }
        "beta" => l.beta = num(v)?,
        "maxcomp" => {
            l.maxcomp = match strip_factor(v, "S") {
                Some(f) => MaxComp::PerStimulus(num(f)?),
                None => MaxComp::Fixed(num(v)?),
            }
        }
        "e_b" => l.e_b = num(v)?,
        "e_n" => {
            l.e_n = match strip_factor(v, "e_b") {
                Some(f) => NeighborRate::RelativeToWinner(num(f)?),
                None => NeighborRate::Absolute(num(v)?),
            }
        }
        "s" => l.s = num(v)?,
        "c" => l.c = num(v)?,
        "n_max" => {
            l.n_max = match v {
                "none" => None,
                _ => Some(num(v)?),
            }
        }
        "epsilon" => l.epsilon = num(v)?,
        _ => return Err("unknown key".into()),
    }
    Ok(())
}

fn layer_value(l: &LayerParams, key: &str) -> String {
    match key {
        "a_t" => format!("{:?}", l.a_t),
        "lp" => format!("{:?}", l.lp),
        "beta" => format!("{:?}", l.beta),
        "maxcomp" => match l.maxcomp {
            MaxComp::Fixed(n) => n.to_string(),
            MaxComp::PerStimulus(f) => format!("{f:?}*S"),
        },
        "e_b" => format!("{:?}", l.e_b),
        "e_n" => match l.e_n {
            NeighborRate::Absolute(v) => format!("{v:?}"),
            NeighborRate::RelativeToWinner(f) => format!("{f:?}*e_b"),
        },
        "s" => format!("{:?}", l.s),
        "c" => format!("{:?}", l.c),
        "n_max" => l.n_max.map_or_else(|| "none".into(), |n| n.to_string()),
        "epsilon" => format!("{:?}", l.epsilon),
        _ => unreachable!("layer key {key}"),
    }
}

fn set_context(c: &mut Art2Params, name: &str, v: &str) -> std::result::Result<(), String> {
    match name {
        "a" => c.a = num(v)?,
        "b" => c.b = num(v)?,
        "c" => c.c = num(v)?,
        "d" => c.d = num(v)?,
        "e" => c.e = num(v)?,
        "theta" => c.theta = num(v)?,
        "alpha" => c.alpha = num(v)?,
        "rho" => c.rho = num(v)?,
        "epochs" => c.epochs = num(v)?,
        "n_iter" => c.n_iter = num(v)?,
        "back" => c.back = num(v)?,
        "cw" => c.cw = num(v)?,
        "d_ctx" => c.d_ctx = num(v)?,
        "alpha_ctx" => c.alpha_ctx = num(v)?,
        _ => return Err("unknown key".into()),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_blocks_resolve() {
        let v = LayerParams::visual().map_params(1000);
        assert_eq!(v.maxcomp, 21);
        assert!((v.e_n - 12e-6 * 5e-4).abs() < 1e-20);
        let a = LayerParams::auditory().map_params(80);
        assert_eq!(a.maxcomp, 160);
        assert_eq!(LayerParams::association().map_params(5).maxcomp, 10000);
        assert_eq!(LayerParams::visual().map_params(10).maxcomp, 1);
    }

    #[test]
    fn parse_overrides() {
        let text = "# tweak\nvisual.lp = 0.3%\nvisual.maxcomp = 0.5*S\nauditory.maxcomp = 40\n\
                    association.e_n = 0.01\ncontext.rho = 0.95 # inline\n\
                    pipeline.context_granularity = pair\nrepresentation.histogram_weighting = binary\n";
        let p = ModelParams::parse(text, "p").unwrap();
        assert!((p.visual.lp - 0.003).abs() < 1e-15);
        assert_eq!(p.visual.maxcomp, MaxComp::PerStimulus(0.5));
        assert_eq!(p.auditory.maxcomp, MaxComp::Fixed(40));
        assert_eq!(p.association.e_n, NeighborRate::Absolute(0.01));
        assert_eq!(p.context.rho, 0.95);
        assert_eq!(p.context_granularity, ContextGranularity::Pair);
        assert_eq!(p.histogram_weighting, Weighting::Binary);
    }

    #[test]
    fn unknown_key_is_an_error() {
        match ModelParams::parse("visual.a_t = 0.9\nvisual.speed = 3\n", "p") {
            Err(Error::Parse { line, msg, .. }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("visual.speed"), "{msg}");
            }
            other => panic!("{other:?}"),
        }
        assert!(ModelParams::parse("nonsense\n", "p").is_err());
        assert!(ModelParams::parse("visual.a_t = 1.5\n", "p").is_err());
    }

    #[test]
    fn text_round_trip_and_hash() {
        let mut p = ModelParams::default();
        p.association.n_max = Some(500);
        p.visual.e_n = NeighborRate::Absolute(3e-7);
        let back = ModelParams::parse(&p.to_text(), "p").unwrap();
        assert_eq!(back, p);
        assert_eq!(back.hash(), p.hash());
        assert_eq!(p.hash().len(), 64);
        assert_ne!(ModelParams::default().hash(), p.hash());
    }

    #[test]
    fn default_departs_from_table_only_in_visual_threshold() {
        let mut d = ModelParams::default();
        assert_eq!(d.visual.a_t, CALIBRATED_VISUAL_A_T);
        d.visual.a_t = ModelParams::table1().visual.a_t;
        assert_eq!(d, ModelParams::table1());
    }
}
