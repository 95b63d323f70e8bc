//! Plain-text map snapshots.
//!
//! ```text
//! larfdssom-map v1
//! params a_t=... lp=... beta=... maxcomp=... e_b=... e_n=... s=... conn_thr=... n_max=none epsilon=...
//! state dim=2 nwins=1 next_id=3 rng_seed=7 rng_pos=0
//! nodes 2
//! node id=0 wins=... neighbors=1
//! center ...
//! delta ...
//! relevance ...
//! ```
//!
//! Reals are written with 17 significant digits so that parsing them back is
//! exact.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{MapNode, MapParams, NodeId, SomMap};
use crate::error::{Error, Result};

pub(crate) const MAP_MAGIC: &str = "larfdssom-map v1";

pub(crate) fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn fmt_vec(out: &mut String, tag: &str, v: &[f64]) {
    out.push_str(tag);
    for x in v {
        out.push(' ');
        out.push_str(&fmt_real(*x));
    }
    out.push('\n');
}

/// Line cursor with 1-based line numbers for error messages.
pub(crate) struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    pub(crate) source: &'static str,
    pub(crate) line: usize,
}

impl<'a> Lines<'a> {
    pub(crate) fn new(text: &'a str, source: &'static str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
            source,
            line: 0,
        }
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(self.source, self.line, msg)
    }

    pub(crate) fn next_line(&mut self) -> Result<&'a str> {
        match self.inner.next() {
            Some((i, l)) => {
                self.line = i + 1;
                Ok(l)
            }
            None => Err(self.err("unexpected end of snapshot")),
        }
    }

    /// Next line, which must start with `tag`; returns the remainder.
    pub(crate) fn tagged(&mut self, tag: &str) -> Result<&'a str> {
        let l = self.next_line()?;
        match l.strip_prefix(tag) {
            Some(rest) if rest.is_empty() || rest.starts_with(' ') => Ok(rest.trim_start()),
            _ => Err(self.err(format!("expected `{tag}` line"))),
        }
    }

    pub(crate) fn reals(&mut self, tag: &str, len: usize) -> Result<Vec<f64>> {
        let rest = self.tagged(tag)?;
        let v = rest
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| self.err(format!("bad real in `{tag}`: {e}")))?;
        if v.len() != len {
            return Err(self.err(format!("`{tag}` has {} values, expected {len}", v.len())));
        }
        Ok(v)
    }
}

/// Parses `key=value` fields in the given order.
pub(crate) fn fields<'a>(lines: &Lines<'_>, rest: &'a str, keys: &[&str]) -> Result<Vec<&'a str>> {
    let toks: Vec<&str> = rest.split_whitespace().collect();
    if toks.len() != keys.len() {
        return Err(lines.err(format!(
            "expected {} fields, found {}",
            keys.len(),
            toks.len()
        )));
    }
    toks.iter()
        .zip(keys)
        .map(|(t, k)| {
            t.strip_prefix(k)
                .and_then(|r| r.strip_prefix('='))
                .ok_or_else(|| lines.err(format!("expected field `{k}`")))
        })
        .collect()
}

pub(crate) fn parse_num<T: std::str::FromStr>(lines: &Lines<'_>, key: &str, v: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    v.parse::<T>()
        .map_err(|e| lines.err(format!("bad value for `{key}`: {e}")))
}

pub(crate) fn write_map_params(out: &mut String, p: &MapParams) {
    let n_max = p
        .n_max
        .map_or_else(|| "none".to_string(), |n| n.to_string());
    writeln!(
        out,
        "params a_t={} lp={} beta={} maxcomp={} e_b={} e_n={} s={} conn_thr={} n_max={} epsilon={}",
        fmt_real(p.a_t),
        fmt_real(p.lp),
        fmt_real(p.beta),
        p.maxcomp,
        fmt_real(p.e_b),
        fmt_real(p.e_n),
        fmt_real(p.s),
        fmt_real(p.conn_thr),
        n_max,
        fmt_real(p.epsilon),
    )
    .unwrap();
}

pub(crate) fn read_map_params(lines: &mut Lines<'_>) -> Result<MapParams> {
    const KEYS: [&str; 10] = [
        "a_t", "lp", "beta", "maxcomp", "e_b", "e_n", "s", "conn_thr", "n_max", "epsilon",
    ];
    let rest = lines.tagged("params")?;
    let f = fields(lines, rest, &KEYS)?;
    let real = |i: usize| parse_num::<f64>(lines, KEYS[i], f[i]);
    Ok(MapParams {
        a_t: real(0)?,
        lp: real(1)?,
        beta: real(2)?,
        maxcomp: parse_num(lines, "maxcomp", f[3])?,
        e_b: real(4)?,
        e_n: real(5)?,
        s: real(6)?,
        conn_thr: real(7)?,
        n_max: match f[8] {
            "none" => None,
            v => Some(parse_num(lines, "n_max", v)?),
        },
        epsilon: real(9)?,
    })
}

impl SomMap {
    pub fn to_snapshot(&self) -> String {
        let mut out = String::new();
        out.push_str(MAP_MAGIC);
        out.push('\n');
        write_map_params(&mut out, &self.params);
        writeln!(
            out,
            "state dim={} nwins={} next_id={} rng_seed={} rng_pos={}",
            self.dim,
            self.nwins,
            self.next_id,
            self.rng_seed,
            self.rng.get_word_pos()
        )
        .unwrap();
        writeln!(out, "nodes {}", self.nodes.len()).unwrap();
        for n in &self.nodes {
            let nb: Vec<String> = n.neighbors.iter().map(|id| id.to_string()).collect();
            writeln!(
                out,
                "node id={} wins={} neighbors={}",
                n.id,
                fmt_real(n.wins),
                if nb.is_empty() {
                    "-".to_string()
                } else {
                    nb.join(",")
                }
            )
            .unwrap();
            fmt_vec(&mut out, "center", &n.center);
            fmt_vec(&mut out, "delta", &n.dist_moment);
            fmt_vec(&mut out, "relevance", &n.relevance);
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = Lines::new(text, "map snapshot");
        if lines.next_line()?.trim() != MAP_MAGIC {
            return Err(lines.err(format!("expected `{MAP_MAGIC}` header")));
        }
        let params = read_map_params(&mut lines)?;
        params.validate()?;

        const STATE: [&str; 5] = ["dim", "nwins", "next_id", "rng_seed", "rng_pos"];
        let rest = lines.tagged("state")?;
        let f = fields(&lines, rest, &STATE)?;
        let dim: usize = parse_num(&lines, "dim", f[0])?;
        let nwins: usize = parse_num(&lines, "nwins", f[1])?;
        let next_id: NodeId = parse_num(&lines, "next_id", f[2])?;
        let rng_seed: u64 = parse_num(&lines, "rng_seed", f[3])?;
        let rng_pos: u128 = parse_num(&lines, "rng_pos", f[4])?;

        let count: usize = {
            let rest = lines.tagged("nodes")?;
            parse_num(&lines, "nodes", rest)?
        };
        let mut nodes = Vec::with_capacity(count);
        for _ in 0..count {
            let rest = lines.tagged("node")?;
            let f = fields(&lines, rest, &["id", "wins", "neighbors"])?;
            let id: NodeId = parse_num(&lines, "id", f[0])?;
            let wins: f64 = parse_num(&lines, "wins", f[1])?;
            let neighbors: BTreeSet<NodeId> = if f[2] == "-" {
                BTreeSet::new()
            } else {
                f[2].split(',')
                    .map(|t| parse_num::<NodeId>(&lines, "neighbors", t))
                    .collect::<Result<_>>()?
            };
            let center = lines.reals("center", dim)?;
            let dist_moment = lines.reals("delta", dim)?;
            let relevance = lines.reals("relevance", dim)?;
            nodes.push(MapNode {
                id,
                center,
                dist_moment,
                relevance,
                wins,
                neighbors,
            });
        }
        if nodes.is_empty() {
            return Err(Error::EmptyMap);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        rng.set_word_pos(rng_pos);
        Ok(SomMap {
            nodes,
            params,
            dim,
            nwins,
            next_id,
            rng_seed,
            rng,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trained_map() -> SomMap {
        let params = MapParams {
            a_t: 0.8,
            lp: 0.05,
            beta: 0.3,
            maxcomp: 7,
            e_b: 0.2,
            e_n: 0.01,
            s: 0.2,
            conn_thr: 0.4,
            n_max: Some(40),
            epsilon: 1e-9,
        };
        let mut m = SomMap::with_first_stimulus(params, &[0.1, 0.2, 0.3], 11).unwrap();
        for i in 0..30 {
            let t = i as f64;
            m.organize_step(&[(t * 0.7).sin(), (t * 1.3).cos(), 1.0 / (1.0 + t)])
                .unwrap();
        }
        m
    }

    #[test]
    fn round_trip_is_exact() {
        let m = trained_map();
        let text = m.to_snapshot();
        let back = SomMap::from_snapshot(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.to_snapshot(), text);
    }

    #[test]
    fn restored_map_continues_identically() {
        let mut a = trained_map();
        let mut b = SomMap::from_snapshot(&a.to_snapshot()).unwrap();
        for i in 0..20 {
            let x = [i as f64 * 0.01, 0.5, -0.25];
            let sa = a.organize_step(&x).unwrap();
            let sb = b.organize_step(&x).unwrap();
            assert_eq!(sa, sb);
        }
        assert_eq!(a, b);
    }

    #[test]
    fn malformed_snapshot_reports_line() {
        let m = trained_map();
        let text = m.to_snapshot().replace("center", "centre");
        match SomMap::from_snapshot(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(SomMap::from_snapshot("nope").is_err());
    }
}
