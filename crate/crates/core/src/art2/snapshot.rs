//! Plain-text network snapshots: parameters, committed weight rows and the
//! context units. F1 activities are transient and not stored.

use std::fmt::Write as _;

use super::{Art2Network, Art2Params};
use crate::error::Result;
use crate::som::snapshot::{fields, fmt_real, fmt_vec, parse_num, Lines};

const ART2_MAGIC: &str = "art2-context v1";

impl Art2Network {
    pub fn to_snapshot(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        out.push_str(ART2_MAGIC);
        out.push('\n');
        writeln!(
            out,
            "params n={} a={} b={} c={} d={} e={} theta={} alpha={} rho={} epochs={} n_iter={} back={} cw={} d_ctx={} alpha_ctx={}",
            p.n,
            fmt_real(p.a),
            fmt_real(p.b),
            fmt_real(p.c),
            fmt_real(p.d),
            fmt_real(p.e),
            fmt_real(p.theta),
            fmt_real(p.alpha),
            fmt_real(p.rho),
            p.epochs,
            p.n_iter,
            fmt_real(p.back),
            fmt_real(p.cw),
            fmt_real(p.d_ctx),
            fmt_real(p.alpha_ctx),
        )
        .unwrap();
        fmt_vec(&mut out, "uc", &self.uc);
        writeln!(out, "groups {}", self.group_count()).unwrap();
        for (t, b) in self.top_down.iter().zip(&self.bottom_up) {
            fmt_vec(&mut out, "top_down", t);
            fmt_vec(&mut out, "bottom_up", b);
        }
        out
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        const KEYS: [&str; 15] = [
            "n",
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
        let mut lines = Lines::new(text, "art2 snapshot");
        if lines.next_line()?.trim() != ART2_MAGIC {
            return Err(lines.err(format!("expected `{ART2_MAGIC}` header")));
        }
        let rest = lines.tagged("params")?;
        let f = fields(&lines, rest, &KEYS)?;
        let real = |i: usize| parse_num::<f64>(&lines, KEYS[i], f[i]);
        let params = Art2Params {
            n: parse_num(&lines, "n", f[0])?,
            a: real(1)?,
            b: real(2)?,
            c: real(3)?,
            d: real(4)?,
            e: real(5)?,
            theta: real(6)?,
            alpha: real(7)?,
            rho: real(8)?,
            epochs: parse_num(&lines, "epochs", f[9])?,
            n_iter: parse_num(&lines, "n_iter", f[10])?,
            back: real(11)?,
            cw: real(12)?,
            d_ctx: real(13)?,
            alpha_ctx: real(14)?,
        };
        let n = params.n;
        let mut net = Art2Network::new(params)?;
        let uc = lines.reals("uc", n)?;
        net.set_context(&uc)?;
        let groups: usize = {
            let rest = lines.tagged("groups")?;
            parse_num(&lines, "groups", rest)?
        };
        for _ in 0..groups {
            net.top_down.push(lines.reals("top_down", 2 * n)?);
            net.bottom_up.push(lines.reals("bottom_up", 2 * n)?);
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut net = Art2Network::new(Art2Params::context_module(4)).unwrap();
        for i in 0..12 {
            let t = i as f64;
            net.train_pattern(&[t.sin().abs(), 0.3, (t * 0.4).cos().abs(), 1.0 / (1.0 + t)])
                .unwrap();
        }
        let text = net.to_snapshot();
        let mut back = Art2Network::from_snapshot(&text).unwrap();
        assert_eq!(back.to_snapshot(), text);
        assert_eq!(back.group_count(), net.group_count());
        assert_eq!(back.context_vector(), net.context_vector());
        let s = [0.5, 0.1, 0.9, 0.2];
        assert_eq!(
            back.train_pattern(&s).unwrap(),
            net.train_pattern(&s).unwrap()
        );
        assert_eq!(back.context_vector(), net.context_vector());
    }

    #[test]
    fn truncated_snapshot_fails() {
        let mut net = Art2Network::new(Art2Params::context_module(2)).unwrap();
        net.train_pattern(&[1.0, 0.0]).unwrap();
        let text = net.to_snapshot();
        let cut: String = text.lines().take(4).collect::<Vec<_>>().join("\n");
        assert!(Art2Network::from_snapshot(&cut).is_err());
    }
}
