//! `key = value` experiment files. Blocks are separated by blank lines and
//! `#` starts a comment.
//!
//! ```text
//! problem = tridiag:d=50:mode=random:seed=7
//! methods = theta1, theta2, softmax
//! repetitions = 5
//! ```

use std::collections::HashMap;
use std::str::FromStr;

use super::{ExperimentSpec, Method, RidgeCell};
use crate::error::{NaveError, Result};

struct Block {
    start: usize,
    entries: HashMap<String, (usize, String)>,
}

impl Block {
    fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((line, v)) => v
                .parse()
                .map(Some)
                .map_err(|_| NaveError::ConfigError(format!("line {line}: bad value '{v}' for {key}"))),
        }
    }

    fn require<T: FromStr>(&mut self, key: &str) -> Result<T> {
        self.take(key)?
            .ok_or_else(|| NaveError::ConfigError(format!("block at line {}: missing {key}", self.start)))
    }

    fn finish(self) -> Result<()> {
        match self.entries.into_iter().min_by_key(|(_, (l, _))| *l) {
            None => Ok(()),
            Some((k, (l, _))) => Err(NaveError::ConfigError(format!("line {l}: unknown key '{k}'"))),
        }
    }
}

fn blocks(text: &str) -> Result<Vec<Block>> {
    let mut out = Vec::new();
    let mut cur: Option<Block> = None;
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            if raw.trim().is_empty() {
                out.extend(cur.take());
            }
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| NaveError::ConfigError(format!("line {n}: expected key = value")))?;
        let b = cur.get_or_insert_with(|| Block {
            start: n,
            entries: HashMap::new(),
        });
        if b.entries.insert(k.trim().to_string(), (n, v.trim().to_string())).is_some() {
            return Err(NaveError::ConfigError(format!("line {n}: duplicate key '{}'", k.trim())));
        }
    }
    out.extend(cur);
    Ok(out)
}

/// Parses experiment specs. Keys: `problem` (required), `methods`, `tol`,
/// `max_iter`, `eps`, `seed`, `repetitions`, `label`.
pub fn parse_specs(text: &str) -> Result<Vec<ExperimentSpec>> {
    blocks(text)?
        .into_iter()
        .map(|mut b| {
            let mut s = ExperimentSpec::new(b.require::<String>("problem")?, Method::ALL.to_vec());
            if let Some(ms) = b.take::<String>("methods")? {
                s.methods = ms.split(',').map(str::parse).collect::<Result<_>>()?;
            }
            if let Some(v) = b.take("tol")? {
                s.tol = v;
            }
            if let Some(v) = b.take("max_iter")? {
                s.max_iter = v;
            }
            if let Some(v) = b.take("eps")? {
                s.eps = v;
            }
            if let Some(v) = b.take("seed")? {
                s.seed = v;
            }
            if let Some(v) = b.take("repetitions")? {
                s.repetitions = v;
            }
            s.label = b.take("label")?;
            b.finish()?;
            s.validate()?;
            Ok(s)
        })
        .collect()
}

/// Parses ridge grid cells. Keys: `lam`, `mu`, `m`, `d`, all required.
pub fn parse_ridge_grid(text: &str) -> Result<Vec<RidgeCell>> {
    blocks(text)?
        .into_iter()
        .map(|mut b| {
            let c = RidgeCell {
                lam: b.require("lam")?,
                mu: b.require("mu")?,
                m: b.require("m")?,
                d: b.require("d")?,
            };
            b.finish()?;
            Ok(c)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_blocks() {
        let text = "# table\nproblem = r3:b1\nmethods = theta1, ip\n\nproblem = tridiag:d=10\nrepetitions = 3 # median\nseed = 7\n";
        let specs = parse_specs(text).unwrap();
        assert_eq!(specs.len(), 2);
        assert_eq!(specs[0].methods, vec![Method::Theta1, Method::Ip]);
        assert_eq!(specs[1].repetitions, 3);
        assert_eq!(specs[1].seed, 7);
        assert_eq!(specs[1].methods.len(), 4);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_specs("problem = r3:b1\ntol = abc\n").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
        let err = parse_specs("problem = r3:b1\ncolour = red\n").unwrap_err();
        assert!(err.to_string().contains("unknown key 'colour'"));
        assert!(parse_specs("methods = ip\n").is_err());
        assert!(parse_specs("problem r3:b1\n").is_err());
        assert!(parse_specs("problem = r3:b9\n").is_err());
        assert!(parse_specs("problem = r3:b1\nproblem = r3:b2\n").is_err());
    }

    #[test]
    fn ridge_grid() {
        let g = parse_ridge_grid("lam = 0\nmu = 100\nm = 3\nd = 10\n\nlam=200\nmu=1000\nm=20\nd=10\n").unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].m, 20);
        assert!(parse_ridge_grid("lam = 0\nmu = 1\n").is_err());
    }
}
