//! Benchmark catalog and textual problem identifiers.
//!
//! Identifiers are colon-separated: a kind followed by `key=value` pairs,
//! e.g. `tridiag:d=50:mode=random:seed=7`, `r3:b1`, `r4:bstar2`,
//! `ridge:seed=1:m=3:d=10:lam=0:mu=100`, `sparse:seed=1:lam=0.1`,
//! `ode-stiff:h=0.05:T=5:x0=-1`, `ode-bvp:h=0.1:T=2:x0=-1`,
//! `ode-arctan:h=0.0125:T=1:x0=1`. Omitted keys take the defaults listed on
//! [`ProblemId`].

mod linear;
mod ode;
mod polynomial;
mod regression;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

pub use linear::{
    ave_to_lcp, make_tridiag, make_tridiag_with_solution, random_sigma_min_matrix, tridiag_matrix,
    LcpConversion, LcpForm, TridiagMode,
};
pub use ode::{
    arctan_exact, arctan_source, make_arctan_ivp, make_stiff_bvp, make_stiff_bvp_manufactured,
    make_stiff_ivp, steps_for, stiff_exact, Boundary, OdeDiscretization,
};
pub use polynomial::{make_example_r3, make_example_r4, r3_with, r4_with, R3_RHS, R4_RHS};
pub use regression::{
    least_squares_gradient, make_ridge, make_sparse_heuristic, ridge_precondition,
    sparse_random_data, RidgeSpec, SparseSign,
};

use crate::error::{NaveError, Result};
use crate::nave::NaveProblem;
use crate::rng::DEFAULT_SEED;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeKind {
    Stiff,
    Bvp,
    Arctan,
}

impl OdeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            OdeKind::Stiff => "ode-stiff",
            OdeKind::Bvp => "ode-bvp",
            OdeKind::Arctan => "ode-arctan",
        }
    }

    /// `(h, T, x0)` used when a key is omitted.
    pub fn defaults(&self) -> (f64, f64, f64) {
        match self {
            OdeKind::Stiff => (0.05, 5.0, -1.0),
            OdeKind::Bvp => (0.1, 2.0, -1.0),
            OdeKind::Arctan => (0.0125, 1.0, 1.0),
        }
    }

    /// Builds the instance with mesh width `h`.
    /// Four halved meshes used by convergence studies.
    pub fn default_h_list(&self) -> [f64; 4] {
        match self {
            OdeKind::Stiff => [0.05, 0.025, 0.0125, 0.00625],
            OdeKind::Bvp | OdeKind::Arctan => [0.1, 0.05, 0.025, 0.0125],
        }
    }

    pub fn build(&self, h: f64, t_end: f64, x0: f64) -> Result<(OdeDiscretization, NaveProblem)> {
        let n = steps_for(h, t_end)?;
        match self {
            OdeKind::Stiff => make_stiff_ivp(x0, t_end, n),
            OdeKind::Bvp => make_stiff_bvp_manufactured(x0, t_end, n),
            OdeKind::Arctan => make_arctan_ivp(x0, t_end, n),
        }
    }
}

/// Parsed problem identifier.
///
/// Defaults: `tridiag` mode `random`, seed 42; `ridge` seed 42, `m = 3`,
/// `d = 10`, `lam = 0`, `mu = 100`; `sparse` seed 42, `lam = 0.1`, `m = 20`,
/// `d = 40`, `sign = neg`; ODE keys as in [`OdeKind::defaults`].
#[derive(Debug, Clone, PartialEq)]
pub enum ProblemId {
    Tridiag { d: usize, mode: TridiagMode },
    R3(String),
    R4(String),
    Ridge { seed: u64, m: usize, d: usize, lam: f64, mu: f64 },
    Sparse { seed: u64, lam: f64, m: usize, d: usize, sign: SparseSign },
    Ode { kind: OdeKind, h: f64, t_end: f64, x0: f64 },
}

/// A resolved problem, with its discretization for ODE identifiers.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub problem: NaveProblem,
    pub ode: Option<OdeDiscretization>,
}

fn config(msg: String) -> NaveError {
    NaveError::ConfigError(msg)
}

struct Keys<'a> {
    id: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Keys<'a> {
    fn new(id: &'a str, parts: &[&'a str], allowed: &[&str]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for part in parts {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| config(format!("{id}: expected key=value, got '{part}'")))?;
            if !allowed.contains(&k) {
                return Err(config(format!("{id}: unknown key '{k}'")));
            }
            if map.insert(k, v).is_some() {
                return Err(config(format!("{id}: key '{k}' given twice")));
            }
        }
        Ok(Keys { id, map })
    }

    fn get<T: FromStr>(&self, key: &str, default: Option<T>) -> Result<T> {
        match self.map.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| config(format!("{}: cannot parse {key}='{v}'", self.id))),
            None => default.ok_or_else(|| config(format!("{}: missing key '{key}'", self.id))),
        }
    }
}

impl FromStr for ProblemId {
    type Err = NaveError;

    fn from_str(id: &str) -> Result<Self> {
        let mut parts = id.trim().split(':');
        let kind = parts.next().unwrap_or_default();
        let rest: Vec<&str> = parts.collect();
        let parsed = match kind {
            "tridiag" => {
                let k = Keys::new(id, &rest, &["d", "mode", "seed"])?;
                let d: usize = k.get("d", None)?;
                if d < 2 {
                    return Err(config(format!("{id}: d must be at least 2")));
                }
                let seed = k.get("seed", Some(DEFAULT_SEED))?;
                let mode = match k.get::<String>("mode", Some("random".into()))?.as_str() {
                    "random" => TridiagMode::RandomB { seed },
                    "xstar" => TridiagMode::FromXStar { seed },
                    other => return Err(config(format!("{id}: unknown mode '{other}'"))),
                };
                ProblemId::Tridiag { d, mode }
            }
            "r3" | "r4" => {
                let [name] = rest.as_slice() else {
                    return Err(config(format!("{id}: expected {kind}:<rhs>")));
                };
                let known = if kind == "r3" {
                    R3_RHS.iter().any(|(n, _)| n == name)
                } else {
                    R4_RHS.iter().any(|(n, _)| n == name)
                };
                if !known {
                    return Err(config(format!("{id}: unknown right-hand side '{name}'")));
                }
                if kind == "r3" {
                    ProblemId::R3(name.to_string())
                } else {
                    ProblemId::R4(name.to_string())
                }
            }
            "ridge" => {
                let k = Keys::new(id, &rest, &["seed", "m", "d", "lam", "mu"])?;
                let (lam, mu) = (k.get("lam", Some(0.0))?, k.get("mu", Some(100.0))?);
                if lam == mu {
                    return Err(config(format!("{id}: lam and mu must differ")));
                }
                ProblemId::Ridge {
                    seed: k.get("seed", Some(DEFAULT_SEED))?,
                    m: k.get("m", Some(3))?,
                    d: k.get("d", Some(10))?,
                    lam,
                    mu,
                }
            }
            "sparse" => {
                let k = Keys::new(id, &rest, &["seed", "lam", "m", "d", "sign"])?;
                let sign = match k.get::<String>("sign", Some("neg".into()))?.as_str() {
                    "neg" => SparseSign::Negative,
                    "pos" => SparseSign::Positive,
                    other => return Err(config(format!("{id}: unknown sign '{other}'"))),
                };
                ProblemId::Sparse {
                    seed: k.get("seed", Some(DEFAULT_SEED))?,
                    lam: k.get("lam", Some(0.1))?,
                    m: k.get("m", Some(20))?,
                    d: k.get("d", Some(40))?,
                    sign,
                }
            }
            "ode-stiff" | "ode-bvp" | "ode-arctan" => {
                let kind = match kind {
                    "ode-stiff" => OdeKind::Stiff,
                    "ode-bvp" => OdeKind::Bvp,
                    _ => OdeKind::Arctan,
                };
                let (h, t, x0) = kind.defaults();
                let k = Keys::new(id, &rest, &["h", "T", "x0"])?;
                let (h, t_end) = (k.get("h", Some(h))?, k.get("T", Some(t))?);
                steps_for(h, t_end).map_err(|e| config(format!("{id}: {e}")))?;
                ProblemId::Ode {
                    kind,
                    h,
                    t_end,
                    x0: k.get("x0", Some(x0))?,
                }
            }
            other => return Err(config(format!("unknown problem kind '{other}' in '{id}'"))),
        };
        Ok(parsed)
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemId::Tridiag { d, mode } => match mode {
                TridiagMode::RandomB { seed } => write!(f, "tridiag:d={d}:mode=random:seed={seed}"),
                TridiagMode::FromXStar { seed } => write!(f, "tridiag:d={d}:mode=xstar:seed={seed}"),
            },
            ProblemId::R3(b) => write!(f, "r3:{b}"),
            ProblemId::R4(b) => write!(f, "r4:{b}"),
            ProblemId::Ridge { seed, m, d, lam, mu } => {
                write!(f, "ridge:seed={seed}:m={m}:d={d}:lam={lam}:mu={mu}")
            }
            ProblemId::Sparse { seed, lam, m, d, sign } => {
                let s = match sign {
                    SparseSign::Negative => "neg",
                    SparseSign::Positive => "pos",
                };
                write!(f, "sparse:seed={seed}:lam={lam}:m={m}:d={d}:sign={s}")
            }
            ProblemId::Ode { kind, h, t_end, x0 } => write!(f, "{}:h={h}:T={t_end}:x0={x0}", kind.as_str()),
        }
    }
}

impl ProblemId {
    /// The same identifier with its random instance drawn from `seed`;
    /// deterministic problems are returned unchanged.
    pub fn with_seed(&self, seed: u64) -> ProblemId {
        match self.clone() {
            ProblemId::Tridiag { d, mode } => ProblemId::Tridiag {
                d,
                mode: match mode {
                    TridiagMode::RandomB { .. } => TridiagMode::RandomB { seed },
                    TridiagMode::FromXStar { .. } => TridiagMode::FromXStar { seed },
                },
            },
            ProblemId::Ridge { m, d, lam, mu, .. } => ProblemId::Ridge { seed, m, d, lam, mu },
            ProblemId::Sparse { lam, m, d, sign, .. } => ProblemId::Sparse { seed, lam, m, d, sign },
            other => other,
        }
    }

    pub fn build(&self) -> Result<Resolved> {
        let label = self.to_string();
        let (problem, ode) = match self {
            ProblemId::Tridiag { d, mode } => (make_tridiag(*d, *mode)?, None),
            ProblemId::R3(b) => (r3_with(b)?, None),
            ProblemId::R4(b) => (r4_with(b)?, None),
            ProblemId::Ridge { seed, m, d, lam, mu } => {
                (make_ridge(&RidgeSpec::random(*m, *d, *lam, *mu, *seed))?, None)
            }
            ProblemId::Sparse { seed, lam, m, d, sign } => {
                let (a, b) = sparse_random_data(*m, *d, *seed);
                (make_sparse_heuristic(&a, &b, *lam, *sign)?, None)
            }
            ProblemId::Ode { kind, h, t_end, x0 } => {
                let (disc, p) = kind.build(*h, *t_end, *x0)?;
                (p, Some(disc))
            }
        };
        Ok(Resolved {
            problem: problem.with_label(label),
            ode,
        })
    }
}

/// Parses and builds a problem identifier.
pub fn resolve(id: &str) -> Result<Resolved> {
    id.parse::<ProblemId>()?.build()
}
