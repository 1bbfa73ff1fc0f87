use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

/// Largest moduli dimension a run may ask for.
pub const HARD_DIM_CAP: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    IntersectionNumbers,
    OmegaProperties,
    OmegaPolynomiality,
    DrOracles,
    UpsilonVanishing,
    SigmaZeroFormal,
    SigmaZeroPairing,
    MainTheorem,
    APostConditions,
}

impl Relation {
    pub const ALL: [Relation; 9] = [
        Relation::IntersectionNumbers,
        Relation::OmegaProperties,
        Relation::OmegaPolynomiality,
        Relation::DrOracles,
        Relation::UpsilonVanishing,
        Relation::SigmaZeroFormal,
        Relation::SigmaZeroPairing,
        Relation::MainTheorem,
        Relation::APostConditions,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Relation::IntersectionNumbers => "intersection-numbers",
            Relation::OmegaProperties => "omega-properties",
            Relation::OmegaPolynomiality => "omega-polynomiality",
            Relation::DrOracles => "dr-oracles",
            Relation::UpsilonVanishing => "upsilon-vanishing",
            Relation::SigmaZeroFormal => "sigma-zero-formal",
            Relation::SigmaZeroPairing => "sigma-zero-pairing",
            Relation::MainTheorem => "main-theorem",
            Relation::APostConditions => "a-post-conditions",
        }
    }

    pub fn summary(self) -> &'static str {
        match self {
            Relation::IntersectionNumbers => "psi integrals: base values, DVV, string and dilaton, closed forms",
            Relation::OmegaProperties => "Chiodo class: field and s shifts, s=0 vs s=r, top lambda, pullback",
            Relation::OmegaPolynomiality => "Chiodo class: polynomial in the fields, degree bound at r = a",
            Relation::DrOracles => "DR cycle: genus zero, zero parts, homogeneity, r-sample consistency",
            Relation::UpsilonVanishing => "Upsilon pairs to zero in degree >= 2g-1+m",
            Relation::SigmaZeroFormal => "term-level cancellation certificate for Sigma",
            Relation::SigmaZeroPairing => "Sigma pairs to zero in every degree",
            Relation::MainTheorem => "hhh - A pairs to zero in degree >= 2g-1+m, m = 0 two ways",
            Relation::APostConditions => "A^1 vanishes below 2g and equals lambda_g DR in degree 2g",
        }
    }

    /// Whether the cases of this relation run over field tuples.
    pub fn uses_fields(self) -> bool {
        matches!(
            self,
            Relation::UpsilonVanishing
                | Relation::SigmaZeroPairing
                | Relation::MainTheorem
                | Relation::APostConditions
        )
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Inclusive integer range, written `3` or `1..4` or `0,2,5`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange(pub Vec<usize>);

impl FromStr for IntRange {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VerifyError::Config(format!("bad range {s:?}"));
        let mut out = Vec::new();
        for part in s.split(',') {
            let part = part.trim();
            if let Some((lo, hi)) = part.split_once("..") {
                let lo: usize = lo.parse().map_err(|_| bad())?;
                let hi: usize = hi.parse().map_err(|_| bad())?;
                if lo > hi {
                    return Err(bad());
                }
                out.extend(lo..=hi);
            } else {
                out.push(part.parse().map_err(|_| bad())?);
            }
        }
        out.sort_unstable();
        out.dedup();
        Ok(IntRange(out))
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        f.write_str(&s.join(","))
    }
}

/// Field tuples: the box `{1..max}^n`, up to permutation unless
/// `all_orders`, plus `random` tuples with entries in `1..=random_max`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AGrid {
    pub max: u64,
    pub all_orders: bool,
    pub random: usize,
    pub random_max: u64,
    pub seed: u64,
}

impl Default for AGrid {
    fn default() -> Self {
        AGrid {
            max: 3,
            all_orders: false,
            random: 8,
            random_max: 10,
            seed: 0,
        }
    }
}

/// `box:3`, `box:3:all`, `box:3+random:8:10`, `box:3+random:8:10:seed=5`.
impl FromStr for AGrid {
    type Err = VerifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || VerifyError::Config(format!("bad a-grid {s:?}"));
        let mut grid = AGrid {
            random: 0,
            ..AGrid::default()
        };
        for part in s.split('+') {
            let f: Vec<&str> = part.split(':').collect();
            match f.as_slice() {
                ["box", m] => grid.max = m.parse().map_err(|_| bad())?,
                ["box", m, "all"] => {
                    grid.max = m.parse().map_err(|_| bad())?;
                    grid.all_orders = true;
                }
                ["random", k, m, rest @ ..] => {
                    grid.random = k.parse().map_err(|_| bad())?;
                    grid.random_max = m.parse().map_err(|_| bad())?;
                    for r in rest {
                        let v = r.strip_prefix("seed=").ok_or_else(bad)?;
                        grid.seed = v.parse().map_err(|_| bad())?;
                    }
                }
                _ => return Err(bad()),
            }
        }
        if grid.max == 0 || (grid.random > 0 && grid.random_max == 0) {
            return Err(bad());
        }
        Ok(grid)
    }
}

impl fmt::Display for AGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "box:{}", self.max)?;
        if self.all_orders {
            f.write_str(":all")?;
        }
        if self.random > 0 {
            write!(f, "+random:{}:{}:seed={}", self.random, self.random_max, self.seed)?;
        }
        Ok(())
    }
}

impl AGrid {
    /// The tuples of length `n` for the space `(g, n, m)`.
    pub fn tuples(&self, g: usize, n: usize, m: usize) -> Vec<Vec<u64>> {
        let mut out: Vec<Vec<u64>> = Vec::new();
        let mut cur = vec![1u64; n];
        if n > 0 {
            loop {
                if self.all_orders || cur.windows(2).all(|w| w[0] <= w[1]) {
                    out.push(cur.clone());
                }
                let mut i = n;
                loop {
                    if i == 0 {
                        break;
                    }
                    i -= 1;
                    if cur[i] < self.max {
                        cur[i] += 1;
                        for x in cur.iter_mut().skip(i + 1) {
                            *x = 1;
                        }
                        break;
                    }
                    if i == 0 {
                        i = usize::MAX;
                        break;
                    }
                }
                if i == usize::MAX {
                    break;
                }
            }
        }
        // random tuples are drawn per space so that ranges can be split
        // across runs without changing them
        let seed = self.seed ^ ((g as u64) << 40) ^ ((n as u64) << 20) ^ m as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..self.random {
            let t: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=self.random_max)).collect();
            if !out.contains(&t) {
                out.push(t);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub relation: Relation,
    pub g: IntRange,
    pub n: IntRange,
    pub m: IntRange,
    pub a_grid: AGrid,
    /// highest codimension examined; `None` means the full dimension
    pub max_degree: Option<usize>,
    /// bound on `3g - 3 + n + m`
    pub dim_cap: usize,
    /// bound on `2g + n + m` for the formal certificate and `2g + n` for
    /// intersection numbers
    pub weight_cap: usize,
    /// largest `r` for the Chiodo-class checks
    pub r_max: u32,
    pub cache: Option<PathBuf>,
    pub workers: usize,
}

impl CheckConfig {
    pub fn new(relation: Relation) -> Self {
        let (g, n, m) = match relation {
            Relation::IntersectionNumbers => (0..=3, 1..=8, 0..=0),
            Relation::SigmaZeroFormal => (0..=3, 1..=7, 1..=2),
            Relation::MainTheorem => (0..=2, 1..=3, 0..=2),
            Relation::APostConditions => (0..=2, 1..=2, 1..=1),
            Relation::OmegaProperties | Relation::OmegaPolynomiality | Relation::DrOracles => {
                (0..=2, 1..=3, 0..=0)
            }
            _ => (0..=2, 1..=3, 1..=2),
        };
        CheckConfig {
            relation,
            g: IntRange(g.collect()),
            n: IntRange(n.collect()),
            m: IntRange(m.collect()),
            a_grid: AGrid::default(),
            max_degree: None,
            dim_cap: 6,
            weight_cap: 8,
            r_max: 5,
            cache: None,
            workers: 1,
        }
    }

    pub fn validate(&self) -> Result<(), VerifyError> {
        if self.dim_cap > HARD_DIM_CAP {
            return Err(VerifyError::DimensionCap {
                requested: self.dim_cap,
                cap: HARD_DIM_CAP,
            });
        }
        if self.weight_cap > HARD_DIM_CAP + 2 {
            return Err(VerifyError::DimensionCap {
                requested: self.weight_cap,
                cap: HARD_DIM_CAP + 2,
            });
        }
        if self.workers == 0 {
            return Err(VerifyError::Config("workers must be positive".into()));
        }
        if self.r_max == 0 {
            return Err(VerifyError::Config("r-max must be positive".into()));
        }
        if self.g.0.is_empty() || self.n.0.is_empty() || self.m.0.is_empty() {
            return Err(VerifyError::Config("empty range".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse_and_print() {
        assert_eq!("1..4".parse::<IntRange>().unwrap().0, vec![1, 2, 3, 4]);
        assert_eq!("0,2,5".parse::<IntRange>().unwrap().0, vec![0, 2, 5]);
        assert_eq!("3".parse::<IntRange>().unwrap().to_string(), "3");
        assert!("x".parse::<IntRange>().is_err());
    }

    #[test]
    fn grid_round_trips_and_is_deterministic() {
        let s = "box:2+random:4:9:seed=5";
        let g: AGrid = s.parse().unwrap();
        assert_eq!(g.to_string(), s);
        assert_eq!(g.tuples(1, 3, 0), g.tuples(1, 3, 0));
        // box part: nondecreasing triples over 1..=2
        assert_eq!(g.tuples(1, 3, 0).len(), 4 + 4);
        let all: AGrid = "box:2:all".parse().unwrap();
        assert_eq!(all.tuples(1, 3, 0).len(), 8);
    }

    #[test]
    fn dimension_cap_is_enforced() {
        let mut c = CheckConfig::new(Relation::UpsilonVanishing);
        assert!(c.validate().is_ok());
        c.dim_cap = HARD_DIM_CAP + 1;
        assert!(matches!(c.validate(), Err(VerifyError::DimensionCap { .. })));
    }
}
