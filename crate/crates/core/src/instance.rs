//! Problem data, the plain-text instance format, and the random generator.
//!
//! File format (UTF-8, LF): first line `n m`, then `n` lines `s_j p_j`.
//! Lines starting with `#` are comments. All values are positive decimal
//! integers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Time};

/// Mean processing time used by the generator.
pub const MEAN_PROCESSING: f64 = 25.0;

/// Replications per parameter combination in the benchmark grid.
pub const GRID_REPLICATIONS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Job {
    /// 1-based, contiguous within an instance.
    pub id: u32,
    pub setup: Time,
    pub processing: Time,
}

impl Job {
    /// Time the job holds a machine: setup plus processing.
    pub fn span(&self) -> Time {
        self.setup + self.processing
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub jobs: Vec<Job>,
    pub machines: u32,
}

impl Instance {
    /// Builds an instance from `(setup, processing)` pairs, numbering jobs 1..n.
    pub fn from_pairs(machines: u32, pairs: &[(Time, Time)]) -> Result<Self> {
        let jobs = pairs
            .iter()
            .enumerate()
            .map(|(i, &(setup, processing))| Job {
                id: i as u32 + 1,
                setup,
                processing,
            })
            .collect();
        Self::new(machines, jobs)
    }

    pub fn new(machines: u32, jobs: Vec<Job>) -> Result<Self> {
        let inst = Self { jobs, machines };
        inst.check()?;
        Ok(inst)
    }

    fn check(&self) -> Result<()> {
        if self.machines == 0 {
            return Err(Error::InvalidInstance("machine count must be at least 1".into()));
        }
        if self.jobs.is_empty() {
            return Err(Error::InvalidInstance("at least one job is required".into()));
        }
        for (i, job) in self.jobs.iter().enumerate() {
            if job.id as usize != i + 1 {
                return Err(Error::InvalidInstance(format!(
                    "job ids must be 1..n in order, found {} at position {}",
                    job.id,
                    i + 1
                )));
            }
            if job.setup == 0 || job.processing == 0 {
                return Err(Error::InvalidInstance(format!(
                    "job {} has a nonpositive duration",
                    job.id
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.jobs.len()
    }

    pub fn job(&self, id: u32) -> Option<&Job> {
        id.checked_sub(1).and_then(|i| self.jobs.get(i as usize))
    }

    pub fn total_setup(&self) -> u64 {
        self.jobs.iter().map(|j| j.setup as u64).sum()
    }

    pub fn total_work(&self) -> u64 {
        self.jobs.iter().map(|j| j.span() as u64).sum()
    }

    pub fn max_span(&self) -> Time {
        self.jobs.iter().map(Job::span).max().unwrap_or(0)
    }

    /// Renders the canonical text format; `parse_instance` reads it back.
    pub fn render(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.machines);
        for job in &self.jobs {
            let _ = writeln!(out, "{} {}", job.setup, job.processing);
        }
        out
    }
}

/// Parses the canonical text format. Errors carry 1-based line numbers.
pub fn parse_instance(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (header_line, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "missing header \"n m\"".into(),
    })?;
    let header = parse_fields(header_line, header, "header")?;
    let &[n, m] = header.as_slice() else {
        return Err(Error::Parse {
            line: header_line,
            msg: format!("header must have 2 fields \"n m\", found {}", header.len()),
        });
    };

    let mut jobs = Vec::with_capacity(n as usize);
    for (line, body) in lines.by_ref() {
        if jobs.len() == n as usize {
            return Err(Error::Parse {
                line,
                msg: format!("more job lines than the {n} declared"),
            });
        }
        let fields = parse_fields(line, body, "job")?;
        let &[setup, processing] = fields.as_slice() else {
            return Err(Error::Parse {
                line,
                msg: format!("job line must have 2 fields \"s p\", found {}", fields.len()),
            });
        };
        jobs.push(Job {
            id: jobs.len() as u32 + 1,
            setup,
            processing,
        });
    }
    if jobs.len() != n as usize {
        return Err(Error::Parse {
            line: text.lines().count().max(1),
            msg: format!("expected {n} job lines, found {}", jobs.len()),
        });
    }
    Instance::new(m, jobs).map_err(|e| Error::Parse {
        line: header_line,
        msg: e.to_string(),
    })
}

fn parse_fields(line: usize, body: &str, what: &str) -> Result<Vec<u32>> {
    body.split_whitespace()
        .enumerate()
        .map(|(k, tok)| {
            let v: i64 = tok.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("{what} field {} is not an integer: {tok:?}", k + 1),
            })?;
            if v <= 0 {
                let name = match (what, k) {
                    ("job", 0) => "setup",
                    ("job", _) => "processing",
                    ("header", 0) => "job count",
                    _ => "machine count",
                };
                return Err(Error::Parse {
                    line,
                    msg: format!("nonpositive {name} {v}"),
                });
            }
            u32::try_from(v).map_err(|_| Error::Parse {
                line,
                msg: format!("value {v} out of range"),
            })
        })
        .collect()
}

/// Jobs sharing the same `(setup, processing)` pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobClass {
    pub setup: Time,
    pub processing: Time,
    pub multiplicity: u32,
    /// Smallest job id in the class.
    pub representative: u32,
    /// All job ids in the class, ascending.
    pub members: Vec<u32>,
}

impl JobClass {
    pub fn span(&self) -> Time {
        self.setup + self.processing
    }
}

/// Partitions jobs by `(setup, processing)`; classes come out sorted by that pair.
pub fn group_identical(inst: &Instance) -> Vec<JobClass> {
    let mut by_key: BTreeMap<(Time, Time), Vec<u32>> = BTreeMap::new();
    for job in &inst.jobs {
        by_key
            .entry((job.setup, job.processing))
            .or_default()
            .push(job.id);
    }
    by_key
        .into_iter()
        .map(|((setup, processing), members)| JobClass {
            setup,
            processing,
            multiplicity: members.len() as u32,
            representative: members[0],
            members,
        })
        .collect()
}

/// One class per job, in job order (the ungrouped model).
pub fn singleton_classes(inst: &Instance) -> Vec<JobClass> {
    inst.jobs
        .iter()
        .map(|j| JobClass {
            setup: j.setup,
            processing: j.processing,
            multiplicity: 1,
            representative: j.id,
            members: vec![j.id],
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub n: u32,
    pub m: u32,
    /// Relative spread of both distributions.
    pub alpha: f64,
    /// Server load factor; mean setup is `rho / m * 25`.
    pub rho: f64,
    pub seed: u64,
    pub replications: u32,
}

impl GenParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.m == 0 {
            return Err(Error::InvalidParams("n and m must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParams(format!("alpha {} not in [0, 1)", self.alpha)));
        }
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidParams(format!("rho {} not in (0, 1]", self.rho)));
        }
        Ok(())
    }

    /// Inclusive integer range for processing times.
    pub fn processing_range(&self) -> (Time, Time) {
        integer_range(
            (1.0 - self.alpha) * MEAN_PROCESSING,
            (1.0 + self.alpha) * MEAN_PROCESSING,
        )
    }

    /// Inclusive integer range for setup times.
    pub fn setup_range(&self) -> (Time, Time) {
        let mean = self.rho / self.m as f64 * MEAN_PROCESSING;
        integer_range((1.0 - self.alpha) * mean, (1.0 + self.alpha) * mean)
    }

    /// Seed of one replication, independent of generation order.
    pub fn replication_seed(&self, replication: u32) -> u64 {
        [
            self.n as u64,
            self.m as u64,
            self.alpha.to_bits(),
            self.rho.to_bits(),
            replication as u64,
        ]
        .into_iter()
        .fold(splitmix64(self.seed), |acc, v| splitmix64(acc ^ v))
    }

    /// Stable identifier of one generated instance.
    pub fn instance_id(&self, replication: u32) -> String {
        format!(
            "n{}_m{}_a{}_r{}_{}",
            self.n, self.m, self.alpha, self.rho, replication
        )
    }
}

// Integers inside [lo, hi]; falls back to round(lo) when none exist.
fn integer_range(lo: f64, hi: f64) -> (Time, Time) {
    const EPS: f64 = 1e-9;
    let a = (lo - EPS).ceil();
    let b = (hi + EPS).floor();
    if a <= b {
        (a.max(1.0) as Time, b.max(1.0) as Time)
    } else {
        let r = lo.round().max(1.0) as Time;
        (r, r)
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Draws `params.replications` instances.
///
/// Each replication uses a ChaCha8 stream seeded with
/// [`GenParams::replication_seed`]; jobs draw processing then setup time,
/// uniformly over the inclusive ranges.
pub fn generate(params: &GenParams) -> Result<Vec<Instance>> {
    params.validate()?;
    let (p_lo, p_hi) = params.processing_range();
    let (s_lo, s_hi) = params.setup_range();
    (0..params.replications)
        .map(|rep| {
            let mut rng = ChaCha8Rng::seed_from_u64(params.replication_seed(rep));
            let pairs: Vec<(Time, Time)> = (0..params.n)
                .map(|_| {
                    let p = rng.gen_range(p_lo..=p_hi);
                    let s = rng.gen_range(s_lo..=s_hi);
                    (s, p)
                })
                .collect();
            Instance::from_pairs(params.m, &pairs)
        })
        .collect()
}

/// Size tiers of the experimental grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    /// n in {10, 20, 50}
    Small,
    /// n = 100
    Medium,
    /// n in {150, 200}
    Large,
    All,
}

impl std::str::FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "small" => Ok(Tier::Small),
            "medium" => Ok(Tier::Medium),
            "large" => Ok(Tier::Large),
            "all" => Ok(Tier::All),
            other => Err(Error::InvalidParams(format!("unknown grid tier {other:?}"))),
        }
    }
}

// (alpha, rho) pairs used with n = 10 (m = 3, 4) and n = 20 (m = 3).
const SMALL_PATTERNS: [(f64, f64); 6] = [
    (0.1, 0.5),
    (0.1, 1.0),
    (0.3, 0.5),
    (0.3, 0.7),
    (0.5, 0.7),
    (0.5, 1.0),
];

// (m, alpha, rho) used with n = 50.
const N50_PATTERNS: [(u32, f64, f64); 4] = [
    (3, 0.1, 0.5),
    (3, 0.5, 0.5),
    (7, 0.1, 0.7),
    (7, 0.3, 1.0),
];

// (m, alpha, rho) used with n >= 100.
const LARGE_PATTERNS: [(u32, f64, f64); 8] = [
    (3, 0.1, 0.5),
    (3, 0.5, 0.5),
    (5, 0.1, 0.5),
    (5, 0.1, 0.7),
    (5, 0.3, 1.0),
    (5, 0.5, 0.5),
    (7, 0.1, 0.7),
    (7, 0.3, 1.0),
];

/// Parameter combinations of the experimental grid, 10 replications each.
pub fn table3_grid(tier: Tier, seed: u64) -> Vec<GenParams> {
    let mk = |n: u32, m: u32, alpha: f64, rho: f64| GenParams {
        n,
        m,
        alpha,
        rho,
        seed,
        replications: GRID_REPLICATIONS,
    };
    let mut grid = Vec::new();
    if matches!(tier, Tier::Small | Tier::All) {
        for (n, m) in [(10, 3), (10, 4), (20, 3)] {
            grid.extend(SMALL_PATTERNS.iter().map(|&(a, r)| mk(n, m, a, r)));
        }
        grid.extend(N50_PATTERNS.iter().map(|&(m, a, r)| mk(50, m, a, r)));
    }
    if matches!(tier, Tier::Medium | Tier::All) {
        grid.extend(LARGE_PATTERNS.iter().map(|&(m, a, r)| mk(100, m, a, r)));
    }
    if matches!(tier, Tier::Large | Tier::All) {
        for n in [150, 200] {
            grid.extend(LARGE_PATTERNS.iter().map(|&(m, a, r)| mk(n, m, a, r)));
        }
    }
    grid
}
