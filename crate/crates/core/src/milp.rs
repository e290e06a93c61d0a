//! Solver-agnostic MILP models, LP/MPS export, and the HiGHS backend.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::{self, Write as _};
use std::path::Path;
use std::sync::Once;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default relative MIP gap.
pub const DEFAULT_MIP_GAP: f64 = 1e-6;
/// Integrality and feasibility tolerance used when reading solutions back.
pub const INT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarKind {
    Binary,
    Integer,
    Continuous,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: f64,
    pub upper: f64,
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RowSense {
    Le,
    Eq,
    Ge,
}

impl RowSense {
    fn lp_symbol(self) -> &'static str {
        match self {
            RowSense::Le => "<=",
            RowSense::Eq => "=",
            RowSense::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub sense: RowSense,
    pub rhs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BranchDirection {
    Up,
    Down,
}

/// Search hints. Backends apply what they support and ignore the rest.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HintSet {
    pub branch_priority: BTreeMap<VarId, i32>,
    pub branch_direction: BTreeMap<VarId, BranchDirection>,
    /// Variables forced to zero; exported and solved as fixed bounds.
    pub fixed_zero: BTreeSet<VarId>,
    /// Spend more effort on primal heuristics.
    pub aggressive_incumbent_search: bool,
}

impl HintSet {
    pub fn is_empty(&self) -> bool {
        *self == HintSet::default()
    }
}

/// A minimisation model.
#[derive(Debug, Clone, Default)]
pub struct MilpModel {
    pub name: String,
    variables: Vec<Variable>,
    constraints: Vec<Constraint>,
    by_name: HashMap<String, VarId>,
    pub hints: HintSet,
}

impl MilpModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..Self::default()
        }
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lower: f64,
        upper: f64,
        objective: f64,
    ) -> Result<VarId> {
        let name = name.into();
        if !lower.is_finite() && lower != f64::NEG_INFINITY || upper.is_nan() || lower > upper {
            return Err(Error::InvalidModel(format!(
                "variable {name}: bad bounds [{lower}, {upper}]"
            )));
        }
        if !objective.is_finite() {
            return Err(Error::InvalidModel(format!("variable {name}: objective {objective}")));
        }
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0.0), upper.min(1.0)),
            _ => (lower, upper),
        };
        let id = VarId(self.variables.len());
        if self.by_name.insert(name.clone(), id).is_some() {
            return Err(Error::InvalidModel(format!("duplicate variable name {name}")));
        }
        self.variables.push(Variable {
            name,
            kind,
            lower,
            upper,
            objective,
        });
        Ok(id)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        sense: RowSense,
        rhs: f64,
    ) -> Result<()> {
        let name = name.into();
        if !rhs.is_finite() {
            return Err(Error::InvalidModel(format!("constraint {name}: rhs {rhs}")));
        }
        for &(v, c) in &terms {
            if v.0 >= self.variables.len() {
                return Err(Error::InvalidModel(format!(
                    "constraint {name} references undeclared variable #{}",
                    v.0
                )));
            }
            if !c.is_finite() {
                return Err(Error::InvalidModel(format!("constraint {name}: coefficient {c}")));
            }
        }
        self.constraints.push(Constraint {
            name,
            terms: merge_terms(terms),
            sense,
            rhs,
        });
        Ok(())
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn var(&self, id: VarId) -> &Variable {
        &self.variables[id.0]
    }

    pub fn var_id(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn num_vars(&self) -> usize {
        self.variables.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn has_integers(&self) -> bool {
        self.variables.iter().any(|v| v.kind != VarKind::Continuous)
    }

    /// Effective bounds after applying `fixed_zero`.
    pub fn effective_bounds(&self, id: VarId) -> (f64, f64) {
        let v = &self.variables[id.0];
        if self.hints.fixed_zero.contains(&id) {
            (0.0, 0.0)
        } else {
            (v.lower, v.upper)
        }
    }

    /// Copy with every variable continuous; bounds kept.
    pub fn relaxed(&self) -> MilpModel {
        let mut m = self.clone();
        for v in &mut m.variables {
            v.kind = VarKind::Continuous;
        }
        m
    }

    /// Objective value of a full assignment.
    pub fn objective_of(&self, values: &[f64]) -> f64 {
        self.variables
            .iter()
            .zip(values)
            .map(|(v, x)| v.objective * x)
            .sum()
    }

    /// Worst constraint or bound violation of a full assignment.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, &x) in values.iter().enumerate() {
            let (lo, hi) = self.effective_bounds(VarId(i));
            worst = worst.max(lo - x).max(x - hi);
            if self.variables[i].kind != VarKind::Continuous {
                worst = worst.max((x - x.round()).abs());
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * values[v.0]).sum();
            let r = match c.sense {
                RowSense::Le => lhs - c.rhs,
                RowSense::Ge => c.rhs - lhs,
                RowSense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(r);
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        if self.variables.len() != self.by_name.len() {
            return Err(Error::InvalidModel("variable names are not unique".into()));
        }
        for &v in &self.hints.fixed_zero {
            if v.0 >= self.variables.len() {
                return Err(Error::InvalidModel(format!("fixed_zero names undeclared #{}", v.0)));
            }
        }
        Ok(())
    }

    /// Name manifest in declaration order.
    pub fn manifest(&self) -> Vec<(String, VarKind)> {
        self.variables.iter().map(|v| (v.name.clone(), v.kind)).collect()
    }
}

fn merge_terms(terms: Vec<(VarId, f64)>) -> Vec<(VarId, f64)> {
    let mut merged: Vec<(VarId, f64)> = Vec::with_capacity(terms.len());
    let mut slot: HashMap<VarId, usize> = HashMap::new();
    for (v, c) in terms {
        match slot.get(&v) {
            Some(&i) => merged[i].1 += c,
            None => {
                slot.insert(v, merged.len());
                merged.push((v, c));
            }
        }
    }
    merged.retain(|&(_, c)| c != 0.0);
    merged
}

/// LP/MPS identifier: letters, digits and `_.` only, not starting with a digit,
/// a period or `e`/`E` followed by a digit.
pub fn sanitize_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '.' { c } else { '_' })
        .collect();
    let bad_start = match s.chars().next() {
        None => true,
        Some(c) if c.is_ascii_digit() || c == '.' => true,
        Some('e' | 'E') => s.chars().nth(1).is_some_and(|c| c.is_ascii_digit()),
        _ => false,
    };
    if bad_start {
        s.insert(0, '_');
    }
    s
}

fn sanitized_names<'a>(names: impl Iterator<Item = &'a str>) -> Result<Vec<String>> {
    let mut seen: HashMap<String, &str> = HashMap::new();
    let mut out = Vec::new();
    for name in names {
        let s = sanitize_name(name);
        if let Some(prev) = seen.insert(s.clone(), name) {
            return Err(Error::NameCollision(prev.to_string(), name.to_string(), s));
        }
        out.push(s);
    }
    Ok(out)
}

fn fmt_num(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

fn fmt_bound(v: f64) -> String {
    if v == f64::INFINITY {
        "+inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        fmt_num(v)
    }
}

// Appends `+ 3 x_1_0 - y ...`, wrapping every few terms to keep lines short.
fn write_linear(out: &mut String, terms: impl Iterator<Item = (f64, String)>) -> bool {
    let mut any = false;
    for (k, (c, name)) in terms.enumerate() {
        if k > 0 && k % 8 == 0 {
            out.push_str("\n   ");
        }
        let sign = if c < 0.0 { "-" } else { "+" };
        let mag = c.abs();
        if mag == 1.0 {
            let _ = write!(out, " {sign} {name}");
        } else {
            let _ = write!(out, " {sign} {} {name}", fmt_num(mag));
        }
        any = true;
    }
    any
}

/// CPLEX-style LP text in declaration order.
pub fn export_lp(model: &MilpModel) -> Result<String> {
    model.validate()?;
    let vnames = sanitized_names(model.variables.iter().map(|v| v.name.as_str()))?;
    let cnames = sanitized_names(model.constraints.iter().map(|c| c.name.as_str()))?;

    let mut out = String::new();
    let _ = writeln!(out, "\\ model {}", model.name);
    out.push_str("Minimize\n obj:");
    let obj = model
        .variables
        .iter()
        .enumerate()
        .filter(|(_, v)| v.objective != 0.0)
        .map(|(i, v)| (v.objective, vnames[i].clone()));
    write_linear(&mut out, obj);
    out.push('\n');

    if !model.constraints.is_empty() {
        out.push_str("Subject To\n");
        for (c, cname) in model.constraints.iter().zip(&cnames) {
            let _ = write!(out, " {cname}:");
            let any = write_linear(
                &mut out,
                c.terms.iter().map(|&(v, a)| (a, vnames[v.0].clone())),
            );
            if !any {
                // LP needs a term on the left; a zero coefficient keeps the row.
                let _ = write!(out, " 0 {}", vnames.first().map(String::as_str).unwrap_or("_"));
            }
            let _ = writeln!(out, " {} {}", c.sense.lp_symbol(), fmt_num(c.rhs));
        }
    }

    let mut bounds = String::new();
    for (i, v) in model.variables.iter().enumerate() {
        let (lo, hi) = model.effective_bounds(VarId(i));
        let name = &vnames[i];
        if lo == hi {
            let _ = writeln!(bounds, " {name} = {}", fmt_num(lo));
        } else if v.kind == VarKind::Binary {
            continue;
        } else if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            let _ = writeln!(bounds, " {name} free");
        } else if lo == 0.0 && hi == f64::INFINITY {
            continue;
        } else {
            let _ = writeln!(bounds, " {} <= {name} <= {}", fmt_bound(lo), fmt_bound(hi));
        }
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        out.push_str(&bounds);
    }

    for (header, kind) in [("General", VarKind::Integer), ("Binary", VarKind::Binary)] {
        let names: Vec<&str> = model
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.kind == kind)
            .map(|(i, _)| vnames[i].as_str())
            .collect();
        if !names.is_empty() {
            let _ = writeln!(out, "{header}");
            for chunk in names.chunks(10) {
                let _ = writeln!(out, " {}", chunk.join(" "));
            }
        }
    }
    out.push_str("End\n");
    Ok(out)
}

/// Free-format MPS.
pub fn export_mps(model: &MilpModel) -> Result<String> {
    model.validate()?;
    let vnames = sanitized_names(model.variables.iter().map(|v| v.name.as_str()))?;
    let cnames = sanitized_names(model.constraints.iter().map(|c| c.name.as_str()))?;

    let mut out = String::new();
    let _ = writeln!(out, "NAME {}", sanitize_name(&model.name));
    out.push_str("ROWS\n N obj\n");
    for (c, name) in model.constraints.iter().zip(&cnames) {
        let t = match c.sense {
            RowSense::Le => "L",
            RowSense::Eq => "E",
            RowSense::Ge => "G",
        };
        let _ = writeln!(out, " {t} {name}");
    }

    let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); model.variables.len()];
    for (r, c) in model.constraints.iter().enumerate() {
        for &(v, a) in &c.terms {
            columns[v.0].push((r, a));
        }
    }
    out.push_str("COLUMNS\n");
    let mut in_int = false;
    let mut marker = 0;
    for (i, v) in model.variables.iter().enumerate() {
        let is_int = v.kind != VarKind::Continuous;
        if is_int != in_int {
            let tag = if is_int { "INTORG" } else { "INTEND" };
            let _ = writeln!(out, " MARKER{marker} 'MARKER' '{tag}'");
            marker += 1;
            in_int = is_int;
        }
        let name = &vnames[i];
        if v.objective != 0.0 {
            let _ = writeln!(out, " {name} obj {}", fmt_num(v.objective));
        }
        for &(r, a) in &columns[i] {
            let _ = writeln!(out, " {name} {} {}", cnames[r], fmt_num(a));
        }
        if v.objective == 0.0 && columns[i].is_empty() {
            let _ = writeln!(out, " {name} obj 0");
        }
    }
    if in_int {
        let _ = writeln!(out, " MARKER{marker} 'MARKER' 'INTEND'");
    }

    out.push_str("RHS\n");
    for (c, name) in model.constraints.iter().zip(&cnames) {
        if c.rhs != 0.0 {
            let _ = writeln!(out, " RHS {name} {}", fmt_num(c.rhs));
        }
    }

    out.push_str("BOUNDS\n");
    for (i, v) in model.variables.iter().enumerate() {
        let (lo, hi) = model.effective_bounds(VarId(i));
        let name = &vnames[i];
        if lo == hi {
            let _ = writeln!(out, " FX BND {name} {}", fmt_num(lo));
            continue;
        }
        if v.kind == VarKind::Binary && lo == 0.0 && hi == 1.0 {
            let _ = writeln!(out, " BV BND {name}");
            continue;
        }
        if lo == f64::NEG_INFINITY {
            let _ = writeln!(out, " MI BND {name}");
        } else if lo != 0.0 {
            let _ = writeln!(out, " LO BND {name} {}", fmt_num(lo));
        }
        if hi == f64::INFINITY {
            if v.kind == VarKind::Integer {
                let _ = writeln!(out, " PL BND {name}");
            }
        } else {
            let _ = writeln!(out, " UP BND {name} {}", fmt_num(hi));
        }
    }
    out.push_str("ENDATA\n");
    Ok(out)
}

/// Writes `name value` lines for the non-zero entries of a full assignment.
pub fn write_solution(model: &MilpModel, values: &[f64]) -> String {
    let mut out = String::new();
    for (v, &x) in model.variables.iter().zip(values) {
        if x.abs() > INT_TOL {
            let _ = writeln!(out, "{} {}", v.name, fmt_num(x));
        }
    }
    out
}

/// Reads `name value` lines into a full assignment; missing names are zero.
/// Blank lines and `#` comments are skipped.
pub fn import_solution(model: &MilpModel, text: &str) -> Result<Vec<f64>> {
    let mut values = vec![0.0; model.num_vars()];
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (Some(name), Some(val), None) = (it.next(), it.next(), it.next()) else {
            return Err(Error::Parse {
                line: i + 1,
                msg: "expected \"name value\"".into(),
            });
        };
        let id = model.var_id(name).ok_or_else(|| Error::Parse {
            line: i + 1,
            msg: format!("unknown variable {name}"),
        })?;
        values[id.0] = val.parse().map_err(|_| Error::Parse {
            line: i + 1,
            msg: format!("bad value {val:?}"),
        })?;
    }
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Stopped with an incumbent but without proof of optimality.
    Feasible,
    Infeasible,
    /// Stopped by a non-time limit without an incumbent.
    NoIntegerSolution,
    TimeLimitNoSolution,
    Error,
}

impl SolveStatus {
    pub fn has_incumbent(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn is_no_solution(self) -> bool {
        matches!(
            self,
            SolveStatus::NoIntegerSolution | SolveStatus::TimeLimitNoSolution
        )
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("status serializes");
        f.write_str(s.as_str().unwrap_or("?"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub best_bound: Option<f64>,
    /// Full assignment in declaration order, when an incumbent exists.
    pub incumbent: Option<Vec<f64>>,
    /// Seconds spent inside the backend.
    pub wall_time: f64,
    pub node_count: Option<u64>,
    pub message: Option<String>,
}

impl SolveOutcome {
    /// `100 * (objective - bound) / objective`.
    pub fn gap_bb(&self) -> Option<f64> {
        match (self.objective, self.best_bound) {
            (Some(o), Some(b)) if o > 0.0 => Some(100.0 * (o - b) / o),
            _ => None,
        }
    }

    pub fn value(&self, model: &MilpModel, name: &str) -> Option<f64> {
        let id = model.var_id(name)?;
        self.incumbent.as_ref().map(|v| v[id.0])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    pub time_limit: Option<f64>,
    pub mip_rel_gap: f64,
    /// Full assignment offered as a starting incumbent.
    pub warm_start: Option<Vec<f64>>,
    pub threads: Option<u32>,
    /// Algorithm for pure LPs; ignored when integers are present.
    pub lp_algorithm: LpAlgorithm,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LpAlgorithm {
    #[default]
    Auto,
    Simplex,
    /// Interior point with crossover.
    Ipm,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            time_limit: None,
            mip_rel_gap: DEFAULT_MIP_GAP,
            warm_start: None,
            threads: None,
            lp_algorithm: LpAlgorithm::Auto,
        }
    }
}

impl SolveOptions {
    pub fn with_time_limit(seconds: f64) -> Self {
        Self {
            time_limit: Some(seconds),
            ..Self::default()
        }
    }
}

/// A MIP/LP solver able to run a [`MilpModel`].
pub trait Backend: Send + Sync {
    fn name(&self) -> &str;
    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<SolveOutcome>;

    /// Optimal value with integrality dropped.
    fn solve_relaxation(&self, model: &MilpModel) -> Result<f64> {
        let opts = SolveOptions {
            lp_algorithm: LpAlgorithm::Ipm,
            ..SolveOptions::default()
        };
        let out = self.solve(&model.relaxed(), &opts)?;
        match out.status {
            SolveStatus::Optimal => Ok(out.objective.expect("optimal has objective")),
            SolveStatus::Infeasible => Err(Error::Relaxation("infeasible".into())),
            _ => Err(Error::Relaxation(
                out.message.unwrap_or_else(|| out.status.to_string()),
            )),
        }
    }
}

/// Solves with the in-tree HiGHS backend.
pub fn solve(model: &MilpModel, opts: &SolveOptions) -> Result<SolveOutcome> {
    HighsBackend.solve(model, opts)
}

/// LP relaxation value with the in-tree HiGHS backend.
pub fn solve_relaxation(model: &MilpModel) -> Result<f64> {
    HighsBackend.solve_relaxation(model)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct HighsBackend;

static BRANCH_HINTS_IGNORED: Once = Once::new();

impl Backend for HighsBackend {
    fn name(&self) -> &str {
        "highs"
    }

    fn solve(&self, model: &MilpModel, opts: &SolveOptions) -> Result<SolveOutcome> {
        model.validate()?;
        if !model.hints.branch_priority.is_empty() || !model.hints.branch_direction.is_empty() {
            BRANCH_HINTS_IGNORED.call_once(|| {
                log::info!("highs: branching priority/direction hints are not supported, ignoring");
            });
        }
        if model.num_vars() == 0 {
            return Ok(solve_empty(model));
        }

        let mut pb = highs::RowProblem::default();
        let cols: Vec<highs::Col> = model
            .variables
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let (lo, hi) = model.effective_bounds(VarId(i));
                pb.add_column_with_integrality(v.objective, lo..=hi, v.kind != VarKind::Continuous)
            })
            .collect();
        for c in &model.constraints {
            let row: Vec<(highs::Col, f64)> =
                c.terms.iter().map(|&(v, a)| (cols[v.0], a)).collect();
            match c.sense {
                RowSense::Le => pb.add_row(..=c.rhs, row),
                RowSense::Ge => pb.add_row(c.rhs.., row),
                RowSense::Eq => pb.add_row(c.rhs..=c.rhs, row),
            }
        }

        let mut hm = pb.optimise(highs::Sense::Minimise);
        hm.make_quiet();
        hm.set_option("mip_rel_gap", opts.mip_rel_gap);
        hm.set_option("random_seed", 0);
        if let Some(t) = opts.time_limit {
            hm.set_option("time_limit", t.max(0.0));
        }
        if let Some(n) = opts.threads {
            hm.set_option("threads", n as i32);
        }
        let is_mip = model.has_integers();
        match opts.lp_algorithm {
            _ if is_mip => {}
            LpAlgorithm::Auto => {}
            LpAlgorithm::Simplex => hm.set_option("solver", "simplex"),
            LpAlgorithm::Ipm => hm.set_option("solver", "ipm"),
        }
        if model.hints.aggressive_incumbent_search {
            hm.set_option("mip_heuristic_effort", 0.3);
        }
        if let Some(start) = &opts.warm_start {
            if start.len() != model.num_vars() {
                return Err(Error::Backend(format!(
                    "warm start has {} values, model has {} variables",
                    start.len(),
                    model.num_vars()
                )));
            }
            hm.try_set_solution(Some(start), None, None, None)
                .map_err(|e| Error::Backend(format!("set_solution: {e:?}")))?;
        }

        let clock = Instant::now();
        let solved = hm
            .try_solve()
            .map_err(|e| Error::Backend(format!("run failed: {e:?}")))?;
        let wall_time = clock.elapsed().as_secs_f64();

        let ptr = solved.as_ptr();
        let has_primal = info_int(ptr, "primal_solution_status") == Some(2);
        let node_count = if is_mip {
            info_int64(ptr, "mip_node_count").map(|v| v.max(0) as u64)
        } else {
            None
        };
        let dual_bound = if is_mip {
            info_double(ptr, "mip_dual_bound").filter(|b| b.is_finite())
        } else {
            None
        };
        let incumbent = || solved.get_solution().columns().to_vec();

        // SAFETY: ptr is the live handle owned by `solved`.
        let raw = unsafe { highs_sys::Highs_getModelStatus(ptr) };
        let (status, message) = map_status(raw, has_primal, is_mip);

        let (objective, incumbent) = if status.has_incumbent() {
            let values = incumbent();
            (Some(model.objective_of(&values)), Some(values))
        } else {
            (None, None)
        };
        let best_bound = match status {
            SolveStatus::Optimal if !is_mip => objective,
            _ => dual_bound.or(if status == SolveStatus::Optimal { objective } else { None }),
        };
        Ok(SolveOutcome {
            status,
            objective,
            best_bound,
            incumbent,
            wall_time,
            node_count,
            message,
        })
    }
}

fn map_status(raw: highs_sys::HighsInt, has_primal: bool, is_mip: bool) -> (SolveStatus, Option<String>) {
    use highs_sys::*;
    match raw {
        MODEL_STATUS_OPTIMAL => (SolveStatus::Optimal, None),
        MODEL_STATUS_INFEASIBLE => (SolveStatus::Infeasible, None),
        MODEL_STATUS_REACHED_TIME_LIMIT if has_primal && is_mip => (SolveStatus::Feasible, None),
        MODEL_STATUS_REACHED_TIME_LIMIT => (SolveStatus::TimeLimitNoSolution, None),
        MODEL_STATUS_REACHED_ITERATION_LIMIT
        | MODEL_STATUS_OBJECTIVE_BOUND
        | MODEL_STATUS_OBJECTIVE_TARGET
        | MODEL_STATUS_UNKNOWN
        | MODEL_STATUS_REACHED_SOLUTION_LIMIT
        | MODEL_STATUS_REACHED_INTERRUPT
        | MODEL_STATUS_REACHED_MEMORY_LIMIT => {
            let msg = Some(format!("highs model status {raw}"));
            if has_primal && is_mip {
                (SolveStatus::Feasible, msg)
            } else {
                (SolveStatus::NoIntegerSolution, msg)
            }
        }
        other => (SolveStatus::Error, Some(format!("highs model status {other}"))),
    }
}

// A model without columns: every row must hold with lhs 0.
fn solve_empty(model: &MilpModel) -> SolveOutcome {
    let ok = model.constraints.iter().all(|c| match c.sense {
        RowSense::Le => 0.0 <= c.rhs,
        RowSense::Ge => 0.0 >= c.rhs,
        RowSense::Eq => c.rhs == 0.0,
    });
    SolveOutcome {
        status: if ok { SolveStatus::Optimal } else { SolveStatus::Infeasible },
        objective: ok.then_some(0.0),
        best_bound: ok.then_some(0.0),
        incumbent: ok.then(Vec::new),
        wall_time: 0.0,
        node_count: None,
        message: None,
    }
}

fn info_double(ptr: *const std::ffi::c_void, name: &str) -> Option<f64> {
    let key = std::ffi::CString::new(name).ok()?;
    let mut v = 0.0f64;
    // SAFETY: ptr is a live Highs instance owned by the caller; key is NUL-terminated.
    let st = unsafe { highs_sys::Highs_getDoubleInfoValue(ptr, key.as_ptr(), &mut v) };
    (st == highs_sys::STATUS_OK).then_some(v)
}

fn info_int(ptr: *const std::ffi::c_void, name: &str) -> Option<i64> {
    let key = std::ffi::CString::new(name).ok()?;
    let mut v: highs_sys::HighsInt = 0;
    // SAFETY: as above.
    let st = unsafe { highs_sys::Highs_getIntInfoValue(ptr, key.as_ptr(), &mut v) };
    (st == highs_sys::STATUS_OK).then_some(v as i64)
}

fn info_int64(ptr: *const std::ffi::c_void, name: &str) -> Option<i64> {
    let key = std::ffi::CString::new(name).ok()?;
    let mut v: i64 = 0;
    // SAFETY: as above.
    let st = unsafe { highs_sys::Highs_getInt64InfoValue(ptr, key.as_ptr(), &mut v) };
    (st == highs_sys::STATUS_OK).then_some(v)
}

/// Result of loading a model file with HiGHS' own reader.
#[derive(Debug, Clone, PartialEq)]
pub struct FileSolve {
    pub num_cols: usize,
    pub num_rows: usize,
    pub optimal: bool,
    pub objective: f64,
}

/// Reads an LP or MPS file with HiGHS' parser and solves it. Used to check
/// exported files independently of the in-memory path.
pub fn read_and_solve_file(path: &Path) -> Result<FileSolve> {
    let cpath = std::ffi::CString::new(path.to_string_lossy().as_bytes())
        .map_err(|e| Error::Backend(e.to_string()))?;
    let flag = std::ffi::CString::new("output_flag").expect("static");
    let gap = std::ffi::CString::new("mip_rel_gap").expect("static");
    // SAFETY: the handle is created and destroyed here; all strings are NUL-terminated.
    unsafe {
        let h = highs_sys::Highs_create();
        highs_sys::Highs_setBoolOptionValue(h, flag.as_ptr(), 0);
        highs_sys::Highs_setDoubleOptionValue(h, gap.as_ptr(), DEFAULT_MIP_GAP);
        let read = highs_sys::Highs_readModel(h, cpath.as_ptr());
        if read == highs_sys::STATUS_ERROR {
            highs_sys::Highs_destroy(h);
            return Err(Error::Backend(format!("highs could not read {}", path.display())));
        }
        let num_cols = highs_sys::Highs_getNumCol(h).max(0) as usize;
        let num_rows = highs_sys::Highs_getNumRow(h).max(0) as usize;
        highs_sys::Highs_run(h);
        let optimal = highs_sys::Highs_getModelStatus(h) == highs_sys::MODEL_STATUS_OPTIMAL;
        let objective = highs_sys::Highs_getObjectiveValue(h);
        highs_sys::Highs_destroy(h);
        Ok(FileSolve {
            num_cols,
            num_rows,
            optimal,
            objective,
        })
    }
}
