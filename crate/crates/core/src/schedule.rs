//! Schedules: validation, JSON form, flow decoding and Gantt rendering.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::arcflow::FlowSolution;
use crate::instance::Instance;
use crate::{Error, Result, Time};

/// One job placed on a machine. The machine is held from `setup_start` to
/// completion; the server only during the setup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Assignment {
    pub job: u32,
    /// 1-based machine index.
    pub machine: u32,
    pub setup_start: Time,
    pub setup: Time,
    pub processing: Time,
}

impl Assignment {
    pub fn setup_end(&self) -> Time {
        self.setup_start + self.setup
    }

    pub fn completion(&self) -> Time {
        self.setup_start + self.setup + self.processing
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    pub machines: u32,
    pub assignments: Vec<Assignment>,
    pub makespan: Time,
}

impl Schedule {
    /// Builds a schedule and derives its makespan. Assignments are kept sorted
    /// by `(setup_start, machine)`.
    pub fn new(machines: u32, mut assignments: Vec<Assignment>) -> Self {
        assignments.sort_by_key(|a| (a.setup_start, a.machine, a.job));
        let makespan = assignments.iter().map(Assignment::completion).max().unwrap_or(0);
        Self {
            machines,
            assignments,
            makespan,
        }
    }

    /// Rebuilds a schedule from `(job, machine, setup_start)` triples.
    pub fn from_starts(inst: &Instance, starts: &[(u32, u32, Time)]) -> Result<Self> {
        let assignments = starts
            .iter()
            .map(|&(job, machine, setup_start)| {
                let j = inst
                    .job(job)
                    .ok_or_else(|| Error::Schedule(format!("unknown job {job}")))?;
                Ok(Assignment {
                    job,
                    machine,
                    setup_start,
                    setup: j.setup,
                    processing: j.processing,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(inst.machines, assignments))
    }

    /// Jobs in the order the server sets them up.
    pub fn server_order(&self) -> Vec<u32> {
        let mut v: Vec<_> = self.assignments.iter().map(|a| (a.setup_start, a.job)).collect();
        v.sort_unstable();
        v.into_iter().map(|(_, j)| j).collect()
    }

    pub fn to_json(&self) -> String {
        let doc = ScheduleDoc {
            machines: self.machines,
            makespan: self.makespan,
            assignments: self
                .assignments
                .iter()
                .map(|a| AssignmentDoc {
                    job: a.job,
                    machine: a.machine,
                    setup_start: a.setup_start,
                })
                .collect(),
        };
        serde_json::to_string_pretty(&doc).expect("schedule serializes")
    }

    /// Reads the JSON form; durations come from the instance. The stored
    /// makespan is kept as declared so `validate` can catch a mismatch.
    pub fn from_json(text: &str, inst: &Instance) -> Result<Self> {
        let doc: ScheduleDoc = serde_json::from_str(text)?;
        let starts: Vec<_> = doc
            .assignments
            .iter()
            .map(|a| (a.job, a.machine, a.setup_start))
            .collect();
        let mut sched = Self::from_starts(inst, &starts)?;
        sched.machines = doc.machines;
        sched.makespan = doc.makespan;
        Ok(sched)
    }
}

#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    machines: u32,
    makespan: Time,
    assignments: Vec<AssignmentDoc>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentDoc {
    job: u32,
    machine: u32,
    setup_start: Time,
}

/// A broken feasibility rule. Half-open windows `[from, to)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MissingJob { job: u32 },
    DuplicateJob { job: u32, count: usize },
    UnknownJob { job: u32 },
    DurationMismatch { job: u32 },
    MachineOutOfRange { job: u32, machine: u32 },
    ServerOverlap { first: u32, second: u32, from: Time, to: Time },
    MachineOverlap { machine: u32, first: u32, second: u32, from: Time, to: Time },
    MakespanMismatch { declared: Time, actual: Time },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::MissingJob { job } => write!(f, "job {job} is not scheduled"),
            Violation::DuplicateJob { job, count } => write!(f, "job {job} scheduled {count} times"),
            Violation::UnknownJob { job } => write!(f, "job {job} is not in the instance"),
            Violation::DurationMismatch { job } => {
                write!(f, "job {job} durations differ from the instance")
            }
            Violation::MachineOutOfRange { job, machine } => {
                write!(f, "job {job} on machine {machine}, outside 1..=m")
            }
            Violation::ServerOverlap { first, second, from, to } => {
                write!(f, "server: setups of jobs {first} and {second} overlap on [{from}, {to})")
            }
            Violation::MachineOverlap { machine, first, second, from, to } => write!(
                f,
                "machine {machine}: jobs {first} and {second} overlap on [{from}, {to})"
            ),
            Violation::MakespanMismatch { declared, actual } => {
                write!(f, "declared makespan {declared}, actual {actual}")
            }
        }
    }
}

/// Checks every feasibility rule; an empty result means the schedule is valid.
pub fn validate(sched: &Schedule, inst: &Instance) -> Vec<Violation> {
    let mut out = Vec::new();

    let mut seen: BTreeMap<u32, usize> = BTreeMap::new();
    for a in &sched.assignments {
        *seen.entry(a.job).or_default() += 1;
        match inst.job(a.job) {
            None => out.push(Violation::UnknownJob { job: a.job }),
            Some(j) if j.setup != a.setup || j.processing != a.processing => {
                out.push(Violation::DurationMismatch { job: a.job })
            }
            Some(_) => {}
        }
        if a.machine == 0 || a.machine > inst.machines {
            out.push(Violation::MachineOutOfRange {
                job: a.job,
                machine: a.machine,
            });
        }
    }
    for job in &inst.jobs {
        match seen.get(&job.id) {
            None => out.push(Violation::MissingJob { job: job.id }),
            Some(&c) if c > 1 => out.push(Violation::DuplicateJob { job: job.id, count: c }),
            _ => {}
        }
    }

    let mut setups: Vec<_> = sched
        .assignments
        .iter()
        .map(|a| (a.setup_start, a.setup_end(), a.job))
        .collect();
    setups.sort_unstable();
    push_overlaps(&setups, |first, second, from, to| Violation::ServerOverlap {
        first,
        second,
        from,
        to,
    }, &mut out);

    let mut per_machine: BTreeMap<u32, Vec<(Time, Time, u32)>> = BTreeMap::new();
    for a in &sched.assignments {
        per_machine
            .entry(a.machine)
            .or_default()
            .push((a.setup_start, a.completion(), a.job));
    }
    for (machine, mut spans) in per_machine {
        spans.sort_unstable();
        push_overlaps(&spans, |first, second, from, to| Violation::MachineOverlap {
            machine,
            first,
            second,
            from,
            to,
        }, &mut out);
    }

    let actual = sched.assignments.iter().map(Assignment::completion).max().unwrap_or(0);
    if actual != sched.makespan {
        out.push(Violation::MakespanMismatch {
            declared: sched.makespan,
            actual,
        });
    }
    out
}

// Intervals sorted by start; reports each pair that intersects.
fn push_overlaps(
    sorted: &[(Time, Time, u32)],
    make: impl Fn(u32, u32, Time, Time) -> Violation,
    out: &mut Vec<Violation>,
) {
    for (i, &(s1, e1, j1)) in sorted.iter().enumerate() {
        for &(s2, e2, j2) in &sorted[i + 1..] {
            if s2 >= e1 {
                break;
            }
            out.push(make(j1, j2, s2.max(s1), e1.min(e2)));
        }
    }
}

/// Turns an audited integral flow into machine sequences.
///
/// The `m` units of machine flow are walked from node 0 to the sink, always
/// extending the path whose current node is smallest (ties by path index).
/// Each path becomes one machine. Class occurrences are mapped to concrete job
/// ids ascending by start time.
pub fn decode_flow(flow: &FlowSolution, inst: &Instance) -> Result<Schedule> {
    let m = inst.machines as usize;
    let sink = flow.sink;
    // remaining[class][t] execution-arc units leaving t
    let mut remaining = flow.x.clone();
    let mut idle = flow.y_machine.clone();
    let mut position = vec![0 as Time; m];
    // (class, start, machine)
    let mut placed: Vec<(usize, Time, u32)> = Vec::new();

    loop {
        let Some((path, &node)) = position
            .iter()
            .enumerate()
            .filter(|(_, &t)| t < sink)
            .min_by_key(|(i, &t)| (t, *i))
        else {
            break;
        };
        let t = node as usize;
        let arc = remaining
            .iter()
            .position(|starts| starts.get(t).copied().unwrap_or(0) > 0);
        if let Some(class) = arc {
            remaining[class][t] -= 1;
            placed.push((class, node, path as u32 + 1));
            position[path] = node + flow.classes[class].span();
        } else if idle.get(t).copied().unwrap_or(0) > 0 {
            idle[t] -= 1;
            position[path] = node + 1;
        } else {
            return Err(Error::Audit(format!(
                "machine flow has no outgoing arc at node {node} for path {}",
                path + 1
            )));
        }
        if position[path] > sink {
            return Err(Error::Audit(format!(
                "path {} overshoots the sink {sink} (reached {})",
                path + 1,
                position[path]
            )));
        }
    }

    if let Some((class, t)) = remaining.iter().enumerate().find_map(|(c, starts)| {
        starts.iter().position(|&v| v > 0).map(|t| (c, t))
    }) {
        return Err(Error::Audit(format!(
            "execution arc of class {class} at node {t} left unused by the decomposition"
        )));
    }

    placed.sort_by_key(|&(class, start, machine)| (class, start, machine));
    let mut next_member = vec![0usize; flow.classes.len()];
    let mut assignments = Vec::with_capacity(placed.len());
    for (class, start, machine) in placed {
        let cls = &flow.classes[class];
        let idx = next_member[class];
        let job = *cls.members.get(idx).ok_or_else(|| {
            Error::Audit(format!(
                "class {} used more than its multiplicity {}",
                cls.representative, cls.multiplicity
            ))
        })?;
        next_member[class] += 1;
        assignments.push(Assignment {
            job,
            machine,
            setup_start: start,
            setup: cls.setup,
            processing: cls.processing,
        });
    }
    Ok(Schedule::new(inst.machines, assignments))
}

const ROW_H: u32 = 28;
const LABEL_W: u32 = 70;
const SCALE: u32 = 24;
const PAD: u32 = 10;

/// Renders machines rows plus a server row on a shared time axis.
pub fn gantt_svg(sched: &Schedule) -> String {
    let rows = sched.machines + 1;
    let horizon = sched.makespan.max(1);
    let width = LABEL_W + horizon * SCALE + 2 * PAD;
    let height = rows * ROW_H + 40 + PAD;
    let x_of = |t: Time| LABEL_W + PAD + t * SCALE;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}" font-family="monospace" font-size="11">"#
    );
    svg.push_str(
        "<style>.setup{fill:#f2b134;stroke:#333}.proc{fill:#4f81bd;stroke:#333}.srv{fill:#f2b134;stroke:#333}.axis{stroke:#333}.grid{stroke:#ddd}</style>\n",
    );

    for row in 0..rows {
        let y = PAD + row * ROW_H;
        let label = if row < sched.machines {
            format!("M{}", row + 1)
        } else {
            "Server".to_string()
        };
        let _ = writeln!(svg, r#"<text x="{PAD}" y="{}">{label}</text>"#, y + ROW_H / 2 + 4);
    }

    let axis_y = PAD + rows * ROW_H + 4;
    for t in 0..=horizon {
        let x = x_of(t);
        let _ = writeln!(
            svg,
            r#"<line class="grid" x1="{x}" y1="{PAD}" x2="{x}" y2="{axis_y}"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{t}</text>"#,
            x.saturating_sub(3),
            axis_y + 14
        );
    }
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{}" y1="{axis_y}" x2="{}" y2="{axis_y}"/>"#,
        x_of(0),
        x_of(horizon)
    );

    let mut ordered = sched.assignments.clone();
    ordered.sort_by_key(|a| (a.machine, a.setup_start, a.job));
    for a in &ordered {
        let y = PAD + (a.machine - 1) * ROW_H + 4;
        let h = ROW_H - 8;
        let _ = writeln!(
            svg,
            r#"<rect class="setup" x="{}" y="{y}" width="{}" height="{h}"><title>job {} setup [{}, {})</title></rect>"#,
            x_of(a.setup_start),
            a.setup * SCALE,
            a.job,
            a.setup_start,
            a.setup_end()
        );
        let _ = writeln!(
            svg,
            r#"<rect class="proc" x="{}" y="{y}" width="{}" height="{h}"><title>job {} processing [{}, {})</title></rect>"#,
            x_of(a.setup_end()),
            a.processing * SCALE,
            a.job,
            a.setup_end(),
            a.completion()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            x_of(a.setup_end()) + 3,
            y + h / 2 + 4,
            a.job
        );
    }

    let srv_y = PAD + sched.machines * ROW_H + 4;
    let mut by_start = sched.assignments.clone();
    by_start.sort_by_key(|a| (a.setup_start, a.job));
    for a in &by_start {
        let _ = writeln!(
            svg,
            r#"<rect class="srv" x="{}" y="{srv_y}" width="{}" height="{}"><title>job {} setup [{}, {})</title></rect>"#,
            x_of(a.setup_start),
            a.setup * SCALE,
            ROW_H - 8,
            a.job,
            a.setup_start,
            a.setup_end()
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            x_of(a.setup_start) + 3,
            srv_y + (ROW_H - 8) / 2 + 4,
            a.job
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> Instance {
        Instance::from_pairs(3, &[(2, 3), (3, 5), (3, 4), (2, 5), (2, 3)]).unwrap()
    }

    // Gantt chart of the worked example: setups at 0, 2, 5, 8, 10.
    pub(crate) fn fig1_chart(inst: &Instance) -> Schedule {
        Schedule::from_starts(
            inst,
            &[(1, 1, 0), (2, 2, 2), (3, 1, 5), (5, 3, 8), (4, 2, 10)],
        )
        .unwrap()
    }

    #[test]
    fn worked_example_chart_is_valid() {
        let inst = fig1();
        let sched = fig1_chart(&inst);
        assert_eq!(validate(&sched, &inst), []);
        assert_eq!(sched.makespan, 17);
        assert_eq!(sched.server_order(), [1, 2, 3, 5, 4]);
    }

    #[test]
    fn detects_server_overlap() {
        let inst = Instance::from_pairs(2, &[(2, 1), (2, 1)]).unwrap();
        let sched = Schedule::from_starts(&inst, &[(1, 1, 0), (2, 2, 1)]).unwrap();
        let v = validate(&sched, &inst);
        assert_eq!(
            v,
            [Violation::ServerOverlap {
                first: 1,
                second: 2,
                from: 1,
                to: 2
            }]
        );
    }

    #[test]
    fn detects_machine_overlap() {
        let inst = Instance::from_pairs(3, &[(1, 4), (1, 4)]).unwrap();
        let sched = Schedule::from_starts(&inst, &[(1, 1, 0), (2, 1, 3)]).unwrap();
        let v = validate(&sched, &inst);
        assert_eq!(
            v,
            [Violation::MachineOverlap {
                machine: 1,
                first: 1,
                second: 2,
                from: 3,
                to: 5
            }]
        );
    }

    #[test]
    fn detects_structural_problems() {
        let inst = fig1();
        let mut sched = Schedule::from_starts(&inst, &[(1, 4, 0), (1, 1, 20)]).unwrap();
        sched.makespan = 3;
        let v = validate(&sched, &inst);
        assert!(v.contains(&Violation::MachineOutOfRange { job: 1, machine: 4 }));
        assert!(v.contains(&Violation::DuplicateJob { job: 1, count: 2 }));
        assert!(v.contains(&Violation::MissingJob { job: 2 }));
        assert!(v.contains(&Violation::MakespanMismatch {
            declared: 3,
            actual: 25
        }));
    }

    #[test]
    fn json_round_trip() {
        let inst = fig1();
        let sched = fig1_chart(&inst);
        let text = sched.to_json();
        assert!(text.contains("\"setup_start\""));
        assert_eq!(Schedule::from_json(&text, &inst).unwrap(), sched);
    }

    #[test]
    fn gantt_rows_and_bars() {
        let inst = Instance::from_pairs(1, &[(2, 3)]).unwrap();
        let sched = Schedule::from_starts(&inst, &[(1, 1, 0)]).unwrap();
        let svg = gantt_svg(&sched);
        assert!(svg.contains(">M1<") && svg.contains(">Server<"));
        assert_eq!(svg.matches("<rect").count(), 3);
        assert_eq!(svg.matches("class=\"setup\"").count(), 1);
        assert_eq!(svg.matches("class=\"proc\"").count(), 1);

        let big = gantt_svg(&fig1_chart(&fig1()));
        assert!(big.contains(">M3<"));
        assert!(!big.contains(">M4<"));
        assert_eq!(big.matches("class=\"srv\"").count(), 5);
        assert_eq!(big, gantt_svg(&fig1_chart(&fig1())));
    }
}
