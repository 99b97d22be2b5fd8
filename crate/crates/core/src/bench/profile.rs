use std::collections::BTreeMap;

use super::BenchRecord;

/// Relative objective excess over the per-instance best that marks a
/// solution as wrong.
pub const WRONG_REL_TOL: f64 = 1e-4;

/// `(time, solved so far)` steps per method label. The count holds from
/// each step's time onward.
pub type Profile = BTreeMap<String, Vec<(f64, usize)>>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileEntry<'a> {
    pub instance: &'a str,
    pub method: &'a str,
    pub seconds: f64,
    pub solved: bool,
    pub objective: Option<f64>,
    pub hit_time_limit: bool,
}

impl<'a> ProfileEntry<'a> {
    pub fn from_record(r: &'a BenchRecord) -> Self {
        ProfileEntry {
            instance: &r.instance,
            method: &r.method,
            seconds: r.time_seconds,
            solved: r.is_solved(),
            objective: r.objective,
            hit_time_limit: r.solver_status.as_deref() == Some("time-limit"),
        }
    }
}

/// Entries whose objective exceeds the instance best by more than
/// [`WRONG_REL_TOL`] relative, without having hit the time limit.
pub fn wrong_entries(entries: &[ProfileEntry<'_>]) -> Vec<bool> {
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for e in entries {
        if let Some(obj) = e.objective {
            best.entry(e.instance).and_modify(|b| *b = b.min(obj)).or_insert(obj);
        }
    }
    entries
        .iter()
        .map(|e| match (e.objective, best.get(e.instance)) {
            (Some(obj), Some(&b)) if !e.hit_time_limit => obj - b > WRONG_REL_TOL * b.abs(),
            _ => false,
        })
        .collect()
}

/// Cumulative count of solved, non-wrong entries per method within
/// `time_limit`.
pub fn profile_entries(entries: &[ProfileEntry<'_>], time_limit: f64) -> Profile {
    let wrong = wrong_entries(entries);
    let mut times: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (e, bad) in entries.iter().zip(wrong) {
        let slot = times.entry(e.method.to_string()).or_default();
        if e.solved && !bad && e.seconds <= time_limit {
            slot.push(e.seconds);
        }
    }
    times
        .into_iter()
        .map(|(m, mut ts)| {
            ts.sort_by(f64::total_cmp);
            let mut steps: Vec<(f64, usize)> = Vec::new();
            for (i, t) in ts.into_iter().enumerate() {
                match steps.last_mut() {
                    Some(last) if last.0 == t => last.1 = i + 1,
                    _ => steps.push((t, i + 1)),
                }
            }
            (m, steps)
        })
        .collect()
}

pub fn performance_profile(records: &[BenchRecord], time_limit: f64) -> Profile {
    let entries: Vec<ProfileEntry<'_>> = records.iter().map(ProfileEntry::from_record).collect();
    profile_entries(&entries, time_limit)
}

/// Solved count at time `t` for one method's steps.
pub fn solved_at(steps: &[(f64, usize)], t: f64) -> usize {
    steps.iter().take_while(|s| s.0 <= t).last().map_or(0, |s| s.1)
}
