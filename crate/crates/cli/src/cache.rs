//! `state_<n>.json` and `report_<n>.json` under the cache directory, each
//! tagged with the solver version that produced it.

use std::fs;
use std::path::{Path, PathBuf};

use snewton::io::{StateDocument, SOLVER_VERSION};
use snewton::stability::StabilityReport;
use snewton::stationary::{shoot, ShootOptions};
use snewton::{Error, State};

use crate::output::{param, write_json, Document, Header};
use crate::Failure;

pub fn state_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("state_{n}.json"))
}

pub fn report_path(dir: &Path, n: usize) -> PathBuf {
    dir.join(format!("report_{n}.json"))
}

pub enum Lookup<T> {
    Hit(T),
    Missing,
    Stale(String),
}

fn stale_message(path: &Path, found: &str) -> String {
    format!("stale cache: {} was written by {found}, current solver is {SOLVER_VERSION}", path.display())
}

pub fn read_state(dir: &Path, n: usize) -> Lookup<State> {
    let path = state_path(dir, n);
    let Ok(text) = fs::read_to_string(&path) else { return Lookup::Missing };
    let doc: Document<StateDocument> = match serde_json::from_str(&text) {
        Ok(d) => d,
        Err(e) => return Lookup::Stale(format!("unreadable cache file {}: {e}", path.display())),
    };
    match doc.body.into_state() {
        Ok(s) if s.n == n => Lookup::Hit(s),
        Ok(s) => Lookup::Stale(format!("{} holds state {}", path.display(), s.n)),
        Err(Error::StaleDocument { found, .. }) => Lookup::Stale(stale_message(&path, &found)),
        Err(e) => Lookup::Stale(format!("{}: {e}", path.display())),
    }
}

pub fn write_state(dir: &Path, state: &State) -> Result<(), Failure> {
    let header = Header::new("states", vec![param("n", state.n)]);
    write_json(&state_path(dir, state.n), &header, &StateDocument::from(state))
}

pub fn compute_state(dir: &Path, n: usize) -> Result<State, Failure> {
    let s = shoot(n, &ShootOptions::default()).map_err(|e| Failure::Run(format!("state {n}: {e}")))?;
    write_state(dir, &s)?;
    Ok(s)
}

/// Cached state, computed and stored on a miss. A stale file is an error.
pub fn state(dir: &Path, n: usize) -> Result<State, Failure> {
    match read_state(dir, n) {
        Lookup::Hit(s) => Ok(s),
        Lookup::Missing => compute_state(dir, n),
        Lookup::Stale(msg) => Err(Failure::Run(format!("{msg}; regenerate it with `snewton states --n-max {n}`"))),
    }
}

pub fn write_report(dir: &Path, header: &Header, report: &StabilityReport) -> Result<(), Failure> {
    write_json(&report_path(dir, report.n), header, report)
}

pub fn read_report(dir: &Path, n: usize) -> Lookup<StabilityReport> {
    let path = report_path(dir, n);
    let Ok(text) = fs::read_to_string(&path) else { return Lookup::Missing };
    match serde_json::from_str::<Document<StabilityReport>>(&text) {
        Ok(d) if d.header.solver_version == SOLVER_VERSION => Lookup::Hit(d.body),
        Ok(d) => Lookup::Stale(stale_message(&path, &d.header.solver_version)),
        Err(e) => Lookup::Stale(format!("unreadable cache file {}: {e}", path.display())),
    }
}
