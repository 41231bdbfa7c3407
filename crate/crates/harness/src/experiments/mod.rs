//! The named experiments. Each returns an [`Outcome`] with its error tables and
//! pass/fail checks; a failing sub-run becomes a failed check and the run continues.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use latwave::lattice::{Domain, LatticeSpec};
use latwave::leapfrog::DiscreteProblem;
use latwave::spectral::{DataFunction, Forcing};

use crate::config::{ExperimentConfig, ExperimentId};
use crate::table::ErrorTable;
use crate::HarnessError;

pub mod audit;
pub mod e1;
pub mod e2;
pub mod e3;
pub mod e4;
pub mod e5;
pub mod e6;
pub mod e7;
pub mod e8;

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: ExperimentId,
    pub n: usize,
    pub seed: u64,
    pub tables: Vec<(String, ErrorTable)>,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Outcome {
    pub fn new(cfg: &ExperimentConfig) -> Self {
        Self {
            id: cfg.experiment,
            n: cfg.n,
            seed: cfg.seed,
            tables: Vec::new(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    /// Records a sub-run error as a failed check.
    pub fn failed(&mut self, name: impl Into<String>, err: &HarnessError) {
        self.check(name, false, format!("error: {err}"));
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn table(&self, name: &str) -> Option<&ErrorTable> {
        self.tables.iter().find(|(k, _)| k == name).map(|(_, t)| t)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn check_named(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{} ({}), n = {}, seed = {}", self.id, self.id.title(), self.n, self.seed).ok();
        for c in &self.checks {
            writeln!(s, "  [{}] {}: {}", if c.pass { "pass" } else { "FAIL" }, c.name, c.detail).ok();
        }
        for (name, t) in &self.tables {
            writeln!(s, "  table {name}:").ok();
            for r in t.rows() {
                let order = r.observed_order.map(|o| format!("{o:.3}")).unwrap_or_else(|| "-".into());
                writeln!(
                    s,
                    "    {:>2}  dx={:<10.6} dt={:<10.6} sup={:<12.4e} l2={:<12.4e} order={order}",
                    r.level, r.dx, r.dt, r.sup_error, r.l2_error
                )
                .ok();
            }
        }
        for n in &self.notes {
            writeln!(s, "  note: {n}").ok();
        }
        s
    }

    /// Writes `<id>_<table>.csv`, a gnuplot script per table and `<id>_summary.txt`.
    pub fn write(&self, dir: &Path) -> Result<(), HarnessError> {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let stem = self.id.to_string().to_lowercase();
        for (name, t) in &self.tables {
            let csv = format!("{stem}_{name}.csv");
            t.emit_csv(&dir.join(&csv))?;
            t.emit_plot_script(&dir.join(format!("{stem}_{name}.gp")), &csv, &format!("{} {name}", self.id))?;
        }
        let path = dir.join(format!("{stem}_summary.txt"));
        std::fs::write(&path, self.summary()).map_err(|e| HarnessError::io(path, e))
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Outcome, HarnessError> {
    cfg.validate()?;
    let out = match cfg.experiment {
        ExperimentId::E1 => e1::run(cfg),
        ExperimentId::E2 => e2::run(cfg),
        ExperimentId::E3 => e3::run(cfg),
        ExperimentId::E4 => e4::run(cfg),
        ExperimentId::E5 => e5::run(cfg),
        ExperimentId::E6 => e6::run(cfg),
        ExperimentId::E7 => e7::run(cfg),
        ExperimentId::E8 => e8::run(cfg),
    }?;
    if let Some(dir) = &cfg.out {
        out.write(dir)?;
    }
    Ok(out)
}

/// Free-space problem on the window `[−a, a]ⁿ` with zero boundary data.
pub(crate) fn window_problem(
    spec: LatticeSpec,
    half: f64,
    f: &DataFunction,
    g: &DataFunction,
    w: &Forcing,
) -> Result<DiscreteProblem, HarnessError> {
    let dom = Domain::FullSpace {
        lower: vec![-half; spec.n],
        upper: vec![half; spec.n],
    };
    let zero = |_: &[f64]| 0.0;
    Ok(DiscreteProblem::from_data(&dom, spec, f, g, &zero, w.clone())?)
}

/// Lattice points `k·dx` in `[−a, a]ⁿ`, lexicographic with the last axis fastest.
pub(crate) fn cube_points(n: usize, half: f64, dx: f64) -> Vec<Vec<f64>> {
    let m = (half / dx + 1e-9).floor() as i64;
    let side: Vec<f64> = (-m..=m).map(|k| k as f64 * dx).collect();
    let mut pts = vec![Vec::new()];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                side.iter().map(move |&v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    pts
}

/// Oracle values tabulated on a lattice `dx·Zⁿ × dt·Z`, looked up by rounded indices.
pub(crate) struct Tabulated {
    dx: f64,
    dt: f64,
    values: BTreeMap<(Vec<i64>, i64), f64>,
}

impl Tabulated {
    pub fn new(dx: f64, dt: f64, xs: &[Vec<f64>], ts: &[f64], values: Vec<Vec<f64>>) -> Self {
        let mut map = BTreeMap::new();
        for (x, row) in xs.iter().zip(values) {
            let key: Vec<i64> = x.iter().map(|v| (v / dx).round() as i64).collect();
            for (t, v) in ts.iter().zip(row) {
                map.insert((key.clone(), (t / dt).round() as i64), v);
            }
        }
        Self { dx, dt, values: map }
    }

    pub fn get(&self, x: &[f64], t: f64) -> f64 {
        let key: Vec<i64> = x.iter().map(|v| (v / self.dx).round() as i64).collect();
        *self
            .values
            .get(&(key, (t / self.dt).round() as i64))
            .unwrap_or_else(|| panic!("no tabulated oracle value at {x:?}, t = {t}"))
    }
}

/// Pass/fail checks on a refinement table: monotone decrease and final order in range.
pub(crate) fn convergence_checks(out: &mut Outcome, label: &str, table: &ErrorTable, lo: f64, hi: f64) {
    if table.rows().iter().all(|r| r.sup_error == 0.0) {
        out.check(format!("{label}: monotone decrease"), true, "all errors are exactly zero");
        out.check(format!("{label}: final order"), true, "all errors are exactly zero");
        return;
    }
    let sups: Vec<String> = table.rows().iter().map(|r| format!("{:.3e}", r.sup_error)).collect();
    out.check(format!("{label}: monotone decrease"), table.is_monotone_decreasing(), sups.join(" > "));
    match table.final_order() {
        Some(o) => out.check(
            format!("{label}: final order"),
            o >= lo && o <= hi,
            format!("observed order {o:.4} (accepted [{lo}, {hi}])"),
        ),
        None => out.check(format!("{label}: final order"), false, "fewer than two levels"),
    }
}
