//! Error tables with observed orders, their CSV form and a gnuplot script.

use std::fmt::Write as _;
use std::path::Path;

use crate::HarnessError;

pub const CSV_HEADER: &str = "level,dx,dt,sup_error,l2_error,observed_order";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorRow {
    /// 1-based refinement level.
    pub level: usize,
    pub dx: f64,
    pub dt: f64,
    pub sup_error: f64,
    pub l2_error: f64,
    /// `log2(sup_{k−1}/sup_k)`, defined from level 2 on.
    pub observed_order: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ErrorTable {
    rows: Vec<ErrorRow>,
}

pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

impl ErrorTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends the next level; its order is derived from the previous row.
    pub fn push(&mut self, dx: f64, dt: f64, sup_error: f64, l2_error: f64) {
        let observed_order = self.rows.last().map(|r| observed_order(r.sup_error, sup_error));
        self.rows.push(ErrorRow {
            level: self.rows.len() + 1,
            dx,
            dt,
            sup_error,
            l2_error,
            observed_order,
        });
    }

    pub fn rows(&self) -> &[ErrorRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn last(&self) -> Option<&ErrorRow> {
        self.rows.last()
    }

    pub fn final_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.observed_order)
    }

    pub fn is_monotone_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].sup_error < w[0].sup_error)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from(CSV_HEADER);
        s.push('\n');
        for r in &self.rows {
            let order = r.observed_order.map(|o| format!("{o:.16e}")).unwrap_or_default();
            writeln!(
                s,
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{}",
                r.level, r.dx, r.dt, r.sup_error, r.l2_error, order
            )
            .expect("writing to a String");
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text.lines();
        if lines.next() != Some(CSV_HEADER) {
            return Err(HarnessError::Parse("missing header".into()));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| HarnessError::Parse(format!("`{s}`: {e}")));
        let mut rows = Vec::new();
        for line in lines.filter(|l| !l.is_empty()) {
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(HarnessError::Parse(format!("expected 6 fields in `{line}`")));
            }
            rows.push(ErrorRow {
                level: f[0].parse().map_err(|e| HarnessError::Parse(format!("`{}`: {e}", f[0])))?,
                dx: num(f[1])?,
                dt: num(f[2])?,
                sup_error: num(f[3])?,
                l2_error: num(f[4])?,
                observed_order: if f[5].is_empty() { None } else { Some(num(f[5])?) },
            });
        }
        Ok(Self { rows })
    }

    pub fn emit_csv(&self, path: &Path) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_csv()).map_err(|e| HarnessError::io(path, e))
    }

    /// Log-log plot of both error columns against `dx`, reading `csv_name` next to the script.
    pub fn plot_script(&self, csv_name: &str, title: &str) -> String {
        format!(
            "set datafile separator ','\n\
             set key autotitle columnhead\n\
             set logscale xy\n\
             set xlabel 'dx'\n\
             set ylabel 'error'\n\
             set title '{title}'\n\
             set terminal pngcairo size 800,600\n\
             set output '{stem}.png'\n\
             plot '{csv_name}' using 2:4 with linespoints title 'sup', \\\n     '{csv_name}' using 2:5 with linespoints title 'l2'\n",
            stem = csv_name.trim_end_matches(".csv"),
        )
    }

    pub fn emit_plot_script(&self, path: &Path, csv_name: &str, title: &str) -> Result<(), HarnessError> {
        std::fs::write(path, self.plot_script(csv_name, title)).map_err(|e| HarnessError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(ErrorTable::new().to_csv(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn orders_follow_errors() {
        let mut t = ErrorTable::new();
        t.push(0.2, 0.1, 4e-2, 1e-2);
        t.push(0.1, 0.05, 1e-2, 2.5e-3);
        t.push(0.05, 0.025, 2.5e-3, 6.25e-4);
        assert_eq!(t.rows()[0].observed_order, None);
        assert_eq!(t.final_order(), Some(2.0));
        assert_eq!(t.to_csv().lines().count(), 4);
        assert!(t.is_monotone_decreasing());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut t = ErrorTable::new();
        t.push(0.2, 0.1, 0.1 + 0.2, std::f64::consts::PI * 1e-7);
        t.push(0.1, 0.05, 1.0 / 3.0, 2f64.sqrt() * 1e-300);
        let back = ErrorTable::from_csv(&t.to_csv()).unwrap();
        assert_eq!(back, t);
        for (a, b) in back.rows().iter().zip(t.rows()) {
            assert_eq!(a.sup_error.to_bits(), b.sup_error.to_bits());
            assert_eq!(a.l2_error.to_bits(), b.l2_error.to_bits());
        }
    }

    #[test]
    fn plot_script_references_csv() {
        let s = ErrorTable::new().plot_script("e4.csv", "E4");
        assert!(s.contains("'e4.csv' using 2:4"));
    }
}
