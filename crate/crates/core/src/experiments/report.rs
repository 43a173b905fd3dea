use std::fmt::Write as _;
use std::path::Path;

use super::config::ExperimentKind;
use crate::error::Result;

/// One CSV line: a quantity measured at node count `n` (0 when not
/// applicable).
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub n: usize,
    pub quantity: String,
    pub value: f64,
    pub residual: f64,
    pub observed_order: Option<f64>,
}

impl Row {
    pub fn new(n: usize, quantity: &str, value: f64, residual: f64) -> Self {
        Self {
            n,
            quantity: quantity.to_string(),
            value,
            residual,
            observed_order: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bound {
    /// Pass when `value < limit`.
    Below,
    /// Pass when `value <= limit`.
    AtMost,
    /// Pass when `value >= limit`.
    AtLeast,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub bound: Bound,
}

impl Check {
    pub fn below(name: &str, value: f64, limit: f64) -> Self {
        Self::make(name, value, limit, Bound::Below)
    }

    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self::make(name, value, limit, Bound::AtMost)
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self::make(name, value, limit, Bound::AtLeast)
    }

    fn make(name: &str, value: f64, limit: f64, bound: Bound) -> Self {
        Self {
            name: name.to_string(),
            value,
            limit,
            bound,
        }
    }

    pub fn passed(&self) -> bool {
        match self.bound {
            Bound::Below => self.value < self.limit,
            Bound::AtMost => self.value <= self.limit,
            Bound::AtLeast => self.value >= self.limit,
        }
    }

    pub fn describe(&self) -> String {
        let op = match self.bound {
            Bound::Below => "<",
            Bound::AtMost => "<=",
            Bound::AtLeast => ">=",
        };
        format!(
            "{} {}: {:.3e} {} {:.3e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            op,
            self.limit
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub experiment: ExperimentKind,
    pub rows: Vec<Row>,
    pub checks: Vec<Check>,
}

fn num(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v:.16e}")
    }
}

impl Report {
    pub fn new(experiment: ExperimentKind) -> Self {
        Self {
            experiment,
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    /// `log(res_prev / res) / log(n / n_prev)` against the previous row of the
    /// same quantity at a smaller `n`.
    pub(crate) fn fill_orders(&mut self) {
        for k in 0..self.rows.len() {
            let cur = &self.rows[k];
            if cur.n == 0 {
                continue;
            }
            let prev = self.rows[..k]
                .iter()
                .rev()
                .find(|r| r.quantity == cur.quantity && r.n > 0 && r.n < cur.n);
            let order = prev.and_then(|p| {
                let o = (p.residual / cur.residual).ln() / (cur.n as f64 / p.n as f64).ln();
                o.is_finite().then_some(o)
            });
            self.rows[k].observed_order = order;
        }
    }

    pub fn csv(&self) -> String {
        let mut s = String::from("N,quantity,value,residual,observed_order\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                r.n,
                r.quantity,
                num(r.value),
                num(r.residual),
                r.observed_order.map(num).unwrap_or_default()
            );
        }
        s
    }

    pub fn summary(&self) -> String {
        let mut s = format!("experiment: {}\n", self.experiment);
        for c in &self.checks {
            let _ = writeln!(s, "{}", c.describe());
        }
        let _ = writeln!(s, "overall: {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }

    /// Writes `<experiment>.csv` and `summary.txt` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join(format!("{}.csv", self.experiment)), self.csv())?;
        std::fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_follow_quantities() {
        let mut r = Report::new(ExperimentKind::Wtg);
        r.push(Row::new(64, "a", 0.0, 1e-2));
        r.push(Row::new(64, "b", 0.0, 1.0));
        r.push(Row::new(128, "a", 0.0, 1e-2 / 8.0));
        r.push(Row::new(128, "b", 0.0, 1.0));
        r.fill_orders();
        assert_eq!(r.rows[0].observed_order, None);
        assert!((r.rows[2].observed_order.unwrap() - 3.0).abs() < 1e-12);
        assert_eq!(r.rows[3].observed_order, Some(0.0));
    }

    #[test]
    fn csv_uses_seventeen_digits() {
        let mut r = Report::new(ExperimentKind::Constants);
        r.push(Row::new(8, "x", 0.1, f64::NAN));
        let csv = r.csv();
        assert_eq!(csv, "N,quantity,value,residual,observed_order\n8,x,1.0000000000000001e-1,,\n");
    }

    #[test]
    fn check_bounds() {
        assert!(Check::below("x", 1.0, 2.0).passed());
        assert!(!Check::below("x", 2.0, 2.0).passed());
        assert!(Check::at_most("x", 2.0, 2.0).passed());
        assert!(Check::at_least("x", 3.0, 3.0).passed());
        assert!(!Check::below("x", f64::NAN, 1.0).passed());
    }
}
