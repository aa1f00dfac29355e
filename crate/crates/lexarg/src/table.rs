//! Belief tables: one row per argument, rounded to two digits or exact.

use lexarg_core::blaf::{BlafCase, INNOCENCE};
use lexarg_core::epistemic::BeliefBounds;
use lexarg_core::rational::{format_exact, format_interval, format_two_digits, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefRow {
    pub argument: String,
    pub lower: Rational,
    pub upper: Rational,
    /// Named by some assumption.
    pub constrained: bool,
    /// Shown as its upper bound alone, as the belief in `Innocence` is.
    pub scalar: bool,
}

impl BeliefRow {
    pub fn cell(&self, exact: bool) -> String {
        match (self.scalar, exact) {
            (true, false) => format_two_digits(&self.upper),
            (true, true) => format_exact(&self.upper),
            (false, false) => format_interval(&self.lower, &self.upper),
            (false, true) if self.lower == self.upper => format_exact(&self.lower),
            (false, true) => format!("[{}, {}]", format_exact(&self.lower), format_exact(&self.upper)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BeliefTable {
    pub rows: Vec<BeliefRow>,
}

impl BeliefTable {
    /// Rows in graph order.
    pub fn new(case: &BlafCase, bounds: &BeliefBounds) -> Self {
        let constrained: Vec<&str> = case
            .assumptions()
            .iter()
            .flat_map(|a| a.constraints.iter().flat_map(|c| c.arguments().map(|x| x.as_str())))
            .collect();
        let rows = bounds
            .iter()
            .map(|(arg, interval)| BeliefRow {
                argument: arg.as_str().to_string(),
                lower: interval.lower.clone(),
                upper: interval.upper.clone(),
                constrained: constrained.contains(&arg.as_str()),
                scalar: case.is_legal() && arg.as_str() == INNOCENCE,
            })
            .collect();
        BeliefTable { rows }
    }

    pub fn row(&self, argument: &str) -> Option<&BeliefRow> {
        self.rows.iter().find(|r| r.argument == argument)
    }

    pub fn cell(&self, argument: &str, exact: bool) -> Option<String> {
        self.row(argument).map(|r| r.cell(exact))
    }

    /// Two aligned columns; assumption-bound arguments carry a `*`.
    pub fn render(&self, exact: bool) -> String {
        render_columns(&[], std::slice::from_ref(self), exact)
    }
}

/// Tables side by side, one column each, rows matched by argument.
pub fn render_columns(headers: &[String], tables: &[BeliefTable], exact: bool) -> String {
    let Some(first) = tables.first() else { return String::new() };
    let mut grid: Vec<Vec<String>> = Vec::new();
    if !headers.is_empty() {
        let mut h = vec![String::new()];
        h.extend(headers.iter().cloned());
        grid.push(h);
    }
    for row in &first.rows {
        let mut line = vec![row.argument.clone()];
        for t in tables {
            line.push(match t.row(&row.argument) {
                Some(r) if r.constrained => format!("{}*", r.cell(exact)),
                Some(r) => r.cell(exact),
                None => String::from("-"),
            });
        }
        grid.push(line);
    }
    let widths: Vec<usize> =
        (0..=tables.len()).map(|c| grid.iter().map(|l| l[c].chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for line in grid {
        let mut text = String::new();
        for (c, cell) in line.iter().enumerate() {
            if c == 0 {
                text.push_str(&format!("{cell:<w$}", w = widths[0]));
            } else {
                text.push_str(&format!("  {cell:>w$}", w = widths[c] + 1));
            }
        }
        out.push_str(text.trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use lexarg_core::rational::{int, ratio};

    fn row(lower: Rational, upper: Rational, scalar: bool) -> BeliefRow {
        BeliefRow { argument: "A".into(), lower, upper, constrained: false, scalar }
    }

    #[test]
    fn cells() {
        assert_eq!(row(int(0), ratio(1, 3), false).cell(false), "[0, 0.33]");
        assert_eq!(row(int(0), ratio(1, 3), false).cell(true), "[0, 1/3]");
        assert_eq!(row(int(1), int(1), false).cell(true), "1");
        assert_eq!(row(int(0), ratio(1, 10), true).cell(false), "0.1");
        assert_eq!(row(int(0), ratio(8, 9), true).cell(true), "8/9");
    }
}
