//! Output formats: CSV (RFC 4180, LF endings), Markdown and JSON.

use std::fmt::Write as _;
use std::io::Write;

use serde::Serialize;

use crate::figures::FigureData;
use crate::integrate::IntegrateReport;
use crate::tables::TableReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Md,
    Json,
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn write_rows<W: Write, T: Serialize>(out: W, rows: &[T]) -> csv::Result<()> {
    let mut w = csv_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

/// One row per cell with method, budget, epsilon and evaluation count.
pub fn write_table_csv<W: Write>(out: W, report: &TableReport) -> csv::Result<()> {
    write_rows(out, &report.cells)
}

/// `-1.23e-12` style with three significant digits.
pub fn sci3(x: f64) -> String {
    format!("{x:.2e}")
}

/// Rows `alpha`, columns `nu`. Errors below the printed-zero level show as
/// `0`; failed cells as `fail`.
pub fn table_markdown(report: &TableReport) -> String {
    let job = &report.job;
    let mut s = String::new();
    let _ = write!(s, "| |");
    for nu in &job.nus {
        let _ = write!(s, " nu={nu} |");
    }
    s.push('\n');
    s.push_str("|---|");
    s.push_str(&"---|".repeat(job.nus.len()));
    s.push('\n');
    for &alpha in &job.alphas {
        let _ = write!(s, "| alpha={alpha:.2} |");
        for &nu in &job.nus {
            let text = match report.cell(alpha, nu) {
                Some(c) if c.at_floor => "0".to_string(),
                Some(c) => c.error.map_or_else(|| "fail".to_string(), sci3),
                None => "-".to_string(),
            };
            let _ = write!(s, " {text} |");
        }
        s.push('\n');
    }
    let budgets: Vec<String> = job.nus.iter().map(|&n| format!("{n}:{}", job.budget.for_nu(n))).collect();
    let _ = writeln!(
        s,
        "\nTable {} ({}): approximation error `value - (1 - alpha)`; nodes per nu {}{}.",
        job.table.number(),
        job.table.method(),
        budgets.join(", "),
        report.cells.first().and_then(|c| c.epsilon).map_or(String::new(), |e| format!("; epsilon = {e:e}")),
    );
    s
}

pub fn write_figure_csv<W: Write>(out: W, data: &FigureData) -> csv::Result<()> {
    match data {
        FigureData::Integrand(rows) => write_rows(out, rows),
        FigureData::LaguerreIntegrand(rows) => write_rows(out, rows),
        FigureData::LaguerreScatter(rows) => write_rows(out, rows),
        FigureData::InverseCdfIntegrand(rows) => write_rows(out, rows),
    }
}

/// Human-readable summary followed by the iteration history.
pub fn integrate_text(r: &IntegrateReport) -> String {
    let mut s = String::new();
    let method = clap::ValueEnum::to_possible_value(&r.method).map(|v| v.get_name().to_owned()).unwrap_or_default();
    let _ = writeln!(s, "method       {method}");
    let _ = writeln!(s, "nu           {}", r.nu);
    let _ = writeln!(s, "integrand    {}", r.integrand);
    let _ = writeln!(s, "value        {:.17}", r.value);
    let _ = writeln!(s, "evaluations  {}", r.evaluations);
    if let Some(b) = r.error_estimate {
        let _ = writeln!(s, "error bound  {b:e}");
    }
    if let Some(d) = r.weight_defect {
        let _ = writeln!(s, "weight miss  {d:e}");
    }
    if let (Some(exact), Some(err)) = (r.exact, r.error) {
        let _ = writeln!(s, "exact        {exact:.17}");
        let _ = writeln!(s, "error        {err:e}");
    }
    let _ = writeln!(s, "converged    {}", r.converged);
    if !r.history.is_empty() {
        let _ = writeln!(s, "\n{:>8} {:>12} {:>22} {:>8}", "n", "h", "value", "calls");
        for it in &r.history {
            let _ = writeln!(s, "{:>8} {:>12.5e} {:>22.17} {:>8}", it.n, it.h, it.value, it.evaluations);
        }
    }
    s
}

pub fn write_history_csv<W: Write>(out: W, r: &IntegrateReport) -> csv::Result<()> {
    write_rows(out, &r.history)
}

pub fn history_markdown(r: &IntegrateReport) -> String {
    let mut s = String::from("| n | h | value | evaluations |\n|---|---|---|---|\n");
    for it in &r.history {
        let _ = writeln!(s, "| {} | {:.5e} | {:.17} | {} |", it.n, it.h, it.value, it.evaluations);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tables::{run_table, TableId, TableJob};

    fn small_report() -> TableReport {
        let mut job = TableJob::standard(TableId::GaussLaguerre);
        job.nus = vec![1, 10];
        job.alphas = vec![0.10];
        run_table(&job)
    }

    #[test]
    fn csv_has_header_and_lf_endings() {
        let mut buf = Vec::new();
        write_table_csv(&mut buf, &small_report()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(!text.contains('\r'));
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "table,method,alpha,nu,budget,epsilon,value,error,evaluations,at_floor,failure"
        );
        assert_eq!(lines.count(), 2);
    }

    #[test]
    fn markdown_uses_three_digits() {
        let md = table_markdown(&small_report());
        assert!(md.contains("1.44e-2"), "{md}");
        assert!(md.contains("nu=1 |"));
    }

    #[test]
    fn sci_format() {
        assert_eq!(sci3(-1.2345e-12), "-1.23e-12");
        assert_eq!(sci3(5.82e-11), "5.82e-11");
    }
}
