//! The four error tables: one method per table, one cell per `(alpha, nu)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use chiquad::baselines::{gen_gauss_laguerre, inverse_cdf_legendre, truncated_legendre};
use chiquad::mori::{solve_window, trimming_target};
use chiquad::scenario::{exact_value, t_interval_integrand, ScenarioSpec};
use chiquad::trapz::simple_procedure_to;
use chiquad::{DegreesOfFreedom, Result};

/// Accuracy used by the tables that build a Mori window.
pub const TABLE_EPSILON: f64 = 1e-17;
/// Errors below this print as `0`, the usual reading of a zero entry.
pub const PRINTED_ZERO: f64 = 1.11e-16;
pub const DEFAULT_ALPHAS: [f64; 3] = [0.10, 0.05, 0.02];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableId {
    Trapezoid,
    GaussLaguerre,
    InverseCdf,
    TruncatedLegendre,
}

impl TableId {
    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Self::Trapezoid),
            2 => Some(Self::GaussLaguerre),
            3 => Some(Self::InverseCdf),
            4 => Some(Self::TruncatedLegendre),
            _ => None,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Self::Trapezoid => 1,
            Self::GaussLaguerre => 2,
            Self::InverseCdf => 3,
            Self::TruncatedLegendre => 4,
        }
    }

    pub fn method(self) -> &'static str {
        match self {
            Self::Trapezoid => "mori-trapezoid",
            Self::GaussLaguerre => "gauss-laguerre",
            Self::InverseCdf => "inverse-cdf",
            Self::TruncatedLegendre => "truncated-legendre",
        }
    }

    /// Each table's own printed set of degrees of freedom. Table 2 stops at
    /// 300 where Table 3 goes to 1000, and only Tables 2 and 3 include 6.
    pub fn default_nus(self) -> Vec<u32> {
        match self {
            Self::Trapezoid | Self::TruncatedLegendre => vec![1, 2, 3, 4, 5, 10, 100, 1000],
            Self::GaussLaguerre => vec![1, 2, 3, 4, 5, 6, 10, 100, 300],
            Self::InverseCdf => vec![1, 2, 3, 4, 5, 6, 10, 100, 1000],
        }
    }

    fn uses_epsilon(self) -> bool {
        matches!(self, Self::Trapezoid | Self::TruncatedLegendre)
    }
}

/// Node count per degree of freedom.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BudgetRule {
    pub overrides: BTreeMap<u32, usize>,
    pub default: usize,
}

impl BudgetRule {
    /// 65 nodes for `nu = 1` and 33 otherwise.
    pub fn standard() -> Self {
        Self { overrides: BTreeMap::from([(1, 65)]), default: 33 }
    }

    pub fn uniform(n: usize) -> Self {
        Self { overrides: BTreeMap::new(), default: n }
    }

    pub fn for_nu(&self, nu: u32) -> usize {
        self.overrides.get(&nu).copied().unwrap_or(self.default)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableJob {
    pub table: TableId,
    pub alphas: Vec<f64>,
    pub nus: Vec<u32>,
    pub budget: BudgetRule,
    pub epsilon: f64,
    pub parallel: bool,
}

impl TableJob {
    pub fn standard(table: TableId) -> Self {
        Self {
            table,
            alphas: DEFAULT_ALPHAS.to_vec(),
            nus: table.default_nus(),
            budget: BudgetRule::standard(),
            epsilon: TABLE_EPSILON,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub table: u8,
    pub method: &'static str,
    pub alpha: f64,
    pub nu: u32,
    pub budget: usize,
    pub epsilon: Option<f64>,
    pub value: Option<f64>,
    /// `value - (1 - alpha)`.
    pub error: Option<f64>,
    pub evaluations: Option<usize>,
    pub at_floor: bool,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableReport {
    pub job: TableJob,
    /// Ordered by `alpha`, then `nu`, as listed in the job.
    pub cells: Vec<Cell>,
}

impl TableReport {
    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.failure.is_some()).count()
    }

    pub fn cell(&self, alpha: f64, nu: u32) -> Option<&Cell> {
        self.cells.iter().find(|c| c.alpha == alpha && c.nu == nu)
    }
}

fn compute(table: TableId, nu: DegreesOfFreedom, alpha: f64, m: usize, epsilon: f64) -> Result<(f64, usize)> {
    let a = t_interval_integrand(&ScenarioSpec::new(nu, alpha)?);
    Ok(match table {
        TableId::Trapezoid => {
            let r = simple_procedure_to(nu, &a, epsilon, m)?;
            (r.value, r.evaluations)
        }
        TableId::GaussLaguerre => {
            let r = gen_gauss_laguerre(nu, &a, m)?;
            (r.value, r.evaluations)
        }
        TableId::InverseCdf => {
            let r = inverse_cdf_legendre(nu, &a, m)?;
            (r.value, r.evaluations)
        }
        TableId::TruncatedLegendre => {
            let window = solve_window(nu, trimming_target(epsilon))?;
            let r = truncated_legendre(nu, &a, &window, m)?;
            (r.value, r.evaluations)
        }
    })
}

fn run_cell(job: &TableJob, alpha: f64, nu: u32) -> Cell {
    let budget = job.budget.for_nu(nu);
    let mut cell = Cell {
        table: job.table.number(),
        method: job.table.method(),
        alpha,
        nu,
        budget,
        epsilon: job.table.uses_epsilon().then_some(job.epsilon),
        value: None,
        error: None,
        evaluations: None,
        at_floor: false,
        failure: None,
    };
    let outcome = DegreesOfFreedom::new(nu).and_then(|k| {
        let exact = exact_value(&ScenarioSpec::new(k, alpha)?);
        compute(job.table, k, alpha, budget, job.epsilon).map(|(v, n)| (v, n, v - exact))
    });
    match outcome {
        Ok((value, evaluations, error)) => {
            cell.value = Some(value);
            cell.error = Some(error);
            cell.evaluations = Some(evaluations);
            cell.at_floor = error.abs() < PRINTED_ZERO;
        }
        Err(e) => cell.failure = Some(e.to_string()),
    }
    cell
}

/// Runs every cell; failures are recorded per cell rather than aborting.
pub fn run_table(job: &TableJob) -> TableReport {
    let grid: Vec<(f64, u32)> =
        job.alphas.iter().flat_map(|&a| job.nus.iter().map(move |&n| (a, n))).collect();
    let cells = if job.parallel {
        grid.par_iter().map(|&(a, n)| run_cell(job, a, n)).collect()
    } else {
        grid.iter().map(|&(a, n)| run_cell(job, a, n)).collect()
    };
    TableReport { job: job.clone(), cells }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_budgets() {
        let b = BudgetRule::standard();
        assert_eq!(b.for_nu(1), 65);
        assert_eq!(b.for_nu(2), 33);
        assert_eq!(b.for_nu(1000), 33);
    }

    #[test]
    fn table_ids_round_trip() {
        for n in 1..=4 {
            assert_eq!(TableId::from_number(n).unwrap().number(), n);
        }
        assert!(TableId::from_number(5).is_none());
    }

    #[test]
    fn serial_and_parallel_agree() {
        let mut job = TableJob::standard(TableId::Trapezoid);
        job.nus = vec![1, 2, 100];
        let par = run_table(&job);
        job.parallel = false;
        let ser = run_table(&job);
        assert_eq!(par.cells, ser.cells);
    }

    #[test]
    fn bad_budget_is_a_cell_failure() {
        let mut job = TableJob::standard(TableId::Trapezoid);
        job.nus = vec![2];
        job.alphas = vec![0.05];
        job.budget = BudgetRule::uniform(30);
        let r = run_table(&job);
        assert_eq!(r.failures(), 1);
        assert!(r.cells[0].error.is_none());
    }
}
