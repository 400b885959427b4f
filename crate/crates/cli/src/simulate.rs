//! `simulate`: Monte Carlo atoms against the exact Poisson-family laws.

use kendall::simulate::{
    first_passage_pmf_poisson, sample_y_poisson, simulate_first_passage_poisson, y_pmf_poisson, EmpiricalDist,
};

use crate::grid::Range;
use crate::table::{Cell, Table};

/// Largest |z| accepted on every requested atom.
pub const Z_LIMIT: f64 = 3.0;

pub enum Experiment {
    /// `τ_x⁺ − x`, with paths censored at `horizon`.
    FirstPassage { x: f64, horizon: f64 },
    /// `Y_t` by direct compound-Poisson sampling.
    YSample { t: f64 },
}

pub struct Run {
    pub table: Table,
    pub all_within: bool,
    pub dist: EmpiricalDist,
}

pub fn run(c: f64, exp: &Experiment, n_samples: u64, seed: u64, workers: usize, atoms: Range) -> Result<Run, String> {
    if workers == 0 {
        return Err("workers must be at least 1".into());
    }
    let dist = match *exp {
        Experiment::FirstPassage { x, horizon } => {
            simulate_first_passage_poisson(c, x, horizon, n_samples, seed, workers)
        }
        Experiment::YSample { t } => sample_y_poisson(c, t, n_samples, seed, workers),
    }
    .map_err(|e| e.to_string())?;
    let mut table = Table::new(vec!["n", "empirical", "stderr", "exact", "z"]);
    let mut all_within = true;
    for k in atoms.points() {
        let exact = match *exp {
            Experiment::FirstPassage { x, .. } => first_passage_pmf_poisson(c, x, k),
            Experiment::YSample { t } => y_pmf_poisson(c, t, k),
        }
        .map_err(|e| e.to_string())?;
        let p = dist.prob_of(k);
        let z = dist.z_score(k, exact);
        all_within &= z.abs() <= Z_LIMIT || (p == 0.0 && exact == 0.0);
        let stderr = (p * (1.0 - p) / dist.n_samples as f64).sqrt();
        table.push(vec![
            Cell::Int(k),
            Cell::Num(p),
            Cell::Num(stderr),
            Cell::Num(exact),
            Cell::Num(z),
        ]);
    }
    Ok(Run {
        table,
        all_within,
        dist,
    })
}
