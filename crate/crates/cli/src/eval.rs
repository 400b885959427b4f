//! `eval`: tables of exponents, densities and Lévy measures.

use kendall::exponents::{build_exponent, ExponentHandle, FamilyParams, Method};
use kendall::families::{base_density, levy_density, tail_asymptotic, transition_density, DensityPoint, Space};
use kendall::Error;

use crate::grid::{Grid, Range};
use crate::table::{Cell, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Quantity {
    /// Φ_Y(z) on the z grid.
    Exponent,
    /// φ(q) on the z grid, read as q.
    Phi,
    /// The killing rate φ(0).
    Killing,
    /// E[Y₁].
    Mean,
    /// p_Y(t, y) on the y grid (continuous families).
    Pdf,
    /// P(Y_t = n) on the n range (Poisson family).
    Pmf,
    /// Lévy density π_Y on the y grid, or Lévy masses on the n range.
    Levy,
    /// Large-y asymptote of the Lévy measure with the exact value and ratio.
    TailAsymptote,
    /// Density of the base process at time t on the y grid (read as x) or n range.
    BasePdf,
}

pub struct Request {
    pub params: FamilyParams,
    pub quantity: Quantity,
    pub t: Option<Grid>,
    pub y: Option<Grid>,
    pub n: Option<Range>,
    pub z: Option<Grid>,
}

/// Where the request is malformed, as opposed to a numerical failure.
pub type Invalid = String;

fn need<'a, T>(v: &'a Option<T>, flag: &str, q: Quantity) -> Result<&'a T, Invalid> {
    v.as_ref()
        .ok_or_else(|| format!("quantity {q:?} needs {flag}").to_lowercase())
}

fn error_cell(e: &Error) -> Cell {
    Cell::Text(e.to_string())
}

fn method_name(m: Method) -> &'static str {
    match m {
        Method::ClosedForm => "closed_form",
        Method::RootFind => "root_find",
    }
}

/// The state-space points requested for a density: the n range for the
/// Poisson family, the y grid otherwise.
fn space_points(
    r: &Request,
    lattice_label: &'static str,
    real_label: &'static str,
) -> Result<(&'static str, Vec<Space>), Invalid> {
    let f = r.params.family();
    if f.is_lattice() {
        if r.y.is_some() {
            return Err(format!("family {f} is integer-valued; use --n instead of --y-grid"));
        }
        let n = need(&r.n, "--n", r.quantity)?;
        Ok((lattice_label, n.points().map(Space::Lattice).collect()))
    } else {
        if r.n.is_some() {
            return Err(format!("family {f} is continuous; use --y-grid instead of --n"));
        }
        let y = need(&r.y, "--y-grid", r.quantity)?;
        Ok((real_label, y.points().into_iter().map(Space::Real).collect()))
    }
}

fn space_cell(s: Space) -> Cell {
    match s {
        Space::Lattice(n) => Cell::Int(n),
        Space::Real(y) => Cell::Num(y),
    }
}

fn density_row(lead: Vec<Cell>, d: kendall::Result<DensityPoint>, failed: &mut bool) -> Vec<Cell> {
    let mut row = lead;
    match d {
        Ok(d) => row.extend([Cell::Num(d.value), Cell::Num(d.log_value), Cell::Empty]),
        Err(e) => {
            *failed = true;
            row.extend([Cell::Empty, Cell::Empty, error_cell(&e)]);
        }
    }
    row
}

/// Evaluates the request. The flag is set when some row failed numerically;
/// those rows carry the message in the `error` column.
pub fn evaluate(r: &Request) -> Result<(Table, bool), Invalid> {
    let h: ExponentHandle = build_exponent(r.params).map_err(|e| e.to_string())?;
    let q = r.quantity;
    let mut failed = false;
    let table = match q {
        Quantity::Exponent | Quantity::Phi => {
            let z = need(&r.z, "--z-grid", q)?;
            if z.start < 0.0 {
                return Err(format!("the z grid must be non-negative, got start {}", z.start));
            }
            let mut t = if q == Quantity::Exponent {
                Table::new(vec!["z", "value", "error"])
            } else {
                Table::new(vec!["q", "value", "abs_err", "method", "error"])
            };
            for z in z.points() {
                let row = match q {
                    Quantity::Exponent => match h.phi_y(z) {
                        Ok(v) => vec![Cell::Num(z), Cell::Num(v), Cell::Empty],
                        Err(e) => {
                            failed = true;
                            vec![Cell::Num(z), Cell::Empty, error_cell(&e)]
                        }
                    },
                    _ => match h.invert_phi(z) {
                        Ok(p) => vec![
                            Cell::Num(z),
                            Cell::Num(p.value),
                            Cell::Num(p.residual),
                            Cell::Text(method_name(p.method).into()),
                            Cell::Empty,
                        ],
                        Err(e) => {
                            failed = true;
                            vec![Cell::Num(z), Cell::Empty, Cell::Empty, Cell::Empty, error_cell(&e)]
                        }
                    },
                };
                t.push(row);
            }
            t
        }
        Quantity::Killing => {
            let mut t = Table::new(vec!["value", "error"]);
            t.push(vec![Cell::Num(h.killing()), Cell::Empty]);
            t
        }
        Quantity::Mean => {
            let mut t = Table::new(vec!["value", "error"]);
            t.push(vec![Cell::Num(h.mean_y()), Cell::Empty]);
            t
        }
        Quantity::Pdf | Quantity::Pmf | Quantity::BasePdf => {
            let f = r.params.family();
            if q == Quantity::Pdf && f.is_lattice() {
                return Err(format!("family {f} is integer-valued; use --quantity pmf"));
            }
            if q == Quantity::Pmf && !f.is_lattice() {
                return Err(format!("family {f} is continuous; use --quantity pdf"));
            }
            let times = need(&r.t, "--t", q)?;
            if !(times.start > 0.0) {
                return Err(format!("time must be positive, got {}", times.start));
            }
            let (label, pts) = if q == Quantity::BasePdf {
                space_points(r, "n", "x")?
            } else {
                space_points(r, "n", "y")?
            };
            let mut t = Table::new(vec!["t", label, "value", "log_value", "error"]);
            for tv in times.points() {
                for &s in &pts {
                    let d = if q == Quantity::BasePdf {
                        base_density(&r.params, tv, s)
                    } else {
                        transition_density(&h, tv, s)
                    };
                    t.push(density_row(vec![Cell::Num(tv), space_cell(s)], d, &mut failed));
                }
            }
            t
        }
        Quantity::Levy => {
            let (label, pts) = space_points(r, "n", "y")?;
            let mut t = Table::new(vec![label, "value", "log_value", "error"]);
            for s in pts {
                t.push(density_row(vec![space_cell(s)], levy_density(&h, s), &mut failed));
            }
            t
        }
        Quantity::TailAsymptote => {
            let (label, pts) = space_points(r, "n", "y")?;
            let mut t = Table::new(vec![label, "value", "exact", "ratio", "error"]);
            for s in pts {
                let row = match tail_asymptotic(&r.params, s.as_f64()) {
                    Err(e @ Error::Unsupported(_)) => return Err(e.to_string()),
                    Err(e) => {
                        failed = true;
                        vec![space_cell(s), Cell::Empty, Cell::Empty, Cell::Empty, error_cell(&e)]
                    }
                    Ok(a) => match levy_density(&h, s) {
                        Ok(d) => vec![
                            space_cell(s),
                            Cell::Num(a),
                            Cell::Num(d.value),
                            Cell::Num(d.value / a),
                            Cell::Empty,
                        ],
                        Err(e) => {
                            failed = true;
                            vec![space_cell(s), Cell::Num(a), Cell::Empty, Cell::Empty, error_cell(&e)]
                        }
                    },
                };
                t.push(row);
            }
            t
        }
    };
    Ok((table, failed))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request(params: FamilyParams, quantity: Quantity) -> Request {
        Request {
            params,
            quantity,
            t: None,
            y: None,
            n: None,
            z: None,
        }
    }

    #[test]
    fn stable_low_mean_is_one() {
        let (t, failed) = evaluate(&request(FamilyParams::stable_low(1.0, 0.5).unwrap(), Quantity::Mean)).unwrap();
        assert!(!failed);
        assert_eq!(t.rows, vec![vec![Cell::Num(1.0), Cell::Empty]]);
    }

    #[test]
    fn poisson_pmf_rows_sum_below_one() {
        let mut r = request(FamilyParams::poisson(0.5).unwrap(), Quantity::Pmf);
        r.t = Some("2".parse().unwrap());
        r.n = Some("0:10".parse().unwrap());
        let (t, failed) = evaluate(&r).unwrap();
        assert!(!failed);
        assert_eq!(t.rows.len(), 11);
        let total: f64 = t
            .rows
            .iter()
            .map(|row| if let Cell::Num(v) = row[2] { v } else { panic!() })
            .sum();
        assert!(total <= 1.0 && total > 0.9);
    }

    #[test]
    fn mismatched_requests_are_invalid() {
        let mut r = request(FamilyParams::poisson(0.5).unwrap(), Quantity::Pdf);
        r.t = Some("1".parse().unwrap());
        r.n = Some("0:3".parse().unwrap());
        assert!(evaluate(&r).is_err());
        let r = request(FamilyParams::gamma(1.0, 1.0).unwrap(), Quantity::Levy);
        assert!(evaluate(&r).is_err());
        let mut r = request(FamilyParams::bessel(1.0, 1.0).unwrap(), Quantity::TailAsymptote);
        r.y = Some("10".parse().unwrap());
        assert!(evaluate(&r).is_err());
    }
}
