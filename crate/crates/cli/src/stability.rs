//! `stability`: eigenvalues of both linearizations over a parameter grid.
//!
//! ```json
//! {
//!   "single_wall": { "k": [0.5, 1.0], "f": [1.0], "c": { "from": 1, "to": 3, "steps": 5 } },
//!   "tau_balance": { "k_f": [1.0], "k_m": [0.05], "f_f": [0.64], "f_m": [0.213], "r": [2.0] }
//! }
//! ```
//!
//! Either law may be omitted but not both. Each axis is a list or an
//! inclusive evenly spaced range.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::Deserialize;
use taunav::stability::{
    eig2, eigs_agree, is_hurwitz, is_real_pair, single_wall_critical_gain,
    single_wall_eigs_closed_form, single_wall_linearization, tau_balance_linearization,
    tau_balance_printed_eigs, tau_balance_real_eig_condition,
};
use taunav::Side;

use crate::{read_json, require_config, write, Common, Outcome, UsageError};

pub const HEADER: &str =
    "law,k_f,k_m,k,f_f,f_m,f,c,R,re1,im1,re2,im2,hurwitz,real_eigs,paper_condition,oracle_agrees";

/// Closed forms and the numeric solver agree to this relative tolerance.
const AGREE_TOL: f64 = 1e-9;

#[derive(Deserialize)]
#[serde(untagged)]
enum Axis {
    List(Vec<f64>),
    Range { from: f64, to: f64, steps: usize },
}

impl Axis {
    fn values(&self, name: &str) -> Result<Vec<f64>, UsageError> {
        let v = match self {
            Axis::List(v) => v.clone(),
            Axis::Range { from, to, steps } => match steps {
                0 => Vec::new(),
                1 => vec![*from],
                n => (0..*n)
                    .map(|i| from + (to - from) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if v.is_empty() {
            return Err(UsageError(format!("{name}: empty axis")));
        }
        if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
            return Err(UsageError(format!("{name}: non-finite value {bad}")));
        }
        Ok(v)
    }
}

fn default_r() -> Axis {
    Axis::List(vec![2.0])
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SingleWallGrid {
    k: Axis,
    f: Axis,
    c: Axis,
    #[serde(default = "default_r")]
    r: Axis,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TauBalanceGrid {
    k_f: Axis,
    k_m: Axis,
    f_f: Axis,
    f_m: Axis,
    #[serde(default = "default_r")]
    r: Axis,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Grid {
    single_wall: Option<SingleWallGrid>,
    tau_balance: Option<TauBalanceGrid>,
}

/// Cartesian product of the axes, last axis fastest.
fn product(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&x| {
                    let mut p = prefix.clone();
                    p.push(x);
                    p
                })
            })
            .collect()
    })
}

#[derive(Default)]
struct Row {
    law: &'static str,
    k_f: Option<f64>,
    k_m: Option<f64>,
    k: Option<f64>,
    f_f: Option<f64>,
    f_m: Option<f64>,
    f: Option<f64>,
    c: Option<f64>,
    r: f64,
    eigs: [Complex<f64>; 2],
    hurwitz: bool,
    paper_condition: bool,
    oracle_agrees: bool,
}

impl Row {
    fn write_csv(&self, out: &mut String) {
        let o = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.law,
            o(self.k_f),
            o(self.k_m),
            o(self.k),
            o(self.f_f),
            o(self.f_m),
            o(self.f),
            o(self.c),
            self.r,
            self.eigs[0].re,
            self.eigs[0].im,
            self.eigs[1].re,
            self.eigs[1].im,
            self.hurwitz,
            is_real_pair(&self.eigs),
            self.paper_condition,
            self.oracle_agrees
        );
    }
}

fn rows(grid: &Grid) -> Result<Vec<Row>, UsageError> {
    let mut rows = Vec::new();
    if let Some(g) = &grid.single_wall {
        let axes = [
            g.k.values("single_wall.k")?,
            g.f.values("single_wall.f")?,
            g.c.values("single_wall.c")?,
            g.r.values("single_wall.r")?,
        ];
        for p in product(&axes) {
            let (k, f, c, r) = (p[0], p[1], p[2], p[3]);
            let lin = single_wall_linearization(k, f, c, Side::Left, r)
                .map_err(|e| UsageError(format!("single_wall: {e}")))?;
            let eigs = eig2(&lin.matrix);
            rows.push(Row {
                law: "single_wall",
                k: Some(k),
                f: Some(f),
                c: Some(c),
                r,
                eigs,
                hurwitz: is_hurwitz(&lin.matrix),
                paper_condition: k >= single_wall_critical_gain(f, c),
                oracle_agrees: eigs_agree(&single_wall_eigs_closed_form(k, f, c), &eigs, AGREE_TOL),
                ..Row::default()
            });
        }
    }
    if let Some(g) = &grid.tau_balance {
        let axes = [
            g.k_f.values("tau_balance.k_f")?,
            g.k_m.values("tau_balance.k_m")?,
            g.f_f.values("tau_balance.f_f")?,
            g.f_m.values("tau_balance.f_m")?,
            g.r.values("tau_balance.r")?,
        ];
        for p in product(&axes) {
            let (k_f, k_m, f_f, f_m, r) = (p[0], p[1], p[2], p[3], p[4]);
            let lin = tau_balance_linearization(k_f, k_m, f_f, f_m, r)
                .map_err(|e| UsageError(format!("tau_balance: {e}")))?;
            let eigs = eig2(&lin.matrix);
            let printed = tau_balance_printed_eigs(k_f, k_m, f_f, f_m, r);
            rows.push(Row {
                law: "tau_balance",
                k_f: Some(k_f),
                k_m: Some(k_m),
                f_f: Some(f_f),
                f_m: Some(f_m),
                r,
                eigs,
                hurwitz: is_hurwitz(&lin.matrix),
                paper_condition: tau_balance_real_eig_condition(k_f, k_m, f_f, f_m, r),
                oracle_agrees: eigs_agree(&printed, &eigs, AGREE_TOL),
                ..Row::default()
            });
        }
    }
    Ok(rows)
}

pub fn run(a: &Common) -> Result<Outcome, UsageError> {
    let path = require_config(a)?;
    let grid: Grid = serde_json::from_value(read_json(path)?)
        .map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    if grid.single_wall.is_none() && grid.tau_balance.is_none() {
        return Err(UsageError(
            "grid needs a single_wall or tau_balance section".into(),
        ));
    }
    let rows = rows(&grid)?;
    let mut csv = String::from(HEADER);
    csv.push('\n');
    for r in &rows {
        r.write_csv(&mut csv);
    }
    write(&a.out, "stability.csv", &csv)?;
    let not_hurwitz = rows.iter().filter(|r| !r.hurwitz).count();
    let disagree = rows.iter().filter(|r| !r.oracle_agrees).count();
    println!(
        "{} rows, {not_hurwitz} not Hurwitz, {disagree} where the closed form disagrees with the matrix",
        rows.len()
    );
    Ok(Outcome::Done)
}
