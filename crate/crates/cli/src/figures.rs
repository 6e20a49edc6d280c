//! Figure-data generation: deterministic grids, parallel evaluation,
//! ordered single-threaded assembly so output bytes never depend on the
//! thread count.

use std::fs;
use std::path::Path;

use cvbell_core::bellval::{eval_asymptotic, eval_equal_settings};
use cvbell_core::{maximize_over_displacement, scan_surface, ClassTable};
use rayon::prelude::*;

use crate::output::fmt_f64;
use crate::Failure;

pub const FIG1_NS: [usize; 4] = [2, 3, 4, 5];
pub const FIG23_NS: [usize; 6] = [5, 9, 15, 25, 45, 85];
pub const FIG3_RS: [f64; 4] = [0.1, 0.3, 0.8, 1.5];

pub const FIGURE_HELP: &str = "\
Write figure-data CSV files into --out (directory, created if missing).
All cells carry 17 significant digits; lines end with LF; output is
byte-identical across runs and thread counts.

  --which 1   fig1_n{2,3,4,5}.csv, columns r,j,value
              r = 0.00 ..= 2.00 step 0.02 (101 values)
              J = 0.000 ..= 1.000 step 0.005 (201 values)
              rows ordered r-major, J fast

  --which 2   fig2.csv, columns a,b5,b9,b15,b25,b45,b85
              A = 0.001 ..= 1.500 step 0.001; column bN holds the
              large-squeezing limit B_N(A)

  --which 3   fig3_r{0.1,0.3,0.8,1.5}.csv, columns n,j,value
              per N in {5,9,15,25,45,85}: 401 points spanning
              J = 0 ..= 4 J*, where J* maximizes B_N(r, J)";

fn write_files(dir: &Path, files: Vec<(String, String)>) -> Result<(), Failure> {
    for (name, body) in files {
        let path = dir.join(&name);
        fs::write(&path, body)
            .map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    }
    Ok(())
}

pub fn write_figure(which: u8, dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::Io(format!("{}: {e}", dir.display())))?;
    match which {
        1 => write_fig1(dir),
        2 => write_fig2(dir),
        3 => write_fig3(dir),
        _ => unreachable!("clap range-checks --which"),
    }
}

/// B_N(r, J) surfaces, one long-format file per N.
fn write_fig1(dir: &Path) -> Result<(), Failure> {
    let r_grid: Vec<f64> = (0..=100).map(|i| i as f64 * 0.02).collect();
    let j_grid: Vec<f64> = (0..=200).map(|i| i as f64 * 0.005).collect();
    let files: Vec<(String, String)> = FIG1_NS
        .par_iter()
        .map(|&n| {
            let vals = scan_surface(n, &r_grid, &j_grid).expect("fig1 grid is valid");
            let mut body = String::with_capacity(vals.len() * 70 + 16);
            body.push_str("r,j,value\n");
            for (ir, &r) in r_grid.iter().enumerate() {
                for (ij, &j) in j_grid.iter().enumerate() {
                    body.push_str(&fmt_f64(r));
                    body.push(',');
                    body.push_str(&fmt_f64(j));
                    body.push(',');
                    body.push_str(&fmt_f64(vals[ir * j_grid.len() + ij].value));
                    body.push('\n');
                }
            }
            (format!("fig1_n{n}.csv"), body)
        })
        .collect();
    write_files(dir, files)
}

/// Asymptotic curves B_N(A), wide format (one column per N).
fn write_fig2(dir: &Path) -> Result<(), Failure> {
    let a_grid: Vec<f64> = (1..=1500).map(|i| i as f64 * 0.001).collect();
    let columns: Vec<Vec<f64>> = FIG23_NS
        .par_iter()
        .map(|&n| {
            let table = ClassTable::new(n).expect("fig2 party counts are valid");
            a_grid
                .par_iter()
                .map(|&a| eval_asymptotic(&table, a).value)
                .collect()
        })
        .collect();
    let mut body = String::with_capacity(a_grid.len() * 160 + 32);
    body.push_str("a,b5,b9,b15,b25,b45,b85\n");
    for (i, &a) in a_grid.iter().enumerate() {
        body.push_str(&fmt_f64(a));
        for col in &columns {
            body.push(',');
            body.push_str(&fmt_f64(col[i]));
        }
        body.push('\n');
    }
    write_files(dir, vec![("fig2.csv".to_string(), body)])
}

/// Finite-squeezing curves B_N(J) at four squeezing values, long format,
/// J range auto-scaled to 4x each curve's own optimum.
fn write_fig3(dir: &Path) -> Result<(), Failure> {
    let files: Vec<(String, String)> = FIG3_RS
        .par_iter()
        .map(|&r| {
            let curves: Vec<(usize, Vec<(f64, f64)>)> = FIG23_NS
                .par_iter()
                .map(|&n| {
                    let table = ClassTable::new(n).expect("fig3 party counts are valid");
                    let opt = maximize_over_displacement(n, r, None)
                        .expect("fig3 squeezing values are valid");
                    let step = 4.0 * opt.argmax / 400.0;
                    let pts = (0..=400)
                        .map(|i| {
                            let j = i as f64 * step;
                            (j, eval_equal_settings(&table, r, j).value)
                        })
                        .collect();
                    (n, pts)
                })
                .collect();
            let mut body = String::with_capacity(FIG23_NS.len() * 401 * 70 + 16);
            body.push_str("n,j,value\n");
            for (n, pts) in curves {
                for (j, v) in pts {
                    body.push_str(&n.to_string());
                    body.push(',');
                    body.push_str(&fmt_f64(j));
                    body.push(',');
                    body.push_str(&fmt_f64(v));
                    body.push('\n');
                }
            }
            (format!("fig3_r{r}.csv"), body)
        })
        .collect();
    write_files(dir, files)
}
