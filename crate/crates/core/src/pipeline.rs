//! Ground state → COVOs → FCI/VQE for single points and bond scans, plus
//! the scan CSV format and the summary report.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::config::{RunConfig, Solver};
use crate::covo::{generate_covos, CovoOptions, CovoSet};
use crate::error::{Error, Result};
use crate::groundstate::{solve_rhf, RhfInit, RhfOptions, ScfState};
use crate::integrals::{Context, SqHamiltonian};
use crate::lattice::Vec3;
use crate::pseudopot::StructureAtoms;
use crate::units::{angstrom_to_bohr, ha_to_kcal};
use crate::vqe::{run_job, VqeReport};

pub fn context_for(cfg: &RunConfig, structure: StructureAtoms) -> Result<Context> {
    Context::new(cfg.basis()?, structure, cfg.species()?, cfg.context_options())
}

/// Two atoms on the x axis through the cell center, R (Å) apart.
pub fn scan_structure(cfg: &RunConfig, r_angstrom: f64) -> Result<StructureAtoms> {
    let cell = cfg.cell()?;
    let r = angstrom_to_bohr(r_angstrom);
    let center = cell.frac_to_cart(&Vec3::new(0.5, 0.5, 0.5));
    let a = center - Vec3::new(0.5 * r, 0.0, 0.0);
    let b = center + Vec3::new(0.5 * r, 0.0, 0.0);
    Ok(StructureAtoms::new(vec![
        (cfg.scan.species[0].clone(), cell.cart_to_frac(&a)),
        (cfg.scan.species[1].clone(), cell.cart_to_frac(&b)),
    ]))
}

#[derive(Clone, Debug)]
pub struct PointResult {
    pub scf: ScfState,
    pub covos: CovoSet,
    pub hamiltonian: SqHamiltonian,
    pub vqe: Option<VqeReport>,
}

pub fn rhf_for(cfg: &RunConfig, ctx: &Context) -> Result<ScfState> {
    if !ctx.nelec.is_multiple_of(2) {
        return Err(Error::Config(format!("closed-shell ground state needs an even electron count, got {}", ctx.nelec)));
    }
    solve_rhf(
        ctx,
        ctx.nelec / 2,
        RhfInit::Seed(cfg.seed),
        &RhfOptions {
            tol: cfg.numerics.rhf_tol,
            max_iter: cfg.numerics.rhf_max_iter,
        },
    )
}

pub fn covo_options(cfg: &RunConfig) -> CovoOptions {
    CovoOptions {
        tol: cfg.numerics.covo_tol,
        max_iter: cfg.numerics.covo_max_iter,
        seed: cfg.seed.wrapping_add(1000),
        ..CovoOptions::default()
    }
}

/// Full pipeline for one structure.
pub fn run_point(cfg: &RunConfig, structure: StructureAtoms) -> Result<PointResult> {
    let ctx = context_for(cfg, structure)?;
    let scf = rhf_for(cfg, &ctx)?;
    let covos = generate_covos(&ctx, &scf.filled, cfg.n_covos, &covo_options(cfg))?;
    let hamiltonian = ctx.build_sq_hamiltonian(&covos.all_orbitals(&scf.filled))?;
    let vqe = if cfg.solver == Solver::Vqe {
        let two = hamiltonian.restrict(scf.filled.len() + 1);
        if scf.filled.len() != 1 {
            return Err(Error::Config("VQE needs exactly one filled orbital".into()));
        }
        Some(run_job(&cfg.vqe, &two)?)
    } else {
        None
    };
    Ok(PointResult {
        scf,
        covos,
        hamiltonian,
        vqe,
    })
}

/// Scan table: bond distance (Å) and one energy column per COVO count.
/// Failed points carry `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanTable {
    pub columns: Vec<String>,
    pub rows: Vec<(f64, Vec<Option<f64>>)>,
}

impl ScanTable {
    pub fn covo_columns(n: usize) -> Vec<String> {
        (1..=n).map(|k| format!("E_{k}covo")).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("R_angstrom");
        for c in &self.columns {
            s.push(',');
            s.push_str(c);
        }
        s.push('\n');
        for (r, vals) in &self.rows {
            let _ = write!(s, "{r}");
            for v in vals {
                match v {
                    Some(x) => {
                        let _ = write!(s, ",{x}");
                    }
                    None => s.push_str(",failed"),
                }
            }
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str, name: &str) -> Result<ScanTable> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, head) = lines.next().ok_or_else(|| Error::parse(name, 1, "empty scan file"))?;
        let mut cols = head.split(',').map(|c| c.trim().to_string());
        if cols.next().as_deref() != Some("R_angstrom") {
            return Err(Error::parse(name, 1, "first column must be R_angstrom"));
        }
        let columns: Vec<String> = cols.collect();
        let mut rows = Vec::new();
        for (i, l) in lines {
            let f: Vec<&str> = l.split(',').map(str::trim).collect();
            if f.len() != columns.len() + 1 {
                return Err(Error::parse(name, i + 1, "wrong number of fields"));
            }
            let r: f64 = f[0].parse().map_err(|_| Error::parse(name, i + 1, "bad distance"))?;
            let vals = f[1..]
                .iter()
                .map(|v| {
                    if *v == "failed" {
                        Ok(None)
                    } else {
                        v.parse().map(Some).map_err(|_| Error::parse(name, i + 1, "bad energy"))
                    }
                })
                .collect::<Result<_>>()?;
            rows.push((r, vals));
        }
        Ok(ScanTable { columns, rows })
    }

    pub fn read(path: &Path) -> Result<ScanTable> {
        let text = crate::error::read_text(path)?;
        ScanTable::parse(&text, &path.display().to_string())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }

    /// Whitespace-separated columns for plotting; failed points are skipped.
    pub fn to_plot_data(&self) -> String {
        let mut s = format!("# R_angstrom {}\n", self.columns.join(" "));
        for (r, vals) in &self.rows {
            if vals.iter().all(Option::is_some) {
                let _ = write!(s, "{r}");
                for v in vals.iter().flatten() {
                    let _ = write!(s, " {v}");
                }
                s.push('\n');
            }
        }
        s
    }
}

#[derive(Clone, Debug)]
pub struct ScanOutcome {
    pub table: ScanTable,
    /// VQE table rows (R, FCI, mean raw, mean mitigated) when the solver is VQE.
    pub vqe: Vec<(f64, Option<VqeReport>)>,
    pub failures: Vec<(f64, String)>,
}

/// Run every scan point (in parallel) and collect rows in input order.
pub fn run_scan(cfg: &RunConfig) -> Result<ScanOutcome> {
    cfg.validate()?;
    if cfg.scan.distances.is_empty() {
        return Err(Error::Config("scan.distances is empty".into()));
    }
    let results: Vec<(f64, Result<PointResult>)> = cfg
        .scan
        .distances
        .par_iter()
        .map(|&r| (r, scan_structure(cfg, r).and_then(|s| run_point(cfg, s))))
        .collect();
    let mut rows = Vec::new();
    let mut vqe = Vec::new();
    let mut failures = Vec::new();
    for (r, res) in results {
        match res {
            Ok(p) => {
                rows.push((r, p.covos.energies.iter().map(|e| Some(*e)).collect()));
                vqe.push((r, p.vqe));
            }
            Err(e) => {
                rows.push((r, vec![None; cfg.n_covos]));
                vqe.push((r, None));
                failures.push((r, e.to_string()));
            }
        }
    }
    Ok(ScanOutcome {
        table: ScanTable {
            columns: ScanTable::covo_columns(cfg.n_covos),
            rows,
        },
        vqe,
        failures,
    })
}

/// Write scan.csv (and vqe.csv for the VQE solver) into the output directory.
pub fn write_scan(cfg: &RunConfig, out: &ScanOutcome) -> Result<()> {
    let dir = cfg.output_dir();
    std::fs::create_dir_all(&dir)?;
    out.table.write(&dir.join("scan.csv"))?;
    if cfg.solver == Solver::Vqe {
        let mut s = String::from("R_angstrom,fci,vqe_raw,vqe_mitigated\n");
        for (r, rep) in &out.vqe {
            match rep {
                Some(v) => {
                    let m = v.mean_mitigated.map(|x| x.to_string()).unwrap_or_else(|| "none".into());
                    let _ = writeln!(s, "{r},{},{},{m}", v.fci, v.mean_raw);
                }
                None => {
                    let _ = writeln!(s, "{r},failed,failed,failed");
                }
            }
        }
        std::fs::write(dir.join("vqe.csv"), s)?;
    }
    Ok(())
}

/// Mean |a − b| in kcal/mol over paired values.
pub fn average_abs_difference_kcal(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.iter().zip(b).map(|(x, y)| ha_to_kcal((x - y).abs())).sum::<f64>() / a.len() as f64
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    /// Per scan: (column, mean |E_col − E_last| kcal/mol) against the
    /// largest COVO count in that scan.
    pub covo_gaps: Vec<Vec<(String, f64)>>,
    /// Per later scan: (column, mean |E_first − E_this| kcal/mol).
    pub between: Vec<Vec<(String, f64)>>,
    pub text: String,
}

fn column_values(t: &ScanTable, c: usize) -> Vec<Option<f64>> {
    t.rows.iter().map(|(_, v)| v[c]).collect()
}

fn paired(a: &[Option<f64>], b: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    a.iter()
        .zip(b)
        .filter_map(|(x, y)| Some((x.as_ref().copied()?, y.as_ref().copied()?)))
        .unzip()
}

pub fn report(names: &[String], tables: &[ScanTable]) -> Result<Report> {
    if tables.len() < 2 {
        return Err(Error::Config("report needs at least two scan files".into()));
    }
    let grid: Vec<f64> = tables[0].rows.iter().map(|r| r.0).collect();
    for (n, t) in names.iter().zip(tables).skip(1) {
        let g: Vec<f64> = t.rows.iter().map(|r| r.0).collect();
        if g != grid {
            return Err(Error::Config(format!("{n}: distance grid differs from {}", names[0])));
        }
    }
    let mut text = String::new();
    let mut covo_gaps = Vec::new();
    for (n, t) in names.iter().zip(tables) {
        let _ = writeln!(text, "{n}: {} points, columns {}", t.rows.len(), t.columns.join(" "));
        let last = t.columns.len() - 1;
        let lv = column_values(t, last);
        let mut gaps = Vec::new();
        for c in 0..last {
            let (a, b) = paired(&column_values(t, c), &lv);
            let g = average_abs_difference_kcal(&a, &b);
            let _ = writeln!(text, "  {} vs {}: {:.4} kcal/mol", t.columns[c], t.columns[last], g);
            gaps.push((t.columns[c].clone(), g));
        }
        covo_gaps.push(gaps);
    }
    let mut between = Vec::new();
    for (n, t) in names.iter().zip(tables).skip(1) {
        let mut d = Vec::new();
        for (c, col) in t.columns.iter().enumerate() {
            if let Some(c0) = tables[0].columns.iter().position(|x| x == col) {
                let (a, b) = paired(&column_values(&tables[0], c0), &column_values(t, c));
                let g = average_abs_difference_kcal(&a, &b);
                let _ = writeln!(text, "{} vs {n}, {col}: {:.4} kcal/mol", names[0], g);
                d.push((col.clone(), g));
            }
        }
        between.push(d);
    }
    Ok(Report {
        covo_gaps,
        between,
        text,
    })
}

/// Summary text plus one plot-data file per scan, written to `dir`.
pub fn write_report(dir: &Path, names: &[String], tables: &[ScanTable]) -> Result<Report> {
    let r = report(names, tables)?;
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.txt"), &r.text)?;
    for (i, t) in tables.iter().enumerate() {
        std::fs::write(dir.join(format!("scan{i}.dat")), t.to_plot_data())?;
    }
    Ok(r)
}
