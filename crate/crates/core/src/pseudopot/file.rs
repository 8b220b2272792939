//! Plain-text columnar pseudopotential format.
//!
//! ```text
//! # comment
//! species Li
//! zval 1
//! core_radii 1.869 1.551
//! projector 1 0          # n l, one line per data column after vlocal
//! hcoef 0 1 1 1.858811   # l n n' value (symmetric partner filled in)
//! grid 4001
//! r vlocal p1 p2 ...     # `grid` lines of data follow
//! ```

use std::path::Path;

use nalgebra::DMatrix;

use super::{Projector, PseudopotentialSpec};
use crate::error::{Error, Result};

pub fn read_pseudopotential(path: &Path) -> Result<PseudopotentialSpec> {
    let text = crate::error::read_text(path)?;
    parse(&text, &path.display().to_string())
}

fn num(tok: Option<&str>, name: &str, line: usize) -> Result<f64> {
    let t = tok.ok_or_else(|| Error::parse(name, line, "missing value"))?;
    t.parse::<f64>()
        .map_err(|_| Error::parse(name, line, format!("not a number: {t}")))
}

fn int(tok: Option<&str>, name: &str, line: usize) -> Result<usize> {
    let t = tok.ok_or_else(|| Error::parse(name, line, "missing value"))?;
    t.parse::<usize>()
        .map_err(|_| Error::parse(name, line, format!("not an integer: {t}")))
}

pub(crate) fn parse(text: &str, name: &str) -> Result<PseudopotentialSpec> {
    let mut species = None;
    let mut zval = None;
    let mut core = (0.0, 0.0);
    let mut proj_decl: Vec<(usize, usize)> = Vec::new();
    let mut hentries: Vec<(usize, usize, usize, f64)> = Vec::new();
    let mut rows_expected = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        if rows_expected.is_some() {
            let row: Result<Vec<f64>> = line
                .split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| Error::parse(name, ln, format!("bad number {t}"))))
                .collect();
            let row = row?;
            if row.len() != 2 + proj_decl.len() {
                return Err(Error::parse(
                    name,
                    ln,
                    format!("expected {} columns, found {}", 2 + proj_decl.len(), row.len()),
                ));
            }
            rows.push(row);
            continue;
        }
        match tok.next() {
            Some("species") => {
                species = Some(tok.next().ok_or_else(|| Error::parse(name, ln, "missing species"))?.to_string())
            }
            Some("zval") => zval = Some(num(tok.next(), name, ln)?),
            Some("core_radii") => {
                core = (num(tok.next(), name, ln)?, num(tok.next(), name, ln)?);
            }
            Some("projector") => {
                let n = int(tok.next(), name, ln)?;
                let l = int(tok.next(), name, ln)?;
                proj_decl.push((n, l));
            }
            Some("hcoef") => {
                let l = int(tok.next(), name, ln)?;
                let n = int(tok.next(), name, ln)?;
                let m = int(tok.next(), name, ln)?;
                let v = num(tok.next(), name, ln)?;
                if n == 0 || m == 0 {
                    return Err(Error::parse(name, ln, "projector indices start at 1"));
                }
                hentries.push((l, n, m, v));
            }
            Some("grid") => rows_expected = Some(int(tok.next(), name, ln)?),
            Some(k) => return Err(Error::parse(name, ln, format!("unknown keyword {k}"))),
            None => {}
        }
    }
    let species = species.ok_or_else(|| Error::parse(name, 0, "missing `species`"))?;
    let zval = zval.ok_or_else(|| Error::parse(name, 0, "missing `zval`"))?;
    let nrows = rows_expected.ok_or_else(|| Error::parse(name, 0, "missing `grid`"))?;
    if rows.len() != nrows {
        return Err(Error::parse(name, 0, format!("grid declares {nrows} rows, found {}", rows.len())));
    }
    let lmax = proj_decl.iter().map(|p| p.1).max();
    let mut hcoef = Vec::new();
    if let Some(lmax) = lmax {
        for l in 0..=lmax {
            let nl = proj_decl.iter().filter(|p| p.1 == l).count();
            hcoef.push(DMatrix::zeros(nl, nl));
        }
    }
    for (l, n, m, v) in hentries {
        let h = hcoef
            .get_mut(l)
            .ok_or_else(|| Error::parse(name, 0, format!("hcoef for undeclared channel l={l}")))?;
        if n > h.nrows() || m > h.nrows() {
            return Err(Error::parse(name, 0, format!("hcoef index out of range for l={l}")));
        }
        h[(n - 1, m - 1)] = v;
        h[(m - 1, n - 1)] = v;
    }
    let rgrid = rows.iter().map(|r| r[0]).collect();
    let vlocal = rows.iter().map(|r| r[1]).collect();
    let projectors = proj_decl
        .iter()
        .enumerate()
        .map(|(k, &(n, l))| Projector {
            n,
            l,
            radial: rows.iter().map(|r| r[2 + k]).collect(),
        })
        .collect();
    let spec = PseudopotentialSpec {
        species,
        zval,
        rgrid,
        vlocal,
        projectors,
        hcoef,
        core_radii: core,
    };
    spec.validate()?;
    Ok(spec)
}

pub fn write_pseudopotential(spec: &PseudopotentialSpec, path: &Path) -> Result<()> {
    std::fs::write(path, to_text(spec))?;
    Ok(())
}

pub(crate) fn to_text(spec: &PseudopotentialSpec) -> String {
    let mut s = String::new();
    s.push_str(&format!("species {}\n", spec.species));
    s.push_str(&format!("zval {:e}\n", spec.zval));
    s.push_str(&format!("core_radii {:e} {:e}\n", spec.core_radii.0, spec.core_radii.1));
    for p in &spec.projectors {
        s.push_str(&format!("projector {} {}\n", p.n, p.l));
    }
    for (l, h) in spec.hcoef.iter().enumerate() {
        for n in 0..h.nrows() {
            for m in n..h.ncols() {
                s.push_str(&format!("hcoef {l} {} {} {:e}\n", n + 1, m + 1, h[(n, m)]));
            }
        }
    }
    s.push_str(&format!("grid {}\n", spec.rgrid.len()));
    for i in 0..spec.rgrid.len() {
        s.push_str(&format!("{:e} {:e}", spec.rgrid[i], spec.vlocal[i]));
        for p in &spec.projectors {
            s.push_str(&format!(" {:e}", p.radial[i]));
        }
        s.push('\n');
    }
    s
}
