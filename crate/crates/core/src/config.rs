//! Run configuration (TOML). Relative paths resolve against the directory
//! of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{Boundary, ContextOptions, MADELUNG_SC};
use crate::lattice::{build_basis_with, build_cell, BasisOptions, Cell, PwBasis, Vec3};
use crate::pseudopot::{hgh, read_pseudopotential, PseudopotentialSpec};
use crate::vqe::VqeJob;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CellConfig {
    /// Cubic cell edge (bohr); ignored when `vectors` is given.
    pub length: f64,
    /// Lattice vectors as rows (bohr).
    pub vectors: Option<[[f64; 3]; 3]>,
    pub ecut_ry: f64,
    pub max_mesh: usize,
}

impl Default for CellConfig {
    fn default() -> Self {
        CellConfig {
            length: 10.0,
            vectors: None,
            ecut_ry: 8.0,
            max_mesh: BasisOptions::default().max_mesh,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    #[default]
    Fci,
    Vqe,
}

impl std::str::FromStr for Solver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Solver> {
        match s {
            "fci" => Ok(Solver::Fci),
            "vqe" => Ok(Solver::Vqe),
            _ => Err(Error::Config(format!("unknown solver `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    /// Bond distances in Å.
    pub distances: Vec<f64>,
    /// Species placed at center − R/2 and center + R/2 along x.
    pub species: [String; 2],
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            distances: vec![],
            species: ["Li".into(), "H".into()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub rhf_tol: f64,
    pub rhf_max_iter: usize,
    pub covo_tol: f64,
    pub covo_max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            rhf_tol: 1e-7,
            rhf_max_iter: 1000,
            covo_tol: 1e-6,
            covo_max_iter: 500,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub cell: CellConfig,
    /// Structure file for single-point commands.
    pub structure: Option<String>,
    /// Pseudopotential files, or `hgh:H` / `hgh:Li` for the built-in sets.
    pub pseudopotentials: Vec<String>,
    pub boundary: Boundary,
    pub n_covos: usize,
    /// Electron count; defaults to the total valence charge.
    pub electrons: Option<usize>,
    pub filter_n: u32,
    pub rcut: Option<f64>,
    pub madelung: f64,
    pub charge_rs: Option<f64>,
    pub real_orbitals: bool,
    pub scan: ScanConfig,
    pub solver: Solver,
    pub numerics: SolverConfig,
    pub vqe: VqeJob,
    pub output: String,
    pub seed: u64,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            cell: CellConfig::default(),
            structure: None,
            pseudopotentials: vec!["hgh:Li".into(), "hgh:H".into()],
            boundary: Boundary::Periodic,
            n_covos: 1,
            electrons: None,
            filter_n: 8,
            rcut: None,
            madelung: MADELUNG_SC,
            charge_rs: None,
            real_orbitals: true,
            scan: ScanConfig::default(),
            solver: Solver::Fci,
            numerics: SolverConfig::default(),
            vqe: VqeJob::default(),
            output: "out".into(),
            seed: 1,
            base_dir: PathBuf::from("."),
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str, name: &str) -> Result<RunConfig> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{name}: {e}")))
    }

    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = crate::error::read_text(path)?;
        let mut c = RunConfig::parse(&text, &path.display().to_string())?;
        c.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn resolve(&self, p: &str) -> PathBuf {
        let path = Path::new(p);
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(&self.output)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cell.ecut_ry > 0.0) {
            return Err(Error::Config("ecut_ry must be positive".into()));
        }
        if self.cell.vectors.is_none() && !(self.cell.length > 0.0) {
            return Err(Error::Config("cell length must be positive".into()));
        }
        if self.n_covos == 0 {
            return Err(Error::Config("n_covos must be at least 1".into()));
        }
        if self.pseudopotentials.is_empty() {
            return Err(Error::Config("no pseudopotentials listed".into()));
        }
        for p in &self.pseudopotentials {
            if !p.starts_with("hgh:") && !self.resolve(p).is_file() {
                return Err(Error::Config(format!("pseudopotential file {p} not found")));
            }
        }
        if let Some(s) = &self.structure {
            if !self.resolve(s).is_file() {
                return Err(Error::Config(format!("structure file {s} not found")));
            }
        }
        if let Some(d) = self.scan.distances.iter().find(|d| !(**d > 0.0)) {
            return Err(Error::Config(format!("scan distance {d} must be positive")));
        }
        if let Some(f) = &self.vqe.fcidump {
            if self.solver == Solver::Vqe && !self.resolve(f).is_file() {
                return Err(Error::Config(format!("fcidump {f} not found")));
            }
        }
        Ok(())
    }

    pub fn cell(&self) -> Result<Cell> {
        match self.cell.vectors {
            Some(v) => build_cell(Vec3::from(v[0]), Vec3::from(v[1]), Vec3::from(v[2])),
            None => Cell::cubic(self.cell.length),
        }
    }

    pub fn basis(&self) -> Result<PwBasis> {
        build_basis_with(
            &self.cell()?,
            self.cell.ecut_ry,
            &BasisOptions {
                max_mesh: self.cell.max_mesh,
                mesh: None,
            },
        )
    }

    pub fn species(&self) -> Result<Vec<PseudopotentialSpec>> {
        self.pseudopotentials
            .iter()
            .map(|p| match p.as_str() {
                "hgh:H" => Ok(hgh::hydrogen()),
                "hgh:Li" => Ok(hgh::lithium()),
                s if s.starts_with("hgh:") => Err(Error::Config(format!("no built-in potential {s}"))),
                s => read_pseudopotential(&self.resolve(s)),
            })
            .collect()
    }

    pub fn context_options(&self) -> ContextOptions {
        ContextOptions {
            boundary: self.boundary,
            filter_n: self.filter_n,
            rcut: self.rcut,
            madelung: self.madelung,
            charge_rs: self.charge_rs,
            nelec: self.electrons,
            real_orbitals: self.real_orbitals,
            interaction: true,
        }
    }
}
