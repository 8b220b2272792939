use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use pwcovo::config::{RunConfig, Solver};
use pwcovo::covo::generate_covos;
use pwcovo::fci::solve_ground;
use pwcovo::groundstate::{read_orbitals, write_orbitals};
use pwcovo::integrals::{Boundary, SqHamiltonian};
use pwcovo::pipeline::{self, ScanTable};
use pwcovo::pseudopot::StructureAtoms;
use pwcovo::vqe::{run_job, VqeJob};
use pwcovo::{Error, Result};

#[derive(Parser)]
#[command(name = "pwcovo", version, about = "Plane-wave COVO, FCI and VQE driver")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "PWCOVO_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

/// Config file plus overrides for its fields.
#[derive(Args, Clone)]
struct ConfigArgs {
    #[arg(short, long)]
    config: Option<PathBuf>,
    #[arg(long)]
    length: Option<f64>,
    #[arg(long)]
    ecut: Option<f64>,
    #[arg(long)]
    structure: Option<String>,
    /// Pseudopotential files (or hgh:H, hgh:Li), repeatable.
    #[arg(long = "pp")]
    pseudopotentials: Vec<String>,
    #[arg(long)]
    boundary: Option<Boundary>,
    #[arg(long)]
    n_covos: Option<usize>,
    #[arg(long)]
    electrons: Option<usize>,
    #[arg(long)]
    filter_n: Option<u32>,
    #[arg(long)]
    rcut: Option<f64>,
    #[arg(long)]
    madelung: Option<f64>,
    #[arg(long)]
    charge_rs: Option<f64>,
    /// Bond distances in Å, comma separated.
    #[arg(long, value_delimiter = ',')]
    distances: Vec<f64>,
    #[arg(long)]
    solver: Option<Solver>,
    #[arg(long)]
    output: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
}

impl ConfigArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = self.length {
            c.cell.length = v;
        }
        if let Some(v) = self.ecut {
            c.cell.ecut_ry = v;
        }
        if let Some(v) = &self.structure {
            c.structure = Some(v.clone());
        }
        if !self.pseudopotentials.is_empty() {
            c.pseudopotentials = self.pseudopotentials.clone();
        }
        if let Some(v) = self.boundary {
            c.boundary = v;
        }
        if let Some(v) = self.n_covos {
            c.n_covos = v;
        }
        if self.electrons.is_some() {
            c.electrons = self.electrons;
        }
        if let Some(v) = self.filter_n {
            c.filter_n = v;
        }
        if self.rcut.is_some() {
            c.rcut = self.rcut;
        }
        if let Some(v) = self.madelung {
            c.madelung = v;
        }
        if self.charge_rs.is_some() {
            c.charge_rs = self.charge_rs;
        }
        if !self.distances.is_empty() {
            c.scan.distances = self.distances.clone();
        }
        if let Some(v) = self.solver {
            c.solver = v;
        }
        if let Some(v) = &self.output {
            c.output = v.clone();
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        c.validate()?;
        Ok(c)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Closed-shell ground state; writes an orbital checkpoint.
    Scf {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value = "orbitals.txt")]
        out: PathBuf,
    },
    /// Generate COVOs on top of a ground state (computed or read).
    Covo {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Ground-state checkpoint from `scf`.
        #[arg(long)]
        orbitals: Option<PathBuf>,
        #[arg(long, default_value = "covos.txt")]
        out: PathBuf,
    },
    /// Build the second-quantized Hamiltonian over checkpoint orbitals.
    Integrals {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long)]
        orbitals: PathBuf,
        /// Keep only the first n orbitals.
        #[arg(long)]
        norb: Option<usize>,
        #[arg(long, default_value = "hamiltonian.fcidump")]
        out: PathBuf,
    },
    /// Ground state of an integral dump.
    Fci {
        fcidump: PathBuf,
        #[arg(long)]
        norb: Option<usize>,
    },
    /// VQE on a two-orbital integral dump.
    Vqe {
        /// Job file (TOML).
        #[arg(long)]
        job: Option<PathBuf>,
        #[arg(long)]
        fcidump: Option<PathBuf>,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, value_delimiter = ',')]
        seeds: Vec<u64>,
        #[arg(long, default_value = "vqe_results.toml")]
        out: PathBuf,
    },
    /// Bond-distance scan; writes scan.csv into the output directory.
    Scan {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Compare scan files (kcal/mol) and write plot data.
    Report {
        scans: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
    },
}

fn single_structure(cfg: &RunConfig) -> Result<StructureAtoms> {
    match (&cfg.structure, cfg.scan.distances.first()) {
        (Some(s), _) => StructureAtoms::read(&cfg.resolve(s)),
        (None, Some(&r)) => pipeline::scan_structure(cfg, r),
        (None, None) => Err(Error::Config("give a structure file or one scan distance".into())),
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Scf { cfg, out } => {
            let cfg = cfg.load()?;
            let ctx = pipeline::context_for(&cfg, single_structure(&cfg)?)?;
            let scf = pipeline::rhf_for(&cfg, &ctx)?;
            println!("E_RHF {:.10} Ha  gnorm {:.2e}  steps {}", scf.etotal, scf.gnorm, scf.iterations);
            write_orbitals(&out, &ctx.basis, "rhf", scf.filled.len(), &scf.filled)?;
        }
        Cmd::Covo { cfg, orbitals, out } => {
            let cfg = cfg.load()?;
            let ctx = pipeline::context_for(&cfg, single_structure(&cfg)?)?;
            let filled = match orbitals {
                Some(p) => {
                    let f = read_orbitals(&p, Some(&ctx.basis))?;
                    f.orbitals[..f.nfilled].to_vec()
                }
                None => pipeline::rhf_for(&cfg, &ctx)?.filled,
            };
            let set = generate_covos(&ctx, &filled, cfg.n_covos, &pipeline::covo_options(&cfg))?;
            for (n, (ci, e)) in set.ci_energies.iter().zip(&set.energies).enumerate() {
                println!("COVO {}: E_3x3 {:.10}  E_FCI {:.10} Ha", n + 1, ci, e);
            }
            write_orbitals(&out, &ctx.basis, "covo", filled.len(), &set.all_orbitals(&filled))?;
        }
        Cmd::Integrals {
            cfg,
            orbitals,
            norb,
            out,
        } => {
            let cfg = cfg.load()?;
            let ctx = pipeline::context_for(&cfg, single_structure(&cfg)?)?;
            let f = read_orbitals(&orbitals, Some(&ctx.basis))?;
            let n = norb.unwrap_or(f.orbitals.len()).min(f.orbitals.len());
            let ham = ctx.build_sq_hamiltonian(&f.orbitals[..n])?;
            ham.write_fcidump(&out)?;
            println!("wrote {} orbitals, {} electrons to {}", ham.norb, ham.nelec, out.display());
        }
        Cmd::Fci { fcidump, norb } => {
            let mut ham = SqHamiltonian::read_fcidump(&fcidump)?;
            if let Some(n) = norb {
                ham = ham.restrict(n);
            }
            let r = solve_ground(&ham)?;
            println!(
                "E_FCI {:.10} Ha  determinants {}  residual {:.1e}  S^2 {:.2e}",
                r.e0,
                r.basis.len(),
                r.residual,
                r.s2
            );
        }
        Cmd::Vqe {
            job,
            fcidump,
            shots,
            seeds,
            out,
        } => {
            let (mut j, base) = match &job {
                Some(p) => (VqeJob::read(p)?, p.parent().map(Path::to_path_buf).unwrap_or_default()),
                None => (VqeJob::default(), PathBuf::from(".")),
            };
            if let Some(s) = shots {
                j.shots = s;
            }
            if !seeds.is_empty() {
                j.seeds = seeds;
            }
            let path = match (fcidump, &j.fcidump) {
                (Some(p), _) => p,
                (None, Some(p)) => base.join(p),
                (None, None) => return Err(Error::Config("no fcidump given".into())),
            };
            let ham = SqHamiltonian::read_fcidump(&path)?;
            let rep = run_job(&j, &ham)?;
            print!("{}", rep.to_csv());
            std::fs::write(&out, rep.to_toml())?;
        }
        Cmd::Scan { cfg } => {
            let cfg = cfg.load()?;
            let res = pipeline::run_scan(&cfg)?;
            pipeline::write_scan(&cfg, &res)?;
            print!("{}", res.table.to_csv());
            for (r, e) in &res.failures {
                eprintln!("R = {r} Å failed: {e}");
            }
            if !res.failures.is_empty() {
                return Ok(ExitCode::from(2));
            }
        }
        Cmd::Report { scans, out } => {
            let names: Vec<String> = scans.iter().map(|p| p.display().to_string()).collect();
            let tables = scans.iter().map(|p| ScanTable::read(p)).collect::<Result<Vec<_>>>()?;
            let r = pipeline::write_report(&out, &names, &tables)?;
            print!("{}", r.text);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match run(cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
