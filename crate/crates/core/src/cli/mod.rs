//! Command-line front end: argument model, dispatch and data export.

mod grid;
mod output;
mod plot;
pub mod selftest;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use grid::Grid;
pub use output::{PlotKind, Table};

use crate::beamsplitter::{linear_entropy, split, two_photon_distribution};
use crate::coherent::{
    cat_coefficients, coefficients, density_grid, overlap, CatParity, CoherentSpec,
    StateEvaluator, Variant,
};
use crate::observables::{
    energy_expectation, moment_matrices, number_moments, wigner_grid, Method, WignerOptions,
    MAX_MOMENT_K,
};
use crate::system::{
    is_lowest_weight, lowest_weights, potential, validate_m, DeformedOscillator,
    EigenfunctionEvaluator, StateLabel,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything that determines one run.
#[derive(Debug, Clone, PartialEq, Parser, Serialize, Deserialize)]
#[command(name = "ladder-cs", version, about = "Coherent states of exceptional Hermite ladder systems")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Also render a PNG line plot or heatmap of the data.
    #[arg(long, global = true)]
    pub plot: Option<PathBuf>,
    /// Bound on the discarded coefficient mass.
    #[arg(long, global = true, default_value_t = 1e-14)]
    pub tail_tol: f64,
    /// Absolute tolerance of adaptive quadratures.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub quad_tol: f64,
}

/// A coherent state: family, system, ladder and eigenvalue.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct StateArgs {
    #[arg(long, default_value = "nonlinear")]
    pub variant: Variant,
    #[arg(long)]
    pub m: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: i64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub z_re: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub z_im: f64,
}

/// A family of states on one ladder, swept over real z = |z|.
#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SweepArgs {
    #[arg(long, default_value = "nonlinear")]
    pub variant: Variant,
    #[arg(long)]
    pub m: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub mu: i64,
    /// Grid of |z| values, min:max:count.
    #[arg(long)]
    pub z_abs: Grid,
}

#[derive(Debug, Clone, PartialEq, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Lowest spectrum indices with energies and ladder labels.
    Spectrum {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// The potential V_m(x).
    Potential {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true, default_value = "-6:6:241")]
        x: Grid,
    },
    /// One eigenfunction and optionally its derivatives.
    Eigenstate {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        nu: i64,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<Grid>,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=2))]
        derivatives: u8,
    },
    /// Superposition coefficients of a coherent state.
    Coeffs {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Mean energy against |z|.
    Energy {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value = "closed-form")]
        method: Method,
    },
    /// Probability density on a time list and x grid.
    Density {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        t: Grid,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<Grid>,
    },
    /// Density of an even or odd cat state built from ±z, z real.
    Cat {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
        #[arg(long)]
        z: f64,
        #[arg(long, default_value = "even")]
        parity: CatParity,
        /// Skip the 1/√(1 ± D) normalization.
        #[arg(long)]
        unnormalized: bool,
        #[arg(long, allow_hyphen_values = true, default_value = "0")]
        t: Grid,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<Grid>,
    },
    /// Overlap ⟨+z|-z⟩ against |z| for one or all ladders.
    Overlap {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<i64>,
        #[arg(long)]
        z_abs: Grid,
    },
    /// Wigner function on an (x, p) grid.
    Wigner {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, allow_hyphen_values = true, default_value = "-8:8:161")]
        x: Grid,
        #[arg(long, allow_hyphen_values = true, default_value = "-8:8:161")]
        p: Grid,
        #[arg(long, default_value_t = 10)]
        min_k: usize,
    },
    /// σ_x, σ_p and their product over a complex z grid.
    Uncertainty {
        #[arg(long, default_value = "nonlinear")]
        variant: Variant,
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        mu: i64,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:2:11")]
        z_re: Grid,
        #[arg(long, allow_hyphen_values = true, default_value = "-2:2:11")]
        z_im: Grid,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        t: f64,
    },
    /// Mandel Q against |z|.
    Mandel {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long, default_value = "closed-form")]
        method: Method,
    },
    /// Joint photon-number distribution after a 50:50 beamsplitter.
    Beamsplitter {
        #[command(flatten)]
        state: StateArgs,
    },
    /// Linear entropy of one beamsplitter arm against |z|.
    Entropy {
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Run the built-in oracle-equivalence checks.
    Selftest,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum { .. } => "spectrum",
            Command::Potential { .. } => "potential",
            Command::Eigenstate { .. } => "eigenstate",
            Command::Coeffs { .. } => "coeffs",
            Command::Energy { .. } => "energy",
            Command::Density { .. } => "density",
            Command::Cat { .. } => "cat",
            Command::Overlap { .. } => "overlap",
            Command::Wigner { .. } => "wigner",
            Command::Uncertainty { .. } => "uncertainty",
            Command::Mandel { .. } => "mandel",
            Command::Beamsplitter { .. } => "beamsplitter",
            Command::Entropy { .. } => "entropy",
            Command::Selftest => "selftest",
        }
    }
}

fn check_ladder(m: usize, mu: i64) -> Result<()> {
    validate_m(m)?;
    if !is_lowest_weight(m, mu) {
        return Err(Error::invalid(format!(
            "mu = {mu} is not a lowest weight for m = {m} (allowed: {:?})",
            lowest_weights(m)
        )));
    }
    Ok(())
}

impl RunConfig {
    /// Rejects inconsistent parameters before any computation.
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tol > 0.0 && self.tail_tol <= 1e-8) {
            return Err(Error::invalid("--tail-tol must lie in (0, 1e-8]"));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol <= 1e-3) {
            return Err(Error::invalid("--quad-tol must lie in (0, 1e-3]"));
        }
        match &self.command {
            Command::Spectrum { m, .. } | Command::Potential { m, .. } => validate_m(*m),
            Command::Eigenstate { m, nu, .. } => StateLabel::from_index(*m, *nu).map(|_| ()),
            Command::Coeffs { state }
            | Command::Density { state, .. }
            | Command::Wigner { state, .. }
            | Command::Beamsplitter { state } => check_ladder(state.m, state.mu),
            Command::Energy { sweep, .. }
            | Command::Mandel { sweep, .. }
            | Command::Entropy { sweep } => {
                check_ladder(sweep.m, sweep.mu)?;
                if sweep.z_abs.min < 0.0 {
                    return Err(Error::invalid("--z-abs must be non-negative"));
                }
                Ok(())
            }
            Command::Cat { m, mu, z, .. } => {
                check_ladder(*m, *mu)?;
                if *z < 0.0 {
                    return Err(Error::invalid("--z must be non-negative"));
                }
                Ok(())
            }
            Command::Overlap { m, mu, z_abs } => {
                validate_m(*m)?;
                if let Some(mu) = mu {
                    check_ladder(*m, *mu)?;
                }
                if z_abs.min < 0.0 {
                    return Err(Error::invalid("--z-abs must be non-negative"));
                }
                Ok(())
            }
            Command::Uncertainty { m, mu, .. } => check_ladder(*m, *mu),
            Command::Selftest => Ok(()),
        }
    }
}

impl StateArgs {
    fn spec(&self) -> Result<CoherentSpec> {
        CoherentSpec::new(self.variant, self.m, self.mu, Complex64::new(self.z_re, self.z_im))
    }
}

fn describe_coeffs(table: &mut Table, c: &crate::coherent::CoefficientVector) {
    table.meta("truncation_k", c.truncation());
    table.meta("tail_mass_bound", output::fmt_num(c.tail_mass));
}

fn density_table(
    table: &mut Table,
    coeffs: crate::coherent::CoefficientVector,
    t: &Grid,
    x: &Option<Grid>,
) -> Result<()> {
    describe_coeffs(table, &coeffs);
    let ev = StateEvaluator::new(coeffs)?;
    let xs = match x {
        Some(g) => g.values(),
        None => {
            let (a, b, n) = density_grid(ev.coefficients());
            Grid { min: a, max: b, count: n }.values()
        }
    };
    let single = t.count == 1;
    if single {
        table.columns = vec!["x".into(), "rho".into()];
        table.meta("t", output::fmt_num(t.min));
    } else {
        table.plot = PlotKind::Heatmap { outer: 0, inner: 1, value: 2 };
    }
    for tv in t.values() {
        for (xv, rho) in xs.iter().zip(ev.density_on(&xs, tv)) {
            table.push(if single { vec![*xv, rho] } else { vec![tv, *xv, rho] });
        }
    }
    Ok(())
}

fn sweep_specs(sweep: &SweepArgs) -> Result<Vec<CoherentSpec>> {
    sweep
        .z_abs
        .values()
        .into_iter()
        .map(|z| CoherentSpec::new(sweep.variant, sweep.m, sweep.mu, Complex64::new(z, 0.0)))
        .collect()
}

/// Evaluates `f` over the sweep in parallel, preserving grid order.
fn par_sweep<T: Send>(
    specs: &[CoherentSpec],
    f: impl Fn(&CoherentSpec) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    specs.par_iter().map(&f).collect()
}

/// Runs the computation and returns the data table.
pub fn execute(config: &RunConfig) -> Result<Table> {
    config.validate()?;
    let tail = config.tail_tol;
    let table = match &config.command {
        Command::Spectrum { m, count } => {
            let osc = DeformedOscillator::new(*m)?;
            let mut table = Table::new(&["nu", "energy", "mu", "k"]);
            for nu in osc.indices(*count) {
                let l = StateLabel::from_index(*m, nu)?;
                table.push(vec![nu as f64, osc.energy(nu), l.mu as f64, l.k as f64]);
            }
            table
        }
        Command::Potential { m, x } => {
            let mut table = Table::new(&["x", "V"]);
            for xv in x.values() {
                table.push(vec![xv, potential(*m, xv)]);
            }
            table
        }
        Command::Eigenstate { m, nu, x, derivatives } => {
            let label = StateLabel::from_index(*m, *nu)?;
            let ev = EigenfunctionEvaluator::for_label(&label)?;
            let xs = match x {
                Some(g) => g.values(),
                None => {
                    let h = ev.support_half_width();
                    Grid { min: -h, max: h, count: 401 }.values()
                }
            };
            let cols: &[&str] = match derivatives {
                0 => &["x", "psi"],
                1 => &["x", "psi", "d1"],
                _ => &["x", "psi", "d1", "d2"],
            };
            let mut table = Table::new(cols);
            table.meta("energy", output::fmt_num(label.energy()));
            for xv in xs {
                let b = ev.eval(xv, *derivatives);
                let mut row = vec![xv, b.psi[0]];
                if *derivatives >= 1 {
                    row.push(b.d1[0]);
                }
                if *derivatives >= 2 {
                    row.push(b.d2[0]);
                }
                table.push(row);
            }
            table
        }
        Command::Coeffs { state } => {
            let c = coefficients(&state.spec()?, tail)?;
            let mut table = Table::new(&["k", "nu", "energy", "re", "im", "prob"]);
            describe_coeffs(&mut table, &c);
            for (k, a) in c.entries.iter().enumerate() {
                let nu = c.spec.index(k);
                table.push(vec![
                    k as f64,
                    nu as f64,
                    crate::system::energy_of_index(state.m, nu),
                    a.re,
                    a.im,
                    a.norm_sqr(),
                ]);
            }
            table
        }
        Command::Energy { sweep, method } => {
            let specs = sweep_specs(sweep)?;
            let vals = par_sweep(&specs, |s| energy_expectation(s, *method))?;
            let mut table = Table::new(&["z_abs", "energy"]);
            table.meta("method", format!("{method:?}"));
            for (s, e) in specs.iter().zip(vals) {
                table.push(vec![s.z.re, e]);
            }
            table
        }
        Command::Density { state, t, x } => {
            let mut table = Table::new(&["t", "x", "rho"]);
            density_table(&mut table, coefficients(&state.spec()?, tail)?, t, x)?;
            table
        }
        Command::Cat { m, mu, z, parity, unnormalized, t, x } => {
            let spec = CoherentSpec::nonlinear(*m, *mu, *z)?;
            let c = cat_coefficients(&spec, *parity, !unnormalized, tail)?;
            let mut table = Table::new(&["t", "x", "rho"]);
            table.meta("overlap_D", output::fmt_num(overlap(*m, *mu, *z)?));
            density_table(&mut table, c, t, x)?;
            table
        }
        Command::Overlap { m, mu, z_abs } => {
            let mus = match mu {
                Some(mu) => vec![*mu],
                None => lowest_weights(*m),
            };
            let mut cols = vec!["z_abs".to_string()];
            cols.extend(mus.iter().map(|mu| format!("D_mu={mu}")));
            let zs = z_abs.values();
            let rows: Vec<Vec<f64>> = zs
                .par_iter()
                .map(|&z| {
                    let mut row = vec![z];
                    for &mu in &mus {
                        row.push(overlap(*m, mu, z)?);
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?;
            let mut table = Table::new(&[]);
            table.columns = cols;
            table.rows = rows;
            table
        }
        Command::Wigner { state, x, p, min_k } => {
            let opts = WignerOptions {
                x_min: x.min,
                x_max: x.max,
                nx: x.count,
                p_min: p.min,
                p_max: p.max,
                np: p.count,
                abs_tol: config.quad_tol,
                min_k: *min_k,
            };
            let w = wigner_grid(&state.spec()?, &opts)?;
            let mut table = Table::new(&["x", "p", "W"]);
            table.meta("truncation_k", w.truncation);
            table.meta("min", output::fmt_num(w.min()));
            table.meta("max", output::fmt_num(w.max()));
            table.meta("normalization", output::fmt_num(w.normalization()));
            table.meta("negative_volume", output::fmt_num(w.negative_volume()));
            table.meta("max_imag_residue", output::fmt_num(w.max_imag_residue));
            for (i, xv) in w.x.iter().enumerate() {
                for (j, pv) in w.p.iter().enumerate() {
                    table.push(vec![*xv, *pv, w.values[i][j]]);
                }
            }
            table.plot = PlotKind::Heatmap { outer: 0, inner: 1, value: 2 };
            table
        }
        Command::Uncertainty { variant, m, mu, z_re, z_im, t } => {
            let mut coeffs = Vec::new();
            for re in z_re.values() {
                for im in z_im.values() {
                    let s = CoherentSpec::new(*variant, *m, *mu, Complex64::new(re, im))?;
                    coeffs.push(coefficients(&s, tail)?.evolved(*t));
                }
            }
            let k = coeffs.iter().map(|c| c.truncation()).max().unwrap_or(0);
            if k > MAX_MOMENT_K {
                return Err(Error::invalid(format!(
                    "z grid needs {k} terms, beyond the moment-matrix limit {MAX_MOMENT_K}"
                )));
            }
            let mats = moment_matrices(*m, *mu, k)?;
            let vals: Vec<_> = coeffs
                .par_iter()
                .map(|c| mats.uncertainty(c))
                .collect::<Result<_>>()?;
            let mut table = Table::new(&["z_re", "z_im", "sigma_x", "sigma_p", "product"]);
            table.meta("truncation_k", k);
            for (c, u) in coeffs.iter().zip(vals) {
                table.push(vec![c.spec.z.re, c.spec.z.im, u.sigma_x, u.sigma_p, u.product]);
            }
            // evolved() rotates z; report the requested grid point
            let grid: Vec<(f64, f64)> = z_re
                .values()
                .into_iter()
                .flat_map(|re| z_im.values().into_iter().map(move |im| (re, im)))
                .collect();
            for (row, (re, im)) in table.rows.iter_mut().zip(grid) {
                row[0] = re;
                row[1] = im;
            }
            if z_re.count > 1 && z_im.count > 1 {
                table.plot = PlotKind::Heatmap { outer: 0, inner: 1, value: 4 };
            }
            table
        }
        Command::Mandel { sweep, method } => {
            let specs = sweep_specs(sweep)?;
            let vals = par_sweep(&specs, |s| number_moments(s, *method))?;
            let mut table = Table::new(&["z_abs", "Q", "mean_n"]);
            table.meta("method", format!("{method:?}"));
            for (s, nm) in specs.iter().zip(vals) {
                table.push(vec![s.z.re, nm.mandel_q(), nm.mean]);
            }
            table
        }
        Command::Beamsplitter { state } => {
            let c = coefficients(&state.spec()?, tail)?;
            let out = split(&c);
            let p = two_photon_distribution(&out);
            let mut table = Table::new(&["n1", "n2", "P"]);
            describe_coeffs(&mut table, &c);
            table.meta("total_mass", output::fmt_num(p.total_mass));
            table.meta("asymmetry", output::fmt_num(p.asymmetry()));
            table.meta("factorization_residual", output::fmt_num(p.factorization_residual()));
            for (n1, row) in p.p.iter().enumerate() {
                for (n2, v) in row.iter().enumerate() {
                    table.push(vec![n1 as f64, n2 as f64, *v]);
                }
            }
            table.plot = PlotKind::Heatmap { outer: 0, inner: 1, value: 2 };
            table
        }
        Command::Entropy { sweep } => {
            let specs = sweep_specs(sweep)?;
            let vals = par_sweep(&specs, |s| {
                Ok(linear_entropy(&split(&coefficients(s, tail)?)))
            })?;
            let mut table = Table::new(&["z_abs", "S", "error_bound"]);
            for (s, e) in specs.iter().zip(vals) {
                table.push(vec![s.z.re, e.value, e.error_bound]);
            }
            table
        }
        Command::Selftest => {
            let outcomes = selftest::run_all();
            let mut table = Table::new(&["check", "passed"]);
            for (i, o) in outcomes.iter().enumerate() {
                table.meta(o.name, format!("{} ({})", if o.passed { "pass" } else { "FAIL" }, o.detail));
                table.push(vec![i as f64, if o.passed { 1.0 } else { 0.0 }]);
            }
            if let Some(o) = outcomes.iter().find(|o| !o.passed) {
                return Err(Error::numerical("selftest", format!("{} failed: {}", o.name, o.detail), f64::NAN));
            }
            table
        }
    };
    Ok(table)
}

fn write_table(config: &RunConfig, table: &Table) -> std::io::Result<()> {
    let mut sink: Box<dyn Write> = match &config.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    };
    match config.format {
        Format::Csv => output::write_csv(&mut sink, config, table)?,
        Format::Json => output::write_json(&mut sink, config, table)?,
    }
    sink.flush()
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

/// Parses `args` (program name first), runs and writes output. Returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    if let Command::Selftest = config.command {
        let outcomes = selftest::run_all();
        for o in &outcomes {
            println!("[{}] {}: {}", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
        }
        return if outcomes.iter().all(|o| o.passed) { EXIT_OK } else { EXIT_NUMERICAL };
    }
    let table = match execute(&config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("ladder-cs {}: {e}", config.command.name());
            return if e.is_numerical() { EXIT_NUMERICAL } else { EXIT_USAGE };
        }
    };
    if let Err(e) = write_table(&config, &table) {
        eprintln!("ladder-cs: cannot write output: {e}");
        return EXIT_USAGE;
    }
    if let Some(path) = &config.plot {
        if let Err(e) = plot::render(&table, path) {
            eprintln!("ladder-cs: {e}");
            return EXIT_USAGE;
        }
    }
    EXIT_OK
}
