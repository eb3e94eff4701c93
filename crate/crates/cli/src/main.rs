use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use ech_calc::connect::{self, ConeData, Verdict};
use ech_calc::ech_core::{truncate, FilteredTower, Stabilization};
use ech_calc::homalg::{homology, GradedComplex};
use ech_calc::index::flow::{default_times, flow_report};
use ech_calc::index::spectrum::Matrix2;
use ech_calc::index::{
    asymptotic_spectrum, check_adjunction, check_index_inequality, check_spectrum, cz_elliptic, cz_hyperbolic,
    presets, spectrum_csv, Trivialization,
};
use ech_calc::rational::{self, format as fmt_q, Rational};
use ech_calc::spectral::{base_tower, conjecture_sweep, spectrum_table, sweep_csv};
use ech_calc::{io, models, Error};

mod spec;

#[derive(Parser, Debug)]
#[command(name = "ech", version, about = "Filtered ECH chain models, connected sums and index checks")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Graded homology dims and induced U ranks.
    Homology {
        /// Model spec or complex file.
        model: String,
        /// Truncate at this action first.
        #[arg(long = "L")]
        l: Option<String>,
    },
    /// Connected-sum cone of two models, compared with the derived tensor product.
    Consum {
        first: String,
        second: String,
        /// Action of the handle orbit h (default: smallest positive action / 10^6).
        #[arg(long)]
        eps: Option<String>,
        /// Homotopy K on the tensor complex, as [source, target] id pairs.
        #[arg(long, conflicts_with = "random_k")]
        k_file: Option<PathBuf>,
        /// Draw a random admissible K with this density (uses --seed).
        #[arg(long)]
        random_k: Option<f64>,
        /// Write the cone here (filtered at --L if given).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Block-structure sidecar (default: next to --output).
        #[arg(long)]
        sidecar: Option<PathBuf>,
        #[arg(long = "L")]
        l: Option<String>,
    },
    /// Spectral invariants of the connected sum against the max-convolution.
    Conjecture {
        first: String,
        second: String,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
        /// Comma-separated handle actions.
        #[arg(long, required = true)]
        eps_list: String,
    },
    /// Spectral invariants c_0..c_kmax of one model.
    Spectral {
        model: String,
        #[arg(long, default_value_t = 10)]
        kmax: usize,
    },
    /// Fredholm and ECH index of a preset curve, or a Conley–Zehnder index.
    Index {
        /// PS, PN, cylinder, singular, or h.
        #[arg(long, required_unless_present = "cz")]
        preset: Option<String>,
        /// elliptic:THETA[:K] or hyperbolic:W[:K].
        #[arg(long)]
        cz: Option<String>,
    },
    /// Diagnostics of the handle's linearized flow.
    Flow {
        /// Sample times (default 0.1, 0.2, …, 10).
        #[arg(long = "t", value_delimiter = ',', allow_negative_numbers = true)]
        times: Vec<f64>,
    },
    /// Spectrum of the asymptotic operator J0 d/dt + S.
    Spectrum {
        /// Row-major entries of the symmetric 2×2 matrix S.
        #[arg(long = "S", allow_hyphen_values = true)]
        s: String,
        #[arg(long, default_value_t = 64)]
        modes: usize,
        /// Conley–Zehnder index for the extremality check.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        cz: i64,
    },
    /// Export a model as a complex file.
    Model {
        spec: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Lattice CSV (ellipsoids only).
        #[arg(long)]
        lattice: Option<PathBuf>,
    },
    /// Filtered tower of a model: stabilization per grading, optional export.
    Tower {
        model: String,
        /// Comma-separated thresholds (default: one per action gap).
        #[arg(long = "L")]
        thresholds: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Bad invocation rather than bad data.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.downcast_ref::<Usage>().is_some() {
            return 1;
        }
        if let Some(e) = cause.downcast_ref::<Error>() {
            return if e.is_parse() { 1 } else { 2 };
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 1;
        }
    }
    2
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: &Cli) -> Result<String> {
    match &cli.command {
        Command::Homology { model, l } => cmd_homology(cli, model, l.as_deref()),
        Command::Consum {
            first,
            second,
            eps,
            k_file,
            random_k,
            output,
            sidecar,
            l,
        } => cmd_consum(cli, first, second, eps.as_deref(), k_file.as_ref(), *random_k, output.as_ref(), sidecar.as_ref(), l.as_deref()),
        Command::Conjecture {
            first,
            second,
            kmax,
            eps_list,
        } => {
            let eps = rational::parse_list(eps_list)?;
            let c1 = spec::load(first, cli.seed)?;
            let c2 = spec::load(second, cli.seed)?;
            let rows = conjecture_sweep(&c1, &c2, *kmax, &eps)?;
            Ok(render(cli.format, sweep_csv(&rows)))
        }
        Command::Spectral { model, kmax } => {
            let c = spec::load(model, cli.seed)?;
            let table = spectrum_table(&base_tower(c)?, *kmax)?;
            Ok(render(cli.format, table.to_csv()))
        }
        Command::Index { preset, cz } => cmd_index(cli, preset.as_deref(), cz.as_deref()),
        Command::Flow { times } => cmd_flow(cli, times),
        Command::Spectrum { s, modes, cz } => cmd_spectrum(cli, s, *modes, *cz),
        Command::Model { spec, output, lattice } => cmd_model(cli, spec, output.as_ref(), lattice.as_ref()),
        Command::Tower { model, thresholds, out } => cmd_tower(cli, model, thresholds.as_deref(), out.as_ref()),
    }
}

/// Pads CSV into aligned columns; both formats carry the same cells.
fn render(format: Format, csv: String) -> String {
    if format == Format::Csv {
        return csv;
    }
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..ncols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

fn validated(c: GradedComplex) -> Result<GradedComplex> {
    let report = c.validate();
    if !report.is_empty() {
        return Err(Error::Invalid(report).into());
    }
    Ok(c)
}

fn cmd_homology(cli: &Cli, model: &str, l: Option<&str>) -> Result<String> {
    let mut c = validated(spec::load(model, cli.seed)?)?;
    if let Some(l) = l {
        c = truncate(&c, rational::parse(l)?)?;
    }
    let h = homology(&c)?;
    let ranks = h.u_ranks();
    match cli.format {
        Format::Csv => {
            let mut out = String::from("grading,dim,u_rank,exact\n");
            for (g, d) in h.dims() {
                let r = ranks.as_ref().and_then(|r| r.get(&g)).map_or(String::new(), |r| r.to_string());
                let _ = writeln!(out, "{g},{d},{r},{}", h.exact_in(g));
            }
            Ok(out)
        }
        Format::Table => {
            let mut out = String::new();
            for (g, d) in h.dims() {
                let _ = write!(out, "g:{g} dim {d}");
                if let Some(r) = ranks.as_ref().and_then(|r| r.get(&g)) {
                    let _ = write!(out, "  U-rank {r}");
                }
                if !h.exact_in(g) {
                    out.push_str("  (beyond truncation)");
                }
                out.push('\n');
            }
            let _ = writeln!(out, "total dim {}", h.total_dim());
            Ok(out)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_consum(
    cli: &Cli,
    first: &str,
    second: &str,
    eps: Option<&str>,
    k_file: Option<&PathBuf>,
    random_k: Option<f64>,
    output: Option<&PathBuf>,
    sidecar: Option<&PathBuf>,
    l: Option<&str>,
) -> Result<String> {
    let c1 = spec::load(first, cli.seed)?;
    let c2 = spec::load(second, cli.seed)?;
    let eps = match eps {
        Some(e) => rational::parse(e)?,
        None => {
            c1.umap().ok_or(Error::MissingUmap("first summand"))?;
            c2.umap().ok_or(Error::MissingUmap("second summand"))?;
            connect::default_eps(&c1, &c2)?
        }
    };
    let k = match (k_file, random_k) {
        (Some(path), _) => {
            let t = ech_calc::homalg::tensor(&c1, &c2)?;
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            Some(io::map_from_json(&text, &t)?)
        }
        (None, Some(density)) => {
            if !(0.0..=1.0).contains(&density) {
                bail!(Usage("--random-k must lie in [0, 1]".into()));
            }
            Some(connect::random_homotopy(&ech_calc::homalg::tensor(&c1, &c2)?, cli.seed, density))
        }
        (None, None) => None,
    };
    let d = ConeData::new(c1, c2, eps, k)?;
    let cone = match l {
        Some(l) => connect::filtered_cone(&d, rational::parse(l)?)?,
        None => connect::build_cone_complex(&d)?,
    };
    if let Some(path) = output {
        io::write_complex(path, &cone).with_context(|| format!("writing {}", path.display()))?;
        let side = sidecar.cloned().unwrap_or_else(|| path.with_extension("blocks.json"));
        let blocks = connect::BlockDifferential::new(&d).sidecar(d.tensor());
        fs::write(&side, io::sidecar_to_json(&blocks)).with_context(|| format!("writing {}", side.display()))?;
    } else if let Some(side) = sidecar {
        let blocks = connect::BlockDifferential::new(&d).sidecar(d.tensor());
        fs::write(side, io::sidecar_to_json(&blocks))?;
    }
    let rows = connect::compare_with_derived(&d)?;
    let mut csv = String::from("grading,cone,derived,verdict\n");
    for r in &rows {
        let v = match r.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Excluded => "EXCLUDED",
        };
        let _ = writeln!(csv, "{},{},{},{v}", r.grading, r.cone, r.derived);
    }
    let mut out = String::new();
    if cli.format == Format::Table {
        let _ = writeln!(out, "eps {}  generators {}", fmt_q(&d.eps), cone.len());
    }
    out.push_str(&render(cli.format, csv));
    Ok(out)
}

fn cmd_index(cli: &Cli, preset: Option<&str>, cz: Option<&str>) -> Result<String> {
    if let Some(cz) = cz {
        let parts: Vec<&str> = cz.split(':').collect();
        let iterate = |p: Option<&&str>| -> Result<i64> {
            match p {
                None => Ok(1),
                Some(k) => match k.parse::<i64>() {
                    Ok(k) if k >= 1 => Ok(k),
                    _ => Err(Usage(format!("bad iterate {k:?}")).into()),
                },
            }
        };
        let value = match parts.as_slice() {
            ["elliptic", theta, rest @ ..] if rest.len() <= 1 => {
                let k = iterate(rest.first())?;
                cz_elliptic(rational::parse(theta)? * Rational::from_integer(k as i128))?
            }
            ["hyperbolic", w, rest @ ..] if rest.len() <= 1 => {
                let w: i64 = w.parse().map_err(|_| Usage(format!("bad winding {w:?}")))?;
                cz_hyperbolic(w * iterate(rest.first())?)
            }
            _ => bail!(Usage(format!("--cz expects elliptic:THETA[:K] or hyperbolic:W[:K], got {cz:?}"))),
        };
        return Ok(match cli.format {
            Format::Csv => format!("orbit,cz\n{cz},{value}\n"),
            Format::Table => format!("CZ({cz})={value}\n"),
        });
    }
    let name = preset.expect("clap requires one of --preset/--cz");
    if name.eq_ignore_ascii_case("h") {
        let h = presets::h_orbit();
        let value = ech_calc::index::cz_iterate(&h, 1, &Trivialization::reference())?;
        return Ok(match cli.format {
            Format::Csv => format!("orbit,cz\nh,{value}\n"),
            Format::Table => format!("CZ_tau0(h)={value}\n"),
        });
    }
    let curve = presets::by_name(name)
        .ok_or_else(|| Usage(format!("unknown preset {name:?}; expected one of {:?} or h", presets::NAMES)))?;
    let r = check_index_inequality(&curve, &Trivialization::reference())?;
    let adj = check_adjunction(&curve);
    Ok(match cli.format {
        Format::Csv => format!(
            "preset,ind,ech_index,inequality,equality,adjunction\n{name},{},{},{},{},{adj}\n",
            r.ind, r.ech, r.ok, r.equality
        ),
        Format::Table => format!(
            "ind={} I={}  ind<=I {}  equality {}  adjunction residual {adj}\n",
            r.ind,
            r.ech,
            if r.ok { "PASS" } else { "FAIL" },
            r.equality
        ),
    })
}

fn cmd_flow(cli: &Cli, times: &[f64]) -> Result<String> {
    let ts = if times.is_empty() { default_times() } else { times.to_vec() };
    let report = flow_report(&ts, 1e-9, 1e-6);
    let mut csv = String::from("t,expm_err,group_err,symplectic_err,identity_err,derivative_err,eig_max,eig_min,verdict\n");
    for s in &report.samples {
        let (hi, lo) = s.lower_eigenvalues.map_or(("-".into(), "-".into()), |(a, b)| (format!("{a:.6e}"), format!("{b:.6e}")));
        let ok = [s.expm_err, s.group_err, s.symplectic_err, s.identity_err, s.eigenvalue_err, s.eigenline_err]
            .iter()
            .all(|e| *e <= report.tolerance)
            && s.derivative_err <= report.fd_tolerance;
        let _ = writeln!(
            csv,
            "{},{:.3e},{:.3e},{:.3e},{:.3e},{:.3e},{hi},{lo},{}",
            s.t,
            s.expm_err,
            s.group_err,
            s.symplectic_err,
            s.identity_err,
            s.derivative_err,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    let mut out = render(cli.format, csv);
    if cli.format == Format::Table {
        let _ = writeln!(
            out,
            "CZ_tau0(h)={}  max err {:.3e}  overall {}",
            report.cz,
            report.max_err(),
            if report.pass() { "PASS" } else { "FAIL" }
        );
    }
    Ok(out)
}

fn cmd_spectrum(cli: &Cli, s: &str, modes: usize, cz: i64) -> Result<String> {
    let entries: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Usage(format!("--S expects four comma-separated numbers, got {s:?}")))?;
    if entries.len() != 4 {
        bail!(Usage(format!("--S expects four entries, got {}", entries.len())));
    }
    let m = Matrix2::new(entries[0], entries[1], entries[2], entries[3]);
    let pairs = asymptotic_spectrum(&m, modes)?;
    let csv = spectrum_csv(&pairs);
    if cli.format == Format::Csv {
        return Ok(csv);
    }
    let checks = check_spectrum(&pairs, modes, cz);
    let verdict = |b: bool| if b { "PASS" } else { "FAIL" };
    let zero: Vec<String> = pairs.iter().filter(|p| p.winding == 0).map(|p| format!("{:.12}", p.eigenvalue)).collect();
    let mut out = render(Format::Table, csv);
    let _ = writeln!(out, "winding 0 eigenvalues: {}", zero.join(", "));
    let opt = |x: Option<i64>| x.map_or("-".to_string(), |w| w.to_string());
    let _ = writeln!(out, "largest winding with positive eigenvalue: {}", opt(checks.max_winding_positive));
    let _ = writeln!(out, "smallest winding with negative eigenvalue: {}", opt(checks.min_winding_negative));
    let _ = writeln!(out, "monotone: {}", verdict(checks.monotone));
    let _ = writeln!(out, "two per winding: {}", verdict(checks.two_per_winding));
    let _ = writeln!(out, "extremal for CZ={cz}: {}", verdict(checks.extremal));
    Ok(out)
}

fn cmd_model(cli: &Cli, spec_str: &str, output: Option<&PathBuf>, lattice: Option<&PathBuf>) -> Result<String> {
    let parsed = spec::ModelSpec::parse(spec_str)?;
    if let Some(path) = lattice {
        let spec::ModelSpec::Ellipsoid { a, b, l } = &parsed else {
            bail!(Usage("--lattice needs an ellipsoid spec".into()));
        };
        let m = models::ellipsoid(*a, *b, *l)?;
        fs::write(path, m.lattice_csv()).with_context(|| format!("writing {}", path.display()))?;
    }
    let c = parsed.build(cli.seed)?;
    let json = io::complex_to_json(&c);
    match output {
        Some(path) => {
            fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
            Ok(String::new())
        }
        None => Ok(json),
    }
}

fn cmd_tower(cli: &Cli, model: &str, thresholds: Option<&str>, out: Option<&PathBuf>) -> Result<String> {
    let c = validated(spec::load(model, cli.seed)?)?;
    let tower = match thresholds {
        Some(list) => FilteredTower::new(c, rational::parse_list(list)?)?,
        None => FilteredTower::at_action_gaps(c)?,
    };
    if let Some(dir) = out {
        io::write_tower(dir, &tower)?;
    }
    let mut csv = String::from("grading,level,threshold\n");
    for (g, s) in tower.stabilization_profiles()? {
        match s {
            Stabilization::At { index, threshold } => {
                let _ = writeln!(csv, "{g},{index},{}", fmt_q(&threshold));
            }
            Stabilization::NotStabilized => {
                let _ = writeln!(csv, "{g},not-stabilized,");
            }
        }
    }
    Ok(render(cli.format, csv))
}
