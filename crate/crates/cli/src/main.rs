//! Command-line front end: parse forms, ideals, and decompositions; run the
//! exact computations; print human-readable tables and machine-readable
//! certificates.
//!
//! Exit codes: 0 on success, 2 on user or parse errors, 3 on internal
//! consistency failures (a flattening family violating its point-rank law).

use clap::{Parser, Subcommand};
use flatlab::scalar::is_prime_u64;
use flatlab::{
    cactus_lower_bound, default_spec_grid_capped, gap_regime, in_span, length,
    parse_form, serialize_certificate, verify_decomposition, BoundOptions, Decomposition, Error,
    FieldTag, FlatteningSpec, GapRegime, HomogeneousIdeal, SparseMatrix, WitnessPolicy,
    DEFAULT_GRID_CAP, DEFAULT_SEED,
};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "flatlab",
    version,
    about = "Exact flattening matrices of homogeneous forms and certified lower bounds \
             for cactus and Waring rank"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the shape and rank of a catalecticant matrix of a form.
    Cat {
        /// File containing one homogeneous form in x variables
        form: PathBuf,
        /// Number of variables minus one (variables are x0..xn)
        #[arg(long)]
        n: usize,
        /// Degree of the form
        #[arg(long)]
        d: usize,
        /// Catalecticant degree, 1 <= a <= d-1
        #[arg(long)]
        a: usize,
        /// Work over F_p instead of the rationals
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
        /// Also print the matrix (up to 30x30)
        #[arg(long)]
        verbose: bool,
    },
    /// Evaluate a grid of flattenings and print a rank-bound certificate.
    Bound {
        /// File containing one homogeneous form in x variables
        form: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// `default` or a comma-separated list like `cat:1,koszul:1:0`
        #[arg(long, default_value = "default")]
        grid: String,
        /// Write the certificate as canonical JSON to this path
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
        /// Seed for the divisor self-check sampling
        #[arg(long)]
        seed: Option<u64>,
        /// Evaluate grid entries on this many threads
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Skip specs whose matrix would exceed this many entries
        #[arg(long, default_value_t = DEFAULT_GRID_CAP)]
        cap: usize,
        /// Do not attach witness minors
        #[arg(long)]
        no_witness: bool,
    },
    /// Test whether a form lies in the span of the scheme cut out by an ideal.
    Inspan {
        /// File containing one homogeneous form in x variables
        form: PathBuf,
        /// File with one dual-variable generator per line
        ideal: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
    },
    /// Compute the stabilized Hilbert function value (scheme length) of an ideal.
    Length {
        /// File with one dual-variable generator per line
        ideal: PathBuf,
        #[arg(long)]
        n: usize,
        /// Highest degree to try before reporting instability
        #[arg(long, default_value_t = 20)]
        tmax: usize,
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
    },
    /// Check an explicit power-sum decomposition against a form.
    Verify {
        /// File containing one homogeneous form in x variables
        form: PathBuf,
        /// File with one `coeff ; c0,c1,...,cn` term per line
        decomposition: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long = "mod", value_name = "P")]
        modulus: Option<u64>,
    },
    /// Report whether (n, d, r) lies in the regime where minor equations
    /// cannot cut out the rank-<=r locus.
    Gap {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        r: usize,
    },
}

enum AppError {
    User(String),
    Internal(String),
}

impl fmt::Display for AppError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AppError::User(m) | AppError::Internal(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        match e {
            Error::InternalConsistency(_) => AppError::Internal(e.to_string()),
            _ => AppError::User(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                AppError::Internal(_) => ExitCode::from(3),
                AppError::User(_) => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<(), AppError> {
    match command {
        Command::Cat {
            form,
            n,
            d,
            a,
            modulus,
            verbose,
        } => cmd_cat(&form, n, d, a, modulus, verbose),
        Command::Bound {
            form,
            n,
            d,
            grid,
            json,
            modulus,
            seed,
            jobs,
            cap,
            no_witness,
        } => cmd_bound(&form, n, d, &grid, json.as_deref(), modulus, seed, jobs, cap, no_witness),
        Command::Inspan {
            form,
            ideal,
            n,
            d,
            modulus,
        } => cmd_inspan(&form, &ideal, n, d, modulus),
        Command::Length {
            ideal,
            n,
            tmax,
            modulus,
        } => cmd_length(&ideal, n, tmax, modulus),
        Command::Verify {
            form,
            decomposition,
            n,
            d,
            modulus,
        } => cmd_verify(&form, &decomposition, n, d, modulus),
        Command::Gap { n, d, r } => cmd_gap(n, d, r),
    }
}

fn field_for(modulus: Option<u64>, d: usize) -> Result<FieldTag, AppError> {
    match modulus {
        None => Ok(FieldTag::Rationals),
        Some(p) => {
            if !is_prime_u64(p) {
                return Err(AppError::User(format!("--mod {p}: modulus must be prime")));
            }
            if p as usize <= d {
                eprintln!(
                    "warning: over F_{p} with p <= d = {d} the contraction pairing differs \
                     from the factorial-scaled one; rank-bound interpretation is only \
                     claimed for characteristic 0 or p > d"
                );
            }
            Ok(FieldTag::PrimeField(p))
        }
    }
}

fn read(path: &Path) -> Result<String, AppError> {
    fs::read_to_string(path)
        .map_err(|e| AppError::User(format!("cannot read {}: {e}", path.display())))
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, AppError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("FLATLAB_SEED") {
        Ok(text) => text
            .parse()
            .map_err(|_| AppError::User(format!("FLATLAB_SEED=`{text}` is not a valid seed"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn cmd_cat(
    form_path: &Path,
    n: usize,
    d: usize,
    a: usize,
    modulus: Option<u64>,
    verbose: bool,
) -> Result<(), AppError> {
    let field = field_for(modulus, d)?;
    let f = parse_form(&read(form_path)?, n, d, field)?;
    let spec = FlatteningSpec::catalecticant(n, d, a)?;
    let m = spec.matrix(&f)?;
    println!("{spec} of {f}");
    println!("shape {}x{}", m.nrows(), m.ncols());
    println!("rank {}", m.rank());
    if verbose {
        print_matrix(&m);
    }
    Ok(())
}

fn print_matrix(m: &SparseMatrix) {
    if m.nrows() > 30 || m.ncols() > 30 {
        println!("(matrix larger than 30x30, not printed)");
        return;
    }
    let cells: Vec<Vec<String>> = (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m.get(r, c).to_string()).collect())
        .collect();
    let row_labels: Vec<String> = match m.row_labels() {
        Some(ls) => ls.to_vec(),
        None => (0..m.nrows()).map(|r| r.to_string()).collect(),
    };
    let label_w = row_labels.iter().map(|l| l.chars().count()).max().unwrap_or(0);
    let cell_w = cells
        .iter()
        .flatten()
        .map(|s| s.chars().count())
        .max()
        .unwrap_or(1);
    for (r, row) in cells.iter().enumerate() {
        let padded: Vec<String> = row.iter().map(|s| format!("{s:>cell_w$}")).collect();
        println!("{:>label_w$} | {}", row_labels[r], padded.join(" "));
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_bound(
    form_path: &Path,
    n: usize,
    d: usize,
    grid: &str,
    json: Option<&Path>,
    modulus: Option<u64>,
    seed: Option<u64>,
    jobs: usize,
    cap: usize,
    no_witness: bool,
) -> Result<(), AppError> {
    let field = field_for(modulus, d)?;
    let f = parse_form(&read(form_path)?, n, d, field)?;
    let specs: Vec<FlatteningSpec> = if grid == "default" {
        default_spec_grid_capped(n, d, cap)?
    } else {
        grid.split(',')
            .map(|s| FlatteningSpec::parse(s.trim(), n, d))
            .collect::<Result<_, _>>()?
    };
    let opts = BoundOptions {
        witnesses: if no_witness {
            WitnessPolicy::Never
        } else {
            WitnessPolicy::default()
        },
        jobs: jobs.max(1),
        seed: resolve_seed(seed)?,
    };
    let cert = cactus_lower_bound(&f, &specs, &opts)?;

    println!("form: {}  (n={}, d={}, field {})", cert.form, cert.n, cert.d, cert.field);
    println!(
        "{:<22} {:>9} {:>6} {:>4} {:>6}  witness",
        "spec", "shape", "rank", "e", "bound"
    );
    for e in &cert.entries {
        let witness = match &e.witness {
            Some((rows, cols)) => format!("rows {rows:?} cols {cols:?}"),
            None => "-".to_string(),
        };
        println!(
            "{:<22} {:>9} {:>6} {:>4} {:>6}  {witness}",
            e.spec.to_string(),
            format!("{}x{}", e.rows, e.cols),
            e.rank,
            e.divisor,
            e.bound
        );
    }
    println!(
        "best lower bound: {}  (cactus rank and Waring rank)",
        cert.best_bound
    );
    if let Some(path) = json {
        let text = serialize_certificate(&cert)?;
        fs::write(path, text + "\n")
            .map_err(|e| AppError::User(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn cmd_inspan(
    form_path: &Path,
    ideal_path: &Path,
    n: usize,
    d: usize,
    modulus: Option<u64>,
) -> Result<(), AppError> {
    let field = field_for(modulus, d)?;
    let f = parse_form(&read(form_path)?, n, d, field)?;
    let ideal = HomogeneousIdeal::parse(&read(ideal_path)?, n, field)?;
    println!("{}", in_span(&ideal, &f)?);
    Ok(())
}

fn cmd_length(
    ideal_path: &Path,
    n: usize,
    tmax: usize,
    modulus: Option<u64>,
) -> Result<(), AppError> {
    let field = field_for(modulus, 0)?;
    let ideal = HomogeneousIdeal::parse(&read(ideal_path)?, n, field)?;
    match length(&ideal, tmax) {
        Ok(len) => println!("length {len}"),
        Err(Error::Unstable { t_max }) => println!(
            "unstable: Hilbert function did not stabilize by t = {t_max}; \
             raise --tmax (the ideal may not be zero-dimensional)"
        ),
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn cmd_verify(
    form_path: &Path,
    decomposition_path: &Path,
    n: usize,
    d: usize,
    modulus: Option<u64>,
) -> Result<(), AppError> {
    let field = field_for(modulus, d)?;
    let f = parse_form(&read(form_path)?, n, d, field)?;
    let decomposition = Decomposition::parse(&read(decomposition_path)?, n, field)?;
    if verify_decomposition(&f, &decomposition)? {
        println!("ok (r = {})", decomposition.r());
    } else {
        println!("fail");
    }
    Ok(())
}

fn cmd_gap(n: usize, d: usize, r: usize) -> Result<(), AppError> {
    if n == 0 || d == 0 || r == 0 {
        return Err(AppError::User("gap requires n, d, r >= 1".into()));
    }
    match gap_regime(n, d, r) {
        GapRegime::InsufficientFlattenings => println!(
            "insufficient-flattenings: for n={n}, d={d} no family of minor equations \
             of this kind cuts out the rank-<={r} locus"
        ),
        GapRegime::NoClaim => println!("no-claim"),
    }
    Ok(())
}
