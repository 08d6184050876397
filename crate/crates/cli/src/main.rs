use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use pdiv_cli::job::{parse_job, write_job, ErrorKind, Pipeline};
use pdiv_cli::run::{exit_code, run_job, Options, EXIT_IO, EXIT_PARSE, EXIT_SEMANTIC};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PipelineArg {
    General,
    Torus,
    #[value(name = "cox-s5")]
    CoxS5,
    Hilbert,
    Subdivide,
    Eval,
}

impl From<PipelineArg> for Pipeline {
    fn from(p: PipelineArg) -> Self {
        match p {
            PipelineArg::General => Pipeline::General,
            PipelineArg::Torus => Pipeline::Torus,
            PipelineArg::CoxS5 => Pipeline::CoxS5,
            PipelineArg::Hilbert => Pipeline::Hilbert,
            PipelineArg::Subdivide => Pipeline::Subdivide,
            PipelineArg::Eval => Pipeline::Eval,
        }
    }
}

/// Generators of multigraded section algebras of polyhedral divisors.
#[derive(Parser, Debug)]
#[command(name = "pdivgen", version)]
struct Cli {
    /// Job file.
    job: PathBuf,
    /// Overrides the pipeline named in the job.
    #[arg(long, value_enum)]
    pipeline: Option<PipelineArg>,
    /// Writes the generator file here; overrides `output` in the job.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Cap on every search loop.
    #[arg(long)]
    max_iterations: Option<usize>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the weight in the job, e.g. `--weight 0,1`.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    weight: Option<Vec<i64>>,
    /// Runs the seeded property checks after the pipeline.
    #[arg(long)]
    verify: bool,
}

fn export_path(p: &Path) -> PathBuf {
    let mut s = p.as_os_str().to_owned();
    s.push(".presentation");
    PathBuf::from(s)
}

fn real_main() -> Result<(), i32> {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| {
                eprintln!("error: {e}");
                EXIT_IO
            })?;
    }
    let text = std::fs::read_to_string(&cli.job).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", cli.job.display());
        EXIT_IO
    })?;
    let fail = |e: pdiv_cli::job::JobError| {
        eprintln!("{}: {e}", cli.job.display());
        match e.kind {
            ErrorKind::Syntax => EXIT_PARSE,
            ErrorKind::Semantic => EXIT_SEMANTIC,
        }
    };
    let mut job = parse_job(&text).map_err(fail)?;
    if cli.pipeline.is_some() || cli.weight.is_some() {
        if let Some(p) = cli.pipeline {
            job.pipeline = p.into();
        }
        if let Some(w) = &cli.weight {
            job.weight = Some(w.iter().map(|&x| x.into()).collect());
        }
        job = parse_job(&write_job(&job)).map_err(|mut e| {
            e.line = 0;
            fail(e)
        })?;
    }
    let opts = Options {
        max_iterations: cli.max_iterations,
        verify: cli.verify,
        seed: 0,
    };
    let out = run_job(&job, &opts).map_err(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    })?;
    print!("{}", out.report);
    let target = cli.output.or_else(|| job.output.as_ref().map(PathBuf::from));
    if let (Some(path), Some(gens)) = (&target, &out.generators) {
        let write = |p: &Path, s: &str| {
            std::fs::write(p, s).map_err(|e| {
                eprintln!("error: cannot write {}: {e}", p.display());
                EXIT_IO
            })
        };
        write(path, gens)?;
        if let Some(x) = &out.export {
            write(&export_path(path), x)?;
        }
    }
    if out.verify_failed {
        eprintln!("error: verification failed");
        return Err(EXIT_IO);
    }
    Ok(())
}

fn main() -> ExitCode {
    match real_main() {
        Ok(()) => ExitCode::SUCCESS,
        Err(c) => ExitCode::from(c as u8),
    }
}
