use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use famzeta::cli::{read_batch_file, run, RunRequest, EXIT_PARSE};

/// Zeta functions of fibers of a characteristic-2 hyperelliptic family.
#[derive(Parser, Debug)]
#[command(name = "famzeta", version)]
struct Args {
    /// Family file with [field], [family] and optional [options] sections.
    family: PathBuf,
    /// Degree of the parameter field over F_q.
    #[arg(short, long, default_value_t = 1)]
    n: usize,
    /// Modulus m(t) of F_{2^(an)} over F_2; defaults to the smallest irreducible.
    #[arg(long)]
    modulus: Option<String>,
    /// The parameter, as a polynomial in t over F_2 (t generates F_{2^(an)}).
    #[arg(short, long)]
    gamma: Option<String>,
    /// File with one parameter per line, evaluated in one batch.
    #[arg(long)]
    batch: Option<PathBuf>,
    #[arg(long)]
    dump_precision: bool,
    #[arg(long)]
    dump_frobenius: bool,
    #[arg(long)]
    verify_oracle: bool,
    #[arg(long, value_name = "PATH")]
    save_family_frobenius: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    load_family_frobenius: Option<PathBuf>,
}

fn read(path: &PathBuf) -> Result<String, ExitCode> {
    std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {e}", path.display());
        ExitCode::from(EXIT_PARSE as u8)
    })
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_PARSE as u8) } else { ExitCode::SUCCESS };
        }
    };
    let family = match read(&args.family) {
        Ok(t) => t,
        Err(c) => return c,
    };
    let mut gammas = Vec::new();
    if let Some(g) = &args.gamma {
        gammas.push(g.clone());
    }
    if let Some(b) = &args.batch {
        match read(b) {
            Ok(t) => gammas.extend(read_batch_file(&t)),
            Err(c) => return c,
        }
    }
    let req = RunRequest {
        n: args.n,
        modulus: args.modulus,
        gammas,
        batch: args.batch.is_some(),
        dump_precision: args.dump_precision,
        dump_frobenius: args.dump_frobenius,
        verify_oracle: args.verify_oracle,
        save: args.save_family_frobenius,
        load: args.load_family_frobenius,
    };
    let out = run(&family, &req);
    print!("{}", out.stdout);
    eprint!("{}", out.stderr);
    ExitCode::from(out.code as u8)
}
