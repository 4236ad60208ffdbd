//! Family files, run requests, the saved family-Frobenius format and the
//! mapping from errors to exit codes.

use std::fmt::Write as _;
use std::sync::Arc;

use ini::Ini;
use num_bigint::BigInt;

use crate::deformation::DeformError;
use crate::family::{validate_family, FamilyInput, QPoly};
use crate::ff2::{BinField, FqElem, Gf2Poly};
use crate::frobzero::FrobError;
use crate::linalg::Mat;
use crate::oracle::{oracle_zeta, OracleError, MAX_ORACLE_DEGREE};
use crate::padic::{Qq, UnramCtx};
use crate::parse::{parse_element, parse_polynomial, ParseError};
use crate::pipeline::{
    family_frobenius, gamma_degree_profile, lifted, profile_for, zeta_batch, zeta_single, FamilyFrobenius, Overrides,
    ParamSpace, PipelineError,
};
use crate::poly::Poly;
use crate::zeta::{min_poly, ZetaError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_FAMILY: i32 = 3;
pub const EXIT_INADMISSIBLE: i32 = 4;
pub const EXIT_LEDGER: i32 = 5;
pub const EXIT_ORACLE: i32 = 6;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CliError {
    #[error("parse: {0}")]
    Parse(String),
    #[error("{0}")]
    Pipeline(#[from] PipelineError),
    #[error("oracle mismatch: {0}")]
    OracleMismatch(String),
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use PipelineError as P;
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::OracleMismatch(_) => EXIT_ORACLE,
            CliError::Pipeline(p) => match p {
                P::Family(_) => EXIT_FAMILY,
                P::Field(_) | P::Padic(_) | P::Options(_) => EXIT_PARSE,
                P::Frob(FrobError::RNotUnit) => EXIT_INADMISSIBLE,
                P::Frob(_) => EXIT_LEDGER,
                P::Deform(DeformError::Singular) => EXIT_FAMILY,
                P::Deform(DeformError::Ledger { .. }) => EXIT_LEDGER,
                P::Zeta(ZetaError::NotAdmissible) | P::Zeta(ZetaError::NotGenerator(..)) => EXIT_INADMISSIBLE,
                P::Zeta(_) => EXIT_LEDGER,
            },
        }
    }
}

/// A parsed family file.
#[derive(Clone, Debug)]
pub struct FamilyFile {
    pub fi: FamilyInput,
    pub overrides: Overrides,
}

/// Polynomial over F_2 in `var`, e.g. a field modulus.
pub fn parse_gf2_poly(src: &str, var: char) -> Result<Gf2Poly, CliError> {
    let f2 = BinField::prime();
    let s: String = src.chars().map(|c| if c == var { 'X' } else if c == 'X' { '?' } else { c }).collect();
    let p = parse_polynomial(&s, &f2, "X")?;
    let mut out = Gf2Poly::zero();
    for (i, c) in p.coeffs().iter().enumerate() {
        if !c.coeff(0).v.is_zero() {
            out.flip(i);
        }
    }
    Ok(out)
}

fn get<'a>(ini: &'a Ini, sec: &str, key: &str) -> Result<&'a str, CliError> {
    ini.section(Some(sec))
        .and_then(|s| s.get(key))
        .ok_or_else(|| CliError::Parse(format!("missing [{sec}] {key}")))
}

fn num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, CliError> {
    s.trim().parse().map_err(|_| CliError::Parse(format!("{what}: not a number: {s}")))
}

pub fn parse_family_file(text: &str) -> Result<FamilyFile, CliError> {
    let ini = Ini::load_from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    let a: usize = num(get(&ini, "field", "a")?, "a")?;
    let fq = match ini.section(Some("field")).and_then(|s| s.get("modulus")) {
        Some(m) => {
            let m = parse_gf2_poly(m, 't')?;
            if m.degree() != Some(a) {
                return Err(CliError::Parse(format!("modulus has degree {:?}, expected {a}", m.degree())));
            }
            BinField::new(m).ok_or_else(|| CliError::Parse("field modulus is not irreducible".into()))?
        }
        None if a == 1 => BinField::prime(),
        None => BinField::smallest_of_degree(a),
    };
    let g: usize = num(get(&ini, "family", "genus")?, "genus")?;
    let p = |k: &str| -> Result<_, CliError> { Ok(parse_polynomial(get(&ini, "family", k)?, &fq, "XGt")?) };
    let (hb, qf, h) = (p("H")?, p("Qf")?, p("h")?);
    let fi = validate_family(&fq, g, &hb, &qf, &h).map_err(PipelineError::from)?;
    let mut overrides = Overrides::default();
    if let Some(opts) = ini.section(Some("options")) {
        for (k, v) in opts.iter() {
            match k {
                "N2" => overrides.n2 = Some(num(v, k)?),
                "N_Gamma" => overrides.n_gamma = Some(num(v, k)?),
                "target_prec" => overrides.target_prec = Some(num(v, k)?),
                _ => return Err(CliError::Parse(format!("unknown option {k}"))),
            }
        }
    }
    Ok(FamilyFile { fi, overrides })
}

/// What to compute and print.
#[derive(Clone, Debug, Default)]
pub struct RunRequest {
    pub n: usize,
    /// Modulus of F_{2^{an}} over F_2; the smallest irreducible when absent.
    pub modulus: Option<String>,
    pub gammas: Vec<String>,
    pub batch: bool,
    pub dump_precision: bool,
    pub dump_frobenius: bool,
    pub verify_oracle: bool,
    pub save: Option<std::path::PathBuf>,
    pub load: Option<std::path::PathBuf>,
}

/// Collected standard output and the exit status.
#[derive(Clone, Debug, Default)]
pub struct RunOutput {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl RunOutput {
    fn fail(&mut self, e: &CliError) {
        let _ = writeln!(self.stderr, "error: {e}");
        if self.code == EXIT_OK {
            self.code = e.exit_code();
        }
    }
}

pub fn param_space(fi: &FamilyInput, req: &RunRequest) -> Result<ParamSpace, CliError> {
    let deg = fi.a * req.n;
    let big = match &req.modulus {
        Some(m) => {
            let m = parse_gf2_poly(m, 't')?;
            if m.degree() != Some(deg) {
                return Err(CliError::Parse(format!("extension modulus must have degree {deg}")));
            }
            BinField::new(m).ok_or_else(|| CliError::Parse("extension modulus is not irreducible".into()))?
        }
        None => BinField::smallest_of_degree(deg),
    };
    Ok(ParamSpace::new(fi, big)?)
}

fn render_qq(x: &Qq) -> String {
    match x.valuation() {
        None => "0".into(),
        Some(v) => {
            let u: Vec<String> = x.unit().iter().map(|c| c.to_string()).collect();
            format!("{v}:{}", u.join(","))
        }
    }
}

fn parse_qq(s: &str, ctx: &Arc<UnramCtx>) -> Result<Qq, CliError> {
    if s == "0" {
        return Ok(ctx.zero());
    }
    let bad = || CliError::Parse(format!("bad coefficient {s}"));
    let (v, u) = s.split_once(':').ok_or_else(bad)?;
    let v: i64 = v.parse().map_err(|_| bad())?;
    let u = u.split(',').map(|c| c.parse::<BigInt>().map_err(|_| bad())).collect::<Result<Vec<_>, _>>()?;
    if u.len() != ctx.degree() {
        return Err(bad());
    }
    Ok(ctx.from_coeffs(v, u))
}

const SAVE_MAGIC: &str = "famzeta family frobenius v1";

/// Text form: header, F(0), then each F' entry as one coefficient per line.
pub fn save_family_frobenius(ff: &FamilyFrobenius) -> String {
    let p = &ff.profile;
    let mut s = String::new();
    let _ = writeln!(s, "{SAVE_MAGIC}");
    for (k, v) in [("g", p.g), ("a", p.a), ("kappa", ff.kappa), ("M", p.m_exp), ("N2", p.n2 as usize), ("N_Gamma", p.n_gamma)] {
        let _ = writeln!(s, "{k} {v}");
    }
    let _ = writeln!(s, "n {}", p.n);
    let _ = writeln!(s, "F0");
    for row in &ff.f0 {
        let _ = writeln!(s, "{}", row.iter().map(render_qq).collect::<Vec<_>>().join(" "));
    }
    for (i, row) in ff.fprime.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            let _ = writeln!(s, "entry {i} {j} {}", e.len());
            for c in e.coeffs() {
                let _ = writeln!(s, "{}", render_qq(c));
            }
        }
    }
    s
}

/// Read a saved F'(Γ) back; the header must match the family and n.
pub fn load_family_frobenius(text: &str, fi: &FamilyInput, n: usize, o: &Overrides) -> Result<FamilyFrobenius, CliError> {
    let p = profile_for(fi, n, o)?;
    let lf = lifted(fi, &p)?;
    let work = lf.ctx.with_prec(p.n2);
    let mut lines = text.lines();
    let mut next = || lines.next().ok_or_else(|| CliError::Parse("truncated family-Frobenius file".into()));
    if next()? != SAVE_MAGIC {
        return Err(CliError::Parse("not a family-Frobenius file".into()));
    }
    let want = [
        ("g", p.g),
        ("a", p.a),
        ("kappa", fi.kappa),
        ("M", p.m_exp),
        ("N2", p.n2 as usize),
        ("N_Gamma", p.n_gamma),
        ("n", p.n),
    ];
    for (k, v) in want {
        let line = next()?;
        if line != format!("{k} {v}") {
            return Err(CliError::Parse(format!("header mismatch: got '{line}', expected '{k} {v}'")));
        }
    }
    if next()? != "F0" {
        return Err(CliError::Parse("missing F0 block".into()));
    }
    let dim = 2 * p.g;
    let top = lf.ctx.with_prec(p.target_prec);
    let mut f0: Mat<Qq> = Vec::with_capacity(dim);
    for _ in 0..dim {
        let row = next()?.split_whitespace().map(|t| parse_qq(t, &top)).collect::<Result<Vec<_>, _>>()?;
        if row.len() != dim {
            return Err(CliError::Parse("bad F0 row".into()));
        }
        f0.push(row);
    }
    let mut fprime: Mat<QPoly> = vec![Vec::with_capacity(dim); dim];
    for i in 0..dim {
        for j in 0..dim {
            let head = next()?;
            let parts: Vec<&str> = head.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "entry" || parts[1] != i.to_string() || parts[2] != j.to_string() {
                return Err(CliError::Parse(format!("expected entry {i} {j}, got '{head}'")));
            }
            let len: usize = num(parts[3], "entry length")?;
            let c = (0..len).map(|_| parse_qq(next()?, &work)).collect::<Result<Vec<_>, _>>()?;
            fprime[i].push(Poly::new(c, work.zero()));
        }
    }
    let r = lf.r.map(work.zero(), |c| c.with_ctx(&work));
    Ok(FamilyFrobenius { profile: p, kappa: fi.kappa, ctx: work, r, f0, fprime, loss: 0 })
}

fn dump_frobenius(ff: &FamilyFrobenius) -> String {
    let mut s = String::from("[frobenius]\nF(0):\n");
    for row in &ff.f0 {
        let _ = writeln!(s, "  {}", row.iter().map(render_qq).collect::<Vec<_>>().join(" "));
    }
    let _ = writeln!(s, "ledger loss: {}", ff.loss);
    let prof = gamma_degree_profile(ff);
    let _ = writeln!(
        s,
        "F' min valuation by Gamma-degree: {}",
        prof.iter().map(|v| v.map_or("-".to_string(), |x| x.to_string())).collect::<Vec<_>>().join(" ")
    );
    s
}

fn parse_gammas(req: &RunRequest, big: &Arc<BinField>) -> Vec<Result<FqElem, CliError>> {
    req.gammas.iter().map(|g| parse_element(g, big).map_err(CliError::from)).collect()
}

/// The full command: parse, compute, print. Never panics on user input.
pub fn run(family_text: &str, req: &RunRequest) -> RunOutput {
    let mut out = RunOutput::default();
    if let Err(e) = run_inner(family_text, req, &mut out) {
        out.fail(&e);
    }
    out
}

fn run_inner(family_text: &str, req: &RunRequest, out: &mut RunOutput) -> Result<(), CliError> {
    if req.n == 0 {
        return Err(CliError::Parse("n must be at least 1".into()));
    }
    let file = parse_family_file(family_text)?;
    let fi = &file.fi;
    let space = param_space(fi, req)?;
    if req.dump_precision {
        out.stdout.push_str(&profile_for(fi, req.n, &file.overrides)?.render());
    }
    let gammas = parse_gammas(req, &space.big);
    let ff = match &req.load {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
            load_family_frobenius(&text, fi, req.n, &file.overrides)?
        }
        None => family_frobenius(fi, req.n, &file.overrides)?,
    };
    if let Some(path) = &req.save {
        std::fs::write(path, save_family_frobenius(&ff)).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    }
    if req.dump_frobenius {
        out.stdout.push_str(&dump_frobenius(&ff));
    }
    // the command line path only accepts generators of F_{q^n}
    let mut ok: Vec<(usize, FqElem)> = Vec::new();
    let mut results: Vec<Option<Result<_, CliError>>> = vec![None; gammas.len()];
    for (i, g) in gammas.into_iter().enumerate() {
        match g {
            Err(e) => results[i] = Some(Err(e)),
            Ok(g) => {
                let d = min_poly(&space.emb, &g).degree().unwrap_or(0);
                if d != space.n {
                    results[i] = Some(Err(PipelineError::from(ZetaError::NotGenerator(d, space.n)).into()));
                } else {
                    ok.push((i, g));
                }
            }
        }
    }
    if req.batch {
        let pts: Vec<FqElem> = ok.iter().map(|(_, g)| g.clone()).collect();
        for ((i, _), r) in ok.iter().zip(zeta_batch(&ff, fi, &space, &pts)) {
            results[*i] = Some(r.map_err(CliError::from));
        }
    } else {
        for (i, g) in &ok {
            results[*i] = Some(zeta_single(&ff, fi, &space, g).map_err(CliError::from));
        }
    }
    let oracle_ok = space.big.degree() * fi.g <= MAX_ORACLE_DEGREE;
    for (i, res) in results.into_iter().enumerate() {
        if req.batch {
            let _ = writeln!(out.stdout, "gamma: {}", req.gammas[i].trim());
        }
        match res.unwrap() {
            Err(e) => {
                if req.batch {
                    let _ = writeln!(out.stdout, "error: {e}");
                }
                out.fail(&e);
            }
            Ok(p) => {
                out.stdout.push_str(&p.record());
                if req.verify_oracle {
                    if !oracle_ok {
                        let _ = writeln!(out.stdout, "oracle: SKIP");
                        continue;
                    }
                    let g = parse_element(&req.gammas[i], &space.big)?;
                    match oracle_zeta(fi, &space.emb, &g) {
                        Ok(o) if o == p => {
                            let _ = writeln!(out.stdout, "oracle: PASS");
                        }
                        Ok(o) => {
                            let _ = writeln!(out.stdout, "oracle: FAIL (oracle P: {})", join_big(&o.b));
                            out.fail(&CliError::OracleMismatch(req.gammas[i].clone()));
                        }
                        Err(OracleError::TooLarge(_)) => {
                            let _ = writeln!(out.stdout, "oracle: SKIP");
                        }
                        Err(e) => {
                            let _ = writeln!(out.stdout, "oracle: FAIL ({e})");
                            out.fail(&CliError::OracleMismatch(e.to_string()));
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn join_big(v: &[BigInt]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// One γ̄ per nonempty line; '#' starts a comment.
pub fn read_batch_file(text: &str) -> Vec<String> {
    text.lines()
        .map(|l| l.split('#').next().unwrap().trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}
