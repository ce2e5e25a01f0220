mod error;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use prism_core::alexander::{alexander_polynomial, torsion_coefficients};
use prism_core::changemaker::{enumerate_changemakers, standard_basis, Changemaker};
use prism_core::contfrac::{neg_eval, neg_expand, pos_eval, pos_expand, NegCF, PosCF, Rational};
use prism_core::ctype::{build_ctype, decide_ctype};
use prism_core::families::{census_record, classify, expected_pairs, table3_rows, verify_row, CensusRecord};
use prism_core::isometry::are_isometric;
use prism_core::GramLattice;

use error::CliError;

/// Records decided per parallel batch in `search`; output stays in
/// enumeration order.
const SEARCH_BATCH: usize = 4096;

#[derive(Parser)]
#[command(name = "prism", version, about = "Changemaker and C-type lattice toolkit for prism manifolds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Continued fractions.
    #[command(subcommand)]
    Cf(CfCommand),
    /// Short vectors of a lattice given by a Gram matrix.
    #[command(subcommand)]
    Lattice(LatticeCommand),
    /// Build or recognize C-type lattices.
    #[command(subcommand)]
    Ctype(CtypeCommand),
    /// Changemaker vectors and their standard bases.
    #[command(subcommand)]
    Cm(CmCommand),
    /// Decide whether two Gram matrices define isometric lattices.
    Iso {
        #[arg(long)]
        gram1: PathBuf,
        #[arg(long)]
        gram2: PathBuf,
    },
    /// Families containing P(p, q). Exits 1 when there are none.
    Classify { p: i64, q: i64 },
    /// Check the tabulated changemaker realizations.
    VerifyTables {
        #[arg(long, default_value_t = 5)]
        s_max: i64,
        #[arg(long, default_value_t = 5)]
        t_max: i64,
        #[arg(long)]
        json: bool,
    },
    /// Decide every changemaker up to the given length and norm.
    Search {
        #[arg(long = "len")]
        len: usize,
        #[arg(long)]
        norm_max: i64,
        /// Write records here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Emit CSV instead of JSON lines.
        #[arg(long)]
        csv: bool,
        /// Include the isometry witness in each C-type record.
        #[arg(long)]
        witness: bool,
    },
    /// Torsion coefficients and Alexander polynomial for a changemaker.
    Alexander {
        sigma: Changemaker,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CfKind {
    /// Minus (Hirzebruch-Jung) expansion.
    #[arg(long)]
    neg: bool,
    /// Plus (regular) expansion.
    #[arg(long)]
    pos: bool,
}

#[derive(Subcommand)]
enum CfCommand {
    /// Expand `num/den`.
    Expand {
        #[command(flatten)]
        kind: CfKind,
        value: Rational,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a coefficient list.
    Eval {
        #[command(flatten)]
        kind: CfKind,
        #[arg(required = true, allow_negative_numbers = true)]
        coeffs: Vec<i64>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum LatticeCommand {
    /// Nonzero vectors of norm at most `bound`.
    Shortvecs {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        bound: i64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CtypeCommand {
    /// Vertex-basis data of C(p, q).
    Build {
        p: i64,
        q: i64,
        /// Print only the Gram matrix as JSON.
        #[arg(long, conflicts_with_all = ["norms", "json"])]
        gram: bool,
        /// Print only the vertex norms.
        #[arg(long, conflicts_with = "json")]
        norms: bool,
        #[arg(long)]
        json: bool,
    },
    /// Find (p, q) with the lattice isometric to C(p, q). Exits 1 when none.
    Recover {
        #[arg(long)]
        gram: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum CmCommand {
    /// Changemakers with σ_0 = 1 of length exactly `len`.
    Enum {
        #[arg(long = "len")]
        len: usize,
        #[arg(long)]
        norm_max: i64,
        #[arg(long)]
        json: bool,
    },
    /// Standard basis of (σ)⊥ with kind tags.
    Basis {
        sigma: Changemaker,
        #[arg(long)]
        json: bool,
    },
}

/// Success or definitive negative answer.
enum Verdict {
    Yes,
    No,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(n) = std::env::var("PRISM_THREADS") {
        match n.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: PRISM_THREADS must be a positive integer, got {n:?}");
                return ExitCode::from(2);
            }
        }
    }
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let result = run(cli.command, &mut out).and_then(|v| {
        out.flush()?;
        Ok(v)
    });
    match result {
        Ok(Verdict::Yes) => ExitCode::SUCCESS,
        Ok(Verdict::No) => ExitCode::from(1),
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cmd: Command, out: &mut dyn Write) -> Result<Verdict, CliError> {
    match cmd {
        Command::Cf(c) => cf(c, out),
        Command::Lattice(LatticeCommand::Shortvecs { gram, bound, json }) => shortvecs(&gram, bound, json, out),
        Command::Ctype(c) => ctype(c, out),
        Command::Cm(c) => cm(c, out),
        Command::Iso { gram1, gram2 } => iso(&gram1, &gram2, out),
        Command::Classify { p, q } => {
            let fams = classify(p, q)?;
            serde_json::to_writer_pretty(&mut *out, &json!({ "p": p, "q": q, "families": fams }))?;
            writeln!(out)?;
            Ok(if fams.is_empty() { Verdict::No } else { Verdict::Yes })
        }
        Command::VerifyTables { s_max, t_max, json } => verify_tables(s_max, t_max, json, out),
        Command::Search { len, norm_max, out: path, csv, witness } => {
            let mut file;
            let sink: &mut dyn Write = match &path {
                Some(p) => {
                    file = BufWriter::new(File::create(p).map_err(|e| usage_io(p, e))?);
                    &mut file
                }
                None => out,
            };
            search(len, norm_max, csv, witness, sink)?;
            sink.flush()?;
            Ok(Verdict::Yes)
        }
        Command::Alexander { sigma, json } => alexander(&sigma, json, out),
    }
}

fn usage_io(path: &Path, e: io::Error) -> CliError {
    CliError::Usage(format!("{}: {e}", path.display()))
}

fn read_gram(path: &Path) -> Result<GramLattice, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| usage_io(path, e))?;
    let rows: Vec<Vec<i64>> = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("{}: expected a JSON array of integer arrays: {e}", path.display())))?;
    Ok(GramLattice::new(rows)?)
}

fn join<T: ToString>(xs: &[T], sep: &str) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(sep)
}

fn small(coeffs: Option<Vec<i64>>) -> Result<Vec<i64>, CliError> {
    coeffs.ok_or_else(|| CliError::Usage("coefficient outside the 64-bit range".into()))
}

fn cf(c: CfCommand, out: &mut dyn Write) -> Result<Verdict, CliError> {
    match c {
        CfCommand::Expand { kind, value, json } => {
            let coeffs = if kind.neg { small(neg_expand(&value)?.to_i64s())? } else { small(pos_expand(&value)?.to_i64s())? };
            if json {
                let kind = if kind.neg { "neg" } else { "pos" };
                writeln!(out, "{}", json!({ "value": value.to_string(), "kind": kind, "coeffs": coeffs }))?;
            } else {
                writeln!(out, "{}", join(&coeffs, " "))?;
            }
        }
        CfCommand::Eval { kind, coeffs, json } => {
            let value = if kind.neg { neg_eval(&NegCF::from_i64s(&coeffs))? } else { pos_eval(&PosCF::from_i64s(&coeffs))? };
            if json {
                let (num, den) = (value.num().to_string(), value.den().to_string());
                writeln!(out, "{}", json!({ "coeffs": coeffs, "value": value.to_string(), "num": num, "den": den }))?;
            } else {
                writeln!(out, "{value}")?;
            }
        }
    }
    Ok(Verdict::Yes)
}

fn shortvecs(gram: &Path, bound: i64, json: bool, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let l = read_gram(gram)?;
    let vs = l.vectors_with_norms(bound)?;
    if json {
        let items: Vec<_> = vs.iter().map(|(v, n)| json!({ "vector": v, "norm": n })).collect();
        writeln!(out, "{}", serde_json::Value::from(items))?;
    } else {
        for (v, n) in &vs {
            writeln!(out, "{n}\t{}", join(v, " "))?;
        }
    }
    Ok(Verdict::Yes)
}

fn ctype(c: CtypeCommand, out: &mut dyn Write) -> Result<Verdict, CliError> {
    match c {
        CtypeCommand::Build { p, q, gram, norms, json } => {
            let c = build_ctype(p, q)?;
            if gram {
                writeln!(out, "{}", json!(c.gram.gram()))?;
            } else if norms {
                writeln!(out, "{}", join(&c.norms, " "))?;
            } else if json {
                let v = json!({
                    "p": c.p, "q": c.q, "norms": c.norms,
                    "high_weight": c.high_weight, "gram": c.gram.gram(),
                });
                writeln!(out, "{v}")?;
            } else {
                writeln!(out, "C({p},{q}) rank {} det {}", c.rank(), c.gram.det_i128())?;
                writeln!(out, "norms {}", join(&c.norms, " "))?;
                for row in c.gram.gram() {
                    writeln!(out, "{}", join(row, " "))?;
                }
            }
            Ok(Verdict::Yes)
        }
        CtypeCommand::Recover { gram, json } => {
            let l = read_gram(&gram)?;
            match decide_ctype(&l)? {
                Some(m) => {
                    if json {
                        let v = json!({
                            "p": m.ctype.p, "q": m.ctype.q, "norms": m.ctype.norms,
                            "witness": m.isometry.matrix,
                        });
                        writeln!(out, "{v}")?;
                    } else {
                        writeln!(out, "C({},{})", m.ctype.p, m.ctype.q)?;
                    }
                    Ok(Verdict::Yes)
                }
                None => {
                    if json {
                        writeln!(out, "{}", json!({ "p": null, "q": null }))?;
                    } else {
                        writeln!(out, "not C-type")?;
                    }
                    Ok(Verdict::No)
                }
            }
        }
    }
}

fn cm(c: CmCommand, out: &mut dyn Write) -> Result<Verdict, CliError> {
    match c {
        CmCommand::Enum { len, norm_max, json } => {
            let all = enumerate_changemakers(len, norm_max);
            if json {
                writeln!(out, "{}", serde_json::to_string(&all)?)?;
            } else {
                for s in &all {
                    writeln!(out, "{s}")?;
                }
            }
        }
        CmCommand::Basis { sigma, json } => {
            let b = standard_basis(&sigma)?;
            if json {
                writeln!(out, "{}", serde_json::to_string(&b)?)?;
            } else {
                for (j, v) in b.vectors.iter().enumerate() {
                    let gappy = if v.gappy_indices.is_empty() {
                        String::new()
                    } else {
                        format!(" gappy at {}", join(&v.gappy_indices, ","))
                    };
                    writeln!(out, "v{} {} [{}]{gappy}", j + 1, v.kind, join(&v.coords, " "))?;
                }
            }
        }
    }
    Ok(Verdict::Yes)
}

fn iso(g1: &Path, g2: &Path, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let (l1, l2) = (read_gram(g1)?, read_gram(g2)?);
    match are_isometric(&l1, &l2) {
        Some(m) => {
            writeln!(out, "{}", json!({ "isometric": true, "witness": m.matrix }))?;
            Ok(Verdict::Yes)
        }
        None => {
            writeln!(out, "not isometric")?;
            Ok(Verdict::No)
        }
    }
}

fn verify_tables(s_max: i64, t_max: i64, json: bool, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let mut all_ok = true;
    let mut reports = Vec::new();
    for row in table3_rows() {
        for (s, t) in row.params_up_to(s_max.max(t_max)) {
            if (row.s_min.is_some() && s > s_max) || (row.t_min.is_some() && t > t_max) {
                continue;
            }
            let rep = verify_row(&row, s, t)?;
            all_ok &= rep.passed();
            if !json {
                match &rep.failure {
                    None => writeln!(out, "{} s={s} t={t} P({},{}) PASS", row.id, rep.p, rep.q)?,
                    Some((check, why)) => writeln!(out, "{} s={s} t={t} P({},{}) FAIL {check:?}: {why}", row.id, rep.p, rep.q)?,
                }
            }
            reports.push(rep);
        }
    }
    if json {
        writeln!(out, "{}", serde_json::to_string(&reports)?)?;
    }
    Ok(if all_ok { Verdict::Yes } else { Verdict::No })
}

fn csv_line(r: &CensusRecord) -> String {
    let opt = |x: Option<i64>| x.map(|v| v.to_string()).unwrap_or_default();
    let fams: Vec<String> = r
        .families
        .iter()
        .map(|f| {
            let params: Vec<String> = f.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            if params.is_empty() {
                f.family.to_string()
            } else {
                format!("{}({})", f.family, params.join(" "))
            }
        })
        .collect();
    format!(
        "{},{},{},{},{},{},{}",
        join(&r.sigma, " "),
        r.norm,
        opt(r.q),
        r.is_ctype,
        opt(r.p),
        r.vertex_norms.as_deref().map(|v| join(v, " ")).unwrap_or_default(),
        fams.join(";")
    )
}

fn search(len: usize, norm_max: i64, csv: bool, witness: bool, out: &mut dyn Write) -> Result<(), CliError> {
    if csv {
        writeln!(out, "sigma,norm,q,is_ctype,p,vertex_norms,families")?;
    }
    let (mut count, mut ctype) = (0usize, 0usize);
    let mut realized = std::collections::BTreeSet::new();
    for l in 2..=len {
        let sigmas = enumerate_changemakers(l, norm_max);
        for batch in sigmas.chunks(SEARCH_BATCH) {
            let recs = batch.par_iter().map(|s| census_record(s, witness)).collect::<Result<Vec<_>, _>>()?;
            for r in &recs {
                if csv {
                    writeln!(out, "{}", csv_line(r))?;
                } else {
                    serde_json::to_writer(&mut *out, r)?;
                    writeln!(out)?;
                }
                count += 1;
                if let (true, Some(p), Some(q)) = (r.is_ctype, r.p, r.q) {
                    ctype += 1;
                    realized.insert((p, q));
                }
            }
        }
    }
    let expected = expected_pairs(len, norm_max);
    eprintln!(
        "{count} changemakers, {ctype} C-type, {} realized pairs, {} predicted, match: {}",
        realized.len(),
        expected.len(),
        realized == expected
    );
    Ok(())
}

fn alexander(sigma: &Changemaker, json: bool, out: &mut dyn Write) -> Result<Verdict, CliError> {
    let norm = sigma.norm();
    if norm % 4 != 0 {
        return Err(CliError::Usage(format!("|σ|² = {norm} is not divisible by 4")));
    }
    let q = norm / 4;
    let res = torsion_coefficients(sigma, q)?;
    let poly = alexander_polynomial(&res.torsion);
    let genus = poly.degree();
    let lspace = poly.has_lspace_shape();
    if json {
        let coeffs: BTreeMap<String, i64> = (0..poly.b.len())
            .filter(|&i| poly.b[i] != 0)
            .flat_map(|i| {
                let mut v = vec![(i.to_string(), poly.b[i])];
                if i > 0 {
                    v.push((format!("-{i}"), poly.b[i]));
                }
                v
            })
            .collect();
        let v = json!({
            "sigma": sigma.entries(), "q": q, "torsion": res.torsion.t, "coeffs": coeffs,
            "stabilization_bound": res.certificate.bounds, "genus": genus, "lspace_shape": lspace,
        });
        writeln!(out, "{v}")?;
    } else {
        writeln!(out, "q {q}")?;
        writeln!(out, "torsion {}", join(&res.torsion.t, " "))?;
        writeln!(out, "coefficients b_0..b_{genus}: {}", join(&poly.b, " "))?;
        writeln!(out, "genus {genus}")?;
        writeln!(out, "lspace_shape {lspace}")?;
        writeln!(out, "stabilization_bound {}", join(&res.certificate.bounds, " "))?;
    }
    Ok(Verdict::Yes)
}
