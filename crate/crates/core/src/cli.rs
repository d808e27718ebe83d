//! The `mms` command-line front end.
//!
//! Exit codes are a stable contract: 0 success or equivalent, 1 a negative
//! answer (a scheme fails to verify, schemes are not equivalent), 2 bad input,
//! 3 a configured cap was hit, 4 the dedupe index is corrupt.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use crate::canon::{equivalent_with, normal_form_with, Limits};
use crate::error::Error;
use crate::index::{DedupeIndex, IndexError};
use crate::scheme::{self, Scheme};
use crate::symmetry::random_element_indexed;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;
pub const EXIT_INDEX: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "mms", version, about = "Normal forms and deduplication of matrix multiplication schemes")]
pub struct Cli {
    #[command(flatten)]
    pub config: Config,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Config {
    /// Reject inputs that are not over GF(p).
    #[arg(long, global = true, value_name = "P")]
    pub field: Option<u32>,
    /// Read and write JSON documents instead of the text format.
    #[arg(long, global = true)]
    pub json: bool,
    /// Tensor convention of the inputs; `c` transposes every C matrix on load.
    #[arg(long, global = true, value_enum, default_value_t = Convention::Ct)]
    pub convention: Convention,
    #[arg(long, global = true, default_value_t = Limits::default().max_stabilizer,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_stabilizer: u64,
    #[arg(long, global = true, default_value_t = Limits::default().max_nullspace,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub max_nullspace: u64,
    /// Worker threads for dedupe; 0 uses every core.
    #[arg(long, global = true, env = "MMS_JOBS", default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convention {
    /// `A B = C`.
    C,
    /// `A B = C^T`, the stored form.
    Ct,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check every scheme against the matrix multiplication tensor.
    Verify { files: Vec<PathBuf> },
    /// Print the normal form of every scheme in a file.
    Normalize {
        file: PathBuf,
        /// Also print the group element mapping the input to its normal form.
        #[arg(long)]
        witness: bool,
    },
    /// Decide whether two schemes are equivalent.
    Equiv {
        first: PathBuf,
        second: PathBuf,
        /// Also print a group element mapping the first scheme to the second.
        #[arg(long)]
        witness: bool,
    },
    /// Group schemes by normal form and merge the classes into an index.
    Dedupe {
        files: Vec<PathBuf>,
        #[arg(long)]
        index: Option<PathBuf>,
    },
    /// Print rank patterns and the column symmetries maximizing them.
    RankPattern { file: PathBuf },
    /// Emit images of each scheme under seeded random group elements.
    OrbitSample {
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        count: u64,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Cap(String),
    Index(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Cap(_) => EXIT_CAP,
            Failure::Index(_) => EXIT_INDEX,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Cap(m) | Failure::Index(m) => m,
        }
    }

    fn from_error(context: &str, e: Error) -> Self {
        if e.is_cap() {
            Failure::Cap(format!("{context}: {e}"))
        } else {
            Failure::Input(format!("{context}: {e}"))
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Scheme identifier: source file and 1-based ordinal within it. Ordered by
/// path, then ordinal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct SchemeId {
    path: String,
    ordinal: usize,
}

impl std::fmt::Display for SchemeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.path, self.ordinal)
    }
}

struct Loaded {
    id: SchemeId,
    scheme: Scheme,
}

impl Config {
    fn limits(&self) -> Limits {
        Limits { max_stabilizer: self.max_stabilizer, max_nullspace: self.max_nullspace, ..Limits::default() }
    }

    fn load(&self, path: &Path) -> Result<Vec<Loaded>, Failure> {
        let shown = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
        let schemes = if self.json { Scheme::from_json(&text).map(|s| vec![s]) } else { scheme::parse(&text) }
            .map_err(|e| Failure::Input(format!("{shown}: {e}")))?;
        let mut out = Vec::with_capacity(schemes.len());
        for (k, s) in schemes.into_iter().enumerate() {
            let id = SchemeId { path: shown.clone(), ordinal: k + 1 };
            if let Some(p) = self.field {
                if s.field().modulus() as u32 != p {
                    return Err(Failure::Input(format!(
                        "{id}: scheme is over GF({}), expected GF({p})",
                        s.field().modulus()
                    )));
                }
            }
            let scheme = match self.convention {
                Convention::C => s.transpose_c(),
                Convention::Ct => s,
            };
            out.push(Loaded { id, scheme });
        }
        Ok(out)
    }

    fn load_one(&self, path: &Path) -> Result<Loaded, Failure> {
        let mut all = self.load(path)?;
        if all.len() != 1 {
            return Err(Failure::Input(format!("{}: expected one scheme, found {}", path.display(), all.len())));
        }
        Ok(all.remove(0))
    }

    fn emit(&self, out: &mut dyn Write, s: &Scheme) -> io::Result<()> {
        if self.json {
            writeln!(out, "{}", s.to_json())
        } else {
            out.write_all(s.serialize().as_bytes())
        }
    }
}

/// Parses the process arguments and runs the command on stdout and stderr.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    let mut err = io::stderr();
    let code = run(cli, &mut out, &mut err);
    match out.flush() {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => {
            let _ = writeln!(err, "error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
        _ => ExitCode::from(code),
    }
}

pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cfg = &cli.config;
    let result = match &cli.command {
        Command::Verify { files } => verify(cfg, files, out, err),
        Command::Normalize { file, witness } => normalize(cfg, file, *witness, out, err),
        Command::Equiv { first, second, witness } => equiv(cfg, first, second, *witness, out),
        Command::Dedupe { files, index } => dedupe(cfg, files, index.as_deref(), out),
        Command::RankPattern { file } => rank_pattern(cfg, file, out),
        Command::OrbitSample { file, count } => orbit_sample(cfg, file, *count, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn verify(cfg: &Config, files: &[PathBuf], out: &mut dyn Write, err: &mut dyn Write) -> Result<u8, Failure> {
    let mut loaded = Vec::new();
    for f in files {
        loaded.extend(cfg.load(f)?);
    }
    let mut code = EXIT_OK;
    for l in &loaded {
        let ok = l.scheme.verify();
        if cfg.json {
            writeln!(out, "{}", json!({ "id": l.id.to_string(), "ok": ok }))?;
        } else {
            writeln!(out, "{} {}", l.id, if ok { "OK" } else { "FAIL" })?;
        }
        for row in l.scheme.lint() {
            writeln!(err, "warning: {}: row {} is zero", l.id, row + 1)?;
        }
        if !ok {
            code = EXIT_NEGATIVE;
        }
    }
    Ok(code)
}

fn normalize(
    cfg: &Config,
    file: &Path,
    witness: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<u8, Failure> {
    let limits = cfg.limits();
    for l in cfg.load(file)? {
        if !l.scheme.verify() {
            writeln!(err, "warning: {}: scheme does not verify", l.id)?;
        }
        let res = normal_form_with(&l.scheme, &limits).map_err(|e| Failure::from_error(&l.id.to_string(), e))?;
        if cfg.json && witness {
            let doc = json!({ "nf": res.nf.to_document(), "witness": res.witness.to_text() });
            writeln!(out, "{doc}")?;
        } else {
            cfg.emit(out, &res.nf)?;
            if witness {
                writeln!(out, "# witness {}", res.witness.to_text())?;
            }
        }
    }
    Ok(EXIT_OK)
}

fn equiv(cfg: &Config, first: &Path, second: &Path, witness: bool, out: &mut dyn Write) -> Result<u8, Failure> {
    let a = cfg.load_one(first)?;
    let b = cfg.load_one(second)?;
    if !a.scheme.same_shape(&b.scheme) {
        return Err(Failure::Input(format!(
            "shape mismatch: {} is (n={}, r={}, p={}), {} is (n={}, r={}, p={})",
            a.id,
            a.scheme.n(),
            a.scheme.r(),
            a.scheme.field().modulus(),
            b.id,
            b.scheme.n(),
            b.scheme.r(),
            b.scheme.field().modulus()
        )));
    }
    let pa = a.scheme.rank_pattern().maximal().0;
    let pb = b.scheme.rank_pattern().maximal().0;
    if pa != pb {
        if cfg.json {
            let doc = json!({
                "equivalent": false,
                "reason": "rank patterns differ",
                "patterns": [pa.entries(), pb.entries()],
            });
            writeln!(out, "{doc}")?;
        } else {
            writeln!(out, "not equivalent: rank patterns differ")?;
            write!(out, "{}:\n{pa}{}:\n{pb}", a.id, b.id)?;
        }
        return Ok(EXIT_NEGATIVE);
    }
    let found = equivalent_with(&a.scheme, &b.scheme, &cfg.limits()).map_err(|e| Failure::from_error("equiv", e))?;
    if cfg.json {
        let doc = json!({
            "equivalent": found.is_some(),
            "witness": found.as_ref().filter(|_| witness).map(|g| g.to_text()),
        });
        writeln!(out, "{doc}")?;
    } else if let Some(g) = &found {
        writeln!(out, "equivalent")?;
        if witness {
            writeln!(out, "# witness {}", g.to_text())?;
        }
    } else {
        writeln!(out, "not equivalent")?;
    }
    Ok(if found.is_some() { EXIT_OK } else { EXIT_NEGATIVE })
}

fn dedupe(cfg: &Config, files: &[PathBuf], index_path: Option<&Path>, out: &mut dyn Write) -> Result<u8, Failure> {
    // Read the index first so a corrupt one fails before any work.
    let mut index = match index_path {
        Some(p) => DedupeIndex::load(p).map_err(|e| match e {
            IndexError::Corrupt { .. } => Failure::Index(format!("{}: {e}", p.display())),
            IndexError::Io(e) => Failure::Input(format!("{}: {e}", p.display())),
        })?,
        None => DedupeIndex::new(),
    };
    let mut loaded = Vec::new();
    for f in files {
        loaded.extend(cfg.load(f)?);
    }
    let limits = cfg.limits();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))?;
    let digests: Vec<Result<String, Error>> = pool.install(|| {
        loaded.par_iter().map(|l| normal_form_with(&l.scheme, &limits).map(|r| r.nf.digest_hex())).collect()
    });

    let mut classes: BTreeMap<String, Vec<SchemeId>> = BTreeMap::new();
    for (l, d) in loaded.iter().zip(digests) {
        let d = d.map_err(|e| Failure::from_error(&l.id.to_string(), e))?;
        classes.entry(d).or_default().push(l.id.clone());
    }
    let mut classes: Vec<(String, Vec<SchemeId>)> = classes
        .into_iter()
        .map(|(d, mut ids)| {
            ids.sort();
            (d, ids)
        })
        .collect();
    classes.sort_by(|x, y| x.1[0].cmp(&y.1[0]));

    let before = index.clone();
    let mut added = 0;
    if let Some(p) = index_path {
        for (d, ids) in &classes {
            if index.insert(d, &ids[0].to_string()) {
                added += 1;
            }
        }
        if added > 0 || !p.exists() {
            index.save(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
        }
    }

    if cfg.json {
        let list: Vec<_> = classes
            .iter()
            .map(|(d, ids)| {
                json!({
                    "digest": d,
                    "representative": ids[0].to_string(),
                    "members": ids.iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "indexed_as": before.get(d),
                })
            })
            .collect();
        writeln!(out, "{}", json!({ "schemes": loaded.len(), "classes": list, "new_entries": added }))?;
    } else {
        for (d, ids) in &classes {
            match before.get(d) {
                Some(known) => writeln!(out, "{d} {} (indexed as {known})", ids[0])?,
                None => writeln!(out, "{d} {}", ids[0])?,
            }
            for id in &ids[1..] {
                writeln!(out, "    {id}")?;
            }
        }
        writeln!(out, "{} schemes, {} classes, {} new index entries", loaded.len(), classes.len(), added)?;
    }
    Ok(EXIT_OK)
}

fn rank_pattern(cfg: &Config, file: &Path, out: &mut dyn Write) -> Result<u8, Failure> {
    for l in cfg.load(file)? {
        let pattern = l.scheme.rank_pattern();
        let (max, syms) = pattern.maximal();
        if cfg.json {
            let doc = json!({
                "id": l.id.to_string(),
                "pattern": pattern.entries(),
                "maximal": max.entries(),
                "symmetries": syms.iter().map(ToString::to_string).collect::<Vec<_>>(),
            });
            writeln!(out, "{doc}")?;
        } else {
            writeln!(out, "{}", l.id)?;
            write!(out, "pattern:\n{pattern}maximal:\n{max}attained by:")?;
            for s in &syms {
                write!(out, " {s}")?;
            }
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}

fn orbit_sample(cfg: &Config, file: &Path, count: u64, out: &mut dyn Write) -> Result<u8, Failure> {
    for l in cfg.load(file)? {
        let s = &l.scheme;
        for i in 0..count {
            let g = random_element_indexed(s.field(), s.n(), s.r(), cfg.seed, i)
                .and_then(|g| g.apply(s))
                .map_err(|e| Failure::from_error(&l.id.to_string(), e))?;
            cfg.emit(out, &g)?;
        }
    }
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Field;
    use crate::scheme::fixtures;

    fn run_args(args: &[&str]) -> (u8, String, String) {
        let cli = Cli::try_parse_from(std::iter::once("mms").chain(args.iter().copied())).unwrap();
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(cli, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p.display().to_string()
    }

    #[test]
    fn verify_reports_per_scheme() {
        let dir = tempfile::tempdir().unwrap();
        let s = fixtures::strassen(Field::new(2).unwrap()).serialize();
        let mut bad = fixtures::strassen(Field::new(3).unwrap()).into_rows();
        bad[2].b = bad[2].a;
        let bad = Scheme::new(Field::new(3).unwrap(), 2, bad).unwrap().serialize();
        let f = write(dir.path(), "two.mms", &format!("{s}\n# second\n{bad}"));
        let (code, out, _) = run_args(&["verify", &f]);
        assert_eq!(code, EXIT_NEGATIVE);
        assert_eq!(out, format!("{f}:1 OK\n{f}:2 FAIL\n"));
        let (code, _, err) = run_args(&["verify", "--field", "3", &f]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("expected GF(3)"));
    }

    #[test]
    fn convention_flag_transposes() {
        let dir = tempfile::tempdir().unwrap();
        let f = Field::new(2).unwrap();
        let c_form = fixtures::strassen(f).transpose_c().serialize();
        let path = write(dir.path(), "c.mms", &c_form);
        assert_eq!(run_args(&["verify", "--convention", "c", &path]).0, EXIT_OK);
    }

    #[test]
    fn zero_rows_are_linted() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "z.mms", "scheme 1 2 2\n1 1 1\n0 0 0\n");
        let (code, out, err) = run_args(&["verify", &path]);
        assert_eq!(code, EXIT_OK);
        assert!(out.ends_with("OK\n"));
        assert!(err.contains("row 2 is zero"));
    }

    #[test]
    fn caps_map_to_exit_three() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "z.mms", "scheme 2 1 2\n0 0 0 0 0 0 0 0 0 0 0 0\n");
        let (code, _, err) = run_args(&["normalize", "--max-stabilizer", "10", &path]);
        assert_eq!(code, EXIT_CAP);
        assert!(err.contains("stabilizer too large"), "{err}");
    }

    #[test]
    fn rank_pattern_zero_scheme() {
        let dir = tempfile::tempdir().unwrap();
        let path = write(dir.path(), "z.mms", "scheme 1 2 3\n0 0 0\n0 0 0\n");
        let (code, out, _) = run_args(&["rank-pattern", &path]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("pattern:\n0 0 0\n0 0 0\nmaximal:\n0 0 0\n0 0 0\n"));
    }
}
