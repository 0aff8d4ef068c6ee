//! Command-line front end.
//!
//! Every command yields one record rendered as text, CSV (header row first)
//! or JSON (keys sorted). Exit codes: 0 success, 1 verification mismatch,
//! 2 usage or hypothesis error.

use std::ffi::OsString;
use std::io::Write;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chain::{ChainContext, Target};
use crate::equiv::{
    all_classes, are_equivalent, equivalence_class, fraction_to_zha_wang, zha_wang_to_fraction,
    ZhaWangParams,
};
use crate::gf::Field;
use crate::numth::{resolve_exponent, FractionalExponent};
use crate::spectra::{self, SpectrumMultiset};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Default size limit for `search-apn`, `3^9`.
pub const DEFAULT_SEARCH_BOUND: u64 = 19_683;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "apn-spectra", version, about = "Differential spectra of power maps over GF(p^n)")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Worker threads for domain sweeps.
    #[arg(long, env = "APN_SPECTRA_JOBS", global = true)]
    pub jobs: Option<usize>,
    /// Report wall-clock time in text and JSON output (makes output non-reproducible).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Describe GF(p^n): order, defining polynomial, primitive element, residues.
    FieldInfo {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long)]
        n: u32,
        /// Monic defining polynomial as constant-first coefficients, e.g. 1,0,2,1.
        #[arg(long, value_delimiter = ',')]
        poly: Option<Vec<u32>>,
    },
    /// Differential spectrum of x^d, with d an integer or a fraction a/b.
    Spectrum {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long)]
        n: u32,
        #[arg(long = "exp")]
        exponent: String,
        /// Spectrum over all directions instead of a = 1.
        #[arg(long)]
        full: bool,
        /// With --full, sweep every direction instead of scaling.
        #[arg(long, requires = "full")]
        brute_force: bool,
        /// Emit the fiber size over every c.
        #[arg(long)]
        per_fiber: bool,
    },
    /// Check the predicted fiber sizes of the derivative of x^d for (n, k).
    Verify {
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: u32,
        /// Also compare fiber multisets along the chain delta, f1, ..., f4.
        #[arg(long)]
        chain: bool,
        /// Also check the cover closed forms and fiber structure.
        #[arg(long)]
        covers: bool,
    },
    /// Equivalence class of d modulo p^n - 1, or whether e is in it.
    Equiv {
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        d: u64,
        #[arg(long)]
        e: Option<u64>,
    },
    /// Convert between (n, m, d) equation form and (n, j) fraction form.
    ZhaWang {
        #[arg(long)]
        n: u32,
        #[arg(long, requires = "d", conflicts_with = "j")]
        m: Option<u32>,
        #[arg(long, requires = "m")]
        d: Option<u64>,
        #[arg(long)]
        j: Option<u32>,
    },
    /// List every equivalence class of APN exponents over GF(p^n).
    SearchApn {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long)]
        n: u32,
        /// Largest field order to scan; the cost is about q times the number of classes.
        #[arg(long, default_value_t = DEFAULT_SEARCH_BOUND)]
        max_order: u64,
    },
}

/// A finished command: structured payload plus a flat table and a text view.
struct Outcome {
    command: &'static str,
    inputs: Value,
    result: Value,
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    text: String,
    verified: bool,
}

type CmdResult = Result<Outcome, String>;

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    run_cli(&cli, out, err)
}

pub fn run_cli(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let outcome = match cli.jobs {
        Some(0) => Err("--jobs must be positive".to_string()),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| execute(&cli.command)),
            Err(e) => Err(e.to_string()),
        },
        None => execute(&cli.command),
    };
    let outcome = match outcome {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(err, "error: {msg}");
            return EXIT_USAGE;
        }
    };
    let elapsed = cli.timing.then(|| start.elapsed().as_millis() as u64);
    if let Err(e) = render(&outcome, cli.format, elapsed, out) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    if outcome.verified {
        EXIT_OK
    } else {
        EXIT_MISMATCH
    }
}

fn render(o: &Outcome, format: Format, elapsed: Option<u64>, out: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Text => {
            write!(out, "{}", o.text)?;
            if let Some(ms) = elapsed {
                writeln!(out, "elapsed_ms = {ms}")?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&o.header)?;
            for row in &o.rows {
                w.write_record(row)?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            out.write_all(&bytes)?;
        }
        Format::Json => {
            let mut record = json!({
                "command": o.command,
                "inputs": o.inputs,
                "result": o.result,
            });
            if let Some(ms) = elapsed {
                record["elapsed_ms"] = json!(ms);
            }
            let s = serde_json::to_string_pretty(&record).map_err(std::io::Error::other)?;
            writeln!(out, "{s}")?;
        }
    }
    Ok(())
}

fn execute(cmd: &Command) -> CmdResult {
    match cmd {
        Command::FieldInfo { p, n, poly } => field_info(*p, *n, poly.clone()),
        Command::Spectrum {
            p,
            n,
            exponent,
            full,
            brute_force,
            per_fiber,
        } => spectrum(*p, *n, exponent, *full, *brute_force, *per_fiber),
        Command::Verify { n, k, chain, covers } => verify(*n, *k, *chain, *covers),
        Command::Equiv { p, n, d, e } => equiv(*p, *n, *d, *e),
        Command::ZhaWang { n, m, d, j } => zha_wang(*n, *m, *d, *j),
        Command::SearchApn { p, n, max_order } => search_apn(*p, *n, *max_order),
    }
}

fn field_info(p: u32, n: u32, poly: Option<Vec<u32>>) -> CmdResult {
    let f = Field::new(p, n, poly.clone()).map_err(|e| e.to_string())?;
    let residues = f.units().filter(|&x| f.quadratic_character(x) == 1).count();
    let primitive = f.format(f.primitive_element());
    let description = f.description();
    let q = f.order();
    Ok(Outcome {
        command: "field-info",
        inputs: json!({ "p": p, "n": n, "poly": poly }),
        result: json!({
            "q": q,
            "description": description,
            "primitive_element": primitive,
            "residue_count": residues,
        }),
        header: vec!["key", "value"],
        rows: vec![
            vec!["q".into(), q.to_string()],
            vec!["description".into(), description.clone()],
            vec!["primitive_element".into(), primitive.clone()],
            vec!["residue_count".into(), residues.to_string()],
        ],
        text: format!(
            "q = {q}\npolynomial = {description}\nprimitive element = {primitive}\nquadratic residues = {residues}\n"
        ),
        verified: true,
    })
}

fn spectrum_json(s: &SpectrumMultiset) -> Value {
    serde_json::to_value(s).expect("spectrum serializes")
}

fn spectrum(p: u32, n: u32, exponent: &str, full: bool, brute: bool, per_fiber: bool) -> CmdResult {
    let f = Field::new(p, n, None).map_err(|e| e.to_string())?;
    let fe: FractionalExponent = exponent.parse().map_err(|e: crate::numth::NumthError| e.to_string())?;
    let resolved = resolve_exponent(&fe, f.unit_order()).map_err(|e| e.to_string())?;
    let d = resolved.value;
    let table = spectra::derivative_fiber_table(&f, d, f.one()).map_err(|e| e.to_string())?;
    let reduced = table.spectrum();
    let shown = match (full, brute) {
        (false, _) => reduced.clone(),
        (true, false) => reduced.scaled(f.unit_order()),
        (true, true) => spectra::full_spectrum_brute_force(&f, d).map_err(|e| e.to_string())?,
    };
    let uniformity = table.max_count();
    let apn = uniformity == 2;
    let fibers: Vec<(String, u32, u64)> = table.iter().map(|(c, k)| (f.format(c), c.index(), k)).collect();
    let mut result = json!({
        "field": f.description(),
        "exponent": {
            "numerator": resolved.numerator.to_string(),
            "denominator": resolved.denominator.to_string(),
            "resolved": d,
        },
        "kind": if full { "full" } else { "reduced" },
        "spectrum": shown.to_string(),
        "entries": spectrum_json(&shown),
        "uniformity": uniformity,
        "apn": apn,
    });
    let (header, rows) = if per_fiber {
        result["fibers"] = fibers
            .iter()
            .map(|(c, i, k)| json!({ "c": c, "index": i, "count": k }))
            .collect();
        (
            vec!["c", "index", "count"],
            fibers
                .iter()
                .map(|(c, i, k)| vec![c.clone(), i.to_string(), k.to_string()])
                .collect(),
        )
    } else {
        (
            vec!["size", "count"],
            shown
                .entries()
                .iter()
                .map(|e| vec![e.size.to_string(), e.count.to_string()])
                .collect(),
        )
    };
    let mut text = format!(
        "field = {}\nd = {d}\nspectrum = {shown}\nuniformity = {uniformity}\napn = {apn}\n",
        f.description()
    );
    if per_fiber {
        for (c, _, k) in &fibers {
            text.push_str(&format!("{c}: {k}\n"));
        }
    }
    Ok(Outcome {
        command: "spectrum",
        inputs: json!({
            "p": p, "n": n, "exp": exponent, "full": full,
            "brute_force": brute, "per_fiber": per_fiber,
        }),
        result,
        header,
        rows,
        text,
        verified: true,
    })
}

fn verify(n: u32, k: u32, chain: bool, covers: bool) -> CmdResult {
    let ctx = ChainContext::new(n, k).map_err(|e| e.to_string())?;
    let report = ctx.verify(Target::Derivative).map_err(|e| e.to_string())?;
    let matched = report.records.iter().filter(|r| r.matches).count();
    let total = report.records.len();
    let spectrum = ctx
        .stage_table(crate::chain::ChainStage::Derivative)
        .map_err(|e| e.to_string())?
        .spectrum();
    let mut verified = report.all_match;
    let mut result = json!({
        "field": report.field,
        "d": report.d,
        "fibers": report.records,
        "all_match": report.all_match,
        "spectrum": spectrum.to_string(),
        "predicted_spectrum": ctx.predicted_spectrum().to_string(),
    });
    let mut text = format!(
        "field = {}\nd = {}\nfibers matching prediction: {matched}/{total}\nspectrum = {spectrum}\n",
        report.field, report.d
    );
    if chain {
        let stages = ctx.chain_spectra().map_err(|e| e.to_string())?;
        let relations = ctx.chain_relations_hold().map_err(|e| e.to_string())?;
        let same = stages.iter().all(|(_, s)| *s == stages[0].1);
        verified &= same && relations;
        result["chain"] = stages
            .iter()
            .map(|(st, s)| json!({ "stage": st.name(), "spectrum": s.to_string() }))
            .collect();
        result["chain_match"] = json!(same);
        result["chain_relations"] = json!(relations);
        for (st, s) in &stages {
            text.push_str(&format!("{}: {s}\n", st.name()));
        }
        text.push_str(&format!("chain multisets equal: {same}\nchain relations hold: {relations}\n"));
    }
    if covers {
        let mut cover = serde_json::Map::new();
        for (name, target) in [("f4", Target::F4), ("kappa", Target::Kappa), ("lambda", Target::Lambda)] {
            let ok = ctx.verify(target).map_err(|e| e.to_string())?.all_match;
            verified &= ok;
            cover.insert(name.into(), json!(ok));
            text.push_str(&format!("{name} closed form: {ok}\n"));
        }
        let structure = ctx.fiber_structure_checks().map_err(|e| e.to_string())?;
        verified &= structure.all();
        cover.insert("structure".into(), serde_json::to_value(structure).expect("serializes"));
        text.push_str(&format!("fiber structure: {}\n", structure.all()));
        result["covers"] = Value::Object(cover);
    }
    text.push_str(if verified { "verified\n" } else { "MISMATCH\n" });
    Ok(Outcome {
        command: "verify",
        inputs: json!({ "n": n, "k": k, "chain": chain, "covers": covers }),
        result,
        header: vec!["c", "index", "brute", "predicted", "matches"],
        rows: report
            .records
            .iter()
            .map(|r| {
                vec![
                    r.c.clone(),
                    r.index.to_string(),
                    r.brute.to_string(),
                    r.predicted.to_string(),
                    r.matches.to_string(),
                ]
            })
            .collect(),
        text,
        verified,
    })
}

fn equiv(p: u64, n: u32, d: u64, e: Option<u64>) -> CmdResult {
    let class = equivalence_class(d, p, n).map_err(|e| e.to_string())?;
    let inputs = json!({ "p": p, "n": n, "d": d, "e": e });
    let members = class
        .members
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    match e {
        Some(e) => {
            let eq = are_equivalent(d, e, p, n).map_err(|e| e.to_string())?;
            Ok(Outcome {
                command: "equiv",
                inputs,
                result: json!({ "class": class, "equivalent": eq }),
                header: vec!["d", "e", "equivalent"],
                rows: vec![vec![d.to_string(), e.to_string(), eq.to_string()]],
                text: format!("{eq}\n"),
                verified: true,
            })
        }
        None => Ok(Outcome {
            command: "equiv",
            inputs,
            result: serde_json::to_value(&class).expect("serializes"),
            header: vec!["modulus", "representative", "member"],
            rows: class
                .members
                .iter()
                .map(|m| vec![class.modulus.to_string(), class.representative.to_string(), m.to_string()])
                .collect(),
            text: format!("{{{members}}}\n"),
            verified: true,
        }),
    }
}

fn zha_wang(n: u32, m: Option<u32>, d: Option<u64>, j: Option<u32>) -> CmdResult {
    let (zw, form) = match (m, d, j) {
        (Some(m), Some(d), None) => {
            let zw = ZhaWangParams::try_from((n, m, d)).map_err(|e| e.to_string())?;
            let form = zha_wang_to_fraction(&zw).map_err(|e| e.to_string())?;
            (zw, form)
        }
        (None, None, Some(j)) => {
            let zw = fraction_to_zha_wang(n, j).map_err(|e| e.to_string())?;
            let form = zha_wang_to_fraction(&zw).map_err(|e| e.to_string())?;
            (zw, form)
        }
        _ => return Err("give either --m and --d, or --j".into()),
    };
    let rec = zw.record();
    let text = format!(
        "n = {}\nm = {}\nd = {}\nk = {}\nequation: (3^{} + 1)*{} - 2 = {}*(3^{} - 1): {}\nj = {}\nfraction = {}\nresolved = {}\n",
        rec.n, rec.m, rec.d, rec.k, rec.m, rec.d, rec.k, rec.n, rec.equation_check, form.j, form.fraction, form.resolved
    );
    Ok(Outcome {
        command: "zha-wang",
        inputs: json!({ "n": n, "m": m, "d": d, "j": j }),
        result: json!({ "instance": rec, "fraction": form }),
        header: vec!["n", "m", "d", "k", "equation_check", "j", "fraction", "resolved"],
        rows: vec![vec![
            rec.n.to_string(),
            rec.m.to_string(),
            rec.d.to_string(),
            rec.k.to_string(),
            rec.equation_check.to_string(),
            form.j.to_string(),
            form.fraction.clone(),
            form.resolved.to_string(),
        ]],
        text,
        verified: rec.equation_check,
    })
}

fn search_apn(p: u32, n: u32, max_order: u64) -> CmdResult {
    let q = (p as u64).checked_pow(n).unwrap_or(u64::MAX);
    if q > max_order {
        return Err(format!(
            "GF({p}^{n}) has order {q}, above the search bound {max_order}; raise it with --max-order"
        ));
    }
    let f = Field::new(p, n, None).map_err(|e| e.to_string())?;
    let classes = all_classes(p as u64, n).map_err(|e| e.to_string())?;
    let found: Vec<(crate::equiv::ExponentClass, SpectrumMultiset)> = classes
        .into_par_iter()
        .filter_map(|class| {
            let table = spectra::derivative_fiber_table(&f, class.representative, f.one()).ok()?;
            (table.max_count() == 2).then(|| (class, table.spectrum()))
        })
        .collect();
    let mut text = format!("field = {}\napn classes = {}\n", f.description(), found.len());
    for (c, s) in &found {
        let members = c.members.iter().map(u64::to_string).collect::<Vec<_>>().join(", ");
        text.push_str(&format!("{}: {{{members}}} {s}\n", c.representative));
    }
    Ok(Outcome {
        command: "search-apn",
        inputs: json!({ "p": p, "n": n, "max_order": max_order }),
        result: json!({
            "field": f.description(),
            "classes": found
                .iter()
                .map(|(c, s)| json!({
                    "representative": c.representative,
                    "members": c.members,
                    "spectrum": s.to_string(),
                }))
                .collect::<Vec<_>>(),
        }),
        header: vec!["representative", "members", "spectrum"],
        rows: found
            .iter()
            .map(|(c, s)| {
                vec![
                    c.representative.to_string(),
                    c.members.iter().map(u64::to_string).collect::<Vec<_>>().join(" "),
                    s.to_string(),
                ]
            })
            .collect(),
        text,
        verified: true,
    })
}
