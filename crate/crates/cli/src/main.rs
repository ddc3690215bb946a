use std::collections::BTreeMap;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use weyl_deform::dmod::{self, hom_search, iso_witness, CyclicModule, ModuleSpec, PresentedModule, DEFAULT_MAX_DEGREE};
use weyl_deform::ext::{ext_table, standard_family};
use weyl_deform::hull::hull_unobstructed;
use weyl_deform::parse::parse_weyl;
use weyl_deform::rep::{
    classify, default_samples, family_by_label, find_proper_submodule, generated_algebra_dimension, is_indecomposable,
    is_simple, Representation,
};
use weyl_deform::scalar::{format_scalar, parse_scalar, Scalar};
use weyl_deform::versal::{commutative_specialize, identify_specialization, specialize, CommutativePoint, IdentificationReport};
use weyl_deform::Error;

#[derive(Parser)]
#[command(name = "weyl-deform", version, about = "Exact deformations of D/Dd and D/Dt over the first Weyl algebra")]
struct Cli {
    /// Truncation degree N for bounded searches (at most 16)
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_DEGREE)]
    max_degree: usize,

    /// Parameter value for labelled families, e.g. a=1/2 (repeatable)
    #[arg(long = "param", global = true, value_name = "KEY=VALUE")]
    params: Vec<String>,

    /// Comma-separated parameter samples for one-parameter families
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    samples: Vec<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Ext^1 and Ext^2 table of the family {D/Dd, D/Dt}
    Ext,
    /// Hull and algebraization of the family
    Hull,
    /// Classify n-dimensional modules over the algebraization (n <= 4)
    Classify { n: usize },
    /// Decide simplicity of a representation (JSON or label)
    Simple { rep: String },
    /// Specialize the versal family at a representation (JSON or label)
    Specialize { rep: String },
    /// Specialize the commutative family at (alpha, beta)
    Commutative {
        #[arg(allow_hyphen_values = true)]
        alpha: String,
        #[arg(allow_hyphen_values = true)]
        beta: String,
    },
    /// Truncated hom space D/Dp -> D/Dq
    Hom {
        #[arg(allow_hyphen_values = true)]
        p: String,
        #[arg(allow_hyphen_values = true)]
        q: String,
    },
    /// Isomorphism witness between two modules (Weyl elements or module JSON)
    Iso {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
}

struct Output {
    json: Value,
    text: String,
    found: bool,
}

impl Output {
    fn new<T: Serialize>(value: &T, text: String) -> Result<Self, Error> {
        Ok(Output {
            json: serde_json::to_value(value).map_err(|e| Error::Invalid(e.to_string()))?,
            text,
            found: true,
        })
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Syntax { .. } => "syntax",
        Error::Scalar(_) => "scalar",
        Error::DimensionMismatch(_) => "dimension_mismatch",
        Error::RelationViolation(_) => "relation_violation",
        Error::Obstructed => "obstructed",
        Error::UnsupportedResolution => "unsupported_resolution",
        Error::UnsupportedDimension(_) => "unsupported_dimension",
        Error::DegreeCap(_) => "degree_cap",
        Error::NotStabilized { .. } => "not_stabilized",
        Error::Invalid(_) => "invalid",
    }
}

fn params(cli: &Cli) -> Result<BTreeMap<String, Scalar>, Error> {
    cli.params
        .iter()
        .map(|kv| {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Invalid(format!("--param expects key=value, got `{kv}`")))?;
            Ok((k.trim().to_string(), parse_scalar(v.trim())?))
        })
        .collect()
}

fn samples(cli: &Cli) -> Result<Vec<Scalar>, Error> {
    if cli.samples.is_empty() {
        return Ok(default_samples());
    }
    cli.samples.iter().map(|s| parse_scalar(s.trim())).collect()
}

fn representation(cli: &Cli, text: &str) -> Result<Representation, Error> {
    let text = text.trim();
    if text.starts_with('{') {
        let rep: Representation =
            serde_json::from_str(text).map_err(|e| Error::Invalid(format!("representation JSON: {e}")))?;
        rep.check()?;
        Ok(rep)
    } else {
        family_by_label(text)?.instantiate_named(&params(cli)?)
    }
}

fn module(text: &str) -> Result<PresentedModule, Error> {
    let text = text.trim();
    if text.starts_with('{') {
        let spec: ModuleSpec = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("module JSON: {e}")))?;
        spec.into_module()
    } else {
        Ok(CyclicModule::new(parse_weyl(text)?)?.presented())
    }
}

fn cyclic(text: &str) -> Result<CyclicModule, Error> {
    CyclicModule::new(parse_weyl(text)?)
}

fn report_text(report: &IdentificationReport) -> String {
    let mut lines = Vec::new();
    if let Some(c) = &report.cyclic_form {
        lines.push(format!("cyclic form: D/D({c})"));
    }
    if !report.summands.is_empty() {
        lines.push(format!("summands: {}", report.summands.join(" + ")));
    }
    lines.push(report.status.clone());
    if let Some(m) = report.matched.as_ref().and_then(|m| m.shift) {
        lines.push(format!("shift m = {m}"));
    }
    lines.join("\n")
}

fn run(cli: &Cli) -> Result<Output, Error> {
    let n = cli.max_degree;
    dmod::check_degree(n)?;
    match &cli.command {
        Command::Ext => {
            let table = ext_table(&standard_family(), n)?;
            let text = format!(
                "ext1 = {:?}\next2 = {:?}\nstabilized at N = {}",
                table.ext1, table.ext2, table.stabilized_at
            );
            Output::new(&table, text)
        }
        Command::Hull => {
            let hull = hull_unobstructed(&ext_table(&standard_family(), n)?)?;
            let text = hull.to_string();
            Output::new(&hull, text)
        }
        Command::Classify { n: dim } => {
            let result = classify(*dim, &samples(cli)?)?;
            let mut text = format!(
                "{} discrete and {} one-parameter classes in dimension {dim}",
                result.discrete(),
                result.parametric()
            );
            for f in &result.families {
                let mut flags = Vec::new();
                if f.simple {
                    flags.push("simple".to_string());
                }
                if f.indecomposable {
                    flags.push("indecomposable".to_string());
                }
                if !f.decomposition.is_empty() {
                    flags.push(format!("= {}", f.decomposition.join(" + ")));
                }
                text.push_str(&format!("\n{} {}", f.label(), flags.join(", ")));
            }
            Output::new(&result, text)
        }
        Command::Simple { rep } => {
            let t = representation(cli, rep)?;
            let simple = is_simple(&t);
            let submodule = find_proper_submodule(&t)?;
            let value = json!({
                "label": t.label,
                "n": t.n(),
                "simple": simple,
                "indecomposable": is_indecomposable(&t),
                "algebra_dimension": generated_algebra_dimension(&t),
                "criterion": "generated matrix algebra has dimension n^2",
                "proper_submodule": submodule.as_ref().map(|basis| basis
                    .iter()
                    .map(|v| v.iter().map(format_scalar).collect::<Vec<_>>())
                    .collect::<Vec<_>>()),
            });
            let name = t.label.clone().unwrap_or_else(|| "representation".into());
            let text = format!("{name} is {}", if simple { "simple" } else { "not simple" });
            Output::new(&value, text)
        }
        Command::Specialize { rep } => {
            let t = representation(cli, rep)?;
            let report = identify_specialization(&t, n);
            let presentation = ModuleSpec::from_module(&specialize(&t));
            let text = format!("presentation: {}\n{}", serde_json::to_string(&presentation).unwrap(), report_text(&report));
            let found = report.is_certified();
            let mut out = Output::new(&json!({ "representation": t, "report": report }), text)?;
            out.found = found;
            Ok(out)
        }
        Command::Commutative { alpha, beta } => {
            let pt = CommutativePoint::new(parse_scalar(alpha)?, parse_scalar(beta)?);
            let (_, report) = commutative_specialize(&pt, n);
            let found = report.is_certified();
            let value = json!({
                "alpha": format_scalar(&pt.alpha),
                "beta": format_scalar(&pt.beta),
                "report": report,
            });
            let mut out = Output::new(&value, report_text(&report))?;
            out.found = found;
            Ok(out)
        }
        Command::Hom { p, q } => {
            let space = hom_search(&cyclic(p)?, &cyclic(q)?, n);
            let basis: Vec<String> = space.basis.iter().map(|r| r.to_string()).collect();
            let text = format!("dim Hom = {} at N = {n}\nbasis: [{}]", space.dimension, basis.join(", "));
            Output::new(&space, text)
        }
        Command::Iso { a, b } => {
            let (ma, mb) = (module(a)?, module(b)?);
            match iso_witness(&ma, &mb, n) {
                Some(w) => {
                    let value = json!({
                        "source": ModuleSpec::from_module(&ma),
                        "target": ModuleSpec::from_module(&mb),
                        "verified": w.verify(),
                        "witness": w,
                    });
                    let text = format!(
                        "isomorphic: forward {:?}, backward {:?}",
                        w.forward.to_strings(),
                        w.backward.to_strings()
                    );
                    Output::new(&value, text)
                }
                None => {
                    let status = format!("no witness up to degree {n}");
                    let value = json!({
                        "source": ModuleSpec::from_module(&ma),
                        "target": ModuleSpec::from_module(&mb),
                        "status": status,
                        "witness": null,
                    });
                    let mut out = Output::new(&value, status)?;
                    out.found = false;
                    Ok(out)
                }
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).unwrap()),
                Format::Text => println!("{}", out.text),
            }
            if out.found {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            let body = json!({ "error": { "kind": error_kind(&e), "message": e.to_string() } });
            match cli.format {
                Format::Json => eprintln!("{}", serde_json::to_string_pretty(&body).unwrap()),
                Format::Text => eprintln!("error: {e}"),
            }
            ExitCode::from(1)
        }
    }
}
