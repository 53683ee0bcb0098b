// SPDX-License-Identifier: Apache-2.0

//! Command-line driver. Transforms run in the order their flags appear;
//! analyses run afterwards on the transformed graph.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::parser::ValueSource;
use clap::{value_parser, Arg, ArgAction, ArgMatches, Command};

use crate::cost::{
    estimate, load_config, load_profile, CostTable, FabricConfig, PAPER_DEFAULT_PROFILE,
};
use crate::critical_path::{throughput, CpMethod};
use crate::fixtures::Fixture;
use crate::ir::{CircuitGraph, Dialect};
use crate::report::{emit_report, Report, ReportFormat, RunManifest};
use crate::text::{parse, print};
use crate::transforms::{canonicalize, lower_gates, sectionize};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

const TRANSFORMS: [&str; 3] = ["lower-gates", "canonicalize", "sectionize"];

pub fn command() -> Command {
    let flag = |name: &'static str, help: &'static str| {
        Arg::new(name)
            .long(name)
            .help(help)
            .action(ArgAction::SetTrue)
    };
    let transform = |name: &'static str, help: &'static str| {
        Arg::new(name)
            .long(name)
            .help(help)
            .action(ArgAction::Count)
    };
    Command::new("fabric-est")
        .about("Estimate fabric resources, critical path and throughput of FHE circuits")
        .version(env!("CARGO_PKG_VERSION"))
        .arg(
            Arg::new("input")
                .value_name("INPUT")
                .help("Circuit in textual IR (.scifr)")
                .value_parser(value_parser!(PathBuf))
                .required_unless_present("fixture"),
        )
        .arg(transform(
            "lower-gates",
            "Rewrite named Boolean gates as lut_lincomb",
        ))
        .arg(transform(
            "canonicalize",
            "Remove dead ops, fold double negation, fuse gates into LUTs",
        ))
        .arg(transform(
            "sectionize",
            "Partition into capacity-bounded sections",
        ))
        .arg(
            Arg::new("capacity")
                .long("capacity")
                .value_name("FCS")
                .help("Section capacity in FCs [default: usable FCs of one chip]")
                .value_parser(value_parser!(u64).range(1..))
                .requires("sectionize"),
        )
        .arg(
            flag("cggi-estimate", "Estimate resources of a Boolean circuit")
                .alias("cggi-tigris-estimator"),
        )
        .arg(
            flag("ckks-estimate", "Estimate resources of a CKKS circuit")
                .alias("ckks-tigris-estimate"),
        )
        .arg(flag("critical-path", "Report the critical path"))
        .arg(
            Arg::new("method")
                .long("method")
                .value_name("METHOD")
                .help("Critical-path method")
                .value_parser(["approx", "paper-exact", "longest", "all"])
                .default_value("all"),
        )
        .arg(flag("throughput", "Report pipelined throughput").requires("batch"))
        .arg(
            Arg::new("batch")
                .long("batch")
                .value_name("N")
                .help("Batch size for --throughput")
                .value_parser(value_parser!(u64).range(1..))
                .requires("throughput"),
        )
        .arg(
            Arg::new("config")
                .long("config")
                .value_name("PATH")
                .help("JSON fabric and cost configuration")
                .value_parser(value_parser!(PathBuf))
                .conflicts_with("profile"),
        )
        .arg(
            Arg::new("profile")
                .long("profile")
                .value_name("NAME")
                .help("Built-in configuration profile")
                .value_parser([PAPER_DEFAULT_PROFILE]),
        )
        .arg(
            Arg::new("emit")
                .long("emit")
                .value_name("FORMAT")
                .help("Report format")
                .value_parser(["text", "json"])
                .default_value("text"),
        )
        .arg(flag(
            "print-ir",
            "Print the transformed IR before the report",
        ))
        .arg(
            Arg::new("fixture")
                .long("fixture")
                .value_name("NAME")
                .help("Write a generated fixture, e.g. half-adder or array-mult(8)")
                .conflicts_with("input"),
        )
        .arg(
            Arg::new("output")
                .short('o')
                .long("output")
                .value_name("PATH")
                .help("Fixture output file [default: standard output]")
                .value_parser(value_parser!(PathBuf))
                .requires("fixture"),
        )
}

/// Runs the driver on `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(rendered.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = stderr.write_all(rendered.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match drive(&matches, stdout) {
        Ok(()) => EXIT_OK,
        Err(Failure(message)) => {
            let _ = writeln!(stderr, "{message}");
            EXIT_FAILURE
        }
    }
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(format!("error: {e}"))
    }
}

fn fail(message: String) -> Failure {
    Failure(format!("error: {message}"))
}

fn drive(m: &ArgMatches, stdout: &mut dyn Write) -> Result<(), Failure> {
    if let Some(name) = m.get_one::<String>("fixture") {
        let graph = name.parse::<Fixture>()?.generate()?;
        let text = print(&graph);
        match m.get_one::<PathBuf>("output") {
            Some(path) => {
                fs::write(path, text).map_err(|e| fail(format!("{}: {e}", path.display())))?
            }
            None => stdout.write_all(text.as_bytes())?,
        }
        return Ok(());
    }

    let input = m.get_one::<PathBuf>("input").expect("required by clap");
    let source =
        fs::read_to_string(input).map_err(|e| fail(format!("{}: {e}", input.display())))?;
    let mut graph = parse(&source).map_err(|diags| {
        let lines: Vec<String> = diags
            .iter()
            .map(|d| format!("{}:{d}", input.display()))
            .collect();
        Failure(lines.join("\n"))
    })?;

    let (fabric, costs, config_label) = match m.get_one::<PathBuf>("config") {
        Some(path) => {
            let (f, c) = load_config(path)?;
            (f, c, path.display().to_string())
        }
        None => {
            let name = m
                .get_one::<String>("profile")
                .map(String::as_str)
                .unwrap_or(PAPER_DEFAULT_PROFILE);
            let (f, c) = load_profile(name)?;
            (f, c, format!("profile:{name}"))
        }
    };

    let mut passes = Vec::new();
    for name in ordered_transforms(m) {
        graph = apply_transform(name, graph, m, &fabric, &costs, &mut passes)?;
    }

    let format = match m.get_one::<String>("emit").map(String::as_str) {
        Some("json") => ReportFormat::Json,
        _ => ReportFormat::Text,
    };

    let mut resources = None;
    for (flag, dialect) in [
        ("cggi-estimate", Dialect::Boolean),
        ("ckks-estimate", Dialect::Ckks),
    ] {
        if !m.get_flag(flag) {
            continue;
        }
        if let Some(other) = graph.dialects().into_iter().find(|d| *d != dialect) {
            return Err(fail(format!(
                "--{flag} expects only {} ops, but '{}' contains {} ops",
                dialect.prefix(),
                graph.name,
                other.prefix()
            )));
        }
        passes.push(flag.to_string());
        resources = Some(estimate(&graph, &fabric, &costs));
    }

    let method_arg = m.get_one::<String>("method").expect("has default").as_str();
    let selected: Vec<CpMethod> = match method_arg {
        "all" => CpMethod::ALL.to_vec(),
        one => CpMethod::ALL
            .into_iter()
            .filter(|c| c.name() == one)
            .collect(),
    };
    let mut critical_path = Vec::new();
    if m.get_flag("critical-path") {
        passes.push(format!("critical-path({method_arg})"));
        for method in &selected {
            critical_path.push(method.run(&graph, &fabric)?);
        }
    }

    let mut tput = None;
    if m.get_flag("throughput") {
        let batch = *m.get_one::<u64>("batch").expect("required by clap");
        let method = match selected[..] {
            [one] => one,
            _ => CpMethod::LongestPath,
        };
        let depth = match critical_path.iter().find(|c| c.method == method) {
            Some(cp) => cp.depth,
            None => method.run(&graph, &fabric)?.depth,
        };
        passes.push(format!("throughput({method}, batch={batch})"));
        tput = Some(throughput(depth, batch, &fabric)?);
    }

    let analysed = resources.is_some() || !critical_path.is_empty() || tput.is_some();
    if m.get_flag("print-ir") || !analysed {
        stdout.write_all(print(&graph).as_bytes())?;
    }
    if analysed {
        let report = Report {
            manifest: RunManifest {
                input: input.display().to_string(),
                passes,
                config: config_label,
                format,
                exit_status: EXIT_OK,
            },
            resources,
            critical_path,
            throughput: tput,
        };
        stdout.write_all(emit_report(&report).as_bytes())?;
    }
    Ok(())
}

/// Transform flags in command-line order, repeated flags included.
fn ordered_transforms(m: &ArgMatches) -> Vec<&'static str> {
    let mut seen: Vec<(usize, &'static str)> = TRANSFORMS
        .iter()
        .filter(|&&name| m.value_source(name) == Some(ValueSource::CommandLine))
        .flat_map(|&name| {
            m.indices_of(name)
                .into_iter()
                .flatten()
                .map(move |idx| (idx, name))
        })
        .collect();
    seen.sort();
    seen.into_iter().map(|(_, name)| name).collect()
}

fn apply_transform(
    name: &str,
    graph: CircuitGraph,
    m: &ArgMatches,
    fabric: &FabricConfig,
    costs: &CostTable,
    passes: &mut Vec<String>,
) -> Result<CircuitGraph, Failure> {
    Ok(match name {
        "lower-gates" => {
            passes.push(name.to_string());
            lower_gates(&graph)
        }
        "canonicalize" => {
            passes.push(name.to_string());
            canonicalize(&graph)
        }
        _ => {
            let capacity = m
                .get_one::<u64>("capacity")
                .copied()
                .unwrap_or_else(|| fabric.usable_fcs_per_chip());
            let (out, plan) = sectionize(&graph, capacity, costs)?;
            passes.push(format!(
                "sectionize(capacity={capacity}, sections={})",
                plan.section_count
            ));
            out
        }
    })
}
