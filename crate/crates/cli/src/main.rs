mod args;

use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use polyflake::dimension::{
    asymptote_check, box_count_estimate, ngon_dimension, AsymptoteKind, DimensionResult,
    DEFAULT_BOX_LEVELS,
};
use polyflake::exact::{iterate, osculation_check, OsculationReport};
use polyflake::geometry::{canonical_m, CenterFamily, CenterMapSpec, CenterRotation, Density};
use polyflake::ifs::{build_flake, preset, FlakeSpec, IfsSystem, ProbabilityRule, PRESET_NAMES};
use polyflake::render::{encode_png, rasterize, render_polygons, RenderConfig};
use polyflake::{flake_dimension, generate, orbit_parallel};
use serde_json::{json, Value};

use args::{
    CenterArg, CheckArgs, Cli, Command, DimArgs, GenArgs, GenFormat, ImageArgs, IterArgs,
    IterFormat, PresetAction, PresetArgs, SweepArgs, SweepKind, SystemArgs,
};

/// Largest n for which `dim` runs the pairwise crossing check on flakes.
const CHECK_LIMIT: u32 = 200;

#[derive(Debug)]
enum CliError {
    /// Flags that do not describe a valid system; exit code 2.
    Usage(String),
    /// Failures while doing the work; exit code 1.
    Runtime(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Runtime(m) => m,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn runtime(e: impl ToString) -> CliError {
    CliError::Runtime(e.to_string())
}

struct Resolved {
    spec: FlakeSpec,
    system: IfsSystem,
    uniform: bool,
}

fn resolve(args: &SystemArgs) -> CliResult<Resolved> {
    let mut spec = match (&args.preset, args.n) {
        (Some(_), Some(_)) => return Err(usage("use either --preset or --n, not both")),
        (None, None) => return Err(usage("either --n or --preset is required")),
        (Some(name), None) => {
            if args.m.is_some() {
                return Err(usage("--m cannot be combined with --preset"));
            }
            preset(name).map_err(usage)?
        }
        (None, Some(n)) => {
            let canonical = canonical_m(n).map_err(usage)?.m();
            match args.m {
                None => FlakeSpec::ngon(n, canonical),
                Some(m) => match m.as_integer() {
                    Some(m) => FlakeSpec::ngon(n, m),
                    None => FlakeSpec::ngon(n, canonical).with_draw_density(m),
                },
            }
        }
    };
    if let Some(m) = args.ratio_m {
        spec.m_ratio = m;
    }
    if let Some(r) = args.ratio {
        spec = spec.with_ratio(r);
    }
    match (args.center, args.rot) {
        (Some(CenterArg::None), Some(_)) => return Err(usage("--rot needs a center map")),
        (Some(CenterArg::None), None) => spec.center = None,
        (Some(CenterArg::Map(family, l)), rot) => {
            spec = spec.with_center(CenterMapSpec::new(
                family,
                l,
                rot.unwrap_or(CenterRotation::None),
            ));
        }
        (None, Some(rot)) => match spec.center.as_mut() {
            Some(c) => c.rotation = rot,
            None => return Err(usage("--rot needs a center map (--center L:<l> or M:<l>)")),
        },
        (None, None) => {}
    }
    spec.polygon().map_err(usage)?;
    let mut system = build_flake(&spec).map_err(usage)?;
    if args.uniform {
        system = system.with_probability_rule(ProbabilityRule::Uniform);
    }
    Ok(Resolved {
        spec,
        system,
        uniform: args.uniform,
    })
}

fn rotation_name(rotation: CenterRotation) -> String {
    match rotation {
        CenterRotation::None => "none".into(),
        CenterRotation::HalfStep => "half".into(),
        CenterRotation::Gamma => "gamma".into(),
        CenterRotation::Radians(r) => r.to_string(),
    }
}

fn system_json(r: &Resolved) -> CliResult<Value> {
    let spec = &r.spec;
    let center = match spec.center {
        None => Value::Null,
        Some(c) => json!({
            "family": match c.family { CenterFamily::L => "L", CenterFamily::M => "M" },
            "l": c.l,
            "scale": spec.center_scale().map_err(runtime)?,
            "rotation": rotation_name(c.rotation),
            "rotation_radians": spec.center_rotation().map_err(runtime)?,
        }),
    };
    Ok(json!({
        "spec": spec.to_string(),
        "n": spec.n,
        "m": spec.m_draw.to_string(),
        "ratio_m": spec.m_ratio,
        "ratio": spec.ratio().map_err(runtime)?,
        "maps": r.system.len(),
        "selection": if r.uniform { "uniform" } else { "area" },
        "center": center,
    }))
}

/// Where a command's payload goes.
enum Sink<'a> {
    Stdout,
    File(&'a Path),
}

impl Sink<'_> {
    fn new(out: &Option<std::path::PathBuf>) -> Sink<'_> {
        match out {
            Some(p) if p.as_os_str() != "-" => Sink::File(p),
            _ => Sink::Stdout,
        }
    }

    fn write(&self, bytes: &[u8]) -> CliResult<()> {
        match self {
            Sink::Stdout => {
                let mut lock = io::stdout().lock();
                lock.write_all(bytes)
                    .and_then(|_| lock.flush())
                    .map_err(runtime)
            }
            Sink::File(p) => {
                std::fs::write(p, bytes).map_err(|e| runtime(format!("{}: {e}", p.display())))
            }
        }
    }

    fn describe(&self) -> Value {
        match self {
            Sink::Stdout => Value::String("-".into()),
            Sink::File(p) => Value::String(p.display().to_string()),
        }
    }
}

/// Prints the run summary: to stdout, or to stderr when stdout carries the payload.
fn report(sink: &Sink, as_json: bool, summary: &Value, text: &str) {
    let body = if as_json {
        summary.to_string()
    } else {
        text.trim_end().to_owned()
    };
    match sink {
        Sink::Stdout => eprintln!("{body}"),
        Sink::File(_) => println!("{body}"),
    }
}

fn extension(out: &Option<std::path::PathBuf>) -> Option<String> {
    out.as_ref()
        .and_then(|p| p.extension())
        .map(|e| e.to_string_lossy().to_ascii_lowercase())
}

fn render_config(image: &ImageArgs) -> CliResult<RenderConfig> {
    let config = RenderConfig {
        width: image.width,
        height: image.height,
        margin: image.margin,
        point_size: image.point_size,
        ..RenderConfig::default()
    };
    config.validate().map_err(usage)?;
    Ok(config)
}

fn cmd_gen(args: &GenArgs, as_json: bool) -> CliResult<()> {
    let r = resolve(&args.system)?;
    let format = match args.format {
        Some(f) => f,
        None => match extension(&args.out).as_deref() {
            Some("png") => GenFormat::Png,
            Some("bin") => GenFormat::Binary,
            Some("json") => GenFormat::Json,
            Some("txt") | Some("matrix") => GenFormat::Matrix,
            _ => GenFormat::Csv,
        },
    };
    let sink = Sink::new(&args.out);
    let mut summary = json!({
        "command": "gen",
        "system": system_json(&r)?,
        "format": format!("{format:?}").to_lowercase(),
        "out": sink.describe(),
    });

    if format == GenFormat::Matrix {
        sink.write(r.system.to_matrix().to_string().as_bytes())?;
        let text = format!(
            "{}: {} maps written as a coefficient table",
            r.spec,
            r.system.len()
        );
        report(&sink, as_json, &summary, &text);
        return Ok(());
    }

    let config = if format == GenFormat::Png {
        Some(render_config(&args.image)?)
    } else {
        None
    };
    if args.points == 0 {
        return Err(usage("--points must be positive"));
    }
    let cloud = if args.orbits == 1 {
        generate(&r.system, args.points, args.seed)
    } else {
        let seeds: Vec<u64> = (0..args.orbits)
            .map(|i| args.seed.wrapping_add(i))
            .collect();
        orbit_parallel(&r.system, args.points, &seeds).map_err(usage)?
    };
    let bytes = match format {
        GenFormat::Png => {
            let img = rasterize(&cloud, config.as_ref().expect("png config")).map_err(runtime)?;
            encode_png(&img).map_err(runtime)?
        }
        GenFormat::Csv => cloud.to_csv().into_bytes(),
        GenFormat::Binary => {
            let mut buf = Vec::new();
            cloud.write_binary(&mut buf).map_err(runtime)?;
            buf
        }
        GenFormat::Json => serde_json::to_vec(&cloud).map_err(runtime)?,
        GenFormat::Matrix => unreachable!("handled above"),
    };
    sink.write(&bytes)?;
    summary["points"] = json!(cloud.len());
    summary["seeds"] = json!(cloud.seeds);
    summary["system_hash"] = json!(cloud.system_hash);
    let text = format!(
        "{}: {} points (seed {}) -> {}",
        r.spec,
        cloud.len(),
        args.seed,
        summary["out"]
    );
    report(&sink, as_json, &summary, &text);
    Ok(())
}

fn cmd_iter(args: &IterArgs, as_json: bool) -> CliResult<()> {
    let r = resolve(&args.system)?;
    let format = match args.format {
        Some(f) => f,
        None => match extension(&args.out).as_deref() {
            Some("png") => IterFormat::Png,
            Some("json") => IterFormat::Json,
            _ => IterFormat::Svg,
        },
    };
    let config = if format == IterFormat::Png {
        Some(render_config(&args.image)?)
    } else {
        None
    };
    let set = iterate(&r.spec, args.depth).map_err(usage)?;
    let bytes = match format {
        IterFormat::Svg => set.to_svg().into_bytes(),
        IterFormat::Json => set.to_json().to_string().into_bytes(),
        IterFormat::Png => {
            let img =
                render_polygons(&set, config.as_ref().expect("png config")).map_err(runtime)?;
            encode_png(&img).map_err(runtime)?
        }
    };
    let sink = Sink::new(&args.out);
    sink.write(&bytes)?;
    let summary = json!({
        "command": "iter",
        "system": system_json(&r)?,
        "depth": set.depth,
        "polygons": set.len(),
        "format": format!("{format:?}").to_lowercase(),
        "out": sink.describe(),
    });
    let text = format!(
        "{}: depth {}, {} polygons -> {}",
        r.spec,
        set.depth,
        set.len(),
        summary["out"]
    );
    report(&sink, as_json, &summary, &text);
    Ok(())
}

/// Whether the depth-1 copies are known not to cross: exactly by the density
/// rule for centerless n-gons, by the pairwise check otherwise.
fn non_crossing(spec: &FlakeSpec) -> CliResult<Option<bool>> {
    if spec.center.is_none() && spec.ratio_override.is_none() {
        return Ok(Some(spec.is_non_crossing_ngon()));
    }
    if spec.n > CHECK_LIMIT {
        return Ok(None);
    }
    Ok(Some(!osculation_check(spec).map_err(runtime)?.intersecting))
}

fn dimension_label(non_crossing: Option<bool>) -> &'static str {
    match non_crossing {
        Some(true) => "similarity dimension",
        Some(false) => "similarity dimension (upper bound)",
        None => "similarity dimension (crossings not checked)",
    }
}

fn cmd_dim(args: &DimArgs, as_json: bool) -> CliResult<()> {
    let r = resolve(&args.system)?;
    let dim = flake_dimension(&r.spec).map_err(runtime)?;
    let label = dimension_label(non_crossing(&r.spec)?);
    let mut summary = json!({
        "command": "dim",
        "system": system_json(&r)?,
        "dimension": dim.value,
        "method": dim.method,
        "residual": dim.residual,
        "label": label,
    });
    let mut text = format!(
        "{}\nsystem: {}\nmethod: {}\nresidual: {:e}\nlabel: {label}\n",
        dim.value, r.spec, dim.method, dim.residual
    );
    if args.box_count {
        let cloud = generate(&r.system, args.points, args.seed);
        let estimate: DimensionResult =
            box_count_estimate(&cloud.points, &DEFAULT_BOX_LEVELS).map_err(usage)?;
        summary["box_count"] = json!({
            "estimate": estimate.value,
            "fit_residual": estimate.residual,
            "points": args.points,
            "seed": args.seed,
            "levels": DEFAULT_BOX_LEVELS,
        });
        text.push_str(&format!(
            "box-count estimate: {:.4} ({} points, seed {})\n",
            estimate.value, args.points, args.seed
        ));
    }
    print_result(as_json, &summary, &text);
    Ok(())
}

fn print_result(as_json: bool, summary: &Value, text: &str) {
    if as_json {
        println!("{summary}");
    } else {
        print!("{text}");
    }
}

fn check_text(spec: &FlakeSpec, rep: &OsculationReport) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    format!(
        "system: {spec}\nintersecting: {}\ntouching pairs: {}\ncrossing pairs: {}\ncenter contacts: {}\nmin gap: {}\n",
        rep.intersecting,
        rep.touching_pairs,
        rep.crossing_pairs,
        opt(rep.center_contacts.map(|c| c.to_string())),
        opt(rep.min_gap.map(|g| format!("{g:.6e}"))),
    )
}

fn cmd_check(args: &CheckArgs, as_json: bool) -> CliResult<()> {
    let r = resolve(&args.system)?;
    let rep = osculation_check(&r.spec).map_err(runtime)?;
    let summary = json!({
        "command": "check",
        "system": system_json(&r)?,
        "intersecting": rep.intersecting,
        "touching_pairs": rep.touching_pairs,
        "crossing_pairs": rep.crossing_pairs,
        "center_contacts": rep.center_contacts,
        "min_gap": rep.min_gap,
    });
    print_result(as_json, &summary, &check_text(&r.spec, &rep));
    Ok(())
}

fn with_preset(system: &SystemArgs, name: &str) -> CliResult<SystemArgs> {
    if system.preset.as_deref().is_some_and(|p| p != name) {
        return Err(usage("conflicting --preset flag"));
    }
    Ok(SystemArgs {
        preset: Some(name.to_owned()),
        ..system.clone()
    })
}

fn cmd_preset(args: &PresetArgs, as_json: bool) -> CliResult<()> {
    let Some(name) = &args.name else {
        let mut rows = Vec::new();
        let mut text = String::new();
        for name in PRESET_NAMES {
            let spec = preset(name).map_err(runtime)?;
            text.push_str(&format!("{name:<20} {spec}\n"));
            rows.push(json!({ "name": name, "spec": spec.to_string() }));
        }
        print_result(
            as_json,
            &json!({ "command": "preset", "presets": rows }),
            &text,
        );
        return Ok(());
    };
    match &args.action {
        None => {
            let base = SystemArgs {
                preset: Some(name.clone()),
                ..SystemArgs::default()
            };
            let r = resolve(&base)?;
            let dim = flake_dimension(&r.spec).map_err(runtime)?;
            let summary = json!({
                "command": "preset",
                "name": name,
                "system": system_json(&r)?,
                "dimension": dim.value,
            });
            let text = format!(
                "{name}: {} with {} maps, dimension {}\n",
                r.spec,
                r.system.len(),
                dim.value
            );
            print_result(as_json, &summary, &text);
            Ok(())
        }
        Some(PresetAction::Gen(a)) => cmd_gen(
            &GenArgs {
                system: with_preset(&a.system, name)?,
                ..a.clone()
            },
            as_json,
        ),
        Some(PresetAction::Iter(a)) => cmd_iter(
            &IterArgs {
                system: with_preset(&a.system, name)?,
                ..a.clone()
            },
            as_json,
        ),
        Some(PresetAction::Dim(a)) => cmd_dim(
            &DimArgs {
                system: with_preset(&a.system, name)?,
                ..a.clone()
            },
            as_json,
        ),
        Some(PresetAction::Check(a)) => cmd_check(
            &CheckArgs {
                system: with_preset(&a.system, name)?,
            },
            as_json,
        ),
    }
}

fn cmd_sweep(args: &SweepArgs, as_json: bool) -> CliResult<()> {
    let kind = match args.kind {
        SweepKind::Ngon => AsymptoteKind::NGonToOne,
        SweepKind::Flake => AsymptoteKind::FlakeToTwo,
    };
    let mut rows: Vec<(f64, String, f64)> = Vec::new();
    if !args.values.is_empty() {
        for (n, d) in asymptote_check(kind, &args.values).map_err(usage)? {
            let m = match n {
                n if n <= f64::from(u32::MAX) && n.fract() == 0.0 => {
                    canonical_m(n as u32).map_err(usage)?.m().to_string()
                }
                n => format_n(n / 4.0),
            };
            rows.push((n, m, d));
        }
    } else {
        if args.from > args.to {
            return Err(usage(format!(
                "--from {} is greater than --to {}",
                args.from, args.to
            )));
        }
        for n in args.from..=args.to {
            let canonical = canonical_m(n).map_err(usage)?;
            let ms = if args.all_m {
                canonical.values()
            } else {
                vec![canonical.m()]
            };
            for m in ms {
                let d = match args.kind {
                    SweepKind::Ngon => ngon_dimension(n, m).map_err(runtime)?.value,
                    SweepKind::Flake => {
                        let spec = FlakeSpec::standard_flake(n).map_err(runtime)?;
                        let spec = FlakeSpec {
                            m_draw: Density::integer(m),
                            m_ratio: m,
                            ..spec
                        };
                        flake_dimension(&spec).map_err(runtime)?.value
                    }
                };
                rows.push((f64::from(n), m.to_string(), d));
            }
        }
    }
    let json_rows: Vec<Value> = rows
        .iter()
        .map(|(n, m, d)| json!({ "n": n, "m": m, "dimension": d }))
        .collect();
    let mut text = String::from("n\tm\tdimension\n");
    for (n, m, d) in &rows {
        text.push_str(&format!("{}\t{m}\t{d}\n", format_n(*n)));
    }
    let summary = json!({
        "command": "sweep",
        "kind": format!("{:?}", args.kind).to_lowercase(),
        "rows": json_rows,
    });
    print_result(as_json, &summary, &text);
    Ok(())
}

/// Integers as integers up to 1e15, scientific notation beyond.
fn format_n(n: f64) -> String {
    if n.fract() == 0.0 && n.abs() < 1e15 {
        format!("{n:.0}")
    } else {
        format!("{n:e}")
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, cli.json),
        Command::Iter(a) => cmd_iter(a, cli.json),
        Command::Dim(a) => cmd_dim(a, cli.json),
        Command::Check(a) => cmd_check(a, cli.json),
        Command::Preset(a) => cmd_preset(a, cli.json),
        Command::Sweep(a) => cmd_sweep(a, cli.json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if cli.json {
                let kind = if e.code() == 2 { "usage" } else { "runtime" };
                println!(
                    "{}",
                    json!({ "error": e.message(), "kind": kind, "exit_code": e.code() })
                );
            } else {
                eprintln!("error: {}", e.message());
            }
            ExitCode::from(e.code())
        }
    }
}
