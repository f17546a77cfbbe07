use std::path::PathBuf;

use snewton::diagnostics::{sobolev_chain_check, time_to_si, virial_check, PhysicalScales};
use snewton::stability::{
    analyze, default_length, rayleigh_residual, track, EigenMode, ModeClass, ModeSelector, SolverChoice,
    StabilityOptions,
};
use snewton::stationary::loglog_slope;
use snewton::verify::{ode_residual, rk_reconstruct, RkOptions};
use snewton::{Error, State};

use crate::cache::{self, Lookup};
use crate::config::{Cli, Command, FileConfig};
use crate::output::{num, opt_num, param, Csv, Header};
use crate::Failure;

/// Reference rows for the bounds table: max Re λ and the printed bound, n = 0..5.
const REFERENCE_MAX_RE: [f64; 6] = [0.0, 0.00139, 0.000520, 0.000225, 0.000114, 0.0000653];
const REFERENCE_BOUND: [f64; 6] = [0.00362, 0.00158, 0.00101, 0.000738, 0.000583, 0.000482];

struct Context {
    out: PathBuf,
    cache: PathBuf,
    file: FileConfig,
}

pub fn run(cli: Cli) -> Result<(), Failure> {
    let file = FileConfig::load(cli.config.as_deref())?;
    let out = cli.out.or_else(|| file.out.clone()).unwrap_or_else(|| PathBuf::from("."));
    let cache = cli.cache_dir.or_else(|| file.cache_dir.clone()).unwrap_or_else(|| PathBuf::from("cache"));
    let ctx = Context { out, cache, file };
    let f = &ctx.file;
    match cli.command {
        Command::States(a) => states(&ctx, a.n_max.or(f.n_max).unwrap_or(20)),
        Command::Stability(a) => {
            let solver = parse_solver(a.solver.as_deref().or(f.solver.as_deref()).unwrap_or("reduced"))?;
            stability(&ctx, a.n.or(f.n).unwrap_or(0), a.nodes.or(f.nodes).unwrap_or(60), a.length.or(f.length), solver)
        }
        Command::Sweep(a) => {
            let param = a.param.or_else(|| f.param.clone()).unwrap_or_else(|| "N".into());
            let values = a.values.or_else(|| f.values.clone()).unwrap_or_default();
            let selector = parse_track(a.track.as_deref().or(f.track.as_deref()).unwrap_or("5"))?;
            sweep(&ctx, a.n.or(f.n).unwrap_or(0), &param, &values, a.nodes.or(f.nodes), a.length.or(f.length), selector)
        }
        Command::Bounds(a) => bounds(&ctx, a.n_max.or(f.n_max).unwrap_or(5)),
        Command::Convert(a) => {
            let need = |v: Option<f64>, name: &str| v.ok_or_else(|| Failure::Usage(format!("convert needs --{name}")));
            convert(need(a.g.or(f.g), "G")?, need(a.m.or(f.m), "m")?, need(a.hbar.or(f.hbar), "hbar")?, need(a.t.or(f.t), "t")?)
        }
    }
}

fn parse_solver(s: &str) -> Result<SolverChoice, Failure> {
    match s {
        "full" => Ok(SolverChoice::Full),
        "reduced" => Ok(SolverChoice::Reduced),
        "both" => Ok(SolverChoice::Both),
        _ => Err(Failure::Usage(format!("unknown solver {s:?}; expected full, reduced or both"))),
    }
}

fn solver_name(s: SolverChoice) -> &'static str {
    match s {
        SolverChoice::Full => "full",
        SolverChoice::Reduced => "reduced",
        SolverChoice::Both => "both",
    }
}

fn parse_track(s: &str) -> Result<ModeSelector, Failure> {
    if s == "max-real" {
        return Ok(ModeSelector::MaxReal);
    }
    match s.parse::<usize>() {
        Ok(k) if k >= 1 => Ok(ModeSelector::Imaginary(k)),
        _ => Err(Failure::Usage(format!("--track takes a positive integer or max-real, got {s:?}"))),
    }
}

fn track_name(s: ModeSelector) -> String {
    match s {
        ModeSelector::Imaginary(k) => k.to_string(),
        ModeSelector::MaxReal => "max-real".into(),
    }
}

fn cell(msg: &str) -> String {
    msg.replace([',', '\n'], ";")
}

fn states(ctx: &Context, n_max: usize) -> Result<(), Failure> {
    if n_max > 50 {
        return Err(Failure::Usage(format!("--n-max {n_max} exceeds 50")));
    }
    let mut results: Vec<(usize, Result<State, String>)> = Vec::new();
    for n in 0..=n_max {
        let r = match cache::read_state(&ctx.cache, n) {
            Lookup::Hit(s) => {
                log::info!("state {n}: cache hit");
                Ok(s)
            }
            Lookup::Missing => cache::compute_state(&ctx.cache, n),
            Lookup::Stale(msg) => {
                log::warn!("{msg}; recomputing");
                cache::compute_state(&ctx.cache, n)
            }
        };
        results.push((n, r.map_err(|e| e.to_string())));
    }

    let header = Header::new("states", vec![param("n_max", n_max)]);
    let notes = vec![
        "E: energy with the half-Laplacian kinetic term at radial norm 1 (table units)".to_string(),
        "E_unit_norm T V conserved_energy: unit 3D norm; virial_residual: largest relative virial defect".to_string(),
    ];
    let cols = ["n", "E", "E_unit_norm", "T", "V", "conserved_energy", "virial_residual", "status"];
    let mut spectrum = Csv::new(&header, &notes, &cols);
    let mut table = Vec::new();
    for (n, r) in &results {
        match r {
            Ok(s) => {
                table.push((*n, s.tabulated_energy()));
                spectrum.row(&[
                    n.to_string(),
                    num(s.tabulated_energy()),
                    num(s.energy),
                    num(s.kinetic),
                    num(s.potential),
                    num(s.conserved_energy),
                    num(virial_check(s).max()),
                    "ok".into(),
                ]);
                println!("{n:>3} {:>14.6e}", s.tabulated_energy());
            }
            Err(e) => {
                let mut row = vec![n.to_string()];
                row.extend(std::iter::repeat_n(String::new(), 6));
                row.push(cell(&format!("error: {e}")));
                spectrum.row(&row);
                println!("{n:>3} failed: {e}");
            }
        }
    }
    spectrum.write(&ctx.out.join("spectrum.csv"))?;

    let mut notes = Vec::new();
    if let Ok(slope) = loglog_slope(&table, 10, 20) {
        notes.push(format!("slope over 10 <= n <= 20: {}", num(slope)));
    }
    let mut loglog = Csv::new(&header, &notes, &["n", "ln_n", "ln_abs_E"]);
    for &(n, e) in table.iter().filter(|(n, _)| *n >= 1) {
        loglog.row(&[n.to_string(), num((n as f64).ln()), num(e.abs().ln())]);
    }
    loglog.write(&ctx.out.join("loglog.csv"))?;

    let failed: Vec<String> = results.iter().filter(|(_, r)| r.is_err()).map(|(n, _)| n.to_string()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("states {} failed", failed.join(", "))))
    }
}

fn by_modulus(modes: &[EigenMode]) -> Vec<&EigenMode> {
    let mut v: Vec<&EigenMode> = modes.iter().collect();
    v.sort_by(|a, b| {
        let key = |m: &EigenMode| if m.is_finite() { m.lambda.norm() } else { f64::INFINITY };
        key(a).total_cmp(&key(b)).then(a.lambda.im.total_cmp(&b.lambda.im))
    });
    v
}

fn stability(ctx: &Context, n: usize, nodes: usize, length: Option<f64>, solver: SolverChoice) -> Result<(), Failure> {
    if nodes < 4 {
        return Err(Failure::Usage(format!("--N must be at least 4, got {nodes}")));
    }
    if length.is_some_and(|l| !(l > 0.0 && l.is_finite())) {
        return Err(Failure::Usage("--L must be positive".into()));
    }
    let state = cache::state(&ctx.cache, n)?;
    let length = length.unwrap_or_else(|| default_length(&state));
    let opts = StabilityOptions { n_nodes: nodes, length: Some(length), solver, ..Default::default() };
    let a = analyze(&state, &opts).map_err(|e| Failure::Run(format!("state {n}: {e}")))?;
    let header = Header::new(
        "stability",
        vec![param("n", n), param("N", nodes), param("L", length), param("solver", solver_name(solver))],
    );

    let mut modes = Csv::new(&header, &[], &["solver", "re", "im", "class"]);
    let mut sets = vec![(if solver == SolverChoice::Full { "full" } else { "reduced" }, &a.modes)];
    if let Some(full) = &a.full_modes {
        sets.push(("full", full));
    }
    for (name, set) in &sets {
        for m in by_modulus(set) {
            modes.row(&[name.to_string(), num(m.lambda.re), num(m.lambda.im), m.class.as_str().into()]);
        }
    }
    modes.write(&ctx.out.join("modes.csv"))?;

    let mut dich = Csv::new(&header, &[], &["re", "im", "Q"]);
    for d in &a.report.dichotomy {
        dich.row(&[num(d.re), num(d.im), num(d.q)]);
    }
    dich.write(&ctx.out.join("dichotomy.csv"))?;

    let rk_opts = RkOptions::default();
    let cols = ["re", "im", "class", "ode_residual", "rayleigh_residual", "sobolev_slack", "rk_mismatch", "rk_cosine"];
    let mut verify = Csv::new(&header, &["rk columns are filled for the lowest modes with Im >= 0 and all growing modes".into()], &cols);
    let mut rk_budget = 8;
    for m in by_modulus(&a.modes).into_iter().filter(|m| m.is_physical()) {
        let growing = m.class == ModeClass::ComplexQuadruple && m.lambda.re > 0.0 && m.lambda.im >= 0.0;
        let (mismatch, cosine) = if growing || (m.lambda.im >= 0.0 && rk_budget > 0) {
            rk_budget -= usize::from(!growing && rk_budget > 0);
            match rk_reconstruct(m.lambda, &a.operator, &rk_opts) {
                Ok(r) => (Some(r.mismatch), r.cosine_with(&m.b, a.operator.grid()).ok()),
                Err(e) => {
                    log::warn!("RK reconstruction at {}: {e}", m.lambda);
                    (None, None)
                }
            }
        } else {
            (None, None)
        };
        verify.row(&[
            num(m.lambda.re),
            num(m.lambda.im),
            m.class.as_str().into(),
            num(ode_residual(m, &a.operator)),
            num(rayleigh_residual(m, &a.operator).max()),
            num(sobolev_chain_check(m, &a.operator).slack),
            opt_num(mismatch),
            opt_num(cosine),
        ]);
    }
    verify.write(&ctx.out.join("verify.csv"))?;

    crate::output::write_json(&ctx.out.join("report.json"), &header, &a.report)?;
    cache::write_report(&ctx.cache, &header, &a.report)?;

    let r = &a.report;
    println!("state {n}: N = {nodes}, L = {length}, {} modes", r.modes.len());
    println!("  quadruples {}, zero modes {}, spurious {}", r.quadruple_count, r.zero_modes, r.spurious);
    println!("  max Re λ {:.6e}, bound {:.6e}", r.max_re, r.bound_tabulated);
    if let Some(c) = r.cross_check {
        println!("  full vs reduced {c:.3e}");
    }
    Ok(())
}

fn sweep(
    ctx: &Context,
    n: usize,
    name: &str,
    values: &[f64],
    nodes: Option<usize>,
    length: Option<f64>,
    selector: ModeSelector,
) -> Result<(), Failure> {
    if name != "N" && name != "L" {
        return Err(Failure::Usage(format!("--param must be N or L, got {name:?}")));
    }
    if values.len() < 3 {
        return Err(Failure::Usage(format!("a sweep needs at least 3 values, got {}", values.len())));
    }
    let positive = values.iter().all(|v| *v > 0.0 && v.is_finite());
    let integral = name == "L" || values.iter().all(|v| v.fract() == 0.0 && *v >= 4.0);
    if !positive || !integral {
        return Err(Failure::Usage(format!("invalid {name} values {values:?}")));
    }
    let state = cache::state(&ctx.cache, n)?;
    let fixed_nodes = nodes.unwrap_or(60);
    let fixed_length = length.unwrap_or_else(|| default_length(&state));
    let mut params = vec![param("n", n), param("param", name), param("track", track_name(selector))];
    params.push(if name == "N" { param("L", fixed_length) } else { param("N", fixed_nodes) });
    let list: Vec<String> = values.iter().map(|v| v.to_string()).collect();
    params.push(param("values", list.join(";")));
    let header = Header::new("sweep", params);

    let opts = StabilityOptions::default();
    let mut csv = Csv::new(&header, &[], &["value", "re", "im", "status"]);
    let mut errors = 0;
    for &v in values {
        let (nn, ll) = if name == "N" { (v as usize, fixed_length) } else { (fixed_nodes, v) };
        let cells = match track(&state, nn, ll, &opts, selector) {
            Ok(l) => {
                println!("{name} = {v}: {:.10e} {:+.10e}i", l.re, l.im);
                [num(l.re), num(l.im), "ok".into()]
            }
            Err(Error::TrackingLost { .. }) => {
                println!("{name} = {v}: tracking lost");
                [String::new(), String::new(), "tracking_lost".into()]
            }
            Err(e) => {
                errors += 1;
                println!("{name} = {v}: {e}");
                [String::new(), String::new(), cell(&format!("error: {e}"))]
            }
        };
        let mut row = vec![num(v)];
        row.extend(cells);
        csv.row(&row);
    }
    csv.write(&ctx.out.join(format!("sweep_{name}.csv")))?;
    if errors > 0 {
        return Err(Failure::Run(format!("{errors} sweep points failed")));
    }
    Ok(())
}

fn bounds(ctx: &Context, n_max: usize) -> Result<(), Failure> {
    let mut reports = Vec::new();
    let mut missing = Vec::new();
    for n in 0..=n_max {
        match cache::read_report(&ctx.cache, n) {
            Lookup::Hit(r) => reports.push(r),
            Lookup::Missing => missing.push(n),
            Lookup::Stale(msg) => {
                log::warn!("{msg}");
                missing.push(n);
            }
        }
    }
    if !missing.is_empty() {
        let list: Vec<String> = missing.iter().map(|n| n.to_string()).collect();
        let hint: Vec<String> = missing.iter().map(|n| format!("snewton stability --n {n}")).collect();
        return Err(Failure::Run(format!(
            "no current stability report for n = {}; run first: {}",
            list.join(", "),
            hint.join("; ")
        )));
    }

    let header = Header::new("bounds", vec![param("n_max", n_max)]);
    let notes = vec![
        "bound: (4/9π²)√(−E) at the tabulated energy; bound_at_norm: the same bound for the spectrum normalization".into(),
        "reference_*: regression values; 0 in reference_max_re means no growing mode".into(),
    ];
    let cols = [
        "state", "n", "N", "L", "max_re", "bound", "bound_at_norm", "reference_max_re", "reference_bound", "within_bound",
    ];
    let mut csv = Csv::new(&header, &notes, &cols);
    let mut violations = Vec::new();
    for r in &reports {
        let ok = r.max_re <= r.bound_tabulated;
        if !ok {
            violations.push(r.n.to_string());
        }
        csv.row(&[
            (r.n + 1).to_string(),
            r.n.to_string(),
            r.n_nodes.to_string(),
            num(r.length),
            num(r.max_re),
            num(r.bound_tabulated),
            num(r.bound),
            REFERENCE_MAX_RE.get(r.n).map(|v| num(*v)).unwrap_or_default(),
            REFERENCE_BOUND.get(r.n).map(|v| num(*v)).unwrap_or_default(),
            ok.to_string(),
        ]);
        println!("state {}: max Re λ {:.4e} <= {:.4e}: {ok}", r.n + 1, r.max_re, r.bound_tabulated);
    }
    csv.write(&ctx.out.join("bounds.csv"))?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Run(format!("bound violated for n = {}", violations.join(", "))))
    }
}

fn convert(g: f64, m: f64, hbar: f64, t: f64) -> Result<(), Failure> {
    let scales = PhysicalScales::new(g, m, hbar).map_err(|e| Failure::Usage(e.to_string()))?;
    let s = time_to_si(&scales, t).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{s}");
    Ok(())
}
