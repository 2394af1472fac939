//! Command-line front end.
//!
//! Every subcommand reads the same flat flag set; flags a subcommand does
//! not use are ignored. Output goes to stdout or `--output`, as CSV or as
//! JSON records (one object per line). Exit codes: 0 on a completed
//! analysis whatever the verdict, 2 on usage/configuration errors, 3 on
//! capacity or truncation errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde_json::{json, Value};

use crate::classify::{
    abs_cesaro_bound_estimate, classify_operator, classify_orbit, default_powers,
    hypercyclicity_criterion_check, kitai_witness_check, mean_liyorke_stat, sweep_samples,
    SweepConfig, Thresholds, TrichotomyReport,
};
use crate::error::Error;
use crate::operators::ShiftOperator;
use crate::orbitstats::{cesaro_series, exceedance_density, fmt_f64, DensityEstimate, IntegerSet};
use crate::seqcore::{block_bounds, Side, WeightKind};
use crate::vectors::{SpaceTag, SupportedVector};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;
const EXIT_IO: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    /// Orbit norms, partial sums and Cesàro averages as CSV.
    Orbit,
    /// Trichotomy verdict for one vector, or a sampled sweep when --vector is absent.
    Classify,
    /// Product profile: ∏ w_j over -n <= j <= 0 (over 1 <= j <= n for unilateral weights).
    Products,
    /// Density estimate of --set, or of the exceedance set {n : ‖T^n x‖ >= eps}.
    Density,
    /// Hypercyclicity product-criterion witnesses.
    Criterion,
    /// Kitai criterion report.
    Kitai,
    /// Mean Li-Yorke pair statistic of --vector and --vector2.
    Liyorke,
    /// List built-in operator designations.
    ListBuiltins,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Records,
}

/// Parsed command line. Round-trips through [`RunConfig::to_argv`].
#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "shiftdyn", version, about = "Orbit statistics for weighted backward shifts")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub subcommand: Subcommand,
    /// paper-blocks | rolewicz:<λ> | ratio-power:<p> | constant:<λ>[:unilateral|:bilateral] | @<weight-spec.json>
    #[arg(long, default_value = "paper-blocks")]
    pub operator: String,
    /// e<j> | zero | inline JSON | @<file> [default: e0 (bilateral) or e1 (unilateral)]
    #[arg(long)]
    pub vector: Option<String>,
    /// Second vector for liyorke (x - y) [default: zero]
    #[arg(long)]
    pub vector2: Option<String>,
    /// l1 | l2 | lp:<p> | c0
    #[arg(long, default_value = "l2")]
    pub space: String,
    /// Horizon N [default: c_18 = 1048647 for paper-blocks, 10000 otherwise]
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Last n of the products profile [default: the horizon default]
    #[arg(long)]
    pub to: Option<usize>,
    /// Tail window W [default: N/2, at least 2 for classify]
    #[arg(long)]
    pub window: Option<usize>,
    /// Tail maximum below this reads as mean-to-zero
    #[arg(long, default_value_t = 1e-3)]
    pub tol_zero: f64,
    /// Tail minimum above this reads as divergent
    #[arg(long, default_value_t = 1e3)]
    pub tol_inf: f64,
    /// Criterion backward bound [default: 1e-3]; exceedance level for density [default: 1]
    #[arg(long)]
    pub eps: Option<f64>,
    /// Criterion forward bound M
    #[arg(long, default_value_t = 1e6)]
    pub big: f64,
    /// Kitai iteration count [default: 30]; criterion center radius K [default: 8]
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Comma-separated criterion powers [default: b_1..b_18 for paper-blocks, 2^0..2^20 otherwise]
    #[arg(long, value_delimiter = ',')]
    pub powers: Option<Vec<u64>>,
    /// Seed for sampled random vectors
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of seeded random vectors in the classify sweep
    #[arg(long, default_value_t = 8)]
    pub samples: usize,
    /// Emit every stride-th row (the last row is always emitted)
    #[arg(long, default_value_t = 1)]
    pub stride: usize,
    /// Output path [default: stdout]
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Output format [default: csv for orbit/products, records otherwise]
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// all | evens | multiples:<k> | blocky | list:<n1>,<n2>,...
    #[arg(long)]
    pub set: Option<String>,
}

fn value_name<T: ValueEnum>(v: &T) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

impl RunConfig {
    /// The argument vector that parses back to this configuration.
    pub fn to_argv(&self) -> Vec<String> {
        let mut argv = vec!["shiftdyn".to_string(), value_name(&self.subcommand)];
        let mut push = |flag: &str, value: String| {
            argv.push(format!("--{flag}"));
            argv.push(value);
        };
        push("operator", self.operator.clone());
        if let Some(v) = &self.vector {
            push("vector", v.clone());
        }
        if let Some(v) = &self.vector2 {
            push("vector2", v.clone());
        }
        push("space", self.space.clone());
        if let Some(n) = self.horizon {
            push("horizon", n.to_string());
        }
        if let Some(n) = self.to {
            push("to", n.to_string());
        }
        if let Some(w) = self.window {
            push("window", w.to_string());
        }
        push("tol-zero", fmt_f64(self.tol_zero));
        push("tol-inf", fmt_f64(self.tol_inf));
        if let Some(e) = self.eps {
            push("eps", fmt_f64(e));
        }
        push("big", fmt_f64(self.big));
        if let Some(k) = self.kmax {
            push("kmax", k.to_string());
        }
        if let Some(p) = &self.powers {
            let list: Vec<String> = p.iter().map(u64::to_string).collect();
            push("powers", list.join(","));
        }
        push("seed", self.seed.to_string());
        push("samples", self.samples.to_string());
        push("stride", self.stride.to_string());
        if let Some(o) = &self.output {
            push("output", o.display().to_string());
        }
        if let Some(f) = &self.format {
            push("format", value_name(f));
        }
        if let Some(s) = &self.set {
            push("set", s.clone());
        }
        argv
    }
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run(args: &[String], stdout: &mut dyn Write) -> i32 {
    let cfg = match RunConfig::try_parse_from(args) {
        Ok(cfg) => cfg,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut buf = Vec::new();
    if let Err(e) = execute(&cfg, &mut buf) {
        eprintln!("shiftdyn: {e}");
        return match e {
            Error::Capacity(_) | Error::Truncation(_) => EXIT_CAPACITY,
            _ => EXIT_USAGE,
        };
    }
    let written = match &cfg.output {
        Some(path) => fs::write(path, &buf).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(&buf).map_err(|e| e.to_string()),
    };
    match written {
        Ok(()) => EXIT_OK,
        Err(msg) => {
            eprintln!("shiftdyn: cannot write output: {msg}");
            EXIT_IO
        }
    }
}

struct Resolved {
    op: ShiftOperator,
    space: SpaceTag,
    horizon: usize,
    window: usize,
    format: Format,
}

fn default_horizon(op: &ShiftOperator) -> usize {
    match op.weights().kind() {
        WeightKind::PaperBlocks => block_bounds(18).expect("within cap").c as usize,
        _ => 10_000,
    }
}

fn resolve(cfg: &RunConfig) -> crate::Result<Resolved> {
    let op = ShiftOperator::parse_designation(&cfg.operator)?;
    let space: SpaceTag = cfg.space.parse()?;
    let horizon = cfg.horizon.unwrap_or_else(|| default_horizon(&op));
    if horizon == 0 {
        return Err(Error::config("--horizon must be >= 1"));
    }
    let window = cfg.window.unwrap_or((horizon / 2).max(1));
    let format = cfg.format.unwrap_or(match cfg.subcommand {
        Subcommand::Orbit | Subcommand::Products => Format::Csv,
        _ => Format::Records,
    });
    Ok(Resolved {
        op,
        space,
        horizon,
        window,
        format,
    })
}

fn first_basis(side: Side) -> i64 {
    match side {
        Side::Bilateral => 0,
        Side::Unilateral => 1,
    }
}

fn vector_or_default(text: Option<&str>, op: &ShiftOperator) -> crate::Result<SupportedVector> {
    match text {
        Some(t) => SupportedVector::parse_designation(t, op.side()),
        None => SupportedVector::basis(first_basis(op.side()), op.side()),
    }
}

fn emit(out: &mut Vec<u8>, record: &Value) {
    let line = serde_json::to_string(record).expect("records serialize");
    out.extend_from_slice(line.as_bytes());
    out.push(b'\n');
}

fn execute(cfg: &RunConfig, out: &mut Vec<u8>) -> crate::Result<()> {
    if cfg.subcommand == Subcommand::ListBuiltins {
        list_builtins(out);
        return Ok(());
    }
    let r = resolve(cfg)?;
    match cfg.subcommand {
        Subcommand::Orbit => orbit(cfg, &r, out),
        Subcommand::Classify => classify(cfg, &r, out),
        Subcommand::Products => products(cfg, &r, out),
        Subcommand::Density => density(cfg, &r, out),
        Subcommand::Criterion => criterion(cfg, &r, out),
        Subcommand::Kitai => kitai(cfg, &r, out),
        Subcommand::Liyorke => liyorke(cfg, &r, out),
        Subcommand::ListBuiltins => unreachable!(),
    }
}

fn list_builtins(out: &mut Vec<u8>) {
    let rows = [
        ("paper-blocks", "bilateral", "block-dyadic weight: 2 on n > 0, 1/2 then 2 on the blocks a_i < -n <= c_i, 1 elsewhere"),
        ("rolewicz:<lambda>", "unilateral", "constant weight lambda > 1"),
        ("ratio-power:<p>", "unilateral", "w_k = ((k + 1) / k)^(1/p), p > 1"),
        ("constant:<lambda>[:side]", "unilateral|bilateral", "constant positive weight"),
        ("@<file>", "from file", "JSON weight spec: paper_blocks, rolewicz, constant, ratio_power, table, product_profile_dyadic"),
    ];
    for (name, side, about) in rows {
        out.extend_from_slice(format!("{name}\t{side}\t{about}\n").as_bytes());
    }
}

fn csv_line(out: &mut Vec<u8>, fields: &[String]) {
    out.extend_from_slice(fields.join(",").as_bytes());
    out.push(b'\n');
}

fn keep_row(n: usize, last: usize, stride: usize) -> bool {
    n % stride.max(1) == 0 || n == last
}

fn orbit(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let x = vector_or_default(cfg.vector.as_deref(), &r.op)?;
    let series = cesaro_series(&r.op, &x, r.space, r.horizon, r.window)?;
    match r.format {
        Format::Csv => series
            .write_csv(out, cfg.stride)
            .map_err(|e| Error::Invariant(e.to_string())),
        Format::Records => {
            let exps = series.norms.exponents.as_ref();
            for n in (1..=series.horizon).filter(|&n| keep_row(n, series.horizon, cfg.stride)) {
                emit(
                    out,
                    &json!({
                        "n": n,
                        "norm": series.norms.at(n),
                        "partial_sum": series.partial_sum(n),
                        "cesaro_avg": series.average(n),
                        "norm_log2": exps.and_then(|e| e[n - 1]),
                    }),
                );
            }
            Ok(())
        }
    }
}

fn thresholds(cfg: &RunConfig) -> Thresholds {
    Thresholds {
        tol_zero: cfg.tol_zero,
        tol_inf: cfg.tol_inf,
    }
}

fn report_record(op: &ShiftOperator, vector: &str, report: &TrichotomyReport) -> Value {
    json!({
        "operator": op.to_string(),
        "vector": vector,
        "N": report.horizon,
        "W": report.window,
        "thresholds": report.thresholds,
        "verdict": report.verdict.to_string(),
        "evidence": report.evidence,
        "caveat": report.caveat,
    })
}

const CLASSIFY_CSV_HEADER: &str = "operator,vector,N,W,tol_zero,tol_inf,verdict,a_n,a_half,tail_min,tail_min_n,tail_max,tail_max_n,growth_ratio";

fn report_csv(out: &mut Vec<u8>, op: &ShiftOperator, vector: &str, report: &TrichotomyReport) {
    let ev = &report.evidence;
    csv_line(
        out,
        &[
            op.to_string(),
            format!("\"{}\"", vector.replace('"', "\"\"")),
            report.horizon.to_string(),
            report.window.to_string(),
            fmt_f64(report.thresholds.tol_zero),
            fmt_f64(report.thresholds.tol_inf),
            report.verdict.to_string(),
            fmt_f64(ev.a_n),
            fmt_f64(ev.a_half),
            fmt_f64(ev.tail_window_min.value),
            ev.tail_window_min.n.to_string(),
            fmt_f64(ev.tail_window_max.value),
            ev.tail_window_max.n.to_string(),
            ev.growth_ratio.map(fmt_f64).unwrap_or_default(),
        ],
    );
}

fn classify(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let t = thresholds(cfg);
    let window = cfg.window.unwrap_or((r.horizon / 2).max(2).min(r.horizon));
    if r.format == Format::Csv {
        csv_line(out, &[CLASSIFY_CSV_HEADER.to_string()]);
    }
    if let Some(text) = cfg.vector.as_deref() {
        let x = SupportedVector::parse_designation(text, r.op.side())?;
        let report = classify_orbit(&r.op, &x, r.space, r.horizon, window, t)?;
        match r.format {
            Format::Records => emit(out, &report_record(&r.op, &x.label(), &report)),
            Format::Csv => report_csv(out, &r.op, &x.label(), &report),
        }
        return Ok(());
    }

    let sweep = SweepConfig {
        horizon: r.horizon,
        window,
        thresholds: t,
        basis_radius: 4,
        random_samples: cfg.samples,
        seed: cfg.seed,
    };
    let report = classify_operator(&r.op, r.space, &sweep)?;
    for s in &report.samples {
        match r.format {
            Format::Records => emit(out, &report_record(&r.op, &s.vector, &s.report)),
            Format::Csv => report_csv(out, &r.op, &s.vector, &s.report),
        }
    }
    if r.format == Format::Records {
        let vectors = sweep_samples(&r.op, &sweep)?;
        let bound = abs_cesaro_bound_estimate(&r.op, r.space, &vectors, r.horizon)?;
        let counts: serde_json::Map<String, Value> = report
            .counts
            .iter()
            .map(|(v, c)| (v.to_string(), json!(c)))
            .collect();
        emit(
            out,
            &json!({
                "operator": r.op.to_string(),
                "record": "operator_summary",
                "evidence_kind": report.evidence_kind,
                "N": r.horizon,
                "W": window,
                "thresholds": t,
                "majority": report.majority.to_string(),
                "counts": counts,
                "c_hat": bound.c_hat,
                "c_hat_witness": vectors[bound.witness].label(),
                "c_hat_witness_n": bound.witness_n,
                "caveat": "genericity is approximated by the sampled vectors",
            }),
        );
    }
    Ok(())
}

fn products(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let to = cfg.to.or(cfg.horizon).unwrap_or(r.horizon);
    let w = r.op.weights();
    let mut rows = Vec::new();
    match r.op.side() {
        Side::Bilateral => {
            let mut cursor = w.cursor_at(1);
            for n in 0..=to {
                rows.push((n, cursor.extend_left()?));
            }
        }
        Side::Unilateral => {
            let mut cursor = w.cursor_at(1);
            for n in 1..=to {
                rows.push((n, cursor.extend_right()?));
            }
        }
    }
    if r.format == Format::Csv {
        csv_line(out, &["n".into(), "product".into(), "exponent".into()]);
    }
    for (n, p) in rows {
        if !keep_row(n, to, cfg.stride) {
            continue;
        }
        match r.format {
            Format::Csv => csv_line(
                out,
                &[
                    n.to_string(),
                    fmt_f64(p.value()),
                    if p.exact { p.exponent.to_string() } else { String::new() },
                ],
            ),
            Format::Records => emit(
                out,
                &json!({
                    "n": n,
                    "product": p.value(),
                    "exact": p.exact,
                    "exponent": p.exact.then_some(p.exponent),
                    "log2": p.log2(),
                }),
            ),
        }
    }
    Ok(())
}

fn density_fields(d: &DensityEstimate) -> Value {
    json!({
        "N": d.horizon,
        "W": d.window,
        "count_N": d.count(d.horizon),
        "udens_estimate": d.udens_estimate,
        "udens_at": d.udens_at,
        "udens_count": d.count(d.udens_at),
        "ldens_estimate": d.ldens_estimate,
        "ldens_at": d.ldens_at,
        "ldens_count": d.count(d.ldens_at),
    })
}

fn density(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let (estimate, mut record) = match cfg.set.as_deref() {
        Some(text) => {
            let set = IntegerSet::parse(text)?;
            let d = set.density(r.horizon, r.window)?;
            (d, json!({ "set": text }))
        }
        None => {
            let x = vector_or_default(cfg.vector.as_deref(), &r.op)?;
            let eps = cfg.eps.unwrap_or(1.0);
            let e = exceedance_density(&r.op, &x, r.space, eps, r.horizon, r.window)?;
            let record = json!({
                "set": "exceedance",
                "operator": r.op.to_string(),
                "vector": x.label(),
                "eps": eps,
                "liminf_lower_bound": e.liminf_lower_bound,
            });
            (e.density, record)
        }
    };
    match r.format {
        Format::Records => {
            let obj = record.as_object_mut().expect("object");
            if let Value::Object(fields) = density_fields(&estimate) {
                obj.extend(fields);
            }
            emit(out, &record);
        }
        Format::Csv => {
            csv_line(out, &["n".into(), "count".into(), "ratio".into()]);
            for n in (1..=estimate.horizon).filter(|&n| keep_row(n, estimate.horizon, cfg.stride)) {
                csv_line(
                    out,
                    &[n.to_string(), estimate.count(n).to_string(), fmt_f64(estimate.ratio(n))],
                );
            }
        }
    }
    Ok(())
}

fn criterion(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let powers = cfg.powers.clone().unwrap_or_else(|| default_powers(&r.op));
    let radius = cfg.kmax.unwrap_or(8) as i64;
    let eps = cfg.eps.unwrap_or(1e-3);
    let report = hypercyclicity_criterion_check(&r.op, radius, &powers, eps, cfg.big)?;
    if r.format == Format::Csv {
        csv_line(
            out,
            &["k", "found", "n", "backward_log2", "forward_log2", "exact"].map(String::from),
        );
    }
    for c in &report.centers {
        let w = c.witness.unwrap_or(c.closest);
        match r.format {
            Format::Csv => csv_line(
                out,
                &[
                    c.k.to_string(),
                    c.witness.is_some().to_string(),
                    w.n.to_string(),
                    fmt_f64(w.backward_product.log2()),
                    fmt_f64(w.forward_product.log2()),
                    (w.backward_product.exact && w.forward_product.exact).to_string(),
                ],
            ),
            Format::Records => emit(
                out,
                &json!({
                    "operator": r.op.to_string(),
                    "k": c.k,
                    "found": c.witness.is_some(),
                    "witness": w,
                }),
            ),
        }
    }
    if r.format == Format::Records {
        emit(
            out,
            &json!({
                "operator": r.op.to_string(),
                "record": "criterion_summary",
                "radius": radius,
                "powers": report.powers,
                "eps": eps,
                "big": cfg.big,
                "pass": report.pass,
            }),
        );
    }
    Ok(())
}

fn kitai(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let k_max = cfg.kmax.unwrap_or(30);
    let x = vector_or_default(cfg.vector.as_deref(), &r.op)?;
    let y = vector_or_default(cfg.vector2.as_deref(), &r.op)?;
    // λB on the unilateral space fixes x_k = λ^-k; attach its truncation
    let fixed = match r.op.weights().kind() {
        WeightKind::Rolewicz { lambda } => Some(SupportedVector::from_entries(
            (1..=60).map(|k| (k, lambda.powi(-(k as i32)))),
            Side::Unilateral,
        )?),
        _ => None,
    };
    let report = kitai_witness_check(
        &r.op,
        r.space,
        std::slice::from_ref(&x),
        std::slice::from_ref(&y),
        k_max,
        fixed.as_ref().map(|f| (f, 1)),
    )?;
    match r.format {
        Format::Records => emit(
            out,
            &json!({
                "operator": r.op.to_string(),
                "x": x.label(),
                "y": y.label(),
                "kmax": k_max,
                "report": report,
            }),
        ),
        Format::Csv => {
            csv_line(out, &["k", "forward_norm", "backward_norm"].map(String::from));
            for k in 1..=k_max {
                csv_line(
                    out,
                    &[
                        k.to_string(),
                        fmt_f64(report.forward_decay[0][k - 1]),
                        fmt_f64(report.backward_decay[0][k - 1]),
                    ],
                );
            }
        }
    }
    Ok(())
}

fn liyorke(cfg: &RunConfig, r: &Resolved, out: &mut Vec<u8>) -> crate::Result<()> {
    let x = vector_or_default(cfg.vector.as_deref(), &r.op)?;
    let y = match cfg.vector2.as_deref() {
        Some(t) => SupportedVector::parse_designation(t, r.op.side())?,
        None => SupportedVector::zero(r.op.side()),
    };
    let stat = mean_liyorke_stat(&r.op, &x, &y, r.space, r.horizon, r.window)?;
    match r.format {
        Format::Records => emit(
            out,
            &json!({
                "operator": r.op.to_string(),
                "vector": x.label(),
                "vector2": y.label(),
                "N": r.horizon,
                "W": r.window,
                "d_n": stat.series.last_average(),
                "tail_window_min": stat.tail_window_min,
                "tail_window_max": stat.tail_window_max,
                "caveat": crate::classify::HORIZON_CAVEAT,
            }),
        ),
        Format::Csv => stat
            .series
            .write_csv(out, cfg.stride)
            .map_err(|e| Error::Invariant(e.to_string()))?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String) {
        let argv: Vec<String> = std::iter::once("shiftdyn")
            .chain(args.iter().copied())
            .map(String::from)
            .collect();
        let mut out = Vec::new();
        let code = run(&argv, &mut out);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn products_profile_rows() {
        let (code, text) = run_capture(&["products", "--operator", "paper-blocks", "--to", "23"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "n,product,exponent");
        assert_eq!(lines.len(), 25);
        assert!(lines.contains(&"9,0.5,-1"));
        assert!(lines.contains(&"23,4.0,2"));
    }

    #[test]
    fn classify_dying_orbit() {
        let (code, text) = run_capture(&[
            "classify", "--operator", "rolewicz:2.0", "--vector", "e7", "--horizon", "10000",
            "--tol-zero", "0.1",
        ]);
        assert_eq!(code, 0);
        let rec: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(rec["verdict"], "MeanToZero");
        // A_N = 126 / 10^4 sits above the default tol_zero
        let (_, text) = run_capture(&[
            "classify", "--operator", "rolewicz:2.0", "--vector", "e7", "--horizon", "10000",
        ]);
        let rec: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(rec["verdict"], "Inconclusive");
        assert_eq!(rec["N"], 10000);
        assert_eq!(rec["W"], 5000);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_capture(&["orbit", "--operator", "nope"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["orbit", "--vector", "q"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(
            run_capture(&["classify", "--vector", "e0", "--tol-zero", "5", "--tol-inf", "1", "--horizon", "10"]).0,
            EXIT_USAGE
        );
        assert_eq!(
            run_capture(&["orbit", "--operator", "constant:2.0:bilateral", "--horizon", "2000"]).0,
            EXIT_CAPACITY
        );
        assert_eq!(run_capture(&["criterion", "--operator", "rolewicz:2"]).0, EXIT_USAGE);
    }

    #[test]
    fn config_round_trips_through_argv() {
        let argv = [
            "shiftdyn", "criterion", "--operator", "constant:1.0:bilateral", "--powers", "1,2,4",
            "--eps", "0.001", "--kmax", "3", "--format", "csv", "--output", "/tmp/x.csv",
        ];
        let cfg = RunConfig::try_parse_from(argv).unwrap();
        let again = RunConfig::try_parse_from(cfg.to_argv()).unwrap();
        assert_eq!(cfg, again);
        let minimal = RunConfig::try_parse_from(["shiftdyn", "list-builtins"]).unwrap();
        assert_eq!(RunConfig::try_parse_from(minimal.to_argv()).unwrap(), minimal);
    }

    #[test]
    fn list_builtins_names_operators() {
        let (code, text) = run_capture(&["list-builtins"]);
        assert_eq!(code, 0);
        for name in ["paper-blocks", "rolewicz", "ratio-power", "constant"] {
            assert!(text.contains(name));
        }
    }

    #[test]
    fn density_set_and_exceedance() {
        let (code, text) = run_capture(&["density", "--set", "evens", "--horizon", "1000"]);
        assert_eq!(code, 0);
        let rec: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(rec["count_N"], 500);
        let (code, text) = run_capture(&[
            "density", "--operator", "rolewicz:2", "--vector", "e3", "--eps", "1", "--horizon", "100",
        ]);
        assert_eq!(code, 0);
        let rec: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(rec["count_N"], 2);
    }

    #[test]
    fn kitai_and_liyorke_records() {
        let (code, text) = run_capture(&["kitai", "--operator", "rolewicz:2", "--vector2", "e1"]);
        assert_eq!(code, 0);
        let rec: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(rec["report"]["inverse_law_ok"], true);
        assert!(rec["report"]["periodic_point"]["residual"].as_f64().unwrap() <= 2f64.powi(-59));

        let (code, text) = run_capture(&["liyorke", "--vector", "e0", "--vector2", "e0", "--horizon", "100"]);
        assert_eq!(code, 0);
        let rec: Value = serde_json::from_str(text.trim()).unwrap();
        assert_eq!(rec["tail_window_max"]["value"], 0.0);
    }
}
