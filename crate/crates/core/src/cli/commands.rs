use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::calibrate::{normalize_scores, roc_and_auc, svg, CalibrationReport, RocCurve};
use crate::data::{
    apply_scaling, fit_scaling, generate_gaussian_2d, parse_csv, split_consecutive, Dataset, GaussianSpec,
    ScalingParams,
};
use crate::error::{Error, Result};
use crate::implied::{
    build_hyperplane_grid, degeneracy_report_from_estimates, estimate_batch, GridConfig, GridMode, HyperplaneGrid,
    ImpliedEstimate,
};
use crate::kernel_svm::{train_weighted_svm, KernelSpec, PenaltyConfig, SolverOptions};
use crate::weighting::{EffectiveCounts, WeightPair};

use super::pipeline::{compare, vote_table, CompareSettings};
use super::{
    CalibrateArgs, Command, CompareArgs, DataArgs, EstimateArgs, FloatList, GenDataArgs, GridArgs, KernelKind,
    ModeKind, ModelArgs, Preset, RocArgs, ScaleKind, TrainArgs,
};

const GERMAN_DATA: &str = "data/german.data-numeric";
const GERMAN_N_TRAIN: usize = 500;

pub(super) fn execute(command: Command) -> Result<()> {
    match command {
        Command::GenData(a) => gen_data(a),
        Command::Train(a) => train(a),
        Command::Grid(a) => grid(a),
        Command::Estimate(a) => estimate(a),
        Command::Calibrate(a) => calibrate(a),
        Command::Compare(a) => compare_cmd(a),
        Command::Roc(a) => roc(a),
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn detect_label_column(text: &str) -> usize {
    let first = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
    let cells: Vec<&str> = if first.contains(',') {
        first.split(',').map(str::trim).collect()
    } else {
        first.split_whitespace().collect()
    };
    cells
        .iter()
        .position(|c| c.eq_ignore_ascii_case("label"))
        .unwrap_or(cells.len().saturating_sub(1))
}

fn load_data(path: &Path, args: &DataArgs) -> Result<Dataset> {
    let text = read_text(path)?;
    let column = args.label_column.unwrap_or_else(|| detect_label_column(&text));
    parse_csv(&text, &path.display().to_string(), column, &args.positive_label)
}

fn data_path(args: &DataArgs, preset: Option<Preset>) -> Result<PathBuf> {
    match (&args.data, preset) {
        (Some(p), _) => Ok(p.clone()),
        (None, Some(Preset::German)) => Ok(PathBuf::from(GERMAN_DATA)),
        _ => Err(Error::invalid("--data is required")),
    }
}

fn take_first(ds: Dataset, n: Option<usize>) -> Result<Dataset> {
    match n {
        Some(n) if n < ds.len() => Ok(split_consecutive(&ds, n)?.0),
        Some(n) if n > ds.len() => Err(Error::invalid(format!("--n-train {n} exceeds {} rows", ds.len()))),
        _ => Ok(ds),
    }
}

struct Resolved {
    kernel: KernelSpec,
    base: PenaltyConfig,
    scale: bool,
    solver: SolverOptions,
}

fn resolve_model(m: &ModelArgs) -> Result<Resolved> {
    let (kind, gamma, c, scale) = match m.preset {
        Some(Preset::Tutorial) => (KernelKind::Linear, None, 20.0, false),
        Some(Preset::German) => (KernelKind::Rbf, Some(0.001), 10.0, false),
        None => (KernelKind::Linear, None, 1.0, false),
    };
    let kernel = match m.kernel.unwrap_or(kind) {
        KernelKind::Linear => KernelSpec::Linear,
        KernelKind::Rbf => {
            let gamma = m
                .gamma
                .or(gamma)
                .ok_or_else(|| Error::invalid("--gamma is required for the rbf kernel"))?;
            KernelSpec::rbf(gamma)?
        }
    };
    let c = m.c.unwrap_or(c);
    let base = PenaltyConfig::new(m.c_plus.unwrap_or(c), m.c_minus.unwrap_or(c))?;
    let scale = m.scale.map(|s| s == ScaleKind::Minmax).unwrap_or(scale);
    let solver = SolverOptions::new(m.tol, m.max_iter)?;
    Ok(Resolved {
        kernel,
        base,
        scale,
        solver,
    })
}

fn default_k(preset: Option<Preset>) -> usize {
    match preset {
        Some(Preset::Tutorial) => 9,
        Some(Preset::German) => 199,
        None => 99,
    }
}

fn resolve_mode(mode: Option<ModeKind>, base: PenaltyConfig) -> GridMode {
    match mode {
        Some(ModeKind::Exact) => GridMode::Exact,
        Some(ModeKind::Balanced) => GridMode::BalancedAssumption,
        None => GridMode::default_for(base),
    }
}

fn maybe_scale(ds: Dataset, scale: bool) -> Result<(Dataset, Option<ScalingParams>)> {
    if !scale {
        return Ok((ds, None));
    }
    let s = fit_scaling(&ds)?;
    Ok((apply_scaling(&ds, &s)?, Some(s)))
}

fn gen_data(a: GenDataArgs) -> Result<()> {
    let mut spec = match a.preset {
        Preset::Tutorial => GaussianSpec::tutorial(a.seed),
        Preset::German => return Err(Error::invalid("gen-data only supports the tutorial preset")),
    };
    let pair = |v: &[f64], name: &str| -> Result<[f64; 2]> {
        <[f64; 2]>::try_from(v).map_err(|_| Error::invalid(format!("--{name} needs 2 values, got {}", v.len())))
    };
    let matrix = |v: &[f64], name: &str| -> Result<[[f64; 2]; 2]> {
        match v {
            [a, b, c, d] => Ok([[*a, *b], [*c, *d]]),
            _ => Err(Error::invalid(format!("--{name} needs 4 values, got {}", v.len()))),
        }
    };
    if let Some(FloatList(v)) = &a.mean_plus {
        spec.mean_plus = pair(v, "mean-plus")?;
    }
    if let Some(FloatList(v)) = &a.mean_minus {
        spec.mean_minus = pair(v, "mean-minus")?;
    }
    if let Some(FloatList(v)) = &a.cov_plus {
        spec.cov_plus = matrix(v, "cov-plus")?;
    }
    if let Some(FloatList(v)) = &a.cov_minus {
        spec.cov_minus = matrix(v, "cov-minus")?;
    }
    spec.n_plus = a.n_plus.unwrap_or(spec.n_plus);
    spec.n_minus = a.n_minus.unwrap_or(spec.n_minus);
    let ds = generate_gaussian_2d(&spec)?;
    match &a.out {
        Some(p) => write_text(p, &ds.to_csv_string()),
        None => {
            print!("{}", ds.to_csv_string());
            Ok(())
        }
    }
}

fn train(a: TrainArgs) -> Result<()> {
    let r = resolve_model(&a.model)?;
    let path = data_path(&a.data, a.model.preset)?;
    let n_train = a.n_train.or((a.model.preset == Some(Preset::German)).then_some(GERMAN_N_TRAIN));
    let ds = take_first(load_data(&path, &a.data)?, n_train)?;
    let (ds, scaling) = maybe_scale(ds, r.scale)?;
    let z_plus = a.z_plus.or(a.model.preset.map(|_| 0.5));
    let penalties = match z_plus {
        Some(z) => {
            let (n_plus, n_minus) = ds.class_counts();
            let counts = EffectiveCounts::from_penalties(n_plus, n_minus, r.base)?;
            WeightPair::for_z_plus(z, &counts)?.apply(r.base)?
        }
        None => r.base,
    };
    let (model, diag) = train_weighted_svm(&ds, r.kernel, penalties, r.solver.tol, r.solver.max_iter)?;
    let total_slack: f64 = diag.slacks.iter().sum();
    let max_slack = diag.slacks.iter().copied().fold(0.0, f64::max);
    println!("training points       {}", ds.len());
    println!("penalties C+, C-      {}, {}", penalties.c_plus, penalties.c_minus);
    println!("support vectors       {}", model.support_vectors().len());
    println!("iterations            {}", diag.iterations);
    println!("bias                  {:.10}", model.bias());
    println!("max KKT violation     {:.3e}", diag.max_kkt_violation);
    println!("primal objective      {:.10}", diag.primal_objective);
    println!("dual objective        {:.10}", diag.dual_objective);
    println!("duality gap           {:.3e}", diag.duality_gap);
    println!("total slack           {total_slack:.6}");
    println!("max slack             {max_slack:.6}");
    if let Some(out) = &a.out {
        model.save(out, scaling.as_ref())?;
    }
    Ok(())
}

fn grid(a: GridArgs) -> Result<()> {
    let r = resolve_model(&a.model)?;
    let path = data_path(&a.data, a.model.preset)?;
    let n_train = a.n_train.or((a.model.preset == Some(Preset::German)).then_some(GERMAN_N_TRAIN));
    let ds = take_first(load_data(&path, &a.data)?, n_train)?;
    let (ds, scaling) = maybe_scale(ds, r.scale)?;
    let mut config = GridConfig::new(a.k.unwrap_or(default_k(a.model.preset)), resolve_mode(a.mode, r.base));
    config.solver = r.solver;
    config.parallel = !a.sequential;
    let grid = build_hyperplane_grid(&ds, r.kernel, r.base, &config)?;
    grid.save(&a.out, scaling.as_ref())?;
    println!("mode {}, {} entries ({} trained)", grid.mode().as_str(), grid.entries().len(), grid.k());
    println!("{:>8} {:>10} {:>10} {:>12} {:>12}", "level", "z+", "z-", "C+", "C-");
    for e in grid.trained_entries() {
        if let Some(w) = &e.weights {
            let p = w.apply(r.base)?;
            println!(
                "{:>8.4} {:>10.6} {:>10.6} {:>12.6} {:>12.6}",
                e.level, w.z_plus, w.z_minus, p.c_plus, p.c_minus
            );
        }
    }
    Ok(())
}

pub(super) fn estimates_csv(ids: &[usize], estimates: &[ImpliedEstimate], labels01: &[f64]) -> String {
    let mut out = String::from("id,value,positive_votes,on_plane_count,degenerate,label\n");
    for ((id, e), l) in ids.iter().zip(estimates).zip(labels01) {
        let _ = writeln!(
            out,
            "{id},{},{},{},{},{l}",
            e.value, e.positive_votes, e.on_plane_count, e.degenerate
        );
    }
    out
}

fn estimate(a: EstimateArgs) -> Result<()> {
    let (grid, scaling): (HyperplaneGrid, _) = HyperplaneGrid::load(&a.grid)?;
    let path = a.data.data.clone().ok_or_else(|| Error::invalid("--data is required"))?;
    let mut ds = load_data(&path, &a.data)?;
    if let Some(skip) = a.skip {
        ds = split_consecutive(&ds, skip)?.1;
    }
    let ds = match &scaling {
        Some(s) => apply_scaling(&ds, s)?,
        None => ds,
    };
    let estimates = estimate_batch(&grid, &ds, a.eps)?;
    let report = degeneracy_report_from_estimates(&grid, ds.ids(), &estimates);
    let csv = estimates_csv(ds.ids(), &estimates, &ds.indicators());
    let mut summary = format!(
        "{} points, {} degenerate, grid of {} models\n",
        ds.len(),
        report.degenerate_count,
        grid.k()
    );
    if a.table {
        summary.push_str(&vote_table(&grid, &ds, &estimates));
    }
    match &a.out {
        Some(p) => {
            write_text(p, &csv)?;
            print!("{summary}");
        }
        None => {
            print!("{csv}");
            eprint!("{summary}");
        }
    }
    Ok(())
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    source: String,
}

impl Table {
    fn read(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let source = path.display().to_string();
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Vec<String> = lines
            .next()
            .ok_or_else(|| Error::parse(&source, "empty file"))?
            .split(',')
            .map(|s| s.trim().to_string())
            .collect();
        let rows: Vec<Vec<String>> = lines
            .map(|l| l.split(',').map(|s| s.trim().to_string()).collect())
            .collect();
        for (i, r) in rows.iter().enumerate() {
            if r.len() != header.len() {
                return Err(Error::parse(
                    format!("{source}:{}", i + 2),
                    format!("expected {} fields, found {}", header.len(), r.len()),
                ));
            }
        }
        Ok(Self { header, rows, source })
    }

    fn index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::parse(&self.source, format!("no column named {name:?}")))
    }

    fn numbers(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[k].parse::<f64>()
                    .map_err(|e| Error::parse(format!("{}:{}", self.source, i + 2), format!("{name}: {e}")))
            })
            .collect()
    }

    fn labels01(&self, name: &str) -> Result<Vec<f64>> {
        let k = self.index(name)?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| match r[k].as_str() {
                "1" | "1.0" | "+1" | "true" => Ok(1.0),
                "0" | "0.0" | "-1" | "-1.0" | "false" => Ok(0.0),
                other => Err(Error::parse(
                    format!("{}:{}", self.source, i + 2),
                    format!("unrecognised label {other:?}"),
                )),
            })
            .collect()
    }

    fn default_columns(&self, label: &str) -> Vec<String> {
        self.header
            .iter()
            .filter(|h| {
                let h = h.as_str();
                h != label
                    && h != "id"
                    && !h.starts_with("iso_")
                    && !matches!(h, "positive_votes" | "on_plane_count" | "degenerate")
            })
            .cloned()
            .collect()
    }
}

fn write_reports(dir: &Path, reports: &[CalibrationReport], summary: &str, svg_out: bool) -> Result<()> {
    write_text(&dir.join("summary.txt"), summary)?;
    for r in reports {
        write_text(&dir.join(format!("{}_bins.csv", r.method)), &r.bins_csv())?;
        write_text(&dir.join(format!("{}_roc.csv", r.method)), &r.roc_csv())?;
        if svg_out {
            write_text(
                &dir.join(format!("{}_reliability.svg", r.method)),
                &svg::reliability_svg(r),
            )?;
        }
    }
    if svg_out {
        let curves: Vec<(&str, &RocCurve)> = reports.iter().map(|r| (r.method.as_str(), &r.roc)).collect();
        write_text(&dir.join("roc.svg"), &svg::roc_svg(&curves))?;
    }
    Ok(())
}

fn report_summary(reports: &[CalibrationReport]) -> String {
    let mut out = format!("{:<20}{:>12}{:>10}\n", "method", "cal.score", "AUC");
    for r in reports {
        let _ = writeln!(out, "{:<20}{:>12.4}{:>10.4}", r.method, r.calibration_score, r.auc());
    }
    out
}

fn calibrate(a: CalibrateArgs) -> Result<()> {
    let table = Table::read(&a.input)?;
    let labels = table.labels01(&a.label)?;
    let columns = if a.columns.is_empty() {
        table.default_columns(&a.label)
    } else {
        a.columns.clone()
    };
    if columns.is_empty() {
        return Err(Error::invalid("no estimate columns to evaluate"));
    }
    let mut reports = Vec::new();
    for c in &columns {
        let mut values = table.numbers(c)?;
        if a.normalize.contains(c) {
            values = normalize_scores(&values);
        }
        reports.push(CalibrationReport::evaluate(c, &values, &labels, a.bins)?);
    }
    let summary = report_summary(&reports);
    print!("{summary}");
    if let Some(dir) = &a.out_dir {
        write_reports(dir, &reports, &summary, a.svg)?;
    }
    Ok(())
}

fn roc(a: RocArgs) -> Result<()> {
    let table = Table::read(&a.input)?;
    let labels = table.labels01(&a.label)?;
    let columns = if a.columns.is_empty() {
        table.default_columns(&a.label)
    } else {
        a.columns.clone()
    };
    let mut curves = Vec::new();
    for c in &columns {
        curves.push((c.clone(), roc_and_auc(&table.numbers(c)?, &labels)?));
    }
    for (name, curve) in &curves {
        println!("{name:<20} AUC {:.4}", curve.auc);
    }
    if let Some(dir) = &a.out_dir {
        for (name, curve) in &curves {
            let mut csv = String::from("fpr,tpr\n");
            for (x, y) in &curve.points {
                let _ = writeln!(csv, "{x},{y}");
            }
            write_text(&dir.join(format!("{name}_roc.csv")), &csv)?;
        }
        if a.svg {
            let refs: Vec<(&str, &RocCurve)> = curves.iter().map(|(n, c)| (n.as_str(), c)).collect();
            write_text(&dir.join("roc.svg"), &svg::roc_svg(&refs))?;
        }
    }
    Ok(())
}

fn compare_cmd(a: CompareArgs) -> Result<()> {
    let preset = a.model.preset;
    let r = resolve_model(&a.model)?;
    let (train, test) = match (preset, &a.data.data) {
        (Some(Preset::Tutorial), None) => (
            generate_gaussian_2d(&GaussianSpec::tutorial(a.seed))?,
            generate_gaussian_2d(&GaussianSpec::tutorial(a.seed.wrapping_add(1)))?,
        ),
        _ => {
            let path = data_path(&a.data, preset)?;
            let ds = load_data(&path, &a.data)?;
            match &a.test {
                Some(t) => (take_first(ds, a.n_train)?, load_data(t, &a.data)?),
                None => {
                    let n = a
                        .n_train
                        .or((preset == Some(Preset::German)).then_some(GERMAN_N_TRAIN))
                        .unwrap_or(ds.len() / 2);
                    split_consecutive(&ds, n)?
                }
            }
        }
    };
    let settings = CompareSettings {
        kernel: r.kernel,
        base: r.base,
        k: a.k.unwrap_or(default_k(preset)),
        mode: resolve_mode(a.mode, r.base),
        scale: r.scale,
        solver: r.solver,
        bins: a.bins,
        eps_on_plane: a.eps,
    };
    let outcome = compare(&train, &test, &settings)?;
    let summary = outcome.summary();
    print!("{summary}");
    let scaled_test = match &outcome.scaling {
        Some(s) => apply_scaling(&test, s)?,
        None => test.clone(),
    };
    let votes = vote_table(&outcome.grid, &scaled_test, &outcome.implied);
    if preset == Some(Preset::Tutorial) {
        print!("\n{votes}");
    }
    if let Some(dir) = &a.out_dir {
        let reports = [
            outcome.raw_report.clone(),
            outcome.platt_report.clone(),
            outcome.implied_report.clone(),
        ];
        write_reports(dir, &reports, &summary, a.svg)?;
        write_text(&dir.join("points.csv"), &outcome.points_csv())?;
        write_text(&dir.join("votes.csv"), &votes)?;
        write_text(
            &dir.join("estimates.csv"),
            &estimates_csv(&outcome.test_ids, &outcome.implied, &outcome.test_labels01),
        )?;
        write_text(&dir.join("config.txt"), &settings.to_config_text())?;
        train.write_csv(dir.join("train.csv"))?;
        test.write_csv(dir.join("test.csv"))?;
        outcome.grid.save(dir.join("grid.manifest"), outcome.scaling.as_ref())?;
        outcome.base_model.save(dir.join("base.model"), outcome.scaling.as_ref())?;
    }
    Ok(())
}
