use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::{json, Value};

use rbf_lowrank::cheb1d::{bound_analytic, profile_bound};
use rbf_lowrank::cheb_factor::{build_cheb_plan, factor_matrices, SeparablePlan};
use rbf_lowrank::concentration::{prob_bound_analytic, prob_bound_finite};
use rbf_lowrank::fourier_taylor::{best_fourier_part, build_ft_plan, ft_error_bound, periodize, FtOptions};
use rbf_lowrank::indexcomb::{rank_chebyshev, rank_fourier_taylor};
use rbf_lowrank::io;
use rbf_lowrank::linalg::{dense_bytes, DenseMatrix, MemoryCap};
use rbf_lowrank::pointgen::{derive_seed, sample_in_box, scenario_clouds, PointCloud, Scenario, Scheme};
use rbf_lowrank::profile::{Family, RadialProfile, Smoothness};
use rbf_lowrank::spectrum::lowrank::error_drops;
use rbf_lowrank::spectrum::report::KernelInfo;
use rbf_lowrank::spectrum::sweep::{grid_search_p, rank_sweep, repeat_seed, scenario_spectrum, SweepConfig, P_GRID};
use rbf_lowrank::spectrum::{
    assemble, pooled_ratio_spikes, reconstruction_curve, squared_distance, Bandwidth, Method, Norm, Spectrum,
    SpectrumReport,
};
use rbf_lowrank::{Error, Result};

use crate::args::*;
use crate::output::{Artifact, Cell, Table};

/// Largest point count accepted without `--unsafe-n`.
pub const SAFE_N: usize = 4000;

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

fn cap(g: &Globals) -> MemoryCap {
    MemoryCap { bytes: u128::from(g.memory_cap_mb) << 20 }
}

fn check_n(g: &Globals, n: usize) -> Result<()> {
    if n > SAFE_N && !g.unsafe_n {
        return Err(Error::Resource {
            what: format!("{n} points (pass --unsafe-n to go beyond {SAFE_N})"),
            required_bytes: dense_bytes(n, n),
            cap_bytes: dense_bytes(SAFE_N, SAFE_N),
        });
    }
    Ok(())
}

fn check_repeats(g: &Globals) -> Result<()> {
    if g.repeats == 0 {
        return Err(Error::Contract("--repeats must be at least 1".into()));
    }
    Ok(())
}

fn scheme(kind: SchemeKind, p: f64, offset: u64) -> Scheme {
    match kind {
        SchemeKind::Uniform => Scheme::Uniform,
        SchemeKind::Endpoint => Scheme::Endpoint { p },
        SchemeKind::Halton => Scheme::Halton { offset },
    }
}

fn scheme_label(s: &Scheme) -> String {
    match s {
        Scheme::Uniform => "uniform".into(),
        Scheme::Endpoint { p } => format!("endpoint(p={p})"),
        Scheme::Halton { offset } => format!("halton(offset={offset})"),
    }
}

fn norms(names: &[String]) -> Result<Vec<Norm>> {
    names.iter().map(|s| Norm::parse(s)).collect()
}

fn radial_profile(p: &ProfileArgs) -> Result<RadialProfile> {
    let family = Family::parse(&p.profile)?;
    if !(p.h > 0.0 && p.h.is_finite()) {
        return Err(Error::Contract(format!("--h must be positive, got {}", p.h)));
    }
    let smoothness = match (p.rho_sq, p.c, p.q, p.vq) {
        (Some(rho_sq), Some(c), _, _) => Smoothness::Analytic { rho_sq, c },
        (_, _, Some(q), Some(v_q)) => Smoothness::FiniteSmooth { q, v_q },
        _ => Smoothness::AutoAnalytic,
    };
    RadialProfile::new(family.with_bandwidth(p.h), p.diameter, smoothness)
}

fn matrix_table(m: &DenseMatrix, prefix: &str) -> Table {
    let header: Vec<String> = (0..m.ncols()).map(|k| format!("{prefix}{k}")).collect();
    let refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::new(&refs);
    for i in 0..m.nrows() {
        t.push(m.row(i).iter().map(|&v| Cell::Num(v)).collect());
    }
    t
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

pub fn factorize(g: &Globals, a: &FactorizeArgs) -> Result<Vec<Artifact>> {
    let profile = radial_profile(&a.profile)?;
    let diameter = profile.diameter;
    let d = a.d;
    if d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    check_n(g, a.points)?;
    if a.write_factors && (g.out.is_none() || a.points == 0) {
        return Err(Error::Contract("--write-factors needs --out and --points".into()));
    }

    // Source and target boxes: the cube [0, D / sqrt d]^d for Chebyshev,
    // cubes inscribed in the two balls for Fourier-Taylor.
    let sd = (d as f64).sqrt();
    let (d_x, d_y) = (a.dx.unwrap_or(diameter / 2.0), a.dy.unwrap_or(diameter / 2.0));
    let mut y_center = vec![0.0; d];
    y_center[0] = a.gap;
    let (x_box, y_box) = match a.construction {
        Construction::Cheb => {
            let cube = (vec![0.0; d], vec![diameter / sd; d]);
            (cube.clone(), cube)
        }
        Construction::Ft => {
            if !(d_x >= 0.0 && d_y >= 0.0 && a.gap >= 0.0 && d_x + d_y + a.gap <= diameter * (1.0 + 1e-12)) {
                return Err(Error::Constraint(format!(
                    "regions must satisfy D_x + D_y + gap <= D, got {d_x} + {d_y} + {} > {diameter}",
                    a.gap
                )));
            }
            let around = |c: &[f64], r: f64| {
                (c.iter().map(|v| v - r / sd).collect::<Vec<_>>(), c.iter().map(|v| v + r / sd).collect::<Vec<_>>())
            };
            (around(&vec![0.0; d], d_x), around(&y_center, d_y))
        }
    };

    let plan = match a.construction {
        Construction::Cheb => {
            let mut plan = build_cheb_plan(&profile, a.n, d)?;
            if let Some(tol) = a.prune_tol {
                plan.prune(tol, diameter)?;
            }
            SeparablePlan::Chebyshev(plan)
        }
        Construction::Ft => {
            let pp = periodize(&profile, a.window_order)?;
            let opts = FtOptions {
                m_f: a.mf,
                m_t: a.mt,
                x_center: vec![0.0; d],
                y_center: y_center.clone(),
                d_x,
                d_y,
                enforce_ratio: !a.allow_heuristic,
                quad_points: None,
            };
            SeparablePlan::FourierTaylor(build_ft_plan(&pp, d, &opts)?)
        }
    };
    let mut summary = Table::new(&["key", "value"]);
    let mut kv = |k: &str, v: Cell| summary.push(vec![k.into(), v]);
    kv("construction", plan.construction().into());
    kv("profile", profile.name().into());
    kv("d", d.into());
    kv("D", diameter.into());
    match &plan {
        SeparablePlan::Chebyshev(p) => {
            kv("n", p.n.into());
            kv("pruned_terms", p.pruning.map(|pr| pr.dropped).into());
        }
        SeparablePlan::FourierTaylor(p) => {
            kv("m_f", p.m_f.into());
            kv("m_t", p.m_t.into());
            kv("heuristic", p.heuristic.into());
        }
    }
    kv("declared_rank", plan.declared_rank().into());
    kv("retained_rank", plan.retained_rank().into());
    kv("error_bound", plan.error_bound().into());

    let mut artifacts = Vec::new();
    if a.points > 0 {
        let x = sample_in_box(Scheme::Uniform, a.points, &x_box.0, &x_box.1, derive_seed(g.seed, 0))?;
        let y = sample_in_box(Scheme::Uniform, a.points, &y_box.0, &y_box.1, derive_seed(g.seed, 1))?;
        let cap = cap(g);
        cap.check("kernel matrix", dense_bytes(a.points, a.points) * 2)?;
        let (gm, hm) = factor_matrices(&plan, &x, &y, cap)?;
        let approx = gm.mul_transpose(&hm);
        let exact = DenseMatrix::par_from_rows(x.len(), y.len(), |i, row| {
            for (j, o) in row.iter_mut().enumerate() {
                *o = profile.f.eval(squared_distance(x.point(i), y.point(j)));
            }
        });
        let err = approx.max_abs_diff(&exact);
        if !err.is_finite() {
            return Err(Error::Numerical("factor product has non-finite entries".into()));
        }
        kv("points", a.points.into());
        kv("empirical_max_error", err.into());
        if a.write_factors {
            let dir = g.out.as_deref().expect("checked above");
            write_factor(dir, "G", &gm, a.factor_format)?;
            write_factor(dir, "H", &hm, a.factor_format)?;
        }
    }
    artifacts.push(Artifact::json("plan", to_value(&plan)?));
    artifacts.push(Artifact::table("summary", summary));
    Ok(artifacts)
}

fn write_factor(dir: &Path, name: &str, m: &DenseMatrix, format: FactorFormat) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    match format {
        FactorFormat::Csv => {
            let mut w = BufWriter::new(File::create(dir.join(format!("{name}.csv")))?);
            io::write_csv(m, "term", &mut w)?;
            w.flush()?;
        }
        FactorFormat::Bin => {
            let mut w = BufWriter::new(File::create(dir.join(format!("{name}.bin")))?);
            io::write_binary(m, &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn parse_ft_pair(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Contract(format!("expected MF:MT, got `{s}`"));
    let (f, t) = s.split_once(':').ok_or_else(bad)?;
    Ok((f.trim().parse().map_err(|_| bad())?, t.trim().parse().map_err(|_| bad())?))
}

pub fn bounds(a: &BoundsArgs) -> Result<Vec<Artifact>> {
    if a.worked {
        return worked_examples();
    }
    let profile = radial_profile(&a.profile)?;
    let diameter = profile.diameter;
    let d = a.d as u64;
    let mut t = Table::new(&[
        "construction",
        "n",
        "m_f",
        "m_t",
        "d",
        "rank",
        "bound",
        "rho_sq",
        "c",
        "delta",
        "prob_bound",
        "note",
    ]);
    for &n in &a.n_list {
        let rank = rank_chebyshev(n as u64, d)?;
        let mut row = vec!["chebyshev".into(), n.into(), Cell::Empty, Cell::Empty, a.d.into(), rank.into()];
        match profile_bound(&profile, n) {
            Ok((bound, ellipse)) => {
                let prob = a.delta.map(|delta| match (ellipse, profile.smoothness) {
                    (Some(e), _) => prob_bound_analytic(e.c, diameter, delta, e.rho_sq, n),
                    (None, Smoothness::FiniteSmooth { q, v_q }) => prob_bound_finite(v_q, delta, q, n),
                    (None, _) => Err(Error::Contract("no smoothness data".into())),
                });
                let (prob_cell, note) = match prob {
                    Some(Ok(v)) => (Cell::Num(v), String::new()),
                    Some(Err(e)) => (Cell::Empty, e.to_string()),
                    None => (Cell::Empty, String::new()),
                };
                row.extend([
                    bound.into(),
                    ellipse.map(|e| e.rho_sq).into(),
                    ellipse.map(|e| e.c).into(),
                    a.delta.into(),
                    prob_cell,
                    note.into(),
                ]);
            }
            Err(e) => row.extend([Cell::Empty, Cell::Empty, Cell::Empty, a.delta.into(), Cell::Empty, e.to_string().into()]),
        }
        t.push(row);
    }
    let pp = periodize(&profile, a.window_order);
    for pair in &a.ft {
        let (m_f, m_t) = parse_ft_pair(pair)?;
        let rank = rank_fourier_taylor(m_f as u64, m_t as u64, d)?;
        let bound = pp.as_ref().map_err(Clone::clone).and_then(|pp| {
            let (q, v_q, _) = best_fourier_part(pp, m_f);
            ft_error_bound(pp.sup_norm(8192), diameter / 2.0, diameter / 2.0, diameter, m_t, v_q, q, m_f)
        });
        let (bound, note) = match bound {
            Ok(b) => (Cell::Num(b.total), format!("taylor={:?};fourier={:?}", b.taylor, b.fourier)),
            Err(e) => (Cell::Empty, e.to_string()),
        };
        t.push(vec![
            "fourier_taylor".into(),
            Cell::Empty,
            m_f.into(),
            m_t.into(),
            a.d.into(),
            rank.into(),
            bound,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            note.into(),
        ]);
    }
    Ok(vec![Artifact::table("bounds", t)])
}

fn worked_examples() -> Result<Vec<Artifact>> {
    let mut t = Table::new(&["example", "value", "expected"]);
    t.push(vec![
        "chebyshev_analytic(rho_sq=2;C=1;n=3)".into(),
        bound_analytic(2.0, 1.0, 3)?.into(),
        0.25.into(),
    ]);
    t.push(vec![
        "fourier_taylor_taylor_part(norm=1;D_x=D_y=0.5;D=1;M_t=9)".into(),
        ft_error_bound(1.0, 0.5, 0.5, 1.0, 9, 0.0, 1, 1)?.taylor.into(),
        0.25f64.powi(10).into(),
    ]);
    t.push(vec![
        "probabilistic_analytic(C=1;D=1;delta^2=0.1;rho_sq=2;n=1)".into(),
        prob_bound_analytic(1.0, 1.0, 0.1f64.sqrt(), 2.0, 1)?.into(),
        0.00952.into(),
    ]);
    Ok(vec![Artifact::table("worked_examples", t)])
}

pub fn rank_sweep_cmd(g: &Globals, a: &RankSweepArgs) -> Result<Vec<Artifact>> {
    check_repeats(g)?;
    check_n(g, a.n_points)?;
    let scenario = Scenario::parse(&a.scenario)?;
    let family = Family::parse(&a.family)?;
    let bandwidth = Bandwidth::parse(&a.bandwidth, a.h)?;
    let norms = norms(&a.norms)?;
    if a.tols.is_empty() || norms.is_empty() || a.d_list.is_empty() {
        return Err(Error::Contract("need at least one dimension, tolerance and norm".into()));
    }
    let cap = cap(g);
    let base = SweepConfig {
        dims: a.d_list.clone(),
        schemes: a.schemes.iter().map(|&k| scheme(k, a.p, a.halton_offset)).collect(),
        scenario,
        n: a.n_points,
        family,
        bandwidth,
        tolerances: a.tols.clone(),
        norms: norms.clone(),
        seed: g.seed,
        repeats: g.repeats,
    };
    let mut rows = Vec::new();
    let mut search = Table::new(&["d", "p", "mean_rank", "selected"]);
    if a.grid_search_p {
        for &d in &a.d_list {
            let ps = grid_search_p(
                &P_GRID, scenario, a.n_points, d, family, bandwidth, a.tols[0], norms[0], g.seed, g.repeats, cap,
            )?;
            for &(p, m) in &ps.candidates {
                search.push(vec![d.into(), p.into(), m.into(), (p == ps.best_p).into()]);
            }
            let cfg = SweepConfig { dims: vec![d], schemes: vec![Scheme::Endpoint { p: ps.best_p }], ..base.clone() };
            rows.extend(rank_sweep(&cfg, cap)?);
        }
    } else {
        rows = rank_sweep(&base, cap)?;
    }
    let mut t = Table::new(&["d", "scheme", "tol", "norm", "rank", "mean", "std"]);
    for r in &rows {
        let ranks: Vec<String> = r.ranks.iter().map(usize::to_string).collect();
        t.push(vec![
            r.d.into(),
            scheme_label(&r.scheme).into(),
            r.tol.into(),
            r.norm.as_str().into(),
            ranks.join(";").into(),
            r.mean.into(),
            r.std.into(),
        ]);
    }
    let mut out = vec![Artifact::table("rank_sweep", t)];
    if a.grid_search_p {
        out.push(Artifact::table("p_search", search));
    }
    Ok(out)
}

fn read_matrix(path: &Path) -> Result<DenseMatrix> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "bin") {
        io::read_binary(BufReader::new(file))
    } else {
        io::read_csv(BufReader::new(file))
    }
}

fn singular_value_table(s: &[f64]) -> Table {
    let mut t = Table::new(&["index", "sigma", "ratio_next"]);
    for (i, &v) in s.iter().enumerate() {
        t.push(vec![(i + 1).into(), v.into(), s.get(i + 1).map(|n| v / n).into()]);
    }
    t
}

pub fn spectrum(g: &Globals, a: &SpectrumArgs) -> Result<Vec<Artifact>> {
    check_repeats(g)?;
    let norms = norms(&a.norms)?;
    let cap = cap(g);
    let data = &a.data;

    let (first, kernel, pooled) = match &a.input {
        Some(path) => {
            let m = read_matrix(path)?;
            check_n(g, m.nrows().max(m.ncols()))?;
            (Spectrum::new(m, cap)?, None, None)
        }
        None => {
            check_n(g, data.n_points)?;
            let scenario = Scenario::parse(&data.scenario)?;
            let family = Family::parse(&data.family)?;
            let bandwidth = Bandwidth::parse(&data.bandwidth, data.h)?;
            let sch = scheme(data.scheme, data.p, data.halton_offset);
            let (x, y) = scenario_clouds(scenario, sch, data.n_points, data.d, g.seed)?;
            let k = assemble(&x, &y, family, bandwidth, cap)?;
            let info = KernelInfo { profile: family.to_string(), bandwidth: bandwidth.name().into(), h: k.h };
            let first = Spectrum::new(k.entries, cap)?;
            let pooled = if g.repeats > 1 {
                let mut spectra = vec![first.singular_values().to_vec()];
                for t in 1..g.repeats {
                    let s = scenario_spectrum(
                        scenario,
                        sch,
                        data.n_points,
                        data.d,
                        family,
                        bandwidth,
                        repeat_seed(g.seed, t),
                        cap,
                    )?;
                    spectra.push(s.singular_values().to_vec());
                }
                let refs: Vec<&[f64]> = spectra.iter().map(Vec::as_slice).collect();
                let sets: Vec<Value> = a
                    .thresholds
                    .iter()
                    .map(|&th| Ok(json!({ "threshold": th, "spikes": to_value(&pooled_ratio_spikes(&refs, th))? })))
                    .collect::<Result<_>>()?;
                Some(json!({ "draws": g.repeats, "sets": sets }))
            } else {
                None
            };
            (first, Some(info), pooled)
        }
    };

    let report = SpectrumReport::build(&first, data.d, &a.tols, &norms, &a.thresholds, kernel)?;
    let mut value = to_value(&report)?;
    value["pooled_spikes"] = pooled.unwrap_or(Value::Null);
    Ok(vec![
        Artifact::json("spectrum_report", value),
        Artifact::table("singular_values", singular_value_table(first.singular_values())),
    ])
}

pub fn reconstruct(g: &Globals, a: &ReconstructArgs) -> Result<Vec<Artifact>> {
    let data = &a.data;
    check_n(g, data.n_points)?;
    let cap = cap(g);
    let scenario = Scenario::parse(&data.scenario)?;
    let family = Family::parse(&data.family)?;
    let bandwidth = Bandwidth::parse(&data.bandwidth, data.h)?;
    let sch = scheme(data.scheme, data.p, data.halton_offset);
    let (x, y) = scenario_clouds(scenario, sch, data.n_points, data.d, g.seed)?;
    let k = assemble(&x, &y, family, bandwidth, cap)?;
    let symmetric = k.symmetric;
    let spectrum = Spectrum::new(k.entries, cap)?;

    let mut ranks = if a.ranks.is_empty() { (0..=a.max_rank).collect() } else { a.ranks.clone() };
    ranks.sort_unstable();
    ranks.dedup();
    let methods: Vec<Method> = a
        .methods
        .iter()
        .map(|m| match m {
            MethodKind::Svd => Method::Svd,
            MethodKind::Nystrom => {
                Method::Nystrom { oversample: a.oversample, repeats: a.nystrom_repeats, seed: derive_seed(g.seed, 7) }
            }
            MethodKind::Randsvd => {
                Method::RandSvd { power_iters: a.power_iters, oversample: a.oversample, seed: derive_seed(g.seed, 8) }
            }
        })
        .collect();
    let rows = reconstruction_curve(&spectrum, &ranks, &methods, symmetric)?;

    let mut curve = Table::new(&["rank", "method", "rel_fro_error"]);
    for r in &rows {
        curve.push(vec![r.rank.into(), r.method.clone().into(), r.rel_fro_error.into()]);
    }
    let mut drops = Table::new(&["method", "factor", "ranks"]);
    for m in &methods {
        let errs: Vec<(usize, f64)> =
            rows.iter().filter(|r| r.method == m.name()).map(|r| (r.rank, r.rel_fro_error)).collect();
        let at: Vec<String> = error_drops(&errs, a.drop_factor).iter().map(usize::to_string).collect();
        drops.push(vec![m.name().into(), a.drop_factor.into(), at.join(";").into()]);
    }
    Ok(vec![Artifact::table("reconstruction", curve), Artifact::table("error_drops", drops)])
}

fn cloud_artifacts(name: &str, c: &PointCloud) -> Result<Vec<Artifact>> {
    Ok(vec![
        Artifact::table(name, matrix_table(&c.points, "x")),
        Artifact::json(&format!("{name}_meta"), to_value(&c.meta())?),
    ])
}

pub fn sample(g: &Globals, a: &SampleArgs) -> Result<Vec<Artifact>> {
    check_n(g, a.n_points)?;
    if a.d == 0 {
        return Err(Error::InvalidDimension("d must be positive".into()));
    }
    let sch = scheme(a.scheme, a.p, a.halton_offset);
    match &a.scenario {
        Some(s) => {
            let (x, y) = scenario_clouds(Scenario::parse(s)?, sch, a.n_points, a.d, g.seed)?;
            let mut out = cloud_artifacts("source", &x)?;
            out.extend(cloud_artifacts("target", &y)?);
            Ok(out)
        }
        None => {
            let c = sample_in_box(sch, a.n_points, &vec![a.lo; a.d], &vec![a.hi; a.d], g.seed)?;
            cloud_artifacts("points", &c)
        }
    }
}
