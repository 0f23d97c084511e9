//! One function per subcommand. Each prints a short report to `out` and
//! writes its data files under the configured output directory.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::cli::config::RunConfig;
use crate::cli::format::{format_g17, io_error, Axis, SeriesFile};
use crate::error::{Error, Result};
use crate::fock::{binomial, SectorKey};
use crate::greens::{self, compare_values, Channel, GreensSeries, SeriesMetrics, StateTag};
use crate::groundstate::{HubbardModel, HERMITICITY_TOLERANCE};
use crate::reference_values as refv;
use crate::scalar::Cplx;
use crate::spectral::{self, FrequencySeries, SpectralSource};
use crate::state::StateVector;
use crate::ucc;

/// Largest `‖Hv − λv‖` tolerated before a run is declared numerically invalid.
pub const EIGEN_RESIDUAL_TOLERANCE: f64 = 1e-10;

/// Poles lighter than this are left out of printed pole lists.
pub const POLE_WEIGHT_FLOOR: f64 = 1e-12;

fn emit(out: &mut dyn Write, line: impl AsRef<str>) -> Result<()> {
    match writeln!(out, "{}", line.as_ref()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(io_error(Path::new("<stdout>"), e))
        }
        _ => Ok(()),
    }
}

fn write_report(dir: &Path, name: &str, report: &Value) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let path = dir.join(name);
    let mut body = serde_json::to_string_pretty(report).expect("report is serializable");
    body.push('\n');
    fs::write(&path, body).map_err(|e| io_error(&path, e))?;
    Ok(path)
}

fn cplx_json(z: Cplx<f64>) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn model(cfg: &RunConfig) -> Result<HubbardModel<f64>> {
    HubbardModel::new(cfg.hubbard_params())
}

/// Fails with a numerical error when the sector's decomposition is poor.
fn check_decomposition(model: &HubbardModel<f64>, key: SectorKey) -> Result<(f64, f64)> {
    let sys = model.sector(key)?;
    let residual = sys.eigen.max_residual(&sys.hamiltonian);
    let herm = sys.hamiltonian.hermiticity_residual();
    if residual > EIGEN_RESIDUAL_TOLERANCE || herm > HERMITICITY_TOLERANCE {
        return Err(Error::numerical(format!(
            "sector {key}: eigen residual {residual:e}, hermiticity residual {herm:e}"
        )));
    }
    Ok((residual, herm))
}

/// The state a Green's function is evaluated in.
pub fn prepare_state(
    cfg: &RunConfig,
    model: &HubbardModel<f64>,
    tag: StateTag,
) -> Result<StateVector<f64>> {
    let key = cfg.ground_sector();
    match tag {
        StateTag::Exact => {
            check_decomposition(model, key)?;
            Ok(model.ground_state(key)?.state)
        }
        StateTag::Ucc => {
            if key != ucc::ucc_sector() {
                return Err(Error::domain(format!(
                    "the UCC state lives on four sites at half filling, not V={} sector {key}",
                    key.sites
                )));
            }
            let sys = model.sector(key)?;
            ucc::prepare_ucc_state(&cfg.ucc_angles()?, &sys.basis)
        }
    }
}

pub fn time_series_file(stage: &str, g: &GreensSeries<f64>) -> SeriesFile {
    SeriesFile {
        stage: stage.into(),
        state: g.state.as_str().into(),
        channel: g.channel.to_string(),
        axis: Axis::Time,
        x: g.grid.times().collect(),
        re: g.values.iter().map(|z| z.re).collect(),
        im: g.values.iter().map(|z| z.im).collect(),
    }
}

pub fn frequency_series_file(stage: &str, state: &str, s: &FrequencySeries<f64>) -> SeriesFile {
    SeriesFile {
        stage: stage.into(),
        state: state.into(),
        channel: s.channel.to_string(),
        axis: Axis::Frequency,
        x: s.grid.omegas().collect(),
        re: s.values.iter().map(|z| z.re).collect(),
        im: s.values.iter().map(|z| z.im).collect(),
    }
}

pub fn cmd_info(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let p = cfg.hubbard_params();
    let model = model(cfg)?;
    emit(out, format!("U = {}", p.u))?;
    emit(out, format!("t0 = {}", p.t0))?;
    emit(out, format!("t1 = {}", p.t1))?;
    emit(out, format!("t2 = {}", p.t2))?;
    emit(out, format!("V = {}", p.sites))?;
    emit(out, "band energies:")?;
    for n in 0..p.sites {
        let k = 2.0 * std::f64::consts::PI * n as f64 / p.sites as f64;
        emit(
            out,
            format!(
                "  n = {n}  k = {}  eps = {}",
                format_g17(k),
                format_g17(model.band().energy(n))
            ),
        )?;
    }
    emit(out, "sector dimensions:")?;
    for n_up in 0..=p.sites {
        for n_down in 0..=p.sites {
            emit(
                out,
                format!(
                    "  sector ({n_up},{n_down}) dimension {}",
                    binomial(p.sites, n_up) * binomial(p.sites, n_down)
                ),
            )?;
        }
    }
    let key = cfg.ground_sector();
    emit(out, format!("ground sector {key}"))?;
    Ok(())
}

pub fn cmd_groundstate(cfg: &RunConfig, out: &mut dyn Write) -> Result<PathBuf> {
    let model = model(cfg)?;
    let key = cfg.ground_sector();
    let (residual, herm) = check_decomposition(&model, key)?;
    let sys = model.sector(key)?;
    let report = model.ground_state(key)?;
    let norm_residual = (report.state.norm() - 1.0).abs();
    let filling = model.band().filled_energy(key.n_up, key.n_down);

    let reference = refv::exact_coefficients();
    let mut max_delta: f64 = 0.0;
    let coefficients: Vec<Value> = report
        .named_coefficients
        .iter()
        .zip(reference)
        .map(|(c, r)| {
            let delta = (c.value - Cplx::new(r, 0.0)).norm();
            max_delta = max_delta.max(delta);
            json!({
                "determinant": c.label,
                "value": cplx_json(c.value),
                "reference": r,
                "delta": delta,
            })
        })
        .collect();

    emit(out, format!("sector {key} dimension {}", sys.basis.len()))?;
    emit(out, format!("E0 = {}", format_g17(report.energy)))?;
    emit(
        out,
        format!("band filling energy = {}", format_g17(filling)),
    )?;
    if let Some(g) = report.gap {
        emit(out, format!("gap = {}", format_g17(g)))?;
    }
    if report.degenerate {
        emit(out, "warning: ground level is degenerate; the phase-fixed vector is one member of the multiplet")?;
    }
    for c in &coefficients {
        emit(
            out,
            format!(
                "  {}  {}  delta {}",
                c["determinant"].as_str().unwrap_or_default(),
                format_g17(c["value"]["re"].as_f64().unwrap_or(f64::NAN)),
                format_g17(c["delta"].as_f64().unwrap_or(f64::NAN)),
            ),
        )?;
    }
    if !coefficients.is_empty() {
        emit(
            out,
            format!("max coefficient delta = {}", format_g17(max_delta)),
        )?;
    }
    emit(
        out,
        format!("normalization residual = {}", format_g17(norm_residual)),
    )?;

    let doc = json!({
        "params": cfg.params,
        "sector": { "sites": key.sites, "n_up": key.n_up, "n_down": key.n_down },
        "dimension": sys.basis.len(),
        "energy": report.energy,
        "band_filling_energy": filling,
        "gap": report.gap,
        "degenerate": report.degenerate,
        "coefficients": coefficients,
        "max_coefficient_delta": if coefficients.is_empty() { Value::Null } else { json!(max_delta) },
        "normalization_residual": norm_residual,
        "max_eigen_residual": residual,
        "hermiticity_residual": herm,
        "orthonormality_error": sys.eigen.orthonormality_error(),
    });
    let path = write_report(&cfg.output.dir, "groundstate.json", &doc)?;
    emit(out, format!("wrote {}", path.display()))?;
    Ok(path)
}

pub fn cmd_ucc(cfg: &RunConfig, out: &mut dyn Write) -> Result<PathBuf> {
    let model = model(cfg)?;
    let key = ucc::ucc_sector();
    if cfg.ground_sector() != key {
        return Err(Error::domain(format!(
            "the UCC ansatz needs V=4 at half filling, configured {}",
            cfg.ground_sector()
        )));
    }
    let angles = cfg.ucc_angles()?;
    let sys = model.sector(key)?;
    let psi = ucc::prepare_ucc_state(&angles, &sys.basis)?;
    let amps = ucc::tabulated_amplitudes(&psi, &sys.basis);
    let closed = ucc::analytic_coefficients(&angles);
    let exact = prepare_state(cfg, &model, StateTag::Exact)?;
    let fidelity = greens::fidelity(&exact, &psi)?;
    let printed = refv::printed_digit_fidelity();

    let (mut max_reference, mut max_closed) = (0.0f64, 0.0f64);
    let amplitudes: Vec<Value> = refv::DETERMINANTS
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let reference = refv::UCC_COEFFICIENTS[i];
            let dt = (amps[i] - Cplx::new(reference, 0.0)).norm();
            let dc = (amps[i] - Cplx::new(closed[i], 0.0)).norm();
            max_reference = max_reference.max(dt);
            max_closed = max_closed.max(dc);
            json!({
                "determinant": d.label(),
                "value": cplx_json(amps[i]),
                "closed_form": closed[i],
                "reference": reference,
                "delta_reference": dt,
                "delta_closed_form": dc,
            })
        })
        .collect();

    emit(out, format!("theta1 = {}", format_g17(angles.theta1)))?;
    emit(out, format!("theta3 = {}", format_g17(angles.theta3)))?;
    emit(out, format!("theta4 = {}", format_g17(angles.theta4)))?;
    for a in &amplitudes {
        emit(
            out,
            format!(
                "  {}  {}",
                a["determinant"].as_str().unwrap_or_default(),
                format_g17(a["value"]["re"].as_f64().unwrap_or(f64::NAN)),
            ),
        )?;
    }
    emit(
        out,
        format!("max delta vs reference = {}", format_g17(max_reference)),
    )?;
    emit(
        out,
        format!("max delta vs closed form = {}", format_g17(max_closed)),
    )?;
    emit(out, format!("fidelity = {}", format_g17(fidelity)))?;
    emit(
        out,
        format!("fidelity from printed digits = {}", format_g17(printed)),
    )?;

    let doc = json!({
        "params": cfg.params,
        "angles": { "theta1": angles.theta1, "theta3": angles.theta3, "theta4": angles.theta4 },
        "amplitudes": amplitudes,
        "max_delta_reference": max_reference,
        "max_delta_closed_form": max_closed,
        "off_support_weight": ucc::off_support_weight(&psi, &sys.basis),
        "fidelity": fidelity,
        "printed_digit_fidelity": printed,
    });
    let path = write_report(&cfg.output.dir, "ucc.json", &doc)?;
    emit(out, format!("wrote {}", path.display()))?;
    Ok(path)
}

pub fn cmd_greens(cfg: &RunConfig, tag: StateTag, out: &mut dyn Write) -> Result<Vec<PathBuf>> {
    let model = model(cfg)?;
    let psi = prepare_state(cfg, &model, tag)?;
    let grid = cfg.time_grid()?;
    let channels = cfg.channel_list()?;
    let series = greens::retarded_gf_channels(&psi, &model, &channels, &grid, tag)?;
    let mut paths = Vec::new();
    for g in &series {
        let path = time_series_file("greens", g).write(&cfg.output.dir, cfg.format())?;
        let peak = g.values.iter().fold(0.0f64, |m, z| m.max(z.norm()));
        emit(
            out,
            format!(
                "{}  max |G| = {}  wrote {}",
                g.channel,
                format_g17(peak),
                path.display()
            ),
        )?;
        paths.push(path);
    }
    Ok(paths)
}

/// Channels a momentum-only stage can handle. Site channels requested
/// explicitly are an error; the implicit local channel is dropped.
fn momentum_channels(cfg: &RunConfig) -> Result<Vec<Channel>> {
    let all = cfg.channel_list()?;
    if cfg.channels.is_empty() {
        return Ok(all
            .into_iter()
            .filter(|c| c.momentum_label().is_some())
            .collect());
    }
    if let Some(c) = all.iter().find(|c| c.momentum_label().is_none()) {
        return Err(Error::Config(format!(
            "channel {c} has no noninteracting counterpart; use momentum channels"
        )));
    }
    Ok(all)
}

fn interacting_series(
    cfg: &RunConfig,
    model: &HubbardModel<f64>,
    source: SpectralSource,
    tag: StateTag,
    channels: &[Channel],
) -> Result<(String, Vec<FrequencySeries<f64>>)> {
    let grid = cfg.frequency_grid()?;
    let eta = cfg.spectral.eta;
    match source {
        SpectralSource::Transformed => {
            let psi = prepare_state(cfg, model, tag)?;
            let series =
                greens::retarded_gf_channels(&psi, model, channels, &cfg.time_grid()?, tag)?;
            let ft = series
                .iter()
                .map(|g| spectral::fourier_transform(g, eta, &grid))
                .collect::<Result<Vec<_>>>()?;
            Ok((tag.as_str().to_string(), ft))
        }
        SpectralSource::Lehmann => {
            let key = cfg.ground_sector();
            check_decomposition(model, key)?;
            let s = channels
                .iter()
                .map(|&c| spectral::exact_lehmann_gf(model, c, key, &grid, eta))
                .collect::<Result<Vec<_>>>()?;
            Ok(("lehmann".into(), s))
        }
        SpectralSource::Noninteracting => {
            let s = channels
                .iter()
                .map(|&c| spectral::noninteracting_gf(model.band(), c, &grid, eta))
                .collect::<Result<Vec<_>>>()?;
            Ok(("noninteracting".into(), s))
        }
        SpectralSource::SelfEnergy => Err(Error::Config(
            "use the selfenergy command for self-energies".into(),
        )),
    }
}

pub fn cmd_spectral(
    cfg: &RunConfig,
    source: SpectralSource,
    tag: StateTag,
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let model = model(cfg)?;
    let channels = match source {
        SpectralSource::Noninteracting => momentum_channels(cfg)?,
        _ => cfg.channel_list()?,
    };
    let (state, series) = interacting_series(cfg, &model, source, tag, &channels)?;
    let eta = cfg.spectral.eta;
    let mut paths = Vec::new();
    let mut summaries = Vec::new();
    for s in &series {
        let path =
            frequency_series_file("spectral", &state, s).write(&cfg.output.dir, cfg.format())?;
        emit(
            out,
            format!(
                "{}  grid weight = {}  wrote {}",
                s.channel,
                format_g17(s.spectral_weight()),
                path.display()
            ),
        )?;
        let mut entry =
            json!({ "channel": s.channel.to_string(), "grid_weight": s.spectral_weight() });
        if source == SpectralSource::Lehmann {
            let poles = spectral::lehmann_poles(&model, s.channel, cfg.ground_sector())?;
            let sum_rule = poles.sum_rule(eta)?;
            emit(
                out,
                format!("sum rule {} = {}", s.channel, format_g17(sum_rule)),
            )?;
            let list: Vec<Value> = poles
                .significant(POLE_WEIGHT_FLOOR)
                .iter()
                .map(|p| {
                    emit(out, format!("  pole {}  residue {}  {}", format_g17(p.energy), format_g17(p.residue.re), if p.addition { "addition" } else { "removal" }))?;
                    Ok(json!({ "energy": p.energy, "residue": cplx_json(p.residue), "addition": p.addition }))
                })
                .collect::<Result<_>>()?;
            entry["sum_rule"] = json!(sum_rule);
            entry["ground_energy"] = json!(poles.ground_energy);
            entry["poles"] = Value::Array(list);
        }
        summaries.push(entry);
        paths.push(path);
    }
    let doc =
        json!({ "source": source.as_str(), "state": state, "eta": eta, "channels": summaries });
    let path = write_report(
        &cfg.output.dir,
        &format!("spectral_{state}_summary.json"),
        &doc,
    )?;
    emit(out, format!("wrote {}", path.display()))?;
    paths.push(path);
    Ok(paths)
}

pub fn cmd_selfenergy(
    cfg: &RunConfig,
    source: SpectralSource,
    tag: StateTag,
    out: &mut dyn Write,
) -> Result<Vec<PathBuf>> {
    let model = model(cfg)?;
    let channels = momentum_channels(cfg)?;
    if source == SpectralSource::Noninteracting {
        return Err(Error::Config(
            "the self-energy needs an interacting source (lehmann | transformed)".into(),
        ));
    }
    let (state, gs) = interacting_series(cfg, &model, source, tag, &channels)?;
    let (_, g0s) = interacting_series(cfg, &model, SpectralSource::Noninteracting, tag, &channels)?;
    let key = cfg.ground_sector();
    let u = cfg.params.u;
    let mut paths = Vec::new();
    let mut summaries = Vec::new();
    for (g, g0) in gs.iter().zip(&g0s) {
        let sigma = spectral::self_energy(g, g0)?;
        let path = frequency_series_file("selfenergy", &state, &sigma.series)
            .write(&cfg.output.dir, cfg.format())?;
        let other = key.count(g.channel.spin.flipped()) as f64;
        let hartree = u * other / key.sites as f64;
        let edge = (0..sigma.series.values.len())
            .rev()
            .find(|i| !sigma.invalid.contains(i))
            .map(|i| (sigma.series.grid.omega(i), sigma.series.values[i].re));
        emit(
            out,
            format!(
                "{}  invalid points {}  sup |Sigma| = {}  wrote {}",
                g.channel,
                sigma.invalid.len(),
                format_g17(sigma.sup_norm()),
                path.display()
            ),
        )?;
        if let Some((w, re)) = edge {
            emit(
                out,
                format!(
                    "  Re Sigma({}) = {}  Hartree U<n> = {}",
                    format_g17(w),
                    format_g17(re),
                    format_g17(hartree)
                ),
            )?;
        }
        summaries.push(json!({
            "channel": g.channel.to_string(),
            "invalid_points": sigma.invalid,
            "sup_norm": sigma.sup_norm(),
            "edge_omega": edge.map(|e| e.0),
            "edge_re_sigma": edge.map(|e| e.1),
            "hartree": hartree,
        }));
        paths.push(path);
    }
    let doc = json!({ "source": source.as_str(), "state": state, "eta": cfg.spectral.eta, "channels": summaries });
    let path = write_report(
        &cfg.output.dir,
        &format!("selfenergy_{state}_summary.json"),
        &doc,
    )?;
    emit(out, format!("wrote {}", path.display()))?;
    paths.push(path);
    Ok(paths)
}

/// Metrics between two series files on the same grid.
pub fn compare_files(a: &Path, b: &Path) -> Result<SeriesMetrics<f64>> {
    let fa = SeriesFile::read(a)?;
    let fb = SeriesFile::read(b)?;
    if fa.axis != fb.axis {
        return Err(Error::domain(format!(
            "{} is a {} series, {} a {} series",
            a.display(),
            fa.axis.name(),
            b.display(),
            fb.axis.name()
        )));
    }
    if fa.x.len() != fb.x.len() {
        return Err(Error::domain(format!(
            "grids differ in length ({} vs {})",
            fa.x.len(),
            fb.x.len()
        )));
    }
    if let Some(i) =
        fa.x.iter()
            .zip(&fb.x)
            .position(|(p, q)| (p - q).abs() > 1e-12 * p.abs().max(1.0))
    {
        return Err(Error::domain(format!(
            "grids differ at row {i} ({} vs {})",
            fa.x[i], fb.x[i]
        )));
    }
    let va: Vec<Cplx<f64>> = fa
        .re
        .iter()
        .zip(&fa.im)
        .map(|(&r, &i)| Cplx::new(r, i))
        .collect();
    let vb: Vec<Cplx<f64>> = fb
        .re
        .iter()
        .zip(&fb.im)
        .map(|(&r, &i)| Cplx::new(r, i))
        .collect();
    compare_values(&va, &vb)
}

pub fn cmd_compare(a: &Path, b: &Path, out: &mut dyn Write) -> Result<SeriesMetrics<f64>> {
    let m = compare_files(a, b)?;
    emit(out, format!("max_abs_diff {}", format_g17(m.max_abs_diff)))?;
    emit(out, format!("rms_diff {}", format_g17(m.rms_diff)))?;
    emit(out, format!("max_re_diff {}", format_g17(m.max_re_diff)))?;
    emit(out, format!("max_im_diff {}", format_g17(m.max_im_diff)))?;
    Ok(m)
}
