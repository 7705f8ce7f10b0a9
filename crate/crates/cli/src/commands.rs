use anyhow::{bail, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use spinflip::dispersion::energy_from_k_nonrel;
use spinflip::verify::{SweepRow, DEFAULT_WIDTHS};
use spinflip::well::{solve_bound_state_with, SolverOptions};
use spinflip::{
    barrier_soe, energy_from_k_rel, slope_convergence_sweep, soe_integral_form, StepSolution, WellSpec,
};

use crate::args::{ReflectArgs, SweepArgs, SweepParam, VerifyArgs, WellArgs, WellCmd};
use crate::output::{Cell, Report};

/// Signals a completed run whose checks did not pass (exit code 3).
#[derive(Debug)]
pub struct VerificationFailed(pub String);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for VerificationFailed {}

fn required(value: Option<f64>, flag: &str) -> Result<f64> {
    match value {
        Some(v) if v.is_finite() => Ok(v),
        Some(v) => bail!("--{flag} must be finite, got {v}"),
        None => bail!("--{flag} is required"),
    }
}

#[derive(Debug, Clone, Copy)]
pub struct ReflectInputs {
    pub energy: f64,
    pub kz: Option<f64>,
    pub kx: f64,
    pub vb: f64,
    pub delta: f64,
    pub slope_width: Option<f64>,
    pub delta_from_slope: bool,
    pub nonrelativistic: bool,
}

/// Resolves Δ and E from the flags. Returns any warnings alongside.
pub fn resolve_reflect(args: &ReflectArgs) -> Result<(ReflectInputs, Vec<String>)> {
    let mut warnings = Vec::new();
    let kx = required(args.kx, "kx")?;
    let vb = required(args.vb, "vb")?;
    if vb <= 0.0 {
        bail!("--vb must be positive, got {vb}");
    }
    let (delta, delta_from_slope) = match (args.delta, args.slope_width) {
        (Some(d), slope) => {
            if slope.is_some() {
                warnings.push("--delta given, ignoring --slope-width for Δ".to_string());
            }
            (required(Some(d), "delta")?, false)
        }
        (None, Some(a)) => {
            if !a.is_finite() || a <= 0.0 {
                bail!("--slope-width must be positive, got {a}");
            }
            (barrier_soe(kx.abs(), vb, a), true)
        }
        (None, None) => bail!("give --delta or --slope-width"),
    };
    if delta < 0.0 {
        bail!("--delta must be non-negative, got {delta}");
    }
    let energy = match (args.energy_ev, args.kz) {
        (Some(_), Some(_)) => bail!("give exactly one of --energy-ev and --kz, not both"),
        (None, None) => bail!("give exactly one of --energy-ev and --kz"),
        (Some(e), None) => required(Some(e), "energy-ev")?,
        (None, Some(kz)) => {
            let kz = required(Some(kz), "kz")?;
            if kz <= 0.0 {
                bail!("--kz must be positive, got {kz}");
            }
            if args.nonrelativistic {
                energy_from_k_nonrel(kx, kz, delta)
            } else {
                energy_from_k_rel(kx, kz, delta)
            }
        }
    };
    if energy <= 0.0 {
        bail!("energy must be positive, got {energy}");
    }
    Ok((
        ReflectInputs {
            energy,
            kz: args.kz,
            kx,
            vb,
            delta,
            slope_width: args.slope_width,
            delta_from_slope,
            nonrelativistic: args.nonrelativistic,
        },
        warnings,
    ))
}

pub const REFLECT_COLUMNS: [&str; 27] = [
    "energy_ev", "kx", "vb", "delta_ev",
    "kz_re", "kz_im", "kz_prime_re", "kz_prime_im", "qz_re", "qz_im", "qz_prime_re", "qz_prime_im",
    "alpha_deg", "alpha_prime_deg",
    "R_re", "R_im", "Rp_re", "Rp_im", "T_re", "T_im", "Tp_re", "Tp_im",
    "refl_conserving_fraction", "refl_flip_fraction", "transmitted_fraction", "flux_imbalance",
    "max_boundary_residual",
];

pub struct ReflectOutcome {
    pub inputs: ReflectInputs,
    pub solution: StepSolution,
    pub beams: spinflip::BeamReport,
}

pub fn compute_reflect(inputs: ReflectInputs) -> Result<ReflectOutcome> {
    let solution = if inputs.nonrelativistic {
        StepSolution::nonrelativistic(inputs.energy, inputs.delta, inputs.kx, inputs.vb)?
    } else {
        StepSolution::relativistic(inputs.energy, inputs.delta, inputs.kx, inputs.vb)?
    };
    let beams = solution.beam_report()?;
    Ok(ReflectOutcome { inputs, solution, beams })
}

impl ReflectOutcome {
    pub fn cells(&self) -> Vec<Cell> {
        let s = &self.solution;
        let w = s.waves;
        let a = s.amplitudes;
        let b = &self.beams;
        let mut v = vec![s.energy, s.kx, s.vb, s.delta];
        for k in [w.kz, w.kz_prime, w.qz, w.qz_prime] {
            v.extend([k.re, k.im]);
        }
        v.extend([b.alpha, b.alpha_prime]);
        for c in a.spin_up() {
            v.extend([c.re, c.im]);
        }
        v.extend([
            b.refl_conserving_fraction,
            b.refl_flip_fraction,
            b.transmitted_fraction,
            b.flux_imbalance,
            s.residuals().max(),
        ]);
        v.into_iter().map(Cell::Num).collect()
    }

    pub fn json(&self, warnings: &[String]) -> Value {
        let s = &self.solution;
        let i = &self.inputs;
        let c = |z: Complex64| json!({"re": z.re, "im": z.im});
        let a = s.amplitudes;
        let w = s.waves;
        let r = s.residuals();
        json!({
            "inputs": {
                "energy_ev": i.energy,
                "kz": i.kz,
                "kx": i.kx,
                "vb": i.vb,
                "slope_width": i.slope_width,
                "kinematics": if i.nonrelativistic { "nonrelativistic" } else { "relativistic" },
            },
            "delta_ev": s.delta,
            "wave_vectors": {
                "kz": c(w.kz), "kz_prime": c(w.kz_prime), "qz": c(w.qz), "qz_prime": c(w.qz_prime),
            },
            "angles_deg": {
                "alpha_deg": self.beams.alpha,
                "alpha_prime_deg": self.beams.alpha_prime,
                "difference_deg": self.beams.alpha - self.beams.alpha_prime,
            },
            "amplitudes": {
                "R": c(a.r), "Rp": c(a.r_prime), "T": c(a.t), "Tp": c(a.t_prime),
                "P": c(a.p), "Pp": c(a.p_prime), "F": c(a.f), "Fp": c(a.f_prime),
            },
            "fractions": {
                "refl_conserving": self.beams.refl_conserving_fraction,
                "refl_flip": self.beams.refl_flip_fraction,
                "transmitted": self.beams.transmitted_fraction,
                "flux_imbalance": self.beams.flux_imbalance,
            },
            "residuals": {
                "continuity_upper": r.continuity_upper,
                "continuity_lower": r.continuity_lower,
                "derivative_upper": r.derivative_upper,
                "derivative_lower": r.derivative_lower,
                "max": r.max(),
            },
            "diagnostics": {
                "mass_ratio": s.params.mass_ratio,
                "coupling_s": s.params.coupling,
                "flip_ratio": a.flip_ratio(),
                "delta_source": if i.delta_from_slope { "slope-width" } else { "given" },
                "warnings": warnings,
            },
        })
    }
}

pub fn reflect(args: &ReflectArgs) -> Result<(Report, Vec<String>)> {
    let (inputs, warnings) = resolve_reflect(args)?;
    let outcome = compute_reflect(inputs)?;
    let report = Report {
        columns: REFLECT_COLUMNS.to_vec(),
        rows: vec![outcome.cells()],
        json: Some(outcome.json(&warnings)),
    };
    Ok((report, warnings))
}

pub const WELL_COLUMNS: [&str; 13] = [
    "width", "vl", "vr", "kperp", "e0_ev", "delta_ev", "delta_integral_ev",
    "psi_sq_left", "psi_sq_right", "iterations", "residual", "bdd_jump", "nodes",
];

fn well_spec(args: &WellArgs) -> Result<(WellSpec, f64, SolverOptions)> {
    let spec = WellSpec::new(required(args.width, "width")?, required(args.vl, "vl")?, required(args.vr, "vr")?)?;
    let kperp = required(args.kperp, "kperp")?;
    let mut opts = SolverOptions::default();
    if let Some(steps) = args.rk_steps {
        opts.steps = steps;
    }
    Ok((spec, kperp, opts))
}

fn well_cells(spec: &WellSpec, kperp: f64, opts: &SolverOptions) -> Result<(Vec<Cell>, spinflip::BoundStateResult)> {
    let r = solve_bound_state_with(spec, kperp, opts)?;
    let cells = vec![
        Cell::Num(spec.width),
        Cell::Num(spec.v_left),
        Cell::Num(spec.v_right),
        Cell::Num(kperp),
        Cell::Num(r.e0),
        Cell::Num(r.delta),
        Cell::Num(soe_integral_form(&r, kperp)),
        Cell::Num(r.psi_sq_left_iface),
        Cell::Num(r.psi_sq_right_iface),
        Cell::Int(r.iterations as u64),
        Cell::Num(r.residual),
        Cell::Num(r.bdd_jump),
        Cell::Int(r.nodes as u64),
    ];
    Ok((cells, r))
}

pub fn well(cmd: &WellCmd) -> Result<Report> {
    let (spec, kperp, opts) = well_spec(&cmd.well)?;
    let (cells, r) = well_cells(&spec, kperp, &opts)?;
    if let Some(path) = &cmd.wavefunction {
        let file = std::fs::File::create(path)?;
        r.write_wavefunction(std::io::BufWriter::new(file), 50)?;
    }
    let doc = json!({
        "inputs": {"width": spec.width, "vl": spec.v_left, "vr": spec.v_right, "kperp": kperp, "rk_steps": opts.steps},
        "e0_ev": r.e0,
        "delta_ev": r.delta,
        "delta_integral_ev": soe_integral_form(&r, kperp),
        "interfaces": {
            "psi_sq_left": r.psi_sq_left_iface,
            "psi_sq_right": r.psi_sq_right_iface,
            "kappa_left": r.kappa_left,
            "kappa_right": r.kappa_right,
            "mass_energy_left": r.mass_left,
            "mass_energy_well": r.mass_well,
            "mass_energy_right": r.mass_right,
        },
        "diagnostics": {
            "iterations": r.iterations,
            "residual": r.residual,
            "bdd_jump": r.bdd_jump,
            "nodes": r.nodes,
            "norm": r.norm(),
            "bracket": [r.bracket_lo, r.bracket_hi],
        },
    });
    Ok(Report { columns: WELL_COLUMNS.to_vec(), rows: vec![cells], json: Some(doc) })
}

fn grid(from: f64, to: f64, steps: usize) -> Vec<f64> {
    (0..steps)
        .map(|i| if i + 1 == steps { to } else { from + (to - from) * i as f64 / (steps - 1) as f64 })
        .collect()
}

fn error_row(columns: usize, message: String) -> Vec<Cell> {
    let mut row = vec![Cell::Num(f64::NAN); columns];
    row.push(Cell::Text(message));
    row
}

pub fn sweep(args: &SweepArgs) -> Result<(Report, Vec<String>)> {
    let Some(param) = args.param else { bail!("--param is required") };
    let from = required(args.from, "from")?;
    let to = required(args.to, "to")?;
    let steps = args.steps.unwrap_or(11);
    if steps < 2 {
        bail!("--steps must be at least 2, got {steps}");
    }
    let values = grid(from, to, steps);
    let mut warnings = Vec::new();

    if param.is_well() {
        let mut columns = WELL_COLUMNS.to_vec();
        columns.push("error");
        let rows: Vec<Vec<Cell>> = values
            .par_iter()
            .map(|&v| {
                let mut w = args.well.clone();
                match param {
                    SweepParam::Kperp => w.kperp = Some(v),
                    SweepParam::Width => w.width = Some(v),
                    SweepParam::Vl => w.vl = Some(v),
                    _ => w.vr = Some(v),
                }
                match well_spec(&w).and_then(|(s, k, o)| well_cells(&s, k, &o)) {
                    Ok((mut cells, _)) => {
                        cells.push(Cell::Text(String::new()));
                        cells
                    }
                    Err(e) => {
                        let mut row = error_row(WELL_COLUMNS.len(), format!("{e:#}"));
                        row[match param {
                            SweepParam::Kperp => 3,
                            SweepParam::Width => 0,
                            SweepParam::Vl => 1,
                            _ => 2,
                        }] = Cell::Num(v);
                        row
                    }
                }
            })
            .collect();
        return Ok((Report { columns, rows, json: None }, warnings));
    }

    // surface the Δ-source warning once rather than per point
    if args.reflect.delta.is_some() && args.reflect.slope_width.is_some() {
        warnings.push("--delta given, ignoring --slope-width for Δ".to_string());
    }
    let mut columns = REFLECT_COLUMNS.to_vec();
    columns.push("error");
    let rows: Vec<Vec<Cell>> = values
        .par_iter()
        .map(|&v| {
            let mut r = args.reflect.clone();
            match param {
                SweepParam::Kx => r.kx = Some(v),
                SweepParam::Kz => {
                    r.kz = Some(v);
                    r.energy_ev = None;
                }
                SweepParam::EnergyEv => {
                    r.energy_ev = Some(v);
                    r.kz = None;
                }
                SweepParam::Vb => r.vb = Some(v),
                _ => r.delta = Some(v),
            }
            match resolve_reflect(&r).and_then(|(i, _)| compute_reflect(i)) {
                Ok(o) => {
                    let mut cells = o.cells();
                    cells.push(Cell::Text(String::new()));
                    cells
                }
                Err(e) => {
                    let mut row = error_row(REFLECT_COLUMNS.len(), format!("{e:#}"));
                    let slot = match param {
                        SweepParam::Kx => Some(1),
                        SweepParam::EnergyEv => Some(0),
                        SweepParam::Vb => Some(2),
                        SweepParam::Delta => Some(3),
                        _ => None,
                    };
                    if let Some(i) = slot {
                        row[i] = Cell::Num(v);
                    }
                    row
                }
            }
        })
        .collect();
    Ok((Report { columns, rows, json: None }, warnings))
}

pub const VERIFY_COLUMNS: [&str; 5] = ["width_cm", "dev_R", "dev_Rp", "dev_T", "dev_Tp"];

/// Runs the slope sweep. The report is returned even when the checks fail;
/// the flag tells the caller to exit with the verification code.
pub fn verify(args: &VerifyArgs) -> Result<(Report, Vec<String>, Option<VerificationFailed>)> {
    if args.reflect.nonrelativistic {
        bail!("verify compares relativistic amplitudes only; drop --nonrelativistic");
    }
    let (inputs, warnings) = resolve_reflect(&args.reflect)?;
    let widths = args.widths.clone().unwrap_or_else(|| DEFAULT_WIDTHS.to_vec());
    if widths.iter().any(|w| !w.is_finite() || *w <= 0.0) {
        bail!("slope widths must be positive");
    }
    let tolerance = args.tolerance.unwrap_or(1e-3);
    let rows: Vec<SweepRow> = slope_convergence_sweep(inputs.energy, inputs.delta, inputs.kx, inputs.vb, &widths)?;
    let maxima: Vec<f64> = rows.iter().map(SweepRow::max).collect();
    let monotone = maxima.windows(2).all(|w| w[1] < w[0]);
    let last = *maxima.last().unwrap();
    let passed = monotone && last <= tolerance;
    let failure = (!passed).then(|| {
        VerificationFailed(format!(
            "verification failed: final deviation {last:e} (tolerance {tolerance:e}), monotone decrease: {monotone}"
        ))
    });
    let cells = rows
        .iter()
        .map(|r| [r.width_cm, r.dev_r, r.dev_rp, r.dev_t, r.dev_tp].into_iter().map(Cell::Num).collect())
        .collect();
    let doc = json!({
        "inputs": {"energy_ev": inputs.energy, "kz": inputs.kz, "kx": inputs.kx, "vb": inputs.vb},
        "delta_ev": inputs.delta,
        "rows": rows,
        "diagnostics": {
            "final_max_deviation": last,
            "tolerance": tolerance,
            "monotone": monotone,
            "passed": passed,
            "warnings": warnings,
        },
    });
    Ok((Report { columns: VERIFY_COLUMNS.to_vec(), rows: cells, json: Some(doc) }, warnings, failure))
}
