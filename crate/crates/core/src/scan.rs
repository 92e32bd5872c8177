//! λ-sweeps of the normalisability quantities, boundary root-finding and
//! CSV output for the two figure reproductions.
//!
//! Each grid point yields one row per sector with the three quantities
//! (a, b, ab − c²) of the relevant exponents — the hat parameters after
//! η₁η₀ for figure 1, the check parameters after the full η₂η₁η₀ chain for
//! figure 2 — plus validity flags and the ground energy α − β. Rows near a
//! pole or outside |Θ| < 1 report absent quantities, never garbage numbers,
//! and a failed grid point never aborts the sweep.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::cx;
use crate::error::{Error, Result};
use crate::gaussian_states::{
    apply_chain, multiply_momentum_gaussian, multiply_position_gaussian, GaussianState,
};
use crate::model::{
    delta_branches, ground_state, hermitising_choices, sector_params, ChainParams, ModelParams,
    SectorLabel,
};
use crate::policy::NumericPolicy;

/// How δ is chosen at each grid point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeltaMode {
    Fixed(f64),
    /// δ₊(λ) branch of the Ω constraint.
    BranchPlus,
    /// δ₋(λ) branch.
    BranchMinus,
}

/// Which exponent set the sweep reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantityMode {
    /// Hat parameters after η₁η₀ (figure-1 style).
    Hat,
    /// Check parameters after the full η₂η₁η₀ chain (figure-2 style).
    Check,
}

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct ScanConfig {
    pub params: ModelParams,
    pub delta_mode: DeltaMode,
    pub quantity_mode: QuantityMode,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub step: f64,
    pub sectors: Vec<SectorLabel>,
}

impl ScanConfig {
    /// Default figure grid: λ ∈ [−4, 4] with step 0.005.
    pub fn default_grid(
        params: ModelParams,
        delta_mode: DeltaMode,
        quantity_mode: QuantityMode,
        sectors: Vec<SectorLabel>,
    ) -> Self {
        Self {
            params,
            delta_mode,
            quantity_mode,
            lambda_min: -4.0,
            lambda_max: 4.0,
            step: 0.005,
            sectors,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.step <= 0.0 || self.step.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !self.lambda_min.is_finite() || !self.lambda_max.is_finite() {
            return Err(Error::InvalidConfig("lambda range must be finite".into()));
        }
        if self.sectors.is_empty() {
            return Err(Error::InvalidConfig("sector list is empty".into()));
        }
        Ok(())
    }
}

/// One grid point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    pub sector: SectorLabel,
    /// First normalisability quantity (the x² exponent).
    pub q_a: Option<f64>,
    /// Second quantity (the y² exponent).
    pub q_b: Option<f64>,
    /// Determinant quantity ab − c².
    pub q_det: Option<f64>,
    /// |Θ| < 1 held (always true in hat mode).
    pub theta_in_range: bool,
    /// No denominator hit a pole.
    pub nonsingular: bool,
    /// The sector frame is real.
    pub frame_real: bool,
    /// Ground energy α − β where real.
    pub energy: Option<f64>,
}

impl ScanRow {
    /// A row is valid when every flag holds and all quantities are present.
    pub fn valid(&self) -> bool {
        self.theta_in_range
            && self.nonsingular
            && self.frame_real
            && self.q_a.is_some()
            && self.q_b.is_some()
            && self.q_det.is_some()
    }
}

fn absent_row(lambda: f64, sector: SectorLabel) -> ScanRow {
    ScanRow {
        lambda,
        sector,
        q_a: None,
        q_b: None,
        q_det: None,
        theta_in_range: true,
        nonsingular: true,
        frame_real: true,
        energy: None,
    }
}

fn quantities_from_state(state: &GaussianState, policy: &NumericPolicy) -> [Option<f64>; 3] {
    let a = state.alpha();
    let b = state.beta();
    let c = state.gamma();
    let det = a * b - c * c;
    let real = |z: Complex64| {
        if z.im.abs() <= policy.region_tol {
            Some(z.re)
        } else {
            None
        }
    };
    [real(a), real(b), real(det)]
}

fn evaluate_point(
    cfg: &ScanConfig,
    lambda: f64,
    sector: SectorLabel,
    policy: &NumericPolicy,
) -> ScanRow {
    let mut row = absent_row(lambda, sector);

    let delta = match cfg.delta_mode {
        DeltaMode::Fixed(d) => d,
        DeltaMode::BranchPlus | DeltaMode::BranchMinus => {
            match delta_branches(lambda, cfg.params.nu, cfg.params.omega) {
                Ok((dp, dm)) => {
                    if cfg.delta_mode == DeltaMode::BranchPlus {
                        dp
                    } else {
                        dm
                    }
                }
                Err(_) => {
                    row.nonsingular = false;
                    return row;
                }
            }
        }
    };

    let frame = match sector_params(&cfg.params, sector, policy) {
        Ok(f) => f,
        Err(_) => {
            row.nonsingular = false;
            return row;
        }
    };
    row.frame_real = frame.is_real;
    let energy = frame.ground_energy();
    if energy.im.abs() <= policy.region_tol {
        row.energy = Some(energy.re);
    }

    let state = ground_state(&frame);
    let transformed = match cfg.quantity_mode {
        QuantityMode::Hat => hat_state(&cfg.params, delta, lambda, &state, policy),
        QuantityMode::Check => check_state(&cfg.params, delta, lambda, &state, policy),
    };
    match transformed {
        Ok(state) => {
            let [a, b, det] = quantities_from_state(&state, policy);
            row.q_a = a;
            row.q_b = b;
            row.q_det = det;
        }
        Err(Error::ThetaOutOfRange { .. }) => row.theta_in_range = false,
        Err(_) => row.nonsingular = false,
    }
    row
}

/// Hat-parameter state: momentum factor after position factor with the
/// hermitising choices.
fn hat_state(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    state: &GaussianState,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let (kappa, xi) = hermitising_choices(params.nu, params.omega, delta, lambda, policy)?;
    let zero = cx(0.0, 0.0);
    let k0 = Matrix2::new(cx(delta, 0.0), zero, zero, cx(lambda, 0.0));
    let k1 = Matrix2::new(cx(kappa, 0.0), zero, zero, cx(xi, 0.0));
    let state = multiply_position_gaussian(&k0, state);
    multiply_momentum_gaussian(&k1, &state, policy)
}

/// Check-parameter state: the full chain with constraint-fixed η₂.
fn check_state(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    state: &GaussianState,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let chain = ChainParams::hermitising(params, delta, lambda, policy)?;
    apply_chain(&chain.state_transforms(), state, policy)
}

/// Hat-parameter state of one sector at a single (δ, λ) point: the sector
/// ground state pushed through η₀ and η₁ with the hermitising choices.
pub fn hat_state_at(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    sector: SectorLabel,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let frame = sector_params(params, sector, policy)?;
    hat_state(params, delta, lambda, &ground_state(&frame), policy)
}

/// Check-parameter state of one sector at a single (δ, λ) point: the full
/// constraint-fixed chain applied to the sector ground state.
pub fn check_state_at(
    params: &ModelParams,
    delta: f64,
    lambda: f64,
    sector: SectorLabel,
    policy: &NumericPolicy,
) -> Result<GaussianState> {
    let frame = sector_params(params, sector, policy)?;
    check_state(params, delta, lambda, &ground_state(&frame), policy)
}

/// Runs the sweep: one row per (λ grid point, sector), ordered by λ then by
/// the configured sector order.
pub fn sweep_lambda(cfg: &ScanConfig, policy: &NumericPolicy) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut i = 0u64;
    loop {
        let lambda = cfg.lambda_min + (i as f64) * cfg.step;
        if lambda > cfg.lambda_max + cfg.step * 0.5 {
            break;
        }
        for &sector in &cfg.sectors {
            rows.push(evaluate_point(cfg, lambda, sector, policy));
        }
        i += 1;
    }
    Ok(rows)
}

/// Bisection on a bracketed sign change, localising the root to an interval
/// of width ≤ tol.
pub fn find_boundary<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoSignChange { lo, hi });
    }
    // width halves each step; 200 iterations localise any f64 bracket
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// CSV header, fixed by the output contract.
pub const CSV_HEADER: &str = "lambda,eps,eta,q_a,q_b,q_det,valid,energy";

fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

/// Serialises rows to CSV: floats carry 17 significant digits, absent
/// quantities print as empty fields, `valid` is 0 or 1.
pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 80 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt17(row.lambda),
            row.sector.epsilon.value() as i64,
            row.sector.eta.value() as i64,
            fmt_opt(row.q_a),
            fmt_opt(row.q_b),
            fmt_opt(row.q_det),
            u8::from(row.valid()),
            fmt_opt(row.energy),
        );
    }
    out
}

/// Writes rows to a CSV file.
pub fn write_csv(path: &Path, rows: &[ScanRow]) -> Result<()> {
    fs::write(path, rows_to_csv(rows))?;
    Ok(())
}

/// Parses CSV produced by [`rows_to_csv`]. The three validity flags
/// collapse into the single `valid` column on output, so they are restored
/// as that common value.
pub fn read_csv(content: &str) -> Result<Vec<ScanRow>> {
    let mut lines = content.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        other => {
            return Err(Error::CsvParse(format!(
                "unexpected header: {:?}",
                other.unwrap_or("<empty>")
            )))
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 8 {
            return Err(Error::CsvParse(format!(
                "line {}: expected 8 fields, got {}",
                idx + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|e| Error::CsvParse(format!("line {}: {}", idx + 2, e)))
        };
        let parse_opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                parse(s).map(Some)
            }
        };
        let sign = |s: &str| -> Result<crate::model::BranchSign> {
            s.parse::<i64>()
                .ok()
                .and_then(crate::model::BranchSign::from_int)
                .ok_or_else(|| Error::CsvParse(format!("line {}: bad sign {s}", idx + 2)))
        };
        let valid = match fields[6] {
            "0" => false,
            "1" => true,
            other => {
                return Err(Error::CsvParse(format!(
                    "line {}: bad valid flag {other}",
                    idx + 2
                )))
            }
        };
        rows.push(ScanRow {
            lambda: parse(fields[0])?,
            sector: SectorLabel::new(sign(fields[1])?, sign(fields[2])?),
            q_a: parse_opt(fields[3])?,
            q_b: parse_opt(fields[4])?,
            q_det: parse_opt(fields[5])?,
            theta_in_range: valid,
            nonsingular: valid,
            frame_real: valid,
            energy: parse_opt(fields[7])?,
        });
    }
    Ok(rows)
}

/// The two reproducible figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    One,
    Two,
}

/// Panel configurations of a figure: (file stem, config).
pub fn figure_panels(figure: Figure) -> Vec<(&'static str, ScanConfig)> {
    use crate::model::BranchSign::{Minus, Plus};
    match figure {
        Figure::One => {
            let sectors = vec![SectorLabel::new(Plus, Plus), SectorLabel::new(Minus, Plus)];
            vec![
                (
                    "figure1a",
                    ScanConfig::default_grid(
                        ModelParams::new(4.0, -2.0, 0.0),
                        DeltaMode::Fixed(0.0),
                        QuantityMode::Hat,
                        sectors.clone(),
                    ),
                ),
                (
                    "figure1b",
                    ScanConfig::default_grid(
                        ModelParams::new(4.0, -2.0, 1.0),
                        DeltaMode::Fixed(0.0),
                        QuantityMode::Hat,
                        sectors,
                    ),
                ),
            ]
        }
        Figure::Two => {
            let sectors = SectorLabel::all().to_vec();
            let params = ModelParams::new(4.0, -2.0, 3.0);
            vec![
                (
                    "figure2a",
                    ScanConfig::default_grid(
                        params,
                        DeltaMode::BranchPlus,
                        QuantityMode::Check,
                        sectors.clone(),
                    ),
                ),
                (
                    "figure2b",
                    ScanConfig::default_grid(
                        params,
                        DeltaMode::BranchMinus,
                        QuantityMode::Check,
                        sectors,
                    ),
                ),
            ]
        }
    }
}

/// Sweeps every panel of a figure and writes one CSV per panel into
/// `out_dir`; returns the written paths.
pub fn reproduce_figures(
    figure: Figure,
    out_dir: &Path,
    policy: &NumericPolicy,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for (stem, cfg) in figure_panels(figure) {
        let rows = sweep_lambda(&cfg, policy)?;
        let path = out_dir.join(format!("{stem}.csv"));
        write_csv(&path, &rows)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BranchSign::{Minus, Plus};

    fn policy() -> NumericPolicy {
        NumericPolicy::default()
    }

    fn small_cfg(g: f64, mode: QuantityMode, delta_mode: DeltaMode) -> ScanConfig {
        ScanConfig {
            params: ModelParams::new(4.0, -2.0, g),
            delta_mode,
            quantity_mode: mode,
            lambda_min: -1.0,
            lambda_max: 1.0,
            step: 0.5,
            sectors: vec![SectorLabel::new(Plus, Plus)],
        }
    }

    #[test]
    fn hat_mode_at_lambda_zero_favours_the_minus_sector() {
        let mut cfg = small_cfg(0.0, QuantityMode::Hat, DeltaMode::Fixed(0.0));
        cfg.sectors = vec![SectorLabel::new(Minus, Plus)];
        cfg.lambda_min = 0.0;
        cfg.lambda_max = 0.0;
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!(row.valid());
        assert!(row.q_a.unwrap() > 0.0);
        assert!(row.q_b.unwrap() > 0.0);
        assert!(row.q_det.unwrap() > 0.0);
    }

    #[test]
    fn hat_mode_beyond_threshold_flips_the_plus_sector() {
        let mut cfg = small_cfg(0.0, QuantityMode::Hat, DeltaMode::Fixed(0.0));
        cfg.lambda_min = 2.0;
        cfg.lambda_max = 2.0;
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        let row = &rows[0];
        assert!(row.valid());
        assert!(row.q_a.unwrap() > 0.0 && row.q_b.unwrap() > 0.0 && row.q_det.unwrap() > 0.0);
    }

    #[test]
    fn check_mode_reports_absence_outside_theta_range() {
        let cfg = ScanConfig {
            lambda_min: 1.0,
            lambda_max: 1.0,
            ..small_cfg(3.0, QuantityMode::Check, DeltaMode::BranchPlus)
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        let row = &rows[0];
        assert!(!row.theta_in_range);
        assert!(!row.valid());
        assert!(row.q_a.is_none() && row.q_b.is_none() && row.q_det.is_none());
        // the frame itself is fine, so the energy still prints
        assert!(row.energy.is_some());
    }

    #[test]
    fn check_mode_in_region_one_is_valid_for_the_plus_plus_sector() {
        let cfg = ScanConfig {
            lambda_min: 2.5,
            lambda_max: 2.5,
            ..small_cfg(3.0, QuantityMode::Check, DeltaMode::BranchPlus)
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        let row = &rows[0];
        assert!(row.valid(), "row: {row:?}");
        assert!(row.q_a.unwrap() > 0.0);
        assert!(row.q_b.unwrap() > 0.0);
        assert!(row.q_det.unwrap() > 0.0);
    }

    #[test]
    fn bisection_finds_sqrt_two() {
        let root = find_boundary(|x| x * x - 2.0, 1.0, 2.0, 1e-12).unwrap();
        assert!((root - 2.0f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bisection_rejects_unbracketed_input() {
        assert!(matches!(
            find_boundary(|x| x * x + 1.0, -1.0, 1.0, 1e-12),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn empty_sweep_range_yields_header_only_csv() {
        let cfg = ScanConfig {
            lambda_min: 1.0,
            lambda_max: 0.0,
            ..small_cfg(0.0, QuantityMode::Hat, DeltaMode::Fixed(0.0))
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        assert!(rows.is_empty());
        assert_eq!(rows_to_csv(&rows), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trips_through_the_reader() {
        let cfg = ScanConfig {
            lambda_min: -0.5,
            lambda_max: 0.5,
            ..small_cfg(3.0, QuantityMode::Check, DeltaMode::BranchPlus)
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        let csv = rows_to_csv(&rows);
        let parsed = read_csv(&csv).unwrap();
        assert_eq!(parsed.len(), rows.len());
        for (a, b) in rows.iter().zip(&parsed) {
            assert_eq!(a.lambda, b.lambda);
            assert_eq!(a.sector, b.sector);
            assert_eq!(a.q_a, b.q_a);
            assert_eq!(a.q_b, b.q_b);
            assert_eq!(a.q_det, b.q_det);
            assert_eq!(a.valid(), b.valid());
            assert_eq!(a.energy, b.energy);
        }
    }

    #[test]
    fn broken_pt_frames_report_absent_quantities() {
        // g^2 < 4 nu^2 omega: sigma is imaginary, the frame is complex
        let cfg = ScanConfig {
            params: ModelParams::new(1.0, 1.0, 1.0),
            delta_mode: DeltaMode::Fixed(0.0),
            quantity_mode: QuantityMode::Hat,
            lambda_min: 0.3,
            lambda_max: 0.3,
            step: 1.0,
            sectors: vec![SectorLabel::new(Plus, Plus)],
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        let row = &rows[0];
        assert!(!row.frame_real);
        assert!(!row.valid());
        assert!(row.q_a.is_none() && row.energy.is_none());
    }

    #[test]
    fn malformed_csv_is_rejected_with_context() {
        assert!(matches!(
            read_csv("wrong,header\n"),
            Err(Error::CsvParse(_))
        ));
        let short_row = format!("{CSV_HEADER}\n1.0,1,1\n");
        assert!(matches!(read_csv(&short_row), Err(Error::CsvParse(_))));
        let bad_flag = format!("{CSV_HEADER}\n1.0,1,1,,,,2,\n");
        assert!(matches!(read_csv(&bad_flag), Err(Error::CsvParse(_))));
        let bad_sign = format!("{CSV_HEADER}\n1.0,3,1,,,,0,\n");
        assert!(matches!(read_csv(&bad_sign), Err(Error::CsvParse(_))));
    }

    #[test]
    fn csv_floats_carry_seventeen_significant_digits() {
        assert_eq!(fmt17(0.5), "5.0000000000000000e-1");
        assert_eq!(fmt17(2.0f64.sqrt()), "1.4142135623730951e0");
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = small_cfg(0.0, QuantityMode::Hat, DeltaMode::Fixed(0.0));
        cfg.step = 0.0;
        assert!(matches!(
            sweep_lambda(&cfg, &policy()),
            Err(Error::InvalidConfig(_))
        ));
        let mut cfg = small_cfg(0.0, QuantityMode::Hat, DeltaMode::Fixed(0.0));
        cfg.sectors.clear();
        assert!(matches!(
            sweep_lambda(&cfg, &policy()),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn hat_parameters_recover_the_frame_in_the_small_parameter_limit() {
        let pol = policy();
        let params = ModelParams::new(4.0, -2.0, 1.0);
        let sector = SectorLabel::new(Plus, Plus);
        let frame = crate::model::sector_params(&params, sector, &pol).unwrap();
        let eps = 1e-5;
        let state = hat_state_at(&params, eps, eps, sector, &pol).unwrap();
        let drift = (state.alpha() - frame.alpha)
            .norm()
            .max((state.beta() - frame.beta).norm())
            .max((state.gamma() - frame.gamma).norm());
        assert!(drift < 1e-3, "drift {drift} not O(delta) + O(lambda)");
    }

    #[test]
    fn figure_two_validity_window_matches_the_theta_regions() {
        // plus branch: valid below ~0.93755 and above ~2.13322
        let cfg = ScanConfig {
            lambda_min: 0.5,
            lambda_max: 2.5,
            step: 1.0,
            ..small_cfg(3.0, QuantityMode::Check, DeltaMode::BranchPlus)
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].valid(), "lambda = 0.5 inside R2");
        assert!(!rows[1].valid(), "lambda = 1.5 excluded");
        assert!(!rows[1].theta_in_range);
        assert!(rows[2].valid(), "lambda = 2.5 inside R1");
    }

    #[test]
    fn reported_boundaries_sit_inside_flipping_grid_cells() {
        let cfg = ScanConfig {
            lambda_min: 0.5,
            lambda_max: 2.5,
            step: 0.05,
            ..small_cfg(3.0, QuantityMode::Check, DeltaMode::BranchPlus)
        };
        let rows = sweep_lambda(&cfg, &policy()).unwrap();
        let mut cells = Vec::new();
        for pair in rows.windows(2) {
            if pair[0].valid() != pair[1].valid() {
                cells.push((pair[0].lambda, pair[1].lambda));
            }
        }
        assert_eq!(cells.len(), 2, "one flip per region edge: {cells:?}");
        for boundary in [0.937548434323, 2.13322312403] {
            assert!(
                cells.iter().any(|&(lo, hi)| lo < boundary && boundary < hi),
                "boundary {boundary} outside every flipping cell {cells:?}"
            );
        }
    }

    #[test]
    fn reproduce_figures_writes_one_csv_per_panel() {
        let dir = tempfile::tempdir().unwrap();
        let paths = reproduce_figures(Figure::Two, dir.path(), &policy()).unwrap();
        assert_eq!(paths.len(), 2);
        for (path, stem) in paths.iter().zip(["figure2a", "figure2b"]) {
            assert_eq!(path.file_name().unwrap().to_str().unwrap(), format!("{stem}.csv"));
            let content = std::fs::read_to_string(path).unwrap();
            let rows = read_csv(&content).unwrap();
            // default grid, four sectors per point
            assert_eq!(rows.len(), 1601 * 4);
        }
    }

    #[test]
    fn identical_configs_produce_identical_bytes() {
        let cfg = ScanConfig {
            lambda_min: -1.0,
            lambda_max: 1.0,
            step: 0.25,
            ..small_cfg(3.0, QuantityMode::Check, DeltaMode::BranchPlus)
        };
        let a = rows_to_csv(&sweep_lambda(&cfg, &policy()).unwrap());
        let b = rows_to_csv(&sweep_lambda(&cfg, &policy()).unwrap());
        assert_eq!(a, b);
    }
}
