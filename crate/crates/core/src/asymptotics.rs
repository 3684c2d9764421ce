//! Infinite-volume sweeps of the spectral gap: gap series over `k`, scaled
//! sequences `|V_k|^p Γ`, log-log power-law fits and the inverse-α law.

use std::io::{Read, Write};

use serde::Serialize;

use crate::bounds::{build_trial_state, ground_energy_upper_bound};
use crate::eigen::{default_residual_tol, dirichlet_ground_energy, spectrum_low_with, DEFAULT_REL_TOL};
use crate::format::{ser_f64, sig17};
use crate::graph::{assemble_hamiltonian, PathGraph, Potential};
use crate::{Error, Result};

/// Points with `k` below this are excluded from band statistics.
pub const DEFAULT_BAND_K_MIN: usize = 100;

pub const CSV_HEADER: [&str; 9] =
    ["k", "n", "alpha_sum", "lambda0", "lambda1", "gap", "gap_n2", "gap_n3", "precision_limited"];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapPoint {
    pub k: usize,
    pub n: usize,
    #[serde(serialize_with = "ser_f64")]
    pub lambda0: f64,
    #[serde(serialize_with = "ser_f64")]
    pub lambda1: f64,
    #[serde(serialize_with = "ser_f64")]
    pub gap: f64,
    pub precision_limited: bool,
}

impl GapPoint {
    /// `n^p · Γ`.
    pub fn scaled(&self, p: f64) -> f64 {
        (self.n as f64).powf(p) * self.gap
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapSeries {
    pub potential: Potential,
    /// Sorted by strictly increasing `k`.
    pub points: Vec<GapPoint>,
}

/// Lowest two eigenvalues for each `k` (sorted, deduplicated).
pub fn gap_series(potential: &Potential, k_values: &[usize]) -> Result<GapSeries> {
    gap_series_with(potential, k_values, DEFAULT_REL_TOL)
}

pub fn gap_series_with(potential: &Potential, k_values: &[usize], rel_tol: f64) -> Result<GapSeries> {
    let mut ks = k_values.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let points = ks
        .into_iter()
        .map(|k| gap_point(potential, k, rel_tol).map_err(|e| Error::Sweep { k, source: Box::new(e) }))
        .collect::<Result<Vec<_>>>()?;
    Ok(GapSeries { potential: potential.clone(), points })
}

fn gap_point(potential: &Potential, k: usize, rel_tol: f64) -> Result<GapPoint> {
    let op = assemble_hamiltonian(&PathGraph::new(k)?, potential)?;
    let s = spectrum_low_with(&op, rel_tol, default_residual_tol(&op))?;
    Ok(GapPoint {
        k,
        n: op.len(),
        lambda0: s.lambda0,
        lambda1: s.lambda1,
        gap: s.gap,
        precision_limited: s.precision_limited,
    })
}

impl GapSeries {
    /// Writes the series as CSV, optionally preceded by a `#` comment line.
    pub fn write_csv<W: Write>(&self, out: W, comment: Option<&str>) -> Result<()> {
        let mut out = out;
        if let Some(c) = comment {
            writeln!(out, "# {c}").map_err(io_err)?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(CSV_HEADER).map_err(csv_err)?;
        let alpha_sum = sig17(self.potential.alpha_sum());
        for p in &self.points {
            w.write_record([
                p.k.to_string(),
                p.n.to_string(),
                alpha_sum.clone(),
                sig17(p.lambda0),
                sig17(p.lambda1),
                sig17(p.gap),
                sig17(p.scaled(2.0)),
                sig17(p.scaled(3.0)),
                p.precision_limited.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.flush().map_err(io_err)
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("i/o error: {e}"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv error: {e}"))
}

/// Reads the points of a gap-series CSV; `#` lines are ignored.
pub fn read_gap_csv<R: Read>(input: R) -> Result<Vec<GapPoint>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    let headers = rdr.headers().map_err(csv_err)?.clone();
    let col = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse(format!("missing column `{name}`")))
    };
    let (ck, cn, c0, c1, cg, cp) =
        (col("k")?, col("n")?, col("lambda0")?, col("lambda1")?, col("gap")?, col("precision_limited")?);
    let mut points = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        let bad = |name: &str| Error::Parse(format!("bad `{name}` in data row {}", line + 1));
        let float = |i: usize, name: &str| field(i).parse::<f64>().map_err(|_| bad(name));
        points.push(GapPoint {
            k: field(ck).parse().map_err(|_| bad("k"))?,
            n: field(cn).parse().map_err(|_| bad("n"))?,
            lambda0: float(c0, "lambda0")?,
            lambda1: float(c1, "lambda1")?,
            gap: float(cg, "gap")?,
            precision_limited: field(cp).parse().map_err(|_| bad("precision_limited"))?,
        });
    }
    Ok(points)
}

/// `(k, n^p Γ)` for every point that is not precision limited.
pub fn scaled_sequence(points: &[GapPoint], p: f64) -> Vec<(usize, f64)> {
    points.iter().filter(|q| !q.precision_limited).map(|q| (q.k, q.scaled(p))).collect()
}

/// Extrema of a positive sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Band {
    #[serde(serialize_with = "ser_f64")]
    pub min: f64,
    #[serde(serialize_with = "ser_f64")]
    pub max: f64,
    #[serde(serialize_with = "ser_f64")]
    pub ratio: f64,
}

impl Band {
    pub fn of<I: IntoIterator<Item = f64>>(values: I) -> Option<Band> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
        Some(Band { min, max, ratio: max / min })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingFit {
    /// Slope of `log Γ` against `log n`.
    #[serde(serialize_with = "ser_f64")]
    pub exponent: f64,
    #[serde(serialize_with = "ser_f64")]
    pub prefactor: f64,
    #[serde(serialize_with = "ser_f64")]
    pub r_squared: f64,
    /// Power used for the band, `−round(exponent)`.
    pub band_power: i32,
    #[serde(serialize_with = "ser_f64")]
    pub band_min: f64,
    #[serde(serialize_with = "ser_f64")]
    pub band_max: f64,
    #[serde(serialize_with = "ser_f64")]
    pub band_ratio: f64,
    pub points_used: usize,
    pub points_excluded: usize,
}

/// Ordinary least squares `y = intercept + slope x`, with `R²`.
fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0) };
    (slope, intercept, r2)
}

pub fn fit_power_law(points: &[GapPoint]) -> Result<ScalingFit> {
    fit_power_law_with(points, DEFAULT_BAND_K_MIN)
}

/// Fits `Γ ≈ prefactor · n^exponent` on log-log axes over the points that
/// are not precision limited. The band is taken over `n^{−round(exponent)} Γ`
/// for `k ≥ band_k_min` (all used points if none qualify).
pub fn fit_power_law_with(points: &[GapPoint], band_k_min: usize) -> Result<ScalingFit> {
    let used: Vec<&GapPoint> = points.iter().filter(|p| !p.precision_limited).collect();
    if used.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, got: used.len() });
    }
    if let Some(p) = used.iter().find(|p| p.gap.is_nan() || p.gap <= 0.0) {
        return Err(Error::DegenerateSamples(format!("non-positive gap at k = {}", p.k)));
    }
    let xs: Vec<f64> = used.iter().map(|p| (p.n as f64).ln()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.gap.ln()).collect();
    if xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateSamples("all points share one size".into()));
    }
    let (exponent, intercept, r_squared) = least_squares(&xs, &ys);

    let band_power = (-exponent).round() as i32;
    let asymptotic: Vec<&&GapPoint> = used.iter().filter(|p| p.k >= band_k_min).collect();
    let band_points: Vec<&GapPoint> =
        if asymptotic.is_empty() { used.clone() } else { asymptotic.into_iter().copied().collect() };
    let band = Band::of(band_points.iter().map(|p| p.scaled(band_power as f64))).expect("non-empty");

    Ok(ScalingFit {
        exponent,
        prefactor: intercept.exp(),
        r_squared,
        band_power,
        band_min: band.min,
        band_max: band.max,
        band_ratio: band.ratio,
        points_used: used.len(),
        points_excluded: points.len() - used.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseAlphaFit {
    #[serde(serialize_with = "ser_f64")]
    pub c: f64,
    /// `max |y − c/α| / |y|`.
    #[serde(serialize_with = "ser_f64")]
    pub max_rel_residual: f64,
}

/// Least-squares fit of `y ≈ c / α` over `(α, y)` samples taken at one `k`.
pub fn fit_inverse_alpha(samples: &[(f64, f64)]) -> Result<InverseAlphaFit> {
    if samples.len() < 3 {
        return Err(Error::InsufficientPoints { need: 3, got: samples.len() });
    }
    for &(alpha, y) in samples {
        if !(alpha > 0.0 && alpha.is_finite()) || !y.is_finite() || y == 0.0 {
            return Err(Error::DegenerateSamples(format!("unusable sample (alpha = {alpha}, y = {y})")));
        }
    }
    let num: f64 = samples.iter().map(|(a, y)| y / a).sum();
    let den: f64 = samples.iter().map(|(a, _)| 1.0 / (a * a)).sum();
    let c = num / den;
    let max_rel_residual = samples.iter().map(|(a, y)| ((y - c / a) / y).abs()).fold(0.0, f64::max);
    Ok(InverseAlphaFit { c, max_rel_residual })
}

/// Outcome of checking that `|V_k|³ Γ` stays in a band bounded away from
/// zero and infinity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CubicBandCheck {
    pub band: Option<Band>,
    /// Every scaled value is finite and positive.
    pub upper_holds: bool,
    /// Lower bound is meaningful: `J = {0}`, or the explicit lower bound is
    /// positive at every point.
    pub part2_applicable: bool,
    /// `inf n³Γ > 0` and `n³Γ ≥ explicit lower bound` wherever it exists;
    /// `None` when not applicable.
    pub lower_holds: Option<bool>,
    /// `(k, n³ (λ₀(V_k, ∞δ₀) − upper bound on λ₀))`, `None` where the trial
    /// state is degenerate.
    pub explicit_lower: Vec<(usize, Option<f64>)>,
}

/// Checks the two-sided `|V_k|³` scaling over the non-flagged points of a
/// series. The explicit lower bound combines the excited-state lower bound
/// `λ₀(V_k, ∞δ₀)` with the trial-state upper bound on `λ₀`.
pub fn cubic_band_check(series: &GapSeries, epsilon: f64) -> Result<CubicBandCheck> {
    if series.potential.is_empty() {
        return Err(Error::EmptyPotential);
    }
    let used: Vec<&GapPoint> = series.points.iter().filter(|p| !p.precision_limited).collect();
    let band = Band::of(used.iter().map(|p| p.scaled(3.0)));
    let upper_holds = used.iter().all(|p| {
        let v = p.scaled(3.0);
        v.is_finite() && v > 0.0
    });

    let mut explicit_lower = Vec::with_capacity(used.len());
    for p in &used {
        let lb = match build_trial_state(p.k, &series.potential, epsilon) {
            Ok(trial) => {
                let upper = ground_energy_upper_bound(&trial, p.k, &series.potential)?;
                Some((dirichlet_ground_energy(p.k)? - upper) * (p.n as f64).powi(3))
            }
            Err(Error::DegenerateTrialState(_)) => None,
            Err(e) => return Err(e),
        };
        explicit_lower.push((p.k, lb));
    }

    let part2_applicable = series.potential.is_origin_only()
        || (!explicit_lower.is_empty() && explicit_lower.iter().all(|(_, lb)| matches!(lb, Some(v) if *v > 0.0)));
    let lower_holds = part2_applicable.then(|| {
        let positive = band.is_some_and(|b| b.min > 0.0);
        let dominated = used.iter().zip(&explicit_lower).all(|(p, (_, lb))| match lb {
            Some(lb) => p.scaled(3.0) >= *lb * (1.0 - 1e-9),
            None => true,
        });
        positive && dominated
    });

    Ok(CubicBandCheck { band, upper_holds, part2_applicable, lower_holds, explicit_lower })
}

/// Sizes from `min` to `max` with `count` points, geometric or linear,
/// rounded to integers and deduplicated.
pub fn k_grid(min: usize, max: usize, geometric: bool, count: usize) -> Result<Vec<usize>> {
    if min == 0 || max < min || count == 0 || (count == 1 && min != max) {
        return Err(Error::Parse(format!("invalid k-grid {min}:{max} with {count} points")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let last = (count - 1) as f64;
    let mut ks: Vec<usize> = (0..count)
        .map(|i| {
            let t = i as f64 / last;
            let v = if geometric {
                min as f64 * (max as f64 / min as f64).powf(t)
            } else {
                min as f64 + (max - min) as f64 * t
            };
            v.round() as usize
        })
        .collect();
    ks.dedup();
    Ok(ks)
}

/// Geometric grid `100..1600` (16 points) plus the diagnostic sizes
/// `10, 20, …, 50`.
pub fn default_k_grid() -> Vec<usize> {
    let mut ks: Vec<usize> = (1..=5).map(|i| 10 * i).collect();
    ks.extend(k_grid(100, 1600, true, 16).expect("valid grid"));
    ks
}
