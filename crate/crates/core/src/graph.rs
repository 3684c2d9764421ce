//! Path graphs, compactly supported potentials and the tridiagonal
//! Hamiltonian `H = L_k + Σ_j α_j δ_j`.
//!
//! Public interfaces speak in *sites* `-k..=k`; storage is 0-indexed with
//! `index = site + k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;

use crate::{Error, Result};

/// The path graph on the vertices `{-k, …, k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathGraph {
    k: usize,
}

impl PathGraph {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidHalfWidth(k));
        }
        Ok(Self { k })
    }

    /// Half-width `k`.
    pub fn half_width(&self) -> usize {
        self.k
    }

    /// Vertex count `|V_k| = 2k + 1`.
    pub fn len(&self) -> usize {
        2 * self.k + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn vertices(&self) -> RangeInclusive<i64> {
        -(self.k as i64)..=self.k as i64
    }

    pub fn contains(&self, site: i64) -> bool {
        site.unsigned_abs() <= self.k as u64
    }

    pub fn index_of(&self, site: i64) -> Option<usize> {
        self.contains(site).then(|| (site + self.k as i64) as usize)
    }

    pub fn site_of(&self, index: usize) -> i64 {
        index as i64 - self.k as i64
    }

    pub fn degree(&self, site: i64) -> Option<usize> {
        if !self.contains(site) {
            None
        } else if site.unsigned_abs() == self.k as u64 {
            Some(1)
        } else {
            Some(2)
        }
    }
}

/// Finite map from sites to strictly positive strengths.
///
/// The empty map is only available through [`Potential::empty_baseline`] and
/// stands for the free Laplacian.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Potential {
    entries: BTreeMap<i64, f64>,
}

impl Potential {
    pub fn new<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        let mut entries = BTreeMap::new();
        for (site, strength) in pairs {
            if !(strength > 0.0 && strength.is_finite()) {
                return Err(Error::NonPositiveStrength { site, strength });
            }
            if entries.insert(site, strength).is_some() {
                return Err(Error::DuplicateSite(site));
            }
        }
        if entries.is_empty() {
            return Err(Error::EmptyPotential);
        }
        Ok(Self { entries })
    }

    /// The zero potential (free Laplacian baseline).
    pub fn empty_baseline() -> Self {
        Self::default()
    }

    /// Every strength multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if self.is_empty() {
            return Ok(Self::empty_baseline());
        }
        Self::new(self.entries.iter().map(|(&s, &a)| (s, a * factor)))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn strength(&self, site: i64) -> f64 {
        self.entries.get(&site).copied().unwrap_or(0.0)
    }

    /// `(site, strength)` pairs in increasing site order.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.entries.iter().map(|(&s, &a)| (s, a))
    }

    pub fn r_min(&self) -> Option<i64> {
        self.entries.keys().next().copied()
    }

    pub fn r_max(&self) -> Option<i64> {
        self.entries.keys().next_back().copied()
    }

    /// `α̃ = min_j α_j`.
    pub fn alpha_min(&self) -> Option<f64> {
        self.entries.values().copied().reduce(f64::min)
    }

    /// Largest strength, `0` for the empty potential.
    pub fn alpha_max(&self) -> f64 {
        self.entries.values().copied().fold(0.0, f64::max)
    }

    /// `α̂ = Σ_j α_j`, `0` for the empty potential.
    pub fn alpha_sum(&self) -> f64 {
        self.entries.values().sum()
    }

    /// `J = {0}`.
    pub fn is_origin_only(&self) -> bool {
        self.entries.len() == 1 && self.entries.contains_key(&0)
    }

    /// `(r_min, r_max)`, or an error for the empty potential.
    pub fn support(&self) -> Result<(i64, i64)> {
        match (self.r_min(), self.r_max()) {
            (Some(lo), Some(hi)) => Ok((lo, hi)),
            _ => Err(Error::EmptyPotential),
        }
    }
}

impl fmt::Display for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("none");
        }
        for (i, (site, strength)) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{site}:{strength}")?;
        }
        Ok(())
    }
}

impl FromStr for Potential {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_potential_spec(s)
    }
}

/// Parses `site:strength[,site:strength]*`; `none` gives the empty baseline.
///
/// Whitespace is ignored. Errors name the offending token by its 1-based
/// position.
pub fn parse_potential_spec(s: &str) -> Result<Potential> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.eq_ignore_ascii_case("none") {
        return Ok(Potential::empty_baseline());
    }
    if compact.is_empty() {
        return Err(Error::Parse("empty potential spec (use `none` for the free Laplacian)".into()));
    }
    let mut entries = BTreeMap::new();
    for (i, token) in compact.split(',').enumerate() {
        let pos = i + 1;
        let (site, strength) = token
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("malformed token `{token}` at token {pos}: expected site:strength")))?;
        let site: i64 = site.parse().map_err(|_| Error::Parse(format!("invalid site `{site}` at token {pos}")))?;
        let strength: f64 =
            strength.parse().map_err(|_| Error::Parse(format!("invalid strength `{strength}` at token {pos}")))?;
        if !(strength > 0.0 && strength.is_finite()) {
            return Err(Error::Parse(format!("non-positive strength at token {pos}")));
        }
        if entries.insert(site, strength).is_some() {
            return Err(Error::Parse(format!("duplicate site {site} at token {pos}")));
        }
    }
    Ok(Potential { entries })
}

/// Symmetric tridiagonal representation of `H_{k,α}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    graph: PathGraph,
    potential: Potential,
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

/// Builds `H = L_k + Σ_j α_j δ_j`.
///
/// A non-empty potential must leave both side sub-paths `{-k, …, r_min}` and
/// `{r_max, …, k}` with at least one edge, i.e. `k + r_min ≥ 1` and
/// `k - r_max ≥ 1`.
pub fn assemble_hamiltonian(graph: &PathGraph, potential: &Potential) -> Result<TridiagonalOperator> {
    let k = graph.half_width();
    for (site, _) in potential.iter() {
        if !graph.contains(site) {
            return Err(Error::SiteOutOfRange { site, k });
        }
    }
    if let Ok((r_min, r_max)) = potential.support() {
        let k = k as i64;
        if k + r_min < 1 || k - r_max < 1 {
            return Err(Error::EmptySidePath { k: k as usize, r_min, r_max });
        }
    }
    let diag = graph.vertices().map(|v| graph.degree(v).unwrap_or(0) as f64 + potential.strength(v)).collect();
    Ok(TridiagonalOperator { graph: *graph, potential: potential.clone(), diag, offdiag: vec![-1.0; graph.len() - 1] })
}

impl TridiagonalOperator {
    pub fn graph(&self) -> &PathGraph {
        &self.graph
    }

    pub fn half_width(&self) -> usize {
        self.graph.half_width()
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// `4 + max_j α_j`, an upper bound on the spectrum.
    pub fn norm_bound(&self) -> f64 {
        4.0 + self.potential.alpha_max()
    }

    /// `H f`.
    pub fn apply(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        let n = self.len();
        Ok((0..n)
            .map(|i| {
                let mut acc = self.diag[i] * f[i];
                if i > 0 {
                    acc += self.offdiag[i - 1] * f[i - 1];
                }
                if i + 1 < n {
                    acc += self.offdiag[i] * f[i + 1];
                }
                acc
            })
            .collect())
    }

    /// `q[f] = Σ_{j=-k}^{k-1} |f(j+1) - f(j)|² + Σ_{j∈J} α_j |f(j)|²`.
    pub fn quadratic_form(&self, f: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        let kinetic: f64 = f.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
        let potential: f64 = self
            .potential
            .iter()
            .map(|(site, strength)| {
                let i = (site + self.half_width() as i64) as usize;
                strength * f[i] * f[i]
            })
            .sum();
        Ok(kinetic + potential)
    }

    pub fn rayleigh_quotient(&self, f: &[f64]) -> Result<f64> {
        let q = self.quadratic_form(f)?;
        let norm2: f64 = f.iter().map(|x| x * x).sum();
        if norm2 == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(q / norm2)
    }

    fn check_len(&self, f: &[f64]) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::LengthMismatch { expected: self.len(), got: f.len() });
        }
        Ok(())
    }
}
