//! Weighted discrepancy on 𝕋 and 𝕋², the Erdős–Turán style bound, and
//! grid coverage.
//!
//! Boxes and cells are half-open. The anchored (star) discrepancy is
//! `sup_c |μ([0,c₁)×…)/norm − ∏cⱼ|`; both one-sided values at every data
//! coordinate are scanned, which also covers closed boxes.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sum::KahanSum;

/// Point-count caps for the exact star scans.
pub const STAR_CAP_1D: usize = 100_000;
pub const STAR_CAP_2D: usize = 5_000;
/// Point-count cap for the exact full discrepancy in dimension 1.
pub const FULL_CAP_1D: usize = 10_000;

/// Points of `𝕋^D` with positive weights and a normalizer.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample<const D: usize> {
    points: Vec<[f64; D]>,
    weights: Vec<f64>,
    norm: f64,
}

impl<const D: usize> WeightedSample<D> {
    pub fn new(points: Vec<[f64; D]>, weights: Vec<f64>, norm: f64) -> Result<Self> {
        if D != 1 && D != 2 {
            return Err(Error::invalid("d", "only dimensions 1 and 2 are supported"));
        }
        if points.len() != weights.len() {
            return Err(Error::invalid("weights", "need one weight per point"));
        }
        if weights.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::invalid("weights", "weights must be positive"));
        }
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::invalid("norm", "normalizer must be positive"));
        }
        if points.iter().flatten().any(|&c| !(0.0..1.0).contains(&c)) {
            return Err(Error::invalid("points", "coordinates must lie in [0, 1)"));
        }
        Ok(Self {
            points,
            weights,
            norm,
        })
    }

    /// Unit weights, normalized by the number of points.
    pub fn uniform(points: Vec<[f64; D]>) -> Result<Self> {
        let m = points.len();
        Self::new(points, vec![1.0; m], m as f64)
    }

    /// Weights `1/n` for `n = first, first+1, …`, normalized by `log N`
    /// with `N` the last index.
    pub fn logarithmic(points: Vec<[f64; D]>, first: u64) -> Result<Self> {
        let last = first + points.len() as u64 - 1;
        if points.is_empty() || last < 2 {
            return Err(Error::invalid("points", "need points up to an index N ≥ 2"));
        }
        let weights = (first..=last).map(|n| 1.0 / n as f64).collect();
        Self::new(points, weights, libm::log(last as f64))
    }

    /// Same points and weights with `norm = Σ w`, so the empirical measure
    /// has total mass 1.
    pub fn normalized(mut self) -> Self {
        self.norm = self.total_weight();
        self
    }

    pub fn points(&self) -> &[[f64; D]] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().copied().collect::<KahanSum>().value()
    }

    /// `Σ w / norm`.
    pub fn total_mass(&self) -> f64 {
        self.total_weight() / self.norm
    }

    pub fn push(&mut self, point: [f64; D], weight: f64) -> Result<()> {
        if weight.is_nan() || weight <= 0.0 || point.iter().any(|c| !(0.0..1.0).contains(c)) {
            return Err(Error::invalid(
                "point",
                "need a positive weight and coordinates in [0, 1)",
            ));
        }
        self.points.push(point);
        self.weights.push(weight);
        Ok(())
    }
}

/// Corner of an anchored box; `closed[j]` says whether the side at
/// `corner[j]` is included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxWitness<const D: usize> {
    pub corner: [f64; D],
    pub closed: [bool; D],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyReport<const D: usize> {
    pub d_star: f64,
    /// Exact full discrepancy where it is computed (dimension 1, at most
    /// [`FULL_CAP_1D`] points).
    pub d_full: Option<f64>,
    pub box_witness: BoxWitness<D>,
}

struct Best<const D: usize> {
    value: f64,
    witness: BoxWitness<D>,
}

impl<const D: usize> Best<D> {
    fn new() -> Self {
        Self {
            value: 0.0,
            witness: BoxWitness {
                corner: [0.0; D],
                closed: [false; D],
            },
        }
    }

    #[inline]
    fn offer(&mut self, dev: f64, corner: [f64; D], closed: [bool; D]) {
        let dev = libm::fabs(dev);
        if dev > self.value {
            self.value = dev;
            self.witness = BoxWitness { corner, closed };
        }
    }
}

/// Distinct sorted coordinates with their aggregated weights.
fn group(coords: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = coords.collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (x, w) in v {
        match out.last_mut() {
            Some(last) if last.0 == x => last.1 += w,
            _ => out.push((x, w)),
        }
    }
    out
}

fn cap_error(m: usize, cap: usize) -> Error {
    Error::invalid(
        "points",
        format!("{m} points exceed the exact-scan cap {cap}; subsample or use the binned bound"),
    )
}

fn star_1d<const D: usize>(s: &WeightedSample<D>) -> Best<D> {
    let groups = group(s.points.iter().zip(&s.weights).map(|(p, &w)| (p[0], w)));
    let mut best = Best::new();
    let mut below = KahanSum::new();
    for &(v, w) in &groups {
        let mut c = [0.0; D];
        c[0] = v;
        best.offer(below.value() / s.norm - v, c, [false; D]);
        below.add(w);
        best.offer(below.value() / s.norm - v, c, [true; D]);
    }
    let mut one = [0.0; D];
    one[0] = 1.0;
    best.offer(below.value() / s.norm - 1.0, one, [false; D]);
    best
}

fn star_2d<const D: usize>(s: &WeightedSample<D>) -> Best<D> {
    let ys = group(s.points.iter().map(|p| (p[1], 0.0)));
    let rank = |y: f64| ys.partition_point(|&(v, _)| v < y);
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s.points[a][0].total_cmp(&s.points[b][0]));
    let mut column = vec![0.0f64; ys.len()];
    let mut best = Best::new();
    let scan = |column: &[f64], c1: f64, closed1: bool, best: &mut Best<D>| {
        let mut acc = KahanSum::new();
        for (i, &(y, _)) in ys.iter().enumerate() {
            let mut corner = [0.0; D];
            corner[0] = c1;
            corner[1] = y;
            let mut closed = [closed1; D];
            closed[1] = false;
            best.offer(acc.value() / s.norm - c1 * y, corner, closed);
            acc.add(column[i]);
            closed[1] = true;
            best.offer(acc.value() / s.norm - c1 * y, corner, closed);
        }
        let mut corner = [1.0; D];
        corner[0] = c1;
        let mut closed = [closed1; D];
        closed[1] = false;
        best.offer(acc.value() / s.norm - c1, corner, closed);
    };
    let mut i = 0;
    while i < order.len() {
        let x = s.points[order[i]][0];
        scan(&column, x, false, &mut best);
        while i < order.len() && s.points[order[i]][0] == x {
            let k = order[i];
            column[rank(s.points[k][1])] += s.weights[k];
            i += 1;
        }
        scan(&column, x, true, &mut best);
    }
    scan(&column, 1.0, false, &mut best);
    best
}

fn check_star_cap<const D: usize>(s: &WeightedSample<D>) -> Result<()> {
    let cap = if D == 1 { STAR_CAP_1D } else { STAR_CAP_2D };
    if s.len() > cap {
        return Err(cap_error(s.len(), cap));
    }
    Ok(())
}

/// `D*` by exhaustive corner scan.
pub fn star_discrepancy<const D: usize>(sample: &WeightedSample<D>) -> Result<f64> {
    Ok(discrepancy_report(sample)?.d_star)
}

pub fn discrepancy_report<const D: usize>(
    sample: &WeightedSample<D>,
) -> Result<DiscrepancyReport<D>> {
    check_star_cap(sample)?;
    let best = if D == 1 {
        star_1d(sample)
    } else {
        star_2d(sample)
    };
    let d_full = if D == 1 && sample.len() <= FULL_CAP_1D {
        Some(full_discrepancy_1d(sample)?)
    } else {
        None
    };
    Ok(DiscrepancyReport {
        d_star: best.value,
        d_full,
        box_witness: best.witness,
    })
}

/// Exact `D = sup over arcs |μ(I)/norm − |I||` in dimension 1, wrapping
/// arcs included.
pub fn full_discrepancy_1d<const D: usize>(sample: &WeightedSample<D>) -> Result<f64> {
    if D != 1 {
        return Err(Error::invalid(
            "d",
            "exact full discrepancy is only computed for d = 1",
        ));
    }
    if sample.len() > FULL_CAP_1D {
        return Err(cap_error(sample.len(), FULL_CAP_1D));
    }
    // positions 0 and k+1 are the massless ends 0 and 1
    let mut pos = vec![(0.0, 0.0)];
    pos.extend(group(
        sample
            .points
            .iter()
            .zip(&sample.weights)
            .map(|(p, &w)| (p[0], w)),
    ));
    pos.push((1.0, 0.0));
    let mut prefix = Vec::with_capacity(pos.len() + 1);
    let mut acc = KahanSum::new();
    prefix.push(0.0);
    for &(_, w) in &pos {
        acc.add(w);
        prefix.push(acc.value());
    }
    // mass of positions i..=j is prefix[j + 1] − prefix[i]
    let norm = sample.norm;
    let excess = acc.value() / norm - 1.0;
    let mut best: f64 = excess.abs();
    for i in 0..pos.len() {
        for j in i..pos.len() {
            let len = pos[j].0 - pos[i].0;
            let closed = (prefix[j + 1] - prefix[i]) / norm - len;
            let open_left = (prefix[j + 1] - prefix[i + 1]) / norm - len;
            let open_right = (prefix[j] - prefix[i]) / norm - len;
            let open = if j > i {
                (prefix[j] - prefix[i + 1]) / norm - len
            } else {
                -len
            };
            for d in [closed, open_left, open_right, open] {
                // an interval and the wrapping arc that complements it
                best = best.max(d.abs()).max((excess - d).abs());
            }
        }
    }
    Ok(best)
}

/// `[D*, 2^d D*]`, with the exact value where it is computed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscrepancyInterval {
    pub lower: f64,
    pub upper: f64,
    pub exact: Option<f64>,
}

impl DiscrepancyInterval {
    pub fn contains_exact(&self) -> Option<bool> {
        self.exact
            .map(|d| d >= self.lower - 1e-12 && d <= self.upper + 1e-12)
    }
}

pub fn full_discrepancy_bound<const D: usize>(
    sample: &WeightedSample<D>,
) -> Result<DiscrepancyInterval> {
    let r = discrepancy_report(sample)?;
    Ok(DiscrepancyInterval {
        lower: r.d_star,
        upper: (1u32 << D) as f64 * r.d_star,
        exact: r.d_full,
    })
}

/// `R(m₁, m₂) = max(1, |m₁|)·max(1, |m₂|)`.
pub fn r_weight(m1: i64, m2: i64) -> f64 {
    (m1.unsigned_abs().max(1) * m2.unsigned_abs().max(1)) as f64
}

/// `1/(K+1) + (1/log_norm) Σ_{(m₁,m₂)≠0, |mⱼ|≤K} |c(m₁,m₂)| / R(m₁,m₂)`,
/// with `c` the raw sums `Σ f(n)^{m₁} g(n+1)^{m₂} / n`.
pub fn erdos_turan_bound(
    correlations: &BTreeMap<(i64, i64), Complex64>,
    k: usize,
    log_norm: f64,
) -> Result<f64> {
    if log_norm.is_nan() || log_norm <= 0.0 {
        return Err(Error::invalid("log_norm", "must be positive"));
    }
    let k = k as i64;
    let mut acc = KahanSum::new();
    for m1 in -k..=k {
        for m2 in -k..=k {
            if (m1, m2) == (0, 0) {
                continue;
            }
            let c = correlations
                .get(&(m1, m2))
                .ok_or(Error::MissingPair(m1, m2))?;
            acc.add(c.norm() / r_weight(m1, m2));
        }
    }
    Ok(1.0 / (k + 1) as f64 + acc.value() / log_norm)
}

/// Per-cell masses of a `G^D` partition of `𝕋^D` into half-open cells.
#[derive(Debug, Clone, PartialEq)]
pub struct CoverageReport<const D: usize> {
    pub g: usize,
    /// Row-major by coordinate: cell `(i₁, …, i_D)` at `Σ iⱼ G^{D−1−j}`,
    /// each entry `Σ w / norm`.
    pub masses: Vec<f64>,
    pub empty_cells: Vec<[usize; D]>,
    pub min_mass: f64,
    pub max_mass: f64,
    pub total_mass: f64,
}

impl<const D: usize> CoverageReport<D> {
    pub fn mass(&self, cell: [usize; D]) -> f64 {
        self.masses[cell_index(cell, self.g)]
    }

    pub fn nonempty_cells(&self) -> usize {
        self.masses.len() - self.empty_cells.len()
    }
}

fn cell_index<const D: usize>(cell: [usize; D], g: usize) -> usize {
    cell.iter().fold(0, |acc, &i| acc * g + i)
}

#[inline]
fn bin(x: f64, g: usize) -> usize {
    ((x * g as f64) as usize).min(g - 1)
}

/// Streaming form of [`grid_coverage`] for orbits too long to store.
#[derive(Debug, Clone)]
pub struct CoverageAccumulator<const D: usize> {
    g: usize,
    sums: Vec<KahanSum>,
}

impl<const D: usize> CoverageAccumulator<D> {
    pub fn new(g: usize) -> Result<Self> {
        if g < 2 {
            return Err(Error::invalid("G", "grid needs G ≥ 2"));
        }
        if D != 1 && D != 2 {
            return Err(Error::invalid("d", "only dimensions 1 and 2 are supported"));
        }
        Ok(Self {
            g,
            sums: vec![KahanSum::new(); g.pow(D as u32)],
        })
    }

    #[inline]
    pub fn add(&mut self, point: [f64; D], weight: f64) {
        let idx = point
            .iter()
            .fold(0, |acc, &x| acc * self.g + bin(x, self.g));
        self.sums[idx].add(weight);
    }

    pub fn finish(&self, norm: f64) -> CoverageReport<D> {
        let g = self.g;
        let masses: Vec<f64> = self.sums.iter().map(|s| s.value() / norm).collect();
        let empty_cells = masses
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == 0.0)
            .map(|(idx, _)| {
                let mut cell = [0usize; D];
                let mut rest = idx;
                for slot in cell.iter_mut().rev() {
                    *slot = rest % g;
                    rest /= g;
                }
                cell
            })
            .collect();
        let total_mass = self
            .sums
            .iter()
            .map(KahanSum::value)
            .collect::<KahanSum>()
            .value()
            / norm;
        CoverageReport {
            g,
            min_mass: masses.iter().copied().fold(f64::INFINITY, f64::min),
            max_mass: masses.iter().copied().fold(0.0, f64::max),
            masses,
            empty_cells,
            total_mass,
        }
    }
}

pub fn grid_coverage<const D: usize>(
    sample: &WeightedSample<D>,
    g: usize,
) -> Result<CoverageReport<D>> {
    let mut acc = CoverageAccumulator::new(g)?;
    for (p, &w) in sample.points.iter().zip(&sample.weights) {
        acc.add(*p, w);
    }
    Ok(acc.finish(sample.norm))
}

/// Rigorous bounds on the 2-d star discrepancy from an `R × R` histogram,
/// for samples beyond [`STAR_CAP_2D`].
#[derive(Debug, Clone)]
pub struct BinnedStar {
    r: usize,
    cells: Vec<KahanSum>,
}

impl BinnedStar {
    pub fn new(r: usize) -> Result<Self> {
        if r < 1 {
            return Err(Error::invalid("R", "need at least one bin"));
        }
        Ok(Self {
            r,
            cells: vec![KahanSum::new(); r * r],
        })
    }

    #[inline]
    pub fn add(&mut self, point: [f64; 2], weight: f64) {
        self.cells[bin(point[0], self.r) * self.r + bin(point[1], self.r)].add(weight);
    }

    /// `(lower, upper)` with `lower ≤ D* ≤ upper`. The lower end is the
    /// exact deviation at grid corners; the upper end bounds every box
    /// whose corner falls inside a cell.
    pub fn bounds(&self, norm: f64) -> (f64, f64) {
        let r = self.r;
        // cum[i][j]: mass of [0, i/R) × [0, j/R)
        let mut cum = vec![0.0f64; (r + 1) * (r + 1)];
        for i in 1..=r {
            let mut row = KahanSum::new();
            for j in 1..=r {
                row.add(self.cells[(i - 1) * r + (j - 1)].value());
                cum[i * (r + 1) + j] = cum[(i - 1) * (r + 1) + j] + row.value();
            }
        }
        let m = |i: usize, j: usize| cum[i * (r + 1) + j] / norm;
        let rf = r as f64;
        let mut lower: f64 = 0.0;
        let mut upper: f64 = 0.0;
        for i in 0..=r {
            for j in 0..=r {
                lower = lower.max((m(i, j) - (i * j) as f64 / (rf * rf)).abs());
                if i < r && j < r {
                    let hi = m(i + 1, j + 1) - (i * j) as f64 / (rf * rf);
                    let lo = m(i, j) - ((i + 1) * (j + 1)) as f64 / (rf * rf);
                    upper = upper.max(hi.abs()).max(lo.abs());
                }
            }
        }
        (lower, upper.max(lower))
    }
}
