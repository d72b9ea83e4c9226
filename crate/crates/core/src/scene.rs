//! Ground truths and the channel patterns they induce.
//!
//! Coordinates are `(row, col)` with the origin at the top-left pixel; pixel
//! centers sit on integer coordinates.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ATTRACTOR_REJECTION_CAP: usize = 1_000_000;
const PLACEMENT_REJECTION_CAP: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Pixel {
    pub row: u32,
    pub col: u32,
}

impl Pixel {
    pub fn new(row: u32, col: u32) -> Self {
        Self { row, col }
    }

    pub fn dist2(&self, other: &Pixel) -> i64 {
        let dr = self.row as i64 - other.row as i64;
        let dc = self.col as i64 - other.col as i64;
        dr * dr + dc * dc
    }
}

impl fmt::Display for Pixel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    side: usize,
}

impl GridSpec {
    pub fn new(side: usize) -> Result<Self> {
        if side == 0 || side > u16::MAX as usize {
            return Err(Error::Config(format!("grid side {side} out of range")));
        }
        Ok(Self { side })
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn pixels(&self) -> usize {
        self.side * self.side
    }
}

/// Binary matrix over the grid, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelPattern {
    side: usize,
    bits: Vec<u8>,
}

impl ChannelPattern {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            side: grid.side,
            bits: vec![0; grid.pixels()],
        }
    }

    pub fn from_bits(grid: GridSpec, bits: Vec<u8>) -> Result<Self> {
        if bits.len() != grid.pixels() {
            return Err(Error::Domain(format!(
                "expected {} bits, got {}",
                grid.pixels(),
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Domain("pattern entries must be 0 or 1".into()));
        }
        Ok(Self {
            side: grid.side,
            bits,
        })
    }

    pub fn grid(&self) -> GridSpec {
        GridSpec { side: self.side }
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.bits[row * self.side + col]
    }

    pub fn set(&mut self, row: usize, col: usize, bit: u8) {
        self.bits[row * self.side + col] = bit & 1;
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b == 1).count()
    }

    /// Pixels set to one, in row-major order.
    pub fn ones(&self) -> Vec<Pixel> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b == 1)
            .map(|(i, _)| Pixel::new((i / self.side) as u32, (i % self.side) as u32))
            .collect()
    }

    /// One line per row of `0`/`1` characters.
    pub fn to_text(&self) -> String {
        let mut out = String::with_capacity(self.bits.len() + self.side);
        for row in self.bits.chunks(self.side) {
            out.extend(row.iter().map(|&b| if b == 1 { '1' } else { '0' }));
            out.push('\n');
        }
        out
    }

    /// Parses a square grid of `0`/`1` characters. Whitespace inside a row is
    /// ignored, blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Self> {
        let rows: Vec<Vec<u8>> = text
            .lines()
            .map(|l| l.chars().filter(|c| !c.is_whitespace()).collect::<String>())
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        other => Err(Error::Domain(format!("unexpected grid character {other:?}"))),
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<_>>()?;
        let side = rows.len();
        if side == 0 || rows.iter().any(|r| r.len() != side) {
            return Err(Error::Domain("grid must be square and non-empty".into()));
        }
        Self::from_bits(GridSpec::new(side)?, rows.concat())
    }
}

/// Per-pixel probabilities, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    side: usize,
    probs: Vec<f64>,
}

impl ProbabilityMap {
    pub fn new(grid: GridSpec, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != grid.pixels() {
            return Err(Error::Domain("probability map has the wrong size".into()));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::Domain("probabilities must lie in [0, 1]".into()));
        }
        Ok(Self {
            side: grid.side,
            probs,
        })
    }

    pub fn uniform(grid: GridSpec, p: f64) -> Result<Self> {
        Self::new(grid, vec![p; grid.pixels()])
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.probs[row * self.side + col]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AttractorParams {
    pub phi: f64,
    pub sigma2: f64,
    pub min_separation: f64,
    pub edge_margin: f64,
}

impl Default for AttractorParams {
    fn default() -> Self {
        Self {
            phi: 1.0,
            sigma2: 2.0,
            min_separation: 8.0,
            edge_margin: 4.0,
        }
    }
}

impl AttractorParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.phi > 0.0 && self.sigma2 > 0.0 && self.min_separation > 0.0)
            || !(self.edge_margin >= 0.0)
        {
            return Err(Error::Config(format!("invalid attractor parameters {self:?}")));
        }
        Ok(())
    }

    /// Also checks that the grid admits at least one valid pair of positions.
    pub fn validate_on(&self, grid: GridSpec) -> Result<()> {
        self.allowed_range(grid).map(|_| ())
    }

    /// Inclusive coordinate range allowed by the edge margin, provided a
    /// pair inside it can be far enough apart.
    fn allowed_range(&self, grid: GridSpec) -> Result<(u32, u32)> {
        self.validate()?;
        let lo = self.edge_margin.ceil();
        let hi = (grid.side as f64 - 1.0 - self.edge_margin).floor();
        if lo > hi {
            return Err(Error::Config(format!(
                "edge margin {} leaves no valid pixel on a {}-pixel grid",
                self.edge_margin, grid.side
            )));
        }
        if (hi - lo) * std::f64::consts::SQRT_2 < self.min_separation {
            return Err(Error::Config(format!(
                "no pair of pixels in [{lo}, {hi}]^2 is {} apart",
                self.min_separation
            )));
        }
        Ok((lo as u32, hi as u32))
    }
}

/// Two attractor positions, sorted lexicographically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AttractorTruth {
    coords: [Pixel; 2],
}

impl AttractorTruth {
    pub fn new(a: Pixel, b: Pixel) -> Self {
        let coords = if a <= b { [a, b] } else { [b, a] };
        Self { coords }
    }

    pub fn coords(&self) -> [Pixel; 2] {
        self.coords
    }
}

/// Draws two attractor positions uniformly from all pairs obeying the
/// separation and edge-margin constraints, by rejection.
pub fn sample_attractor_truth<R: Rng + ?Sized>(
    rng: &mut R,
    grid: GridSpec,
    params: &AttractorParams,
) -> Result<AttractorTruth> {
    let (lo, hi) = params.allowed_range(grid)?;
    let min2 = params.min_separation * params.min_separation;
    for _ in 0..ATTRACTOR_REJECTION_CAP {
        let a = Pixel::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        let b = Pixel::new(rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        if a.dist2(&b) as f64 >= min2 {
            return Ok(AttractorTruth::new(a, b));
        }
    }
    Err(Error::Config(format!(
        "attractor rejection sampling exceeded {ATTRACTOR_REJECTION_CAP} tries"
    )))
}

/// `min(1, phi * sum_i exp(-|x - x_i|^2 / (2 sigma^2)))` at every pixel center.
pub fn attractor_occupancy(
    truth: &AttractorTruth,
    grid: GridSpec,
    params: &AttractorParams,
) -> ProbabilityMap {
    let side = grid.side;
    let mut probs = vec![0.0; grid.pixels()];
    let scale = -1.0 / (2.0 * params.sigma2);
    for (i, p) in probs.iter_mut().enumerate() {
        let here = Pixel::new((i / side) as u32, (i % side) as u32);
        let f: f64 = truth
            .coords
            .iter()
            .map(|c| (scale * here.dist2(c) as f64).exp())
            .sum();
        *p = (params.phi * f).min(1.0);
    }
    ProbabilityMap { side, probs }
}

/// Independent Bernoulli draw per pixel.
pub fn sample_pattern_from_probs<R: Rng + ?Sized>(
    rng: &mut R,
    probs: &ProbabilityMap,
) -> ChannelPattern {
    let bits = probs
        .probs
        .iter()
        .map(|&p| u8::from(rng.gen::<f64>() < p))
        .collect();
    ChannelPattern {
        side: probs.side,
        bits,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParticleParams {
    /// Short and long side of a particle, in pixels.
    pub dims: (usize, usize),
    pub max_particles: u32,
}

impl Default for ParticleParams {
    fn default() -> Self {
        Self {
            dims: (2, 5),
            max_particles: 10,
        }
    }
}

impl ParticleParams {
    pub fn validate(&self, grid: GridSpec) -> Result<()> {
        let (d1, d2) = self.dims;
        if d1 == 0 || d2 == 0 || d1 > grid.side || d2 > grid.side {
            return Err(Error::Config(format!(
                "particle dims {d1}x{d2} do not fit a {}-pixel grid",
                grid.side
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParticleTruth {
    pub count: u32,
}

pub fn sample_particle_truth<R: Rng + ?Sized>(rng: &mut R, params: &ParticleParams) -> ParticleTruth {
    ParticleTruth {
        count: rng.gen_range(0..=params.max_particles),
    }
}

/// Places `truth.count` non-overlapping axis-aligned rectangles one after
/// another, drawing orientation and top-left corner uniformly and rejecting
/// overlaps.
pub fn place_particles<R: Rng + ?Sized>(
    rng: &mut R,
    grid: GridSpec,
    truth: ParticleTruth,
    params: &ParticleParams,
) -> Result<ChannelPattern> {
    params.validate(grid)?;
    let (d1, d2) = params.dims;
    let side = grid.side;
    let needed = truth.count as usize * d1 * d2;
    if needed > grid.pixels() {
        return Err(Error::Placement(format!(
            "{} particles of {d1}x{d2} cannot fit on {side}x{side} pixels",
            truth.count
        )));
    }
    let mut pattern = ChannelPattern::zeros(grid);
    for placed in 0..truth.count {
        let mut done = false;
        for _ in 0..PLACEMENT_REJECTION_CAP {
            let (h, w) = if rng.gen::<bool>() { (d1, d2) } else { (d2, d1) };
            let top = rng.gen_range(0..=side - h);
            let left = rng.gen_range(0..=side - w);
            let free = (top..top + h).all(|r| (left..left + w).all(|c| pattern.get(r, c) == 0));
            if free {
                for r in top..top + h {
                    for c in left..left + w {
                        pattern.set(r, c, 1);
                    }
                }
                done = true;
                break;
            }
        }
        if !done {
            return Err(Error::Placement(format!(
                "could not place particle {} of {} after {PLACEMENT_REJECTION_CAP} tries",
                placed + 1,
                truth.count
            )));
        }
    }
    Ok(pattern)
}
