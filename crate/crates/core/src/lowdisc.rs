//! Sobol low-discrepancy points for particle initialization.
//!
//! Points are generated from the published Joe-Kuo direction-number table
//! (bundled as a plain-text asset in the "d s a m_i" format) using 32-bit
//! direction integers. Point `n` of a coordinate is the XOR of the direction
//! integers selected by the binary digits of `n`, so the first dimension is
//! exactly the base-2 van der Corput sequence and every aligned block of
//! 2^m consecutive points hits each dyadic bin of width 2^-m exactly once.
//!
//! The base sequence starts at index 0. A nonzero seed applies a per-dimension
//! digital shift (coordinate-wise addition modulo 1 of a seeded uniform
//! offset), which preserves low discrepancy while decorrelating runs; seed 0
//! returns the unshifted sequence.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

const DIRECTION_TABLE: &str = include_str!("../assets/joe-kuo-d8192.txt");
const BITS: usize = 32;

/// One parsed row of the direction-number table: primitive-polynomial degree
/// `s`, coefficient bits `a`, and the initial values `m_1..m_s`.
struct TableRow {
    s: u32,
    a: u32,
    m: Vec<u32>,
}

fn table() -> &'static Vec<TableRow> {
    static TABLE: OnceLock<Vec<TableRow>> = OnceLock::new();
    TABLE.get_or_init(|| {
        DIRECTION_TABLE
            .lines()
            .skip(1) // column header
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                let mut it = line.split_whitespace();
                let _d: u32 = it.next().expect("direction table: d").parse().expect("d");
                let s: u32 = it.next().expect("direction table: s").parse().expect("s");
                let a: u32 = it.next().expect("direction table: a").parse().expect("a");
                let m: Vec<u32> = it.map(|t| t.parse().expect("m_i")).collect();
                assert_eq!(m.len(), s as usize, "direction table: m count");
                TableRow { s, a, m }
            })
            .collect()
    })
}

/// Largest supported dimension (first dimension plus one table row per
/// higher dimension).
pub fn max_dimension() -> usize {
    1 + table().len()
}

/// 32-bit direction integers for one coordinate. Dimension index 0 is the
/// van der Corput coordinate; higher indices come from the table recurrence
/// v_k = v_{k-s} ^ (v_{k-s} >> s) ^ XOR_{i=1..s-1} a_i * v_{k-i}.
fn direction_integers(dim_index: usize) -> [u32; BITS] {
    let mut v = [0u32; BITS];
    if dim_index == 0 {
        for (k, slot) in v.iter_mut().enumerate() {
            *slot = 1 << (BITS - 1 - k);
        }
        return v;
    }
    let row = &table()[dim_index - 1];
    let s = row.s as usize;
    for k in 0..s.min(BITS) {
        v[k] = row.m[k] << (BITS - 1 - k);
    }
    for k in s..BITS {
        let mut acc = v[k - s] ^ (v[k - s] >> s);
        for i in 1..s {
            if (row.a >> (s - 1 - i)) & 1 == 1 {
                acc ^= v[k - i];
            }
        }
        v[k] = acc;
    }
    v
}

/// A sequential generator over one Sobol sequence.
pub struct SobolStream {
    dimension: usize,
    next_index: u64,
    directions: Vec<[u32; BITS]>,
    shift: Option<Vec<f64>>,
}

impl SobolStream {
    /// Build a stream of `dimension` coordinates. Seed 0 leaves the base
    /// sequence unshifted; any other seed applies a digital shift drawn from
    /// a seeded generator.
    pub fn new(dimension: usize, seed: u64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidConfig("Sobol dimension must be >= 1".into()));
        }
        if dimension > max_dimension() {
            return Err(Error::UnsupportedDimension {
                dim: dimension,
                max: max_dimension(),
            });
        }
        let directions = (0..dimension).map(direction_integers).collect();
        let shift = if seed == 0 {
            None
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Some((0..dimension).map(|_| rng.gen::<f64>()).collect())
        };
        Ok(SobolStream {
            dimension,
            next_index: 0,
            directions,
            shift,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn next_index(&self) -> u64 {
        self.next_index
    }

    /// The next point of the sequence, each coordinate in [0,1).
    pub fn next_point(&mut self) -> Vec<f64> {
        let n = self.next_index;
        self.next_index += 1;
        (0..self.dimension)
            .map(|j| {
                let mut bits = 0u32;
                let mut idx = n;
                let mut k = 0;
                while idx != 0 {
                    if idx & 1 == 1 {
                        bits ^= self.directions[j][k];
                    }
                    idx >>= 1;
                    k += 1;
                }
                let base = bits as f64 / (1u64 << BITS) as f64;
                match &self.shift {
                    Some(shift) => (base + shift[j]).fract(),
                    None => base,
                }
            })
            .collect()
    }

    pub fn take(&mut self, count: usize) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.next_point()).collect()
    }
}

/// A `count` x `dim` matrix of Sobol points in [0,1)^dim, deterministic in
/// (dim, count, seed).
pub fn sobol_points(dim: usize, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::InvalidConfig("Sobol count must be >= 1".into()));
    }
    Ok(SobolStream::new(dim, seed)?.take(count))
}

/// Affinely map unit-cube points into [lb_d, ub_d) per dimension.
pub fn scale_to_bounds(points: &[Vec<f64>], lb: &[f64], ub: &[f64]) -> Result<Vec<Vec<f64>>> {
    if lb.len() != ub.len() {
        return Err(Error::DimensionMismatch {
            context: "scale_to_bounds bounds",
            expected: lb.len(),
            got: ub.len(),
        });
    }
    for (d, (&l, &u)) in lb.iter().zip(ub).enumerate() {
        if !(l < u) {
            return Err(Error::InvalidBounds {
                index: d,
                lb: l,
                ub: u,
            });
        }
    }
    points
        .iter()
        .map(|p| {
            if p.len() != lb.len() {
                return Err(Error::DimensionMismatch {
                    context: "scale_to_bounds point",
                    expected: lb.len(),
                    got: p.len(),
                });
            }
            Ok(p.iter()
                .zip(lb.iter().zip(ub))
                .map(|(&x, (&l, &u))| l + x * (u - l))
                .collect())
        })
        .collect()
}
