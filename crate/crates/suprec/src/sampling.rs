//! Measurement-matrix generators and the sampling operation `y = Ax + w`.
//!
//! All generators obey the trace normalization `E[tr(AAᵀ)] = m`: a row of the
//! matrix carries unit expected energy, so the measurement SNR is governed
//! entirely by the source power. For the i.i.d. generator this forces entry
//! variance `1/n`. The rate-sharing generator splits the coordinates into two
//! blocks measured at different per-block rates — the construction that
//! time-shares two operating points on a rate-distortion curve — and each
//! block is normalized the same way with respect to its own width.

use crate::linalg::Matrix;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;
use std::io::{self, Read, Write};
use thiserror::Error;

/// Errors from matrix construction.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    /// A scalar parameter violated its documented domain.
    #[error("{what} out of domain: got {value}")]
    InvalidParameter { what: &'static str, value: f64 },
    /// The rate-sharing split left one block without any columns.
    #[error("rate-sharing split degenerate at n = {n}, λ = {lambda}: a block has no columns")]
    DegenerateSplit { n: usize, lambda: f64 },
}

/// How a matrix was generated, with the structural data needed to interpret
/// it afterwards.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixKind {
    /// Entries i.i.d. `N(0, 1/n)`.
    IidGaussian,
    /// Block-diagonal pair of i.i.d. Gaussian blocks, columns permuted
    /// uniformly at random.
    RateSharing {
        lambda: f64,
        rho1: f64,
        rho2: f64,
        /// Rows `0..block1_rows` belong to block 1.
        block1_rows: usize,
        /// Columns of the assembled matrix that belong to block 1 (sorted).
        block1_columns: Vec<usize>,
    },
}

/// A generated measurement matrix.
#[derive(Debug, Clone)]
pub struct SamplingMatrix {
    entries: Matrix,
    kind: MatrixKind,
}

impl SamplingMatrix {
    /// Wraps explicit entries as an i.i.d.-kind matrix. Crate-internal: the
    /// harness uses it to present each rate-sharing block as the sampling
    /// matrix of its column-restricted sub-problem, and tests use it to
    /// construct adversarial instances (exact ties, duplicated columns).
    pub(crate) fn from_entries(entries: Matrix) -> SamplingMatrix {
        SamplingMatrix {
            entries,
            kind: MatrixKind::IidGaussian,
        }
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn kind(&self) -> &MatrixKind {
        &self.kind
    }

    pub fn rows(&self) -> usize {
        self.entries.rows()
    }

    pub fn cols(&self) -> usize {
        self.entries.cols()
    }

    /// Returns a copy with every column scaled to unit Euclidean norm
    /// (used by the equal-column-magnitude analyses).
    pub fn column_normalized(&self) -> SamplingMatrix {
        let (m, n) = (self.rows(), self.cols());
        let mut norms = vec![0.0f64; n];
        for i in 0..m {
            for (j, norm) in norms.iter_mut().enumerate() {
                *norm += self.entries.get(i, j).powi(2);
            }
        }
        for norm in &mut norms {
            *norm = norm.sqrt().max(f64::MIN_POSITIVE);
        }
        let entries = Matrix::from_fn(m, n, |i, j| self.entries.get(i, j) / norms[j]);
        SamplingMatrix {
            entries,
            kind: self.kind.clone(),
        }
    }
}

/// An `m × n` matrix of i.i.d. `N(0, 1/n)` entries, so that
/// `E[tr(AAᵀ)] = m` and `n·‖column‖² ~ χ²_m`.
///
/// # Panics
///
/// Requires `m, n ≥ 1`.
pub fn gaussian_matrix(m: usize, n: usize, rng: &mut impl Rng) -> SamplingMatrix {
    assert!(m >= 1 && n >= 1, "matrix dimensions must be positive");
    let sd = (1.0 / n as f64).sqrt();
    let entries = Matrix::from_fn(m, n, |_, _| {
        let z: f64 = rng.sample(StandardNormal);
        sd * z
    });
    SamplingMatrix {
        entries,
        kind: MatrixKind::IidGaussian,
    }
}

/// The rate-sharing matrix: a block-diagonal of an
/// `⌈ρ₁·⌈λn⌉⌉ × ⌈λn⌉` i.i.d. Gaussian block and an
/// `⌈ρ₂·(n−⌈λn⌉)⌉ × (n−⌈λn⌉)` one, with the columns of the assembled matrix
/// permuted uniformly at random. Each block uses entry variance equal to the
/// reciprocal of its own column count, so the trace normalization holds
/// block by block; a zero-rate block contributes no rows.
///
/// # Errors
///
/// `λ ∈ (0, 1)` and `ρ₁, ρ₂ ≥ 0` are required, the split must leave both
/// blocks at least one column, and at least one row must result.
pub fn rate_sharing_matrix(
    lambda: f64,
    rho1: f64,
    rho2: f64,
    n: usize,
    rng: &mut impl Rng,
) -> Result<SamplingMatrix, SamplingError> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(SamplingError::InvalidParameter {
            what: "rate-sharing λ",
            value: lambda,
        });
    }
    for (name, rho) in [("rate-sharing ρ1", rho1), ("rate-sharing ρ2", rho2)] {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(SamplingError::InvalidParameter {
                what: name,
                value: rho,
            });
        }
    }
    let n1 = (lambda * n as f64).ceil() as usize;
    let n2 = n - n1.min(n);
    if n1 == 0 || n2 == 0 {
        return Err(SamplingError::DegenerateSplit { n, lambda });
    }
    let m1 = (rho1 * n1 as f64).ceil() as usize;
    let m2 = (rho2 * n2 as f64).ceil() as usize;
    if m1 + m2 == 0 {
        return Err(SamplingError::InvalidParameter {
            what: "rate-sharing total rows",
            value: 0.0,
        });
    }
    // Uniform assignment of matrix columns to block-internal columns:
    // column j of A holds block column σ(j).
    let mut sigma: Vec<usize> = (0..n).collect();
    sigma.shuffle(rng);
    let (sd1, sd2) = ((1.0 / n1 as f64).sqrt(), (1.0 / n2 as f64).sqrt());
    let m = m1 + m2;
    let mut entries = Matrix::zeros(m, n);
    for (j, &s) in sigma.iter().enumerate() {
        if s < n1 {
            for i in 0..m1 {
                let z: f64 = rng.sample(StandardNormal);
                entries.set(i, j, sd1 * z);
            }
        } else {
            for i in m1..m {
                let z: f64 = rng.sample(StandardNormal);
                entries.set(i, j, sd2 * z);
            }
        }
    }
    let mut block1_columns: Vec<usize> =
        (0..n).filter(|&j| sigma[j] < n1).collect();
    block1_columns.sort_unstable();
    Ok(SamplingMatrix {
        entries,
        kind: MatrixKind::RateSharing {
            lambda,
            rho1,
            rho2,
            block1_rows: m1,
            block1_columns,
        },
    })
}

/// Noise handling for [`measure`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// `w` i.i.d. standard normal — the model's operating condition.
    Standard,
    /// `w = 0`; a test hook for exact-recovery checks.
    Noiseless,
}

/// Takes the samples `y = A·x + w`.
///
/// # Panics
///
/// `x.len()` must equal the column count of `a`.
pub fn measure(a: &SamplingMatrix, x: &[f64], noise: NoiseMode, rng: &mut impl Rng) -> Vec<f64> {
    assert_eq!(x.len(), a.cols(), "measure: signal length mismatch");
    let mut y = a.entries.mul_vec(x);
    if noise == NoiseMode::Standard {
        for v in &mut y {
            let w: f64 = rng.sample(StandardNormal);
            *v += w;
        }
    }
    y
}

/// Writes one trial as a self-contained binary record: a header of four
/// little-endian `u64` (`n`, `m`, `k`, `seed`) followed by `y` (`m` doubles),
/// `A` row-major (`m·n` doubles), `x` (`n` doubles), and the support indices
/// (`k` little-endian `u64`), all doubles little-endian.
pub fn dump_sample_set(
    writer: &mut impl Write,
    seed: u64,
    y: &[f64],
    a: &SamplingMatrix,
    x: &[f64],
    support: &[usize],
) -> io::Result<()> {
    let (m, n) = (a.rows(), a.cols());
    assert_eq!(y.len(), m, "dump: y length mismatch");
    assert_eq!(x.len(), n, "dump: x length mismatch");
    for header in [n as u64, m as u64, support.len() as u64, seed] {
        writer.write_all(&header.to_le_bytes())?;
    }
    for &v in y.iter().chain(a.entries.as_slice()).chain(x) {
        writer.write_all(&v.to_le_bytes())?;
    }
    for &i in support {
        writer.write_all(&(i as u64).to_le_bytes())?;
    }
    Ok(())
}

/// Parsed form of a record written by [`dump_sample_set`].
#[derive(Debug, Clone, PartialEq)]
pub struct DumpedSampleSet {
    pub n: usize,
    pub m: usize,
    pub seed: u64,
    pub y: Vec<f64>,
    pub a_row_major: Vec<f64>,
    pub x: Vec<f64>,
    pub support: Vec<usize>,
}

/// Reads back one binary trial record.
pub fn read_sample_set(reader: &mut impl Read) -> io::Result<DumpedSampleSet> {
    let mut u64_buf = [0u8; 8];
    let mut read_u64 = |r: &mut dyn Read| -> io::Result<u64> {
        r.read_exact(&mut u64_buf)?;
        Ok(u64::from_le_bytes(u64_buf))
    };
    let n = read_u64(reader)? as usize;
    let m = read_u64(reader)? as usize;
    let k = read_u64(reader)? as usize;
    let seed = read_u64(reader)?;
    let read_f64s = |r: &mut dyn Read, count: usize| -> io::Result<Vec<f64>> {
        let mut buf = [0u8; 8];
        (0..count)
            .map(|_| {
                r.read_exact(&mut buf)?;
                Ok(f64::from_le_bytes(buf))
            })
            .collect()
    };
    let y = read_f64s(reader, m)?;
    let a_row_major = read_f64s(reader, m * n)?;
    let x = read_f64s(reader, n)?;
    let mut buf = [0u8; 8];
    let support = (0..k)
        .map(|_| {
            reader.read_exact(&mut buf)?;
            Ok(u64::from_le_bytes(buf) as usize)
        })
        .collect::<io::Result<Vec<usize>>>()?;
    Ok(DumpedSampleSet {
        n,
        m,
        seed,
        y,
        a_row_major,
        x,
        support,
    })
}
