//! Parametrized triangular mesh of Mach–Zehnder interferometers (MZIs)
//! producing m-mode unitaries from phase-shifter angles, plus the fixed
//! five-mode reference unitary used throughout the test corpus.
//!
//! # Conventions (load-bearing, documented once here)
//!
//! * Each MZI cell acts on an adjacent mode pair (k, k+1) with the 2×2 block
//!
//!   ```text
//!   B(θI, θE) = i·e^{iθI/2} · [ e^{iθE}·sin(θI/2)   cos(θI/2)      ]
//!                             [ e^{iθE}·cos(θI/2)   −sin(θI/2)     ]
//!   ```
//!
//!   θI is the internal (between the two 50:50 couplers) phase, θE the
//!   external input phase. At θI = π, θE = 0 the block is diag(−1, 1): the
//!   cell is fully transmissive (identity up to per-mode phases).
//!
//! * The triangular layout for m modes is enumerated column by column
//!   starting at mode pair (0, 1): column c (1-based, c = 1..m−1) contains c
//!   cells targeting pairs (c−1, c), (c−2, c−1), …, (0, 1) in that order.
//!   Cells are numbered 1..m(m−1)/2 across columns, which is the numbering
//!   the sweep labels ("1I", "3E", …) refer to.
//!
//! * `build_unitary` composes `U = D · B_K · … · B_2 · B_1` where B_1 is the
//!   first cell applied to the light and D is the diagonal of per-mode
//!   output phases `e^{iφ}`.
//!
//! Angles may be any finite real; the matrix is exactly 2π-periodic in every
//! angle. Canonical mesh files keep angles in [0, 2π).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// One Mach–Zehnder cell: an adjacent mode pair plus its two phase angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MziCell {
    /// The two adjacent mode indices (k, k+1), 0-based.
    pub target: [usize; 2],
    /// Internal phase θI in radians.
    pub theta_internal: f64,
    /// External phase θE in radians.
    pub theta_external: f64,
}

/// Which of a cell's two angles a sweep label addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleKind {
    Internal,
    External,
}

/// Full parametrization of a triangular MZI mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshParameters {
    /// Mode count m.
    pub modes: usize,
    /// Ordered cell list; index i is cell number i+1 in sweep labels.
    pub cells: Vec<MziCell>,
    /// Final per-mode output phases φ (radians), one per mode.
    pub output_phases: Vec<f64>,
}

impl MeshParameters {
    /// The triangular cell layout for m modes: pairs in on-chip order (see
    /// the module docs), `m(m−1)/2` entries.
    pub fn triangle_layout(m: usize) -> Vec<[usize; 2]> {
        let mut pairs = Vec::with_capacity(m * (m - 1) / 2);
        for column in 1..m {
            for k in (0..column).rev() {
                pairs.push([k, k + 1]);
            }
        }
        pairs
    }

    /// Builds a full triangular mesh from per-cell angle pairs (θI, θE) in
    /// layout order plus output phases.
    pub fn full_triangle(
        m: usize,
        cell_angles: &[(f64, f64)],
        output_phases: Vec<f64>,
    ) -> Result<Self> {
        let layout = Self::triangle_layout(m);
        if cell_angles.len() != layout.len() {
            return Err(Error::Config(format!(
                "a full {m}-mode triangle needs {} cells, got {}",
                layout.len(),
                cell_angles.len()
            )));
        }
        let cells = layout
            .into_iter()
            .zip(cell_angles)
            .map(|(target, &(theta_internal, theta_external))| MziCell {
                target,
                theta_internal,
                theta_external,
            })
            .collect();
        let mesh = Self {
            modes: m,
            cells,
            output_phases,
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// A full triangle with every angle at the transmissive identity point
    /// (θI = π, θE = 0) and zero output phases.
    pub fn identity_mesh(m: usize) -> Result<Self> {
        let count = m * (m - 1) / 2;
        Self::full_triangle(m, &vec![(PI, 0.0); count], vec![0.0; m])
    }

    /// A full triangle with all angles drawn uniformly from [0, 2π),
    /// deterministically per seed. Handy as a generic working point for
    /// parameter sweeps.
    pub fn random_full_triangle(m: usize, seed: u64) -> Result<Self> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let count = m * (m - 1) / 2;
        let angles: Vec<(f64, f64)> = (0..count)
            .map(|_| (rng.gen_range(0.0..2.0 * PI), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let phases = (0..m).map(|_| rng.gen_range(0.0..2.0 * PI)).collect();
        Self::full_triangle(m, &angles, phases)
    }

    /// Structural validation: positive mode count, adjacent in-range
    /// targets, matching output-phase length, finite angles.
    pub fn validate(&self) -> Result<()> {
        if self.modes < 2 {
            return Err(Error::Config(format!(
                "a mesh needs at least 2 modes, got {}",
                self.modes
            )));
        }
        if self.output_phases.len() != self.modes {
            return Err(Error::Config(format!(
                "expected {} output phases, got {}",
                self.modes,
                self.output_phases.len()
            )));
        }
        if self.output_phases.iter().any(|p| !p.is_finite()) {
            return Err(Error::Config("non-finite output phase".into()));
        }
        for (i, cell) in self.cells.iter().enumerate() {
            let [a, b] = cell.target;
            if b != a + 1 || b >= self.modes {
                return Err(Error::Config(format!(
                    "cell {} targets ({a}, {b}); targets must be adjacent and within {} modes",
                    i + 1,
                    self.modes
                )));
            }
            if !cell.theta_internal.is_finite() || !cell.theta_external.is_finite() {
                return Err(Error::Config(format!(
                    "cell {} has a non-finite angle",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Reads mesh parameters from a JSON file.
    pub fn read_json_file(path: &Path) -> Result<Self> {
        let mesh: Self = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        mesh.validate()?;
        Ok(mesh)
    }

    /// Writes mesh parameters to a JSON file.
    pub fn write_json_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

/// The 2×2 MZI block in the module's convention.
fn mzi_block(theta_i: f64, theta_e: f64) -> [Complex64; 4] {
    let half = theta_i / 2.0;
    let lead = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, half);
    let ext = Complex64::from_polar(1.0, theta_e);
    let (s, c) = (half.sin(), half.cos());
    [lead * ext * s, lead * c, lead * ext * c, lead * -s]
}

/// Composes the mesh into its m-mode unitary: `U = D · B_K · … · B_1`.
///
/// Errors with a configuration error on malformed meshes; the result passes
/// `is_unitary` at 1e-10 by construction (product of exact 2×2 unitaries).
pub fn build_unitary(mesh: &MeshParameters) -> Result<ComplexMatrix> {
    mesh.validate()?;
    let m = mesh.modes;
    let mut u = ComplexMatrix::identity(m)?;
    for cell in &mesh.cells {
        let block = mzi_block(cell.theta_internal, cell.theta_external);
        let [k, _] = cell.target;
        // Left-multiply by the embedded block: only rows k and k+1 change.
        let mut entries = u.entries().to_vec();
        for c in 0..m {
            let top = u.get(k, c);
            let bottom = u.get(k + 1, c);
            entries[k * m + c] = block[0] * top + block[1] * bottom;
            entries[(k + 1) * m + c] = block[2] * top + block[3] * bottom;
        }
        u = ComplexMatrix::new(m, m, entries)?;
    }
    // Output phase screen.
    let mut entries = u.entries().to_vec();
    for (r, &phi) in mesh.output_phases.iter().enumerate() {
        let phase = Complex64::from_polar(1.0, phi);
        for c in 0..m {
            entries[r * m + c] *= phase;
        }
    }
    ComplexMatrix::new(m, m, entries)
}

/// Resolves a sweep label like `"3I"` or `"10E"` to (0-based cell index,
/// which angle). Cell numbers are 1-based in labels, matching the layout
/// numbering in the module docs.
pub fn mzi_cell_index(mesh: &MeshParameters, label: &str) -> Result<(usize, AngleKind)> {
    let label = label.trim();
    let (num_part, kind) = match label.char_indices().last() {
        Some((idx, 'I')) => (&label[..idx], AngleKind::Internal),
        Some((idx, 'E')) => (&label[..idx], AngleKind::External),
        _ => {
            return Err(Error::Lookup(format!(
                "label {label:?} must end in 'I' or 'E'"
            )))
        }
    };
    let k: usize = num_part
        .parse()
        .map_err(|_| Error::Lookup(format!("label {label:?} has no cell number")))?;
    if k == 0 || k > mesh.cells.len() {
        return Err(Error::Lookup(format!(
            "label {label:?} addresses cell {k}, mesh has cells 1..{}",
            mesh.cells.len()
        )));
    }
    Ok((k - 1, kind))
}

/// Returns a copy of the mesh with one labeled angle replaced.
pub fn with_angle(mesh: &MeshParameters, label: &str, angle: f64) -> Result<MeshParameters> {
    let (idx, kind) = mzi_cell_index(mesh, label)?;
    let mut out = mesh.clone();
    match kind {
        AngleKind::Internal => out.cells[idx].theta_internal = angle,
        AngleKind::External => out.cells[idx].theta_external = angle,
    }
    Ok(out)
}

/// The fixed five-mode reference unitary, entries transcribed verbatim at
/// five-decimal precision. Because of the truncation it is unitary only to
/// ~1e-5; `is_unitary(·, 1e-3)` holds, `is_unitary(·, 1e-8)` does not.
pub fn reference_u5() -> ComplexMatrix {
    #[rustfmt::skip]
    let rows: [[(f64, f64); 5]; 5] = [
        [(0.01311, 0.33011), (0.65648, 0.18793), (0.05465, 0.16879), (0.49720, 0.04980), (0.18845, 0.32849)],
        [(0.14759, 0.47792), (-0.24696, -0.23840), (0.34173, 0.03745), (0.25733, 0.55151), (-0.05311, -0.37496)],
        [(0.32357, 0.04518), (-0.10722, 0.56648), (0.50920, 0.17247), (-0.29096, -0.15241), (0.39168, -0.10264)],
        [(0.35818, -0.46781), (-0.13350, -0.15289), (-0.09973, 0.00157), (0.07696, 0.51280), (0.42931, 0.38538)],
        [(-0.31110, 0.30001), (-0.20562, 0.00389), (0.13427, -0.73030), (-0.01605, -0.05381), (0.35379, 0.30204)],
    ];
    let entries = rows
        .iter()
        .flat_map(|row| row.iter().map(|&(re, im)| Complex64::new(re, im)))
        .collect();
    ComplexMatrix::new(5, 5, entries).expect("constant matrix is well-formed")
}
