use nalgebra::DMatrix;

use super::{C64, STRUCTURAL_TOL};
use crate::error::{Error, Result};

/// A unitary acting on `arity` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOp {
    arity: usize,
    matrix: DMatrix<C64>,
}

impl UnitaryOp {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        let arity = arity_of(&matrix)?;
        let dev = max_abs_entry(
            &(matrix.adjoint() * &matrix - DMatrix::identity(matrix.nrows(), matrix.ncols())),
        );
        if dev > STRUCTURAL_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(Self { arity, matrix })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }
}

/// A completely positive trace-preserving map given by its Kraus operators.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    arity: usize,
    operators: Vec<DMatrix<C64>>,
}

impl KrausChannel {
    /// Builds a channel, rejecting operator sets with `Σ K†K ≠ I`.
    pub fn new(operators: Vec<DMatrix<C64>>) -> Result<Self> {
        let first = operators.first().ok_or_else(|| {
            Error::InvalidState("channel needs at least one Kraus operator".into())
        })?;
        let arity = arity_of(first)?;
        let dim = first.nrows();
        let mut sum = DMatrix::<C64>::zeros(dim, dim);
        for k in &operators {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: k.nrows(),
                });
            }
            sum += k.adjoint() * k;
        }
        let dev = max_abs_entry(&(sum - DMatrix::identity(dim, dim)));
        if dev > STRUCTURAL_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(Self { arity, operators })
    }

    pub fn identity(arity: usize) -> Self {
        let dim = 1 << arity;
        Self {
            arity,
            operators: vec![DMatrix::identity(dim, dim)],
        }
    }

    pub fn from_unitary(u: &UnitaryOp) -> Self {
        Self {
            arity: u.arity,
            operators: vec![u.matrix.clone()],
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn operators(&self) -> &[DMatrix<C64>] {
        &self.operators
    }

    /// Largest entry of `Σ K†K − I`.
    pub fn trace_preservation_error(&self) -> f64 {
        let dim = 1 << self.arity;
        let sum = self
            .operators
            .iter()
            .fold(DMatrix::<C64>::zeros(dim, dim), |acc, k| {
                acc + k.adjoint() * k
            });
        max_abs_entry(&(sum - DMatrix::identity(dim, dim)))
    }
}

fn arity_of(m: &DMatrix<C64>) -> Result<usize> {
    let dim = m.nrows();
    if dim != m.ncols() || dim == 0 || !dim.is_power_of_two() {
        return Err(Error::InvalidState(format!(
            "operator must be a square 2^k matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}

pub(crate) fn max_abs_entry(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Basis-index offsets of the `2^k` local states for targets at the given
/// bit shifts (target 0 is the most significant local bit).
fn local_offsets(shifts: &[usize]) -> Vec<usize> {
    let k = shifts.len();
    (0..1usize << k)
        .map(|local| {
            shifts
                .iter()
                .enumerate()
                .filter(|(j, _)| local >> (k - 1 - j) & 1 == 1)
                .map(|(_, s)| 1usize << s)
                .sum()
        })
        .collect()
}

/// `(op ⊗ I) ρ (op ⊗ I)†` with `op` embedded at the given bit shifts.
pub(crate) fn conjugate(rho: &DMatrix<C64>, op: &DMatrix<C64>, shifts: &[usize]) -> DMatrix<C64> {
    let dim = rho.nrows();
    let offsets = local_offsets(shifts);
    let mask: usize = shifts.iter().map(|s| 1usize << s).sum();
    let local = offsets.len();
    let mut idx = vec![0usize; local];
    let mut gathered = vec![C64::new(0.0, 0.0); local];

    // rows: op · ρ
    let mut left = rho.clone();
    for base in (0..dim).filter(|b| b & mask == 0) {
        for (slot, off) in idx.iter_mut().zip(&offsets) {
            *slot = base | off;
        }
        for c in 0..dim {
            for (g, &r) in gathered.iter_mut().zip(&idx) {
                *g = rho[(r, c)];
            }
            for (i, &r) in idx.iter().enumerate() {
                left[(r, c)] = (0..local).map(|l| op[(i, l)] * gathered[l]).sum();
            }
        }
    }

    // columns: (op · ρ) · op†
    let mut out = left.clone();
    for base in (0..dim).filter(|b| b & mask == 0) {
        for (slot, off) in idx.iter_mut().zip(&offsets) {
            *slot = base | off;
        }
        for r in 0..dim {
            for (g, &c) in gathered.iter_mut().zip(&idx) {
                *g = left[(r, c)];
            }
            for (i, &c) in idx.iter().enumerate() {
                out[(r, c)] = (0..local).map(|l| gathered[l] * op[(i, l)].conj()).sum();
            }
        }
    }
    out
}

/// Standard gate and Pauli matrices.
pub mod gates {
    use nalgebra::DMatrix;

    use super::UnitaryOp;
    use crate::quantum::C64;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn op(dim: usize, entries: &[C64]) -> UnitaryOp {
        UnitaryOp::new(DMatrix::from_row_slice(dim, dim, entries))
            .expect("standard gate is unitary")
    }

    pub fn identity(arity: usize) -> UnitaryOp {
        let dim = 1 << arity;
        UnitaryOp::new(DMatrix::identity(dim, dim)).expect("identity is unitary")
    }

    pub fn pauli_x() -> UnitaryOp {
        op(2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
    }

    pub fn pauli_y() -> UnitaryOp {
        op(2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
    }

    pub fn pauli_z() -> UnitaryOp {
        op(2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
    }

    pub fn hadamard() -> UnitaryOp {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        op(2, &[c(h, 0.), c(h, 0.), c(h, 0.), c(-h, 0.)])
    }

    /// Rotation about Y by `theta`.
    pub fn ry(theta: f64) -> UnitaryOp {
        let (s, co) = (theta / 2.0).sin_cos();
        op(2, &[c(co, 0.), c(-s, 0.), c(s, 0.), c(co, 0.)])
    }

    /// Rotation about Z by `phi`.
    pub fn rz(phi: f64) -> UnitaryOp {
        let half = phi / 2.0;
        op(
            2,
            &[
                C64::from_polar(1.0, -half),
                c(0., 0.),
                c(0., 0.),
                C64::from_polar(1.0, half),
            ],
        )
    }

    /// Controlled-X; the first target is the control.
    pub fn cnot() -> UnitaryOp {
        let (o, l) = (c(0., 0.), c(1., 0.));
        #[rustfmt::skip]
        let m = [
            l, o, o, o,
            o, l, o, o,
            o, o, o, l,
            o, o, l, o,
        ];
        op(4, &m)
    }

    /// Controlled-Z (symmetric in its two targets).
    pub fn cz() -> UnitaryOp {
        let (o, l) = (c(0., 0.), c(1., 0.));
        #[rustfmt::skip]
        let m = [
            l, o, o, o,
            o, l, o, o,
            o, o, l, o,
            o, o, o, -l,
        ];
        op(4, &m)
    }
}
