use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;

use super::operator::{conjugate, max_abs_entry};
use super::{KrausChannel, UnitaryOp, C64, MAX_QUBITS, PURITY_TOL, STRUCTURAL_TOL};
use crate::error::{Error, Result};

/// Name of one qubit, qualified by its owner (e.g. `alice.A0`, `msg.M`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitLabel(String);

impl QubitLabel {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyLabel);
        }
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Builds a list of labels from string names.
pub fn labels(names: &[&str]) -> Result<Vec<QubitLabel>> {
    names.iter().map(|n| QubitLabel::new(*n)).collect()
}

/// Density matrix over an ordered, labeled qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    register: Vec<QubitLabel>,
    matrix: DMatrix<C64>,
}

/// Result of a projective Z measurement.
#[derive(Debug, Clone)]
pub struct Measurement {
    pub outcome: u8,
    pub probability: f64,
    pub state: QuantumState,
}

impl QuantumState {
    /// Wraps a density matrix, checking every state invariant.
    pub fn from_density(register: Vec<QubitLabel>, matrix: DMatrix<C64>) -> Result<Self> {
        check_register(&register)?;
        let dim = 1usize << register.len();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: matrix.nrows(),
            });
        }
        let state = Self { register, matrix };
        state.validate()?;
        Ok(state)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) amplitude vector.
    pub fn from_pure(register: Vec<QubitLabel>, amplitudes: &[C64]) -> Result<Self> {
        check_register(&register)?;
        let dim = 1usize << register.len();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::InvalidState("zero amplitude vector".into()));
        }
        let matrix = DMatrix::from_fn(dim, dim, |r, c| {
            amplitudes[r] * amplitudes[c].conj() / (norm * norm)
        });
        Ok(Self::checked(register, matrix))
    }

    /// Computational basis state; `bits[i]` is the value of `register[i]`.
    pub fn basis(register: Vec<QubitLabel>, bits: &[u8]) -> Result<Self> {
        if bits.len() != register.len() {
            return Err(Error::DimensionMismatch {
                expected: register.len(),
                got: bits.len(),
            });
        }
        let index = bits
            .iter()
            .fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        let mut amps = vec![C64::new(0.0, 0.0); 1 << register.len()];
        amps[index] = C64::new(1.0, 0.0);
        Self::from_pure(register, &amps)
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(register: Vec<QubitLabel>) -> Result<Self> {
        check_register(&register)?;
        let dim = 1usize << register.len();
        let matrix = DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        Ok(Self::checked(register, matrix))
    }

    /// The zero-qubit state (1×1 matrix `[1]`), the unit of `tensor`.
    pub fn trivial() -> Self {
        Self {
            register: Vec::new(),
            matrix: DMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
        }
    }

    pub fn register(&self) -> &[QubitLabel] {
        &self.register
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn num_qubits(&self) -> usize {
        self.register.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn position(&self, label: &QubitLabel) -> Result<usize> {
        self.register
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn contains(&self, label: &QubitLabel) -> bool {
        self.register.contains(label)
    }

    /// Checks Hermiticity, unit trace and positive semidefiniteness.
    pub fn validate(&self) -> Result<()> {
        self.validate_cheap()?;
        let min = self.min_eigenvalue();
        if min < -STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    fn validate_cheap(&self) -> Result<()> {
        let herm = max_abs_entry(&(&self.matrix - self.matrix.adjoint()));
        if herm > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!(
                "not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.matrix.trace();
        if (tr.re - 1.0).abs() > STRUCTURAL_TOL || tr.im.abs() > STRUCTURAL_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        Ok(())
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let sym = (&self.matrix + self.matrix.adjoint()) * C64::new(0.5, 0.0);
        sym.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    // Invariant check on every constructed state in debug builds. The
    // eigenvalue test is limited to small registers so Monte Carlo runs in
    // test builds stay fast; `validate` always runs the full check.
    fn checked(register: Vec<QubitLabel>, matrix: DMatrix<C64>) -> Self {
        let state = Self { register, matrix };
        #[cfg(debug_assertions)]
        {
            if let Err(e) = state.validate_cheap() {
                panic!("state invariant violated: {e}");
            }
            if state.num_qubits() <= 3 {
                let min = state.min_eigenvalue();
                assert!(
                    min >= -STRUCTURAL_TOL,
                    "state invariant violated: eigenvalue {min:e}"
                );
            }
        }
        state
    }

    /// Kronecker product; the register is `self` followed by `other`.
    pub fn tensor(&self, other: &QuantumState) -> Result<QuantumState> {
        let seen: HashSet<&QubitLabel> = self.register.iter().collect();
        if let Some(dup) = other.register.iter().find(|l| seen.contains(l)) {
            return Err(Error::DuplicateLabel(dup.to_string()));
        }
        let total = self.num_qubits() + other.num_qubits();
        if total > MAX_QUBITS {
            return Err(Error::TooManyQubits(total));
        }
        let register = self
            .register
            .iter()
            .chain(&other.register)
            .cloned()
            .collect();
        Ok(Self::checked(
            register,
            self.matrix.kronecker(&other.matrix),
        ))
    }

    fn target_shifts(&self, targets: &[QubitLabel]) -> Result<Vec<usize>> {
        let n = self.num_qubits();
        let mut shifts = Vec::with_capacity(targets.len());
        for t in targets {
            let shift = n - 1 - self.position(t)?;
            if shifts.contains(&shift) {
                return Err(Error::DuplicateLabel(t.to_string()));
            }
            shifts.push(shift);
        }
        Ok(shifts)
    }

    /// `ρ ← U ρ U†` with `U` acting on `targets` (first target = most
    /// significant local qubit of `U`).
    pub fn apply_unitary(&self, u: &UnitaryOp, targets: &[QubitLabel]) -> Result<QuantumState> {
        if targets.len() != u.arity() {
            return Err(Error::ArityMismatch {
                expected: u.arity(),
                got: targets.len(),
            });
        }
        let shifts = self.target_shifts(targets)?;
        Ok(Self::checked(
            self.register.clone(),
            conjugate(&self.matrix, u.matrix(), &shifts),
        ))
    }

    /// `ρ ← Σᵢ Kᵢ ρ Kᵢ†` on `targets`.
    pub fn apply_channel(&self, ch: &KrausChannel, targets: &[QubitLabel]) -> Result<QuantumState> {
        if targets.len() != ch.arity() {
            return Err(Error::ArityMismatch {
                expected: ch.arity(),
                got: targets.len(),
            });
        }
        let shifts = self.target_shifts(targets)?;
        let dim = self.dim();
        let matrix = ch
            .operators()
            .iter()
            .fold(DMatrix::<C64>::zeros(dim, dim), |acc, k| {
                acc + conjugate(&self.matrix, k, &shifts)
            });
        Ok(Self::checked(self.register.clone(), matrix))
    }

    /// Reduced state on `keep`, in the order given by `keep`.
    pub fn partial_trace(&self, keep: &[QubitLabel]) -> Result<QuantumState> {
        if keep.is_empty() {
            return Err(Error::EmptyKeep);
        }
        let n = self.num_qubits();
        let kept_shifts = self.target_shifts(keep)?;
        let traced_shifts: Vec<usize> = (0..n).filter(|s| !kept_shifts.contains(s)).collect();

        let spread = |value: usize, shifts: &[usize]| -> usize {
            let k = shifts.len();
            shifts
                .iter()
                .enumerate()
                .filter(|(j, _)| value >> (k - 1 - j) & 1 == 1)
                .map(|(_, s)| 1usize << s)
                .sum()
        };
        let kept: Vec<usize> = (0..1usize << keep.len())
            .map(|v| spread(v, &kept_shifts))
            .collect();
        let traced: Vec<usize> = (0..1usize << traced_shifts.len())
            .map(|v| spread(v, &traced_shifts))
            .collect();

        let out_dim = kept.len();
        let matrix = DMatrix::from_fn(out_dim, out_dim, |r, c| {
            traced
                .iter()
                .map(|t| self.matrix[(kept[r] | t, kept[c] | t)])
                .sum()
        });
        Ok(Self::checked(keep.to_vec(), matrix))
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        // Tr(ρρ) = Σ ρ_ij ρ_ji = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨ψ|ρ|ψ⟩` against a pure reference `|ψ⟩⟨ψ|`.
    pub fn fidelity(&self, reference: &QuantumState) -> Result<f64> {
        if reference.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: reference.dim(),
            });
        }
        let p = reference.purity();
        if (p - 1.0).abs() > PURITY_TOL {
            return Err(Error::NotPure(p));
        }
        // for pure σ = |ψ⟩⟨ψ|, Tr(ρσ) = ⟨ψ|ρ|ψ⟩
        let overlap: C64 = self
            .matrix
            .iter()
            .zip(reference.matrix.transpose().iter())
            .map(|(a, b)| a * b)
            .sum();
        Ok(overlap.re.clamp(0.0, 1.0))
    }

    /// Projective Z measurement of `target`, sampled with Born probabilities.
    /// The measured qubit stays in the register, collapsed.
    pub fn measure_z<R: Rng + ?Sized>(
        &self,
        target: &QubitLabel,
        rng: &mut R,
    ) -> Result<Measurement> {
        let shift = self.num_qubits() - 1 - self.position(target)?;
        let bit = 1usize << shift;
        let p0: f64 = (0..self.dim())
            .filter(|i| i & bit == 0)
            .map(|i| self.matrix[(i, i)].re)
            .sum::<f64>()
            .clamp(0.0, 1.0);
        let outcome = if rng.random::<f64>() < p0 { 0u8 } else { 1u8 };
        let probability = if outcome == 0 { p0 } else { 1.0 - p0 };
        let keep = |i: usize| (i & bit == 0) == (outcome == 0);
        let dim = self.dim();
        let matrix = DMatrix::from_fn(dim, dim, |r, c| {
            if keep(r) && keep(c) {
                self.matrix[(r, c)] / probability
            } else {
                C64::new(0.0, 0.0)
            }
        });
        Ok(Measurement {
            outcome,
            probability,
            state: Self::checked(self.register.clone(), matrix),
        })
    }

    /// Probability of reading `0` on `target`.
    pub fn prob_zero(&self, target: &QubitLabel) -> Result<f64> {
        let shift = self.num_qubits() - 1 - self.position(target)?;
        Ok((0..self.dim())
            .filter(|i| i >> shift & 1 == 0)
            .map(|i| self.matrix[(i, i)].re)
            .sum())
    }
}

fn check_register(register: &[QubitLabel]) -> Result<()> {
    if register.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits(register.len()));
    }
    let mut seen = HashSet::new();
    for l in register {
        if !seen.insert(l) {
            return Err(Error::DuplicateLabel(l.to_string()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{bell_state, gates, BellKind};
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn l(name: &str) -> QubitLabel {
        QubitLabel::new(name).unwrap()
    }

    fn assert_matrix_eq(a: &DMatrix<C64>, b: &DMatrix<C64>, tol: f64) {
        assert_eq!(a.shape(), b.shape());
        assert!(max_abs_entry(&(a - b)) <= tol, "{a}\n!=\n{b}");
    }

    #[test]
    fn empty_label_rejected() {
        assert_eq!(QubitLabel::new(""), Err(Error::EmptyLabel));
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = QuantumState::basis(vec![l("a")], &[0]).unwrap();
        let b = QuantumState::basis(vec![l("b")], &[1]).unwrap();
        let ab = a.tensor(&b).unwrap();
        let expected = QuantumState::basis(labels(&["a", "b"]).unwrap(), &[0, 1]).unwrap();
        assert_eq!(ab.register(), expected.register());
        assert_matrix_eq(ab.matrix(), expected.matrix(), 0.0);
        assert_abs_diff_eq!(ab.matrix()[(1, 1)].re, 1.0);
    }

    #[test]
    fn tensor_with_trivial_is_identity() {
        let rho = QuantumState::maximally_mixed(vec![l("a")]).unwrap();
        assert_eq!(rho.tensor(&QuantumState::trivial()).unwrap(), rho);
        assert_eq!(QuantumState::trivial().tensor(&rho).unwrap(), rho);
    }

    #[test]
    fn tensor_names_duplicate_label() {
        let a = QuantumState::basis(vec![l("a")], &[0]).unwrap();
        assert_eq!(a.tensor(&a), Err(Error::DuplicateLabel("a".into())));
    }

    #[test]
    fn register_cap_enforced() {
        let names: Vec<String> = (0..9).map(|i| format!("q{i}")).collect();
        let reg: Vec<QubitLabel> = names.iter().map(|n| l(n)).collect();
        assert_eq!(
            QuantumState::maximally_mixed(reg),
            Err(Error::TooManyQubits(9))
        );
    }

    #[test]
    fn x_flips_zero() {
        let zero = QuantumState::basis(vec![l("a")], &[0]).unwrap();
        let one = zero.apply_unitary(&gates::pauli_x(), &[l("a")]).unwrap();
        assert_abs_diff_eq!(one.matrix()[(1, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(one.matrix()[(0, 0)].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_leaves_state_unchanged() {
        let phi = bell_state(BellKind::PhiPlus, l("a"), l("b")).unwrap();
        let out = phi
            .apply_unitary(&gates::identity(2), &[l("a"), l("b")])
            .unwrap();
        assert_matrix_eq(out.matrix(), phi.matrix(), 1e-15);
    }

    #[test]
    fn unitary_errors() {
        let s = QuantumState::maximally_mixed(labels(&["a", "b"]).unwrap()).unwrap();
        assert_eq!(
            s.apply_unitary(&gates::cnot(), &[l("a")]),
            Err(Error::ArityMismatch {
                expected: 2,
                got: 1
            })
        );
        assert_eq!(
            s.apply_unitary(&gates::pauli_x(), &[l("zz")]),
            Err(Error::UnknownLabel("zz".into()))
        );
        assert_eq!(
            s.apply_unitary(&gates::cnot(), &[l("a"), l("a")]),
            Err(Error::DuplicateLabel("a".into()))
        );
    }

    #[test]
    fn partial_trace_of_bell_pairs() {
        for kind in [BellKind::PhiPlus, BellKind::PsiPlus] {
            let s = bell_state(kind, l("a"), l("b")).unwrap();
            for keep in ["a", "b"] {
                let m = s.partial_trace(&[l(keep)]).unwrap();
                assert_matrix_eq(
                    m.matrix(),
                    QuantumState::maximally_mixed(vec![l(keep)])
                        .unwrap()
                        .matrix(),
                    1e-15,
                );
            }
        }
    }

    #[test]
    fn partial_trace_respects_keep_order() {
        let s = QuantumState::basis(labels(&["a", "b", "c"]).unwrap(), &[1, 0, 1]).unwrap();
        let r = s.partial_trace(&[l("b"), l("a")]).unwrap();
        // |0⟩_b |1⟩_a → index 0b01
        assert_abs_diff_eq!(r.matrix()[(1, 1)].re, 1.0);
        assert_eq!(r.register(), &[l("b"), l("a")][..]);
    }

    #[test]
    fn partial_trace_errors() {
        let s = QuantumState::maximally_mixed(vec![l("a")]).unwrap();
        assert_eq!(s.partial_trace(&[]), Err(Error::EmptyKeep));
        assert_eq!(
            s.partial_trace(&[l("q")]),
            Err(Error::UnknownLabel("q".into()))
        );
    }

    #[test]
    fn fidelity_basics() {
        let zero = QuantumState::basis(vec![l("a")], &[0]).unwrap();
        let one = QuantumState::basis(vec![l("a")], &[1]).unwrap();
        let mixed = QuantumState::maximally_mixed(vec![l("a")]).unwrap();
        assert_abs_diff_eq!(zero.fidelity(&zero).unwrap(), 1.0);
        assert_abs_diff_eq!(zero.fidelity(&one).unwrap(), 0.0);
        let plus = QuantumState::from_pure(vec![l("a")], &[C64::new(1.0, 0.0), C64::new(0.0, 1.0)])
            .unwrap();
        assert_abs_diff_eq!(mixed.fidelity(&plus).unwrap(), 0.5, epsilon = 1e-15);
        assert!(matches!(zero.fidelity(&mixed), Err(Error::NotPure(_))));
    }

    #[test]
    fn purity_basics() {
        let mixed = QuantumState::maximally_mixed(vec![l("a")]).unwrap();
        assert_abs_diff_eq!(mixed.purity(), 0.5);
        let phi = bell_state(BellKind::PhiPlus, l("a"), l("b")).unwrap();
        assert_abs_diff_eq!(phi.purity(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn measure_deterministic_and_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let zero = QuantumState::basis(vec![l("a")], &[0]).unwrap();
        for _ in 0..20 {
            let m = zero.measure_z(&l("a"), &mut rng).unwrap();
            assert_eq!(m.outcome, 0);
            assert_abs_diff_eq!(m.probability, 1.0);
        }
        let mixed = QuantumState::maximally_mixed(vec![l("a")]).unwrap();
        let m = mixed.measure_z(&l("a"), &mut rng).unwrap();
        assert_abs_diff_eq!(m.probability, 0.5);
    }

    #[test]
    fn measure_collapses_partner() {
        let phi = bell_state(BellKind::PhiPlus, l("a"), l("b")).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [false; 2];
        for _ in 0..50 {
            let m = phi.measure_z(&l("a"), &mut rng).unwrap();
            seen[m.outcome as usize] = true;
            let b = m.state.partial_trace(&[l("b")]).unwrap();
            let expect = QuantumState::basis(vec![l("b")], &[m.outcome]).unwrap();
            assert_matrix_eq(b.matrix(), expect.matrix(), 1e-14);
            assert_abs_diff_eq!(m.probability, 0.5, epsilon = 1e-14);
        }
        assert!(seen[0] && seen[1]);
    }

    #[test]
    fn from_density_rejects_bad_matrices() {
        let reg = vec![l("a")];
        let not_herm = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(0.5, 0.0),
                C64::new(0.1, 0.0),
                C64::new(0.2, 0.0),
                C64::new(0.5, 0.0),
            ],
        );
        assert!(QuantumState::from_density(reg.clone(), not_herm).is_err());
        let negative = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.5, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-0.5, 0.0),
            ],
        );
        assert!(QuantumState::from_density(reg.clone(), negative).is_err());
        let bad_trace = DMatrix::<C64>::identity(2, 2);
        assert!(QuantumState::from_density(reg, bad_trace).is_err());
    }
}
