//! Independent brute-force construction of the fermionic lattice Hamiltonian
//! on the antisymmetric (ordered-tuple) basis, plus the spectral and
//! subspace comparisons that pit it against the synthesized Pauli system.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::encoding::{basis_state_index, deinterleave_key, enumerate_basis, FermionBasis};
use crate::pauli::OperatorExpr;
use crate::potential::AssembledHamiltonian;
use crate::problem::ProblemSpec;
use crate::Error;

/// Exact fermionic Hamiltonian on the ordered-tuple representative basis.
#[derive(Debug)]
pub struct OracleHamiltonian {
    pub basis: FermionBasis,
    pub matrix: DMatrix<f64>,
}

/// For each ordered tuple and each (particle, axis, +-1) torus move: skip
/// colliding targets (exclusion), otherwise reorder to the ascending
/// representative and add the permutation parity sign. The diagonal carries
/// the potential and, when enabled, the -2 D A shift.
pub fn build_oracle(spec: &ProblemSpec) -> Result<OracleHamiltonian, Error> {
    let basis = enumerate_basis(spec)?;
    let dim = basis.tuples.len();
    let index: BTreeMap<&[u64], usize> =
        basis.tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let axis_len = spec.axis_len() as u64;
    let mut matrix = DMatrix::zeros(dim, dim);
    for (col, tuple) in basis.tuples.iter().enumerate() {
        for a in 0..spec.particles {
            for d in 0..spec.dims {
                for delta in [1i64, -1] {
                    let mut point = deinterleave_key(tuple[a], spec.bits_per_axis, spec.dims);
                    point.coords[d] =
                        (point.coords[d] as i64 + delta).rem_euclid(axis_len as i64) as u64;
                    let new_key =
                        crate::encoding::interleave_key(&point, spec.bits_per_axis, spec.dims);
                    if tuple.iter().enumerate().any(|(b, &k)| b != a && k == new_key) {
                        continue; // exclusion: target site occupied
                    }
                    let old_key = tuple[a];
                    // moving one element within a sorted tuple: parity is
                    // (-1)^(number of elements passed over)
                    let passed = tuple
                        .iter()
                        .filter(|&&k| {
                            k != old_key
                                && ((old_key < k && k < new_key) || (new_key < k && k < old_key))
                        })
                        .count();
                    let sign = if passed % 2 == 0 { 1.0 } else { -1.0 };
                    let mut target: Vec<u64> = tuple.clone();
                    target[a] = new_key;
                    target.sort_unstable();
                    let row = index[target.as_slice()];
                    matrix[(row, col)] += sign * spec.kinetic_coefficient;
                }
            }
        }
        matrix[(col, col)] += oracle_diagonal(spec, tuple)?;
    }
    Ok(OracleHamiltonian { basis, matrix })
}

/// Potential value (plus optional -2DA shift) of one representative tuple.
pub fn oracle_diagonal(spec: &ProblemSpec, tuple: &[u64]) -> Result<f64, Error> {
    let axis_len = spec.axis_len() as u64;
    let mut value = 0.0;
    if spec.include_diagonal {
        value -= 2.0 * (spec.dims * spec.particles) as f64 * spec.kinetic_coefficient;
    }
    if let Some(pot) = &spec.potential {
        if let Some(ob) = &pot.one_body {
            for &k in tuple {
                let p = deinterleave_key(k, spec.bits_per_axis, spec.dims);
                value += ob.value(&p, k, axis_len);
            }
        }
        if let Some(tb) = &pot.two_body {
            for i in 0..tuple.len() {
                for j in i + 1..tuple.len() {
                    let pi = deinterleave_key(tuple[i], spec.bits_per_axis, spec.dims);
                    let pj = deinterleave_key(tuple[j], spec.bits_per_axis, spec.dims);
                    value += tb.value(&pi, &pj, tuple[i], tuple[j], axis_len);
                }
            }
        }
    }
    Ok(value)
}

/// Outcome of restricting a synthesized operator to the representative
/// subspace and comparing it entrywise with the oracle.
#[derive(Debug)]
pub struct SubspaceReport {
    pub dim: usize,
    pub max_abs_diff: f64,
    /// (row tuple, col tuple, synthesized, oracle) for entries beyond tol.
    pub discrepancies: Vec<(Vec<u64>, Vec<u64>, f64, f64)>,
}

impl SubspaceReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_abs_diff <= tol
    }
}

/// P_valid M P_valid vs the oracle matrix, entry by entry. Amplitudes sent
/// to non-representative computational states are leakage into the
/// penalized sector and are deliberately not part of the comparison.
pub fn compare_subspace(
    synth: &OperatorExpr,
    oracle: &OracleHamiltonian,
    spec: &ProblemSpec,
    tol: f64,
) -> Result<SubspaceReport, Error> {
    let dim = oracle.basis.tuples.len();
    let rep_index: BTreeMap<u64, usize> = oracle
        .basis
        .tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (basis_state_index(t, spec), i))
        .collect();
    if rep_index.len() != dim {
        return Err(Error::InvalidArgument("representative states are not distinct".into()));
    }
    let mut max_abs_diff: f64 = 0.0;
    let mut discrepancies = Vec::new();
    for (col, tuple) in oracle.basis.tuples.iter().enumerate() {
        let state = basis_state_index(tuple, spec);
        let mut column = vec![0.0; dim];
        for (target, amp) in synth.apply_to_basis(state) {
            if amp.im.abs() > tol {
                return Err(Error::NotHermitian(amp.im.abs()));
            }
            if let Some(&row) = rep_index.get(&target) {
                column[row] += amp.re;
            }
        }
        for row in 0..dim {
            let diff = (column[row] - oracle.matrix[(row, col)]).abs();
            if diff > max_abs_diff {
                max_abs_diff = diff;
            }
            if diff > tol {
                discrepancies.push((
                    oracle.basis.tuples[row].clone(),
                    tuple.clone(),
                    column[row],
                    oracle.matrix[(row, col)],
                ));
            }
        }
    }
    Ok(SubspaceReport { dim, max_abs_diff, discrepancies })
}

/// Matrix of a synthesized operator restricted to the representative
/// (ascending-tuple) subspace, dropping leakage into penalized states.
pub fn restricted_matrix(synth: &OperatorExpr, spec: &ProblemSpec) -> Result<DMatrix<f64>, Error> {
    let basis = enumerate_basis(spec)?;
    let dim = basis.tuples.len();
    let rep_index: BTreeMap<u64, usize> = basis
        .tuples
        .iter()
        .enumerate()
        .map(|(i, t)| (basis_state_index(t, spec), i))
        .collect();
    let mut m = DMatrix::zeros(dim, dim);
    for (col, tuple) in basis.tuples.iter().enumerate() {
        for (target, amp) in synth.apply_to_basis(basis_state_index(tuple, spec)) {
            if amp.im.abs() > 1e-12 {
                return Err(Error::NotReal(amp.im.abs()));
            }
            if let Some(&row) = rep_index.get(&target) {
                m[(row, col)] += amp.re;
            }
        }
    }
    Ok(m)
}

/// Sorted eigenvalues of a real symmetric matrix.
pub fn eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut vals: Vec<f64> = sym.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Eigenvalues with the squared norm of each eigenvector's projection onto
/// the valid (representative) states, sorted ascending.
pub fn eigenvalues_with_valid_weight(
    m: &DMatrix<f64>,
    rep_states: &[u64],
) -> Vec<(f64, f64)> {
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let mut out: Vec<(f64, f64)> = (0..sym.eigenvalues.len())
        .map(|i| {
            let weight: f64 =
                rep_states.iter().map(|&s| sym.eigenvectors[(s as usize, i)].powi(2)).sum();
            (sym.eigenvalues[i], weight)
        })
        .collect();
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Dense matrix of the full penalized Hamiltonian (inline mode).
pub fn penalized_matrix(asm: &AssembledHamiltonian, spec: &ProblemSpec) -> Result<DMatrix<f64>, Error> {
    asm.hamiltonian_expr().to_dense_real(asm.layout.num_qubits(), spec.cap_qubits)
}

/// Representative computational states of the valid sector.
pub fn representative_states(spec: &ProblemSpec) -> Result<Vec<u64>, Error> {
    Ok(enumerate_basis(spec)?.tuples.iter().map(|t| basis_state_index(t, spec)).collect())
}

/// Lowest-k spectrum of the penalized system with valid-sector weights.
pub fn penalized_spectrum(
    asm: &AssembledHamiltonian,
    spec: &ProblemSpec,
    k: usize,
) -> Result<Vec<(f64, f64)>, Error> {
    let m = penalized_matrix(asm, spec)?;
    let reps = representative_states(spec)?;
    let mut vals = eigenvalues_with_valid_weight(&m, &reps);
    vals.truncate(k);
    Ok(vals)
}

/// One row of the adiabatic-flow table: schedule parameter, the tracked
/// valid-sector levels, and the gap above the ground multiplet.
#[derive(Debug, Clone)]
pub struct GapFlowRow {
    pub s: f64,
    pub levels: Vec<f64>,
    pub gap: f64,
}

#[derive(Debug)]
pub struct GapFlowReport {
    pub rows: Vec<GapFlowRow>,
    /// Degeneracy of the free (s = 0) valid-sector ground multiplet.
    pub ground_multiplicity: usize,
    pub free_gap: f64,
    pub min_gap: f64,
}

impl GapFlowReport {
    pub fn table_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::from("# s levels... gap\n");
        for row in &self.rows {
            let _ = write!(out, "{:.6}", row.s);
            for l in &row.levels {
                let _ = write!(out, " {l:.9}");
            }
            let _ = writeln!(out, " {:.9}", row.gap);
        }
        out
    }
}

/// Eigenvalue curves of H(s) = T + sV restricted to valid-dominant
/// eigenvectors (valid weight >= 0.5), with the gap measured above the
/// (possibly degenerate) free ground multiplet.
pub fn gap_flow(
    kinetic_penalized: &DMatrix<f64>,
    potential: &DMatrix<f64>,
    rep_states: &[u64],
    steps: usize,
) -> Result<GapFlowReport, Error> {
    if steps < 2 {
        return Err(Error::InvalidArgument("gap_flow needs >= 2 steps".into()));
    }
    let track = rep_states.len().min(6);
    let mut rows = Vec::new();
    let mut ground_multiplicity = 1usize;
    for step in 0..steps {
        let s = step as f64 / (steps - 1) as f64;
        let h = kinetic_penalized + potential * s;
        let valid: Vec<f64> = eigenvalues_with_valid_weight(&h, rep_states)
            .into_iter()
            .filter(|&(_, w)| w >= 0.5)
            .map(|(e, _)| e)
            .take(track)
            .collect();
        if step == 0 {
            ground_multiplicity =
                valid.iter().take_while(|&&e| e - valid[0] <= 1e-8).count().max(1);
        }
        let m = ground_multiplicity;
        if valid.len() <= m {
            return Err(Error::InvalidArgument(
                "too few valid-sector levels to define a gap".into(),
            ));
        }
        let gap = valid[m] - valid[m - 1];
        rows.push(GapFlowRow { s, levels: valid, gap });
    }
    let free_gap = rows[0].gap;
    let min_gap = rows.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    Ok(GapFlowReport { rows, ground_multiplicity, free_gap, min_gap })
}

// ---- first-quantized cross-checks -----------------------------------------

/// Distinguishable-particle torus Laplacian on the full product space
/// sites^A (no diagonal), for independently validating the oracle.
pub fn first_quantized_laplacian(spec: &ProblemSpec) -> DMatrix<f64> {
    let sites = spec.num_sites();
    let dim = sites.pow(spec.particles as u32);
    let axis_len = spec.axis_len() as u64;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut keys = Vec::with_capacity(spec.particles);
        let mut rem = col;
        for _ in 0..spec.particles {
            keys.push((rem % sites) as u64);
            rem /= sites;
        }
        for a in 0..spec.particles {
            for d in 0..spec.dims {
                for delta in [1i64, -1] {
                    let mut p = deinterleave_key(keys[a], spec.bits_per_axis, spec.dims);
                    p.coords[d] =
                        (p.coords[d] as i64 + delta).rem_euclid(axis_len as i64) as u64;
                    let nk = crate::encoding::interleave_key(&p, spec.bits_per_axis, spec.dims);
                    let row = col as i64
                        + (nk as i64 - keys[a] as i64) * (sites.pow(a as u32) as i64);
                    m[(row as usize, col)] += 1.0;
                }
            }
        }
    }
    m
}

/// Pairwise potential on the product space, summed over the given particle
/// pairs.
pub fn first_quantized_pair_potential(
    spec: &ProblemSpec,
    pot: &crate::potential::TwoBody,
    pairs: &[(usize, usize)],
) -> DMatrix<f64> {
    let sites = spec.num_sites();
    let dim = sites.pow(spec.particles as u32);
    let axis_len = spec.axis_len() as u64;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut keys = Vec::with_capacity(spec.particles);
        let mut rem = col;
        for _ in 0..spec.particles {
            keys.push((rem % sites) as u64);
            rem /= sites;
        }
        let mut v = 0.0;
        for &(i, j) in pairs {
            let pi = deinterleave_key(keys[i], spec.bits_per_axis, spec.dims);
            let pj = deinterleave_key(keys[j], spec.bits_per_axis, spec.dims);
            v += pot.value(&pi, &pj, keys[i], keys[j], axis_len);
        }
        m[(col, col)] = v;
    }
    m
}

/// All permutations of 0..k with their parity signs.
fn permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<usize>::new(), (0..k).collect::<Vec<_>>())];
    while let Some((prefix, rest)) = stack.pop() {
        if rest.is_empty() {
            let mut inv = 0;
            for i in 0..prefix.len() {
                for j in i + 1..prefix.len() {
                    if prefix[i] > prefix[j] {
                        inv += 1;
                    }
                }
            }
            out.push((prefix, if inv % 2 == 0 { 1.0 } else { -1.0 }));
            continue;
        }
        for (idx, &r) in rest.iter().enumerate() {
            let mut p = prefix.clone();
            p.push(r);
            let mut rr = rest.clone();
            rr.remove(idx);
            stack.push((p, rr));
        }
    }
    out
}

/// Isometry from the antisymmetric representative basis into the full
/// product space: column t is the normalized antisymmetrized tuple t,
/// antisymmetrizing over the given particle subset (a species); particles
/// outside every listed group are untouched.
pub fn antisymmetrizer(spec: &ProblemSpec, groups: &[Vec<usize>], tuples: &[Vec<u64>]) -> DMatrix<f64> {
    let sites = spec.num_sites();
    let dim = sites.pow(spec.particles as u32);
    let mut iso = DMatrix::zeros(dim, tuples.len());
    for (t, tuple) in tuples.iter().enumerate() {
        // product of per-group permutation sums
        let mut assignments: Vec<(Vec<u64>, f64)> = vec![(tuple.clone(), 1.0)];
        for group in groups {
            let mut next = Vec::new();
            let perms = permutations(group.len());
            for (keys, amp) in &assignments {
                for (perm, sign) in &perms {
                    let mut k2 = keys.clone();
                    for (slot, &src) in perm.iter().enumerate() {
                        k2[group[slot]] = keys[group[src]];
                    }
                    next.push((k2, amp * sign));
                }
            }
            assignments = next;
        }
        let norm = (assignments.len() as f64).sqrt();
        for (keys, amp) in assignments {
            let mut idx = 0usize;
            for (a, &k) in keys.iter().enumerate() {
                idx += (k as usize) * sites.pow(a as u32);
            }
            iso[(idx, t)] += amp / norm;
        }
    }
    iso
}

// ---- scaling audit ---------------------------------------------------------

#[derive(Debug, Clone)]
pub struct AuditRow {
    pub particles: usize,
    pub bits_per_axis: usize,
    pub dims: usize,
    pub terms: usize,
    pub max_weight: usize,
    pub ancillas: usize,
    pub qubits: usize,
}

/// Symbolic gadget-mode emission counts for one configuration.
pub fn audit_row(particles: usize, bits_per_axis: usize, dims: usize) -> Result<AuditRow, Error> {
    let spec = ProblemSpec {
        particles,
        bits_per_axis,
        dims,
        mode: crate::problem::Mode::Gadget,
        code: crate::problem::Code::BinaryGray,
        ..Default::default()
    };
    let sys = crate::emit::gadget_synthesize(&spec)?;
    Ok(AuditRow {
        particles,
        bits_per_axis,
        dims,
        terms: sys.total_terms(),
        max_weight: sys.max_weight(),
        ancillas: sys.ancilla_count(),
        qubits: sys.layout.num_qubits(),
    })
}

/// Least-squares line fit returning (slope, intercept, r_squared).
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

// ---- convenience pipeline --------------------------------------------------

/// Assembles the inline system and compares its kinetic part against the
/// oracle on the representative subspace.
pub fn verify_subspace(spec: &ProblemSpec, tol: f64) -> Result<SubspaceReport, Error> {
    let mut kinetic_spec = spec.clone();
    kinetic_spec.potential = None;
    kinetic_spec.include_diagonal = false;
    let layout = crate::encoding::QubitLayout::new(&kinetic_spec);
    let kinetic = crate::laplacian::kinetic_expr(&kinetic_spec, &layout)?;
    let oracle = build_oracle(&kinetic_spec)?;
    compare_subspace(&kinetic, &oracle, &kinetic_spec, tol)
}
