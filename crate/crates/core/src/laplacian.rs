//! Gray-code lattice Laplacians: the single-register ring recursion, its
//! directional (one-sided shift) decomposition, block swaps and cyclic
//! particle rotations, and the assembled fermionic Laplacian for D = 1, 2, 3.

use num_complex::Complex64;

use crate::encoding::QubitLayout;
use crate::pauli::{swap_sum, Branch, Letter, OperatorExpr, PauliSum, PauliTerm, Projector};
use crate::problem::{Code, ProblemSpec};
use crate::Error;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn x(q: usize) -> PauliSum {
    PauliSum::from_term(PauliTerm::single(one(), q, Letter::X))
}

/// Parity projector (I ± Z...Z)/2 over a register.
pub fn parity_projector(register: &[usize], even: bool) -> PauliSum {
    let sign = if even { 0.5 } else { -0.5 };
    let mut zz = crate::pauli::LetterMap::new();
    for &q in register {
        zz.insert(q, Letter::Z);
    }
    PauliSum::from_terms([
        PauliTerm::identity(Complex64::new(0.5, 0.0)),
        PauliTerm { coefficient: Complex64::new(sign, 0.0), letters: zz },
    ])
}

/// Ring Laplacian (no diagonal) on a Gray-coded register, by the recursion
/// L^(n) = L^(n-1) + (X_{n-1} - X_{n-2}) prod_{i<=n-3} P_i^0 with base
/// L^(2) = X_0 + X_1. `register` is least significant bit first.
pub fn brgc_laplacian_1p(n: usize, register: &[usize]) -> Result<PauliSum, Error> {
    if n < 2 {
        return Err(Error::InvalidArgument("brgc_laplacian_1p requires n >= 2".into()));
    }
    if register.len() < n {
        return Err(Error::InvalidArgument("register shorter than n".into()));
    }
    let mut sum = x(register[0]).add(&x(register[1]));
    for m in 3..=n {
        let proj = Projector::new((0..m - 2).map(|i| (register[i], false))).expand();
        let step = x(register[m - 1]).sub(&x(register[m - 2])).mul(&proj);
        sum.add_assign(&step);
    }
    Ok(sum)
}

/// One-sided cyclic shift on a Gray-coded register: maps gray(v) to
/// gray(v + sign mod 2^n). Built from the Gray-increment rule as a disjoint
/// sum of X_k times class projectors:
/// even total parity flips bit 0; otherwise the bit above the lowest set bit
/// flips; the top pattern 10..0 wraps by flipping bit n-1.
pub fn axis_shift(register: &[usize], sign: i8) -> PauliSum {
    let n = register.len();
    if n == 1 {
        return x(register[0]);
    }
    let mut up = PauliSum::zero();
    // class 0: all-bit parity even -> flip bit 0
    up.add_assign(&x(register[0]).mul(&parity_projector(register, true)));
    // class k: g_i = 0 below k-1, g_{k-1} = 1, parity of g_k.. even -> flip bit k
    for k in 1..n {
        let mut proj = Projector::new(
            (0..k - 1).map(|i| (register[i], false)).chain([(register[k - 1], true)]),
        )
        .expand();
        proj = proj.mul(&parity_projector(&register[k..], true));
        up.add_assign(&x(register[k]).mul(&proj));
    }
    // wrap: only g_{n-1} set -> flip bit n-1
    let wrap = Projector::new(
        (0..n - 1).map(|i| (register[i], false)).chain([(register[n - 1], true)]),
    )
    .expand();
    up.add_assign(&x(register[n - 1]).mul(&wrap));
    if sign > 0 {
        up
    } else {
        up.adjoint()
    }
}

/// One directional half of a particle's per-axis ring Laplacian.
#[derive(Debug, Clone)]
pub struct LaplacianPiece {
    pub particle: usize,
    pub direction: usize,
    pub sign: i8,
    pub sum: PauliSum,
}

/// Gray-coded register for (particle, axis): base qubits in brgc-direct
/// mode, the Gray copy otherwise.
pub fn gray_register(layout: &QubitLayout, a: usize, d: usize) -> Result<Vec<usize>, Error> {
    match layout.code {
        Code::BrgcDirect => Ok(layout.axis_register(a, d)),
        Code::BinaryGray => layout.gray_axis_register(a, d),
    }
}

/// All A*D*2 one-sided pieces; their sum is the distinguishable Laplacian
/// (diagonal omitted).
pub fn distinguishable_laplacian(
    spec: &ProblemSpec,
    layout: &QubitLayout,
) -> Result<Vec<LaplacianPiece>, Error> {
    let mut pieces = Vec::new();
    for a in 0..spec.particles {
        for d in 0..spec.dims {
            let register = gray_register(layout, a, d)?;
            for sign in [1i8, -1] {
                pieces.push(LaplacianPiece {
                    particle: a,
                    direction: d,
                    sign,
                    sum: axis_shift(&register, sign),
                });
            }
        }
    }
    Ok(pieces)
}

/// Swap of two equal-width qubit blocks: product of per-qubit swaps, fully
/// expanded (4^w terms).
pub fn block_swap(block_a: &[usize], block_b: &[usize]) -> Result<PauliSum, Error> {
    if block_a.len() != block_b.len() {
        return Err(Error::InvalidArgument("block_swap width mismatch".into()));
    }
    let mut prod = PauliSum::identity();
    for (&i, &j) in block_a.iter().zip(block_b) {
        prod = prod.mul(&swap_sum(i, j)?);
    }
    Ok(prod)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Handedness {
    Left,
    Right,
}

/// Two swap layers realizing a one-step cyclic rotation of k register
/// blocks. Returned as (first applied, second applied) lists of window
/// position pairs. The right rotation reverses the whole window, then
/// reverses the tail, sending contents (c_0..c_{k-1}) to (c_{k-1}, c_0, ...).
pub fn swap_layers(k: usize, handedness: Handedness) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let layer_rev_all: Vec<(usize, usize)> = (0..k / 2).map(|i| (i, k - 1 - i)).collect();
    let layer_rev_tail: Vec<(usize, usize)> = (1..=(k - 1) / 2).map(|i| (i, k - i)).collect();
    match handedness {
        Handedness::Right => (layer_rev_all, layer_rev_tail),
        Handedness::Left => (layer_rev_tail, layer_rev_all),
    }
}

/// A cyclic relabeling of particle registers over a (possibly wrapping)
/// window, kept factored as its two swap layers.
#[derive(Debug, Clone)]
pub struct RotationOperator {
    /// Particle indices in window order.
    pub window: Vec<usize>,
    pub handedness: Handedness,
    /// Operator-product order: factors[last] applies first.
    pub factors: Vec<PauliSum>,
}

/// Per-qubit swap factors of two equal-width blocks. Each factor has 4
/// terms and maps computational states to computational states, so keeping
/// them separate avoids the 4^w blowup of the expanded product while
/// multiplying out to exactly the same operator (the swaps commute).
fn block_swap_factors(block_a: &[usize], block_b: &[usize]) -> Result<Vec<PauliSum>, Error> {
    if block_a.len() != block_b.len() {
        return Err(Error::InvalidArgument("block_swap width mismatch".into()));
    }
    block_a.iter().zip(block_b).map(|(&i, &j)| swap_sum(i, j)).collect()
}

fn layer_factors(
    layout: &QubitLayout,
    window: &[usize],
    pairs: &[(usize, usize)],
) -> Result<Vec<PauliSum>, Error> {
    let mut factors = Vec::new();
    for &(i, j) in pairs {
        factors.extend(block_swap_factors(
            &layout.particle_block(window[i]),
            &layout.particle_block(window[j]),
        )?);
    }
    Ok(factors)
}

/// Rotation of the window's base-register contents by one step.
pub fn local_rotation(
    layout: &QubitLayout,
    window: &[usize],
    handedness: Handedness,
) -> Result<RotationOperator, Error> {
    if window.len() < 2 {
        return Err(Error::InvalidArgument("rotation window must span >= 2 particles".into()));
    }
    let (first, second) = swap_layers(window.len(), handedness);
    let mut factors = layer_factors(layout, window, &second)?;
    factors.extend(layer_factors(layout, window, &first)?);
    Ok(RotationOperator { window: window.to_vec(), handedness, factors })
}

/// Wrap restoration: 1 - chi_{0,1} for A = 2, 1 + (-1)^{A+1}(R_L + R_R) for
/// A > 2.
pub fn wrap_rotation(spec: &ProblemSpec, layout: &QubitLayout) -> Result<OperatorExpr, Error> {
    let a_cnt = spec.particles;
    if a_cnt < 2 {
        return Err(Error::InvalidArgument("wrap_rotation requires A >= 2".into()));
    }
    let mut expr = OperatorExpr::default();
    expr.push(one(), vec![PauliSum::identity()]);
    if a_cnt == 2 {
        let swap = block_swap_factors(&layout.particle_block(0), &layout.particle_block(1))?;
        expr.push(-one(), swap);
    } else {
        let sign = if a_cnt % 2 == 1 { one() } else { -one() };
        let window: Vec<usize> = (0..a_cnt).collect();
        for handed in [Handedness::Left, Handedness::Right] {
            let rot = local_rotation(layout, &window, handed)?;
            expr.push(sign, rot.factors);
        }
    }
    Ok(expr)
}

/// One retained local-rotation correction: hops in any direction can carry a
/// particle past up to A-2 neighbors, each such crossing fixed by a
/// window rotation of size j+1 with sign (-1)^j. Windows of size A are
/// redundant with the wrap rotation and pruned.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationPlanEntry {
    /// Number of particles hopped over.
    pub crossings: usize,
    /// Window size = crossings + 1.
    pub size: usize,
    pub retained: bool,
}

/// Which local-rotation window sizes are retained for a particle count.
pub fn rotation_plan(particles: usize) -> Vec<RotationPlanEntry> {
    (1..particles)
        .map(|j| RotationPlanEntry { crossings: j, size: j + 1, retained: j + 1 < particles })
        .collect()
}

/// The fermionic kinetic operator (ordering penalty not included): the sum
/// of directional pieces plus their window-rotation corrections, all
/// right-multiplied by the wrap rotation, then symmetrized. Symmetrization
/// leaves the action on valid representatives unchanged (both halves agree
/// with the symmetric oracle there) and guarantees hermiticity off it.
pub fn fermionic_laplacian(
    spec: &ProblemSpec,
    layout: &QubitLayout,
) -> Result<OperatorExpr, Error> {
    let a_cnt = spec.particles;
    if a_cnt < 2 {
        return Err(Error::InvalidArgument("fermionic_laplacian requires A >= 2".into()));
    }
    let wrap = wrap_rotation(spec, layout)?;
    let pieces = distinguishable_laplacian(spec, layout)?;
    let plan = rotation_plan(a_cnt);

    let mut expr = OperatorExpr::default();
    for piece in &pieces {
        let mut hop_variants: Vec<(Complex64, Vec<PauliSum>)> =
            vec![(one(), vec![piece.sum.clone()])];
        for entry in plan.iter().filter(|e| e.retained) {
            let j = entry.crossings;
            let a = piece.particle;
            // hopping up passes the next j particles; hopping down the
            // previous j. The rotation restores ascending order afterwards.
            let (window, handed): (Vec<usize>, Handedness) = if piece.sign > 0 {
                ((0..=j).map(|t| (a + t) % a_cnt).collect(), Handedness::Left)
            } else {
                ((0..=j).map(|t| (a + a_cnt - j + t) % a_cnt).collect(), Handedness::Right)
            };
            let rot = local_rotation(layout, &window, handed)?;
            let coeff = if j % 2 == 0 { one() } else { -one() };
            let mut factors = rot.factors;
            factors.push(piece.sum.clone());
            hop_variants.push((coeff, factors));
        }
        for (coeff, factors) in hop_variants {
            for wrap_branch in &wrap.branches {
                let mut fs = factors.clone();
                fs.extend(wrap_branch.factors.iter().cloned());
                expr.push(coeff * wrap_branch.coeff, fs);
            }
        }
    }
    Ok(symmetrize(&expr))
}

/// (M + M†)/2, branchwise: the adjoint of a product branch is the reversed
/// product of adjoints.
pub fn symmetrize(expr: &OperatorExpr) -> OperatorExpr {
    let mut out = OperatorExpr::default();
    for b in &expr.branches {
        out.push(b.coeff * Complex64::new(0.5, 0.0), b.factors.clone());
        let rev: Vec<PauliSum> = b.factors.iter().rev().map(|f| f.adjoint()).collect();
        out.branches.push(Branch { coeff: b.coeff.conj() * Complex64::new(0.5, 0.0), factors: rev });
    }
    out
}

/// Kinetic operator for any particle count: per-axis ring Laplacians summed
/// for A = 1, the fermionic assembly otherwise.
pub fn kinetic_expr(spec: &ProblemSpec, layout: &QubitLayout) -> Result<OperatorExpr, Error> {
    if spec.particles == 1 {
        let mut sum = PauliSum::zero();
        for d in 0..spec.dims {
            sum.add_assign(&brgc_laplacian_1p(spec.bits_per_axis, &gray_register(layout, 0, d)?)?);
        }
        Ok(OperatorExpr::from_sum(sum))
    } else {
        fermionic_laplacian(spec, layout)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::brgc_encode;
    use nalgebra::DMatrix;

    fn reg(n: usize) -> Vec<usize> {
        (0..n).collect()
    }

    #[test]
    fn base_case_is_x0_plus_x1() {
        let sum = brgc_laplacian_1p(2, &reg(2)).unwrap();
        assert_eq!(sum, x(0).add(&x(1)));
    }

    #[test]
    fn n3_unrolls_once() {
        let sum = brgc_laplacian_1p(3, &reg(3)).unwrap();
        let p0 = Projector::new([(0usize, false)]).expand();
        let expected = x(0).add(&x(1)).add(&x(2).sub(&x(1)).mul(&p0));
        assert_eq!(sum, expected);
    }

    #[test]
    fn rejects_n_below_2() {
        assert!(brgc_laplacian_1p(1, &reg(1)).is_err());
    }

    fn ring_adjacency(n: usize) -> DMatrix<f64> {
        let len = 1usize << n;
        let mut m = DMatrix::zeros(len, len);
        for v in 0..len as u64 {
            let g = brgc_encode(v, n).unwrap() as usize;
            let g_up = brgc_encode((v + 1) % len as u64, n).unwrap() as usize;
            m[(g_up, g)] += 1.0;
            m[(g, g_up)] += 1.0;
        }
        m
    }

    #[test]
    fn laplacian_matches_ring_adjacency() {
        for n in 2..=4usize {
            let m = brgc_laplacian_1p(n, &reg(n)).unwrap().to_dense_real(n, 24).unwrap();
            assert_eq!(m, ring_adjacency(n), "n={n}");
        }
    }

    #[test]
    fn axis_shift_is_gray_successor_permutation() {
        for n in 1..=5usize {
            let len = 1u64 << n;
            let shift = axis_shift(&reg(n), 1);
            for v in 0..len {
                let g = brgc_encode(v, n).unwrap();
                let g_up = brgc_encode((v + 1) % len, n).unwrap();
                let out = shift.apply_to_basis(g);
                assert_eq!(out.len(), 1, "n={n} v={v}");
                assert_eq!(out[0].0, g_up);
                assert!((out[0].1 - one()).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn shift_halves_sum_to_laplacian() {
        for n in 2..=5usize {
            let up = axis_shift(&reg(n), 1);
            let down = axis_shift(&reg(n), -1);
            assert_eq!(up.add(&down), brgc_laplacian_1p(n, &reg(n)).unwrap(), "n={n}");
        }
    }

    #[test]
    fn shift_down_is_transpose_of_up() {
        let n = 3;
        let up = axis_shift(&reg(n), 1).to_dense(n, 24).unwrap();
        let down = axis_shift(&reg(n), -1).to_dense(n, 24).unwrap();
        assert!((up.transpose() - down).iter().all(|c| c.norm() < 1e-12));
    }

    fn spec(a: usize, n: usize, dims: usize) -> ProblemSpec {
        ProblemSpec { particles: a, bits_per_axis: n, dims, ..Default::default() }
    }

    #[test]
    fn pieces_pair_into_symmetric_halves() {
        let s = spec(2, 2, 1);
        let layout = QubitLayout::new(&s);
        let pieces = distinguishable_laplacian(&s, &layout).unwrap();
        assert_eq!(pieces.len(), 4);
        for pair in pieces.chunks(2) {
            let up = pair[0].sum.to_dense(4, 24).unwrap();
            let down = pair[1].sum.to_dense(4, 24).unwrap();
            assert!((up.transpose() - down).iter().all(|c| c.norm() < 1e-12));
        }
    }

    #[test]
    fn block_swap_permutes_register_contents() {
        let s = block_swap(&[0, 1], &[2, 3]).unwrap();
        // |q1 q0> blocks: contents 2 and 1 -> swapped
        let out = s.apply_to_basis(0b01_10);
        assert_eq!(out, vec![(0b10_01, one())]);
        assert!(block_swap(&[0], &[1, 2]).is_err());
    }

    #[test]
    fn swap_layer_structure_k4() {
        let (first, second) = swap_layers(4, Handedness::Right);
        assert_eq!(first, vec![(0, 3), (1, 2)]);
        assert_eq!(second, vec![(1, 3)]);
    }

    #[test]
    fn rotations_permute_blocks() {
        // 1 qubit per block, 3 blocks
        let s = ProblemSpec { particles: 3, bits_per_axis: 1, dims: 1, ..Default::default() };
        let layout = QubitLayout::new(&s);
        let window = [0usize, 1, 2];
        for (handed, input, expected) in [
            // contents (a,b,c) = (1,0,1) -> right: (1,1,0), left: (0,1,1)
            (Handedness::Right, 0b101u64, 0b011u64),
            (Handedness::Left, 0b101, 0b110),
        ] {
            let rot = local_rotation(&layout, &window, handed).unwrap();
            let mut expr = OperatorExpr::default();
            expr.push(one(), rot.factors);
            let out = expr.apply_to_basis(input);
            assert_eq!(out, vec![(expected, one())]);
        }
    }

    #[test]
    fn window_size_2_is_single_swap() {
        let s = spec(2, 2, 1);
        let layout = QubitLayout::new(&s);
        let rot = local_rotation(&layout, &[0, 1], Handedness::Right).unwrap();
        let mut prod = PauliSum::identity();
        for f in &rot.factors {
            prod = prod.mul(f);
        }
        assert_eq!(prod, block_swap(&[0, 1], &[2, 3]).unwrap());
    }

    #[test]
    fn wrap_rotation_a2_is_one_minus_swap() {
        let s = spec(2, 2, 1);
        let layout = QubitLayout::new(&s);
        let wrap = wrap_rotation(&s, &layout).unwrap();
        let flat = wrap.expand(10_000).unwrap();
        let expected =
            PauliSum::identity().sub(&block_swap(&[0, 1], &[2, 3]).unwrap());
        assert_eq!(flat, expected);
    }

    #[test]
    fn wrap_rotation_a3_sign_is_positive() {
        let s = spec(3, 1, 1);
        let layout = QubitLayout::new(&s);
        let m = wrap_rotation(&s, &layout).unwrap().to_dense_real(3, 24).unwrap();
        // contents (0,1,1) keyed |q2 q1 q0> = 110: R_L -> (1,1,0)=011, R_R -> (1,0,1)=101
        assert!((m[(0b110, 0b110)] - 1.0).abs() < 1e-12);
        assert!((m[(0b011, 0b110)] - 1.0).abs() < 1e-12);
        assert!((m[(0b101, 0b110)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotation_plan_prunes_full_windows() {
        assert!(rotation_plan(2).iter().all(|e| !e.retained));
        let p3 = rotation_plan(3);
        assert_eq!(p3.iter().filter(|e| e.retained).count(), 1);
        assert_eq!(p3[0], RotationPlanEntry { crossings: 1, size: 2, retained: true });
    }

    #[test]
    fn fermionic_laplacian_is_hermitian_when_expanded() {
        for (a, n, dims, qubits) in [(2usize, 2usize, 1usize, 4usize), (3, 2, 1, 6), (2, 2, 2, 8)] {
            let s = spec(a, n, dims);
            let layout = QubitLayout::new(&s);
            let expr = fermionic_laplacian(&s, &layout).unwrap();
            let m = expr.to_dense(qubits, 24).unwrap();
            let diff = &m - m.adjoint();
            assert!(diff.iter().all(|c| c.norm() < 1e-10), "A={a} n={n} D={dims}");
        }
    }

    #[test]
    fn commutes_with_exchange() {
        // the distinguishable Laplacian commutes with particle exchange
        let s = spec(2, 2, 1);
        let layout = QubitLayout::new(&s);
        let mut l = PauliSum::zero();
        for p in distinguishable_laplacian(&s, &layout).unwrap() {
            l.add_assign(&p.sum);
        }
        let chi = block_swap(&[0, 1], &[2, 3]).unwrap();
        assert_eq!(l.mul(&chi), chi.mul(&l));
    }
}
