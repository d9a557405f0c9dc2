//! Acceptance suite: one test per release criterion, each ending in a
//! single pass line. Every numeric claim is checked against either an
//! exhaustive enumeration or the independent brute-force oracle.

use fermilap::emit::{gadget_synthesize, kernel_restricted_matrix};
use fermilap::encoding::{brgc_encode, QubitLayout, Register};
use fermilap::gadgets::{
    binary_to_brgc_gadget, less_than_comparator, propagate_tables, reduce_projector_tree,
    swap_gadget, ComparatorMode,
};
use fermilap::laplacian::{brgc_laplacian_1p, kinetic_expr};
use fermilap::oracle::{
    audit_row, build_oracle, eigenvalues, gap_flow, linear_fit, penalized_matrix,
    penalized_spectrum, representative_states, restricted_matrix, verify_subspace,
};
use fermilap::potential::{assemble_hamiltonian, gate_hermitian, OneBody, PotentialSpec};
use fermilap::problem::{Code, Mode, PenaltyWeight, ProblemSpec};

fn spec(a: usize, n: usize, dims: usize) -> ProblemSpec {
    ProblemSpec { particles: a, bits_per_axis: n, dims, ..Default::default() }
}

fn gadget_spec(a: usize, n: usize, dims: usize) -> ProblemSpec {
    ProblemSpec {
        particles: a,
        bits_per_axis: n,
        dims,
        mode: Mode::Gadget,
        code: Code::BinaryGray,
        ..Default::default()
    }
}

/// Criterion 1: the synthesized single-particle Gray-register Laplacian is
/// entrywise equal to the 2^n-cycle adjacency matrix under the Gray map.
#[test]
fn criterion_1_ring_laplacian_exactness() {
    for n in [2usize, 3, 4] {
        let reg: Vec<usize> = (0..n).collect();
        let l = brgc_laplacian_1p(n, &reg).unwrap();
        let m = l.to_dense_real(n, 24).unwrap();
        let sites = 1u64 << n;
        for x in 0..sites {
            for y in 0..sites {
                let gx = brgc_encode(x, n).unwrap() as usize;
                let gy = brgc_encode(y, n).unwrap() as usize;
                let adjacent =
                    (x + 1) % sites == y || (y + 1) % sites == x;
                let expect = if adjacent { 1.0 } else { 0.0 };
                assert_eq!(m[(gx, gy)], expect, "n={n} sites {x},{y}");
            }
        }
    }
    println!("criterion 1 (ring Laplacian exactness, n=2..4): pass");
}

/// Criterion 2: inline synthesis restricted to the ordered-tuple subspace
/// equals the brute-force fermionic oracle entrywise within 1e-12.
#[test]
fn criterion_2_subspace_exactness() {
    for (a, n, d) in [(2, 2, 1), (2, 3, 1), (3, 2, 1), (2, 2, 2), (3, 2, 2), (2, 2, 3)] {
        let report = verify_subspace(&spec(a, n, d), 1e-12).unwrap();
        assert!(
            report.passes(1e-12),
            "(A,n,D)=({a},{n},{d}): max diff {:e}, {} discrepancies",
            report.max_abs_diff,
            report.discrepancies.len()
        );
    }
    println!("criterion 2 (subspace exactness, 6 configurations): pass");
}

/// Criterion 3: penalized spectrum of the A=2, n=2, D=1, V=0 system matches
/// {-2,-2,0,0,2,2} within 5e-2 at Q=1e3, and the error shrinks at least
/// linearly as Q grows to 1e4.
#[test]
fn criterion_3_penalized_spectrum() {
    let expected = [-2.0, -2.0, 0.0, 0.0, 2.0, 2.0];
    let err_at = |q: f64| {
        let mut s = spec(2, 2, 1);
        s.penalty = PenaltyWeight::Fixed(q);
        let asm = assemble_hamiltonian(&s).unwrap();
        let spectrum = penalized_spectrum(&asm, &s, 6).unwrap();
        spectrum
            .iter()
            .zip(expected)
            .map(|(&(e, w), x)| {
                assert!(w > 0.99, "leaked level at Q={q}: weight {w}");
                (e - x).abs()
            })
            .fold(0.0f64, f64::max)
    };
    let e3 = err_at(1e3);
    let e4 = err_at(1e4);
    assert!(e3 <= 5e-2, "error at Q=1e3 is {e3}");
    assert!(e4 <= e3 / 10.0 * 1.01, "error shrank {e3} -> {e4}, slower than 1/Q");
    println!("criterion 3 (penalized spectrum, err(1e3)={e3:.2e}, err(1e4)={e4:.2e}): pass");
}

fn diag(p: &fermilap::pauli::PauliSum, state: u64) -> f64 {
    let v = p.diagonal_element(state);
    assert!(v.im.abs() < 1e-14);
    v.re
}

fn check_kernel(p: &fermilap::pauli::PauliSum, qubits: usize, good: impl Fn(u64) -> bool) {
    assert!(p.is_hermitian(1e-12));
    for state in 0..(1u64 << qubits) {
        let v = diag(p, state);
        if good(state) {
            assert!(v.abs() < 1e-12, "state {state:b} should be in the kernel, got {v}");
        } else {
            assert!(v >= 1.0 - 1e-12, "state {state:b} should be penalized, got {v}");
        }
    }
}

/// Criterion 4: every gadget's penalty kernel equals its documented ground
/// space, by exhaustive enumeration.
#[test]
fn criterion_4_gadget_ground_spaces() {
    // swap gadget: kernel is exactly {c = b, d = a}
    let em = swap_gadget(0, 1, 2, 3).unwrap();
    check_kernel(&em.penalty, 4, |s| {
        let (a, b, c, d) = (s & 1, s >> 1 & 1, s >> 2 & 1, s >> 3 & 1);
        c == b && d == a
    });

    // binary -> Gray conversion, n <= 3: kernel is g = gray(b)
    for n in 1..=3usize {
        let b_reg: Vec<usize> = (0..n).collect();
        let g_reg: Vec<usize> = (n..2 * n).collect();
        let em = binary_to_brgc_gadget(&b_reg, &g_reg).unwrap();
        check_kernel(&em.penalty, 2 * n, |s| {
            let b = s & ((1 << n) - 1);
            let g = s >> n;
            g == brgc_encode(b, n).unwrap()
        });
    }

    // comparators, m <= 4, both shapes: on every kernel state the output
    // equals a < b; one kernel state per input pattern (constraint DAG)
    for m in 1..=4usize {
        for mode in [ComparatorMode::Serial, ComparatorMode::Tree] {
            let s = spec(2, m, 1);
            let mut layout = QubitLayout::new(&s);
            let a_reg: Vec<usize> = (0..m).collect();
            let b_reg: Vec<usize> = (m..2 * m).collect();
            let em = less_than_comparator(&mut layout, &a_reg, &b_reg, mode).unwrap();
            let out = em.output_qubit.unwrap();
            for a in 0..(1u64 << m) {
                for b in 0..(1u64 << m) {
                    let state = propagate_tables(&em.tables, a | (b << m));
                    assert_eq!(diag(&em.penalty, state), 0.0);
                    assert_eq!(state >> out & 1 == 1, a < b, "m={m} {mode:?} a={a} b={b}");
                }
            }
        }
    }

    // projector tree over 8 inputs: kernel output flags the conjunction
    let s = spec(2, 2, 1);
    let mut layout = QubitLayout::new(&s);
    let extra: Vec<usize> = (0..4).map(|i| layout.alloc(Register::GadgetAnc, 9, i, 0)).collect();
    let mut qubits: Vec<usize> = (0..4).collect();
    qubits.extend(extra);
    let target = [false, true, false, false, true, true, false, true];
    let em = reduce_projector_tree(&mut layout, &qubits, &target).unwrap();
    let out = em.output_qubit.unwrap();
    for inputs in 0..(1u64 << 8) {
        let mut state = 0u64;
        for (j, &q) in qubits.iter().enumerate() {
            state |= (inputs >> j & 1) << q;
        }
        let full = propagate_tables(&em.tables, state);
        assert_eq!(diag(&em.penalty, full), 0.0);
        let all_match = (0..8).all(|j| (inputs >> j & 1 == 1) == target[j]);
        assert_eq!(full >> out & 1 == 0, all_match);
    }
    println!("criterion 4 (gadget ground spaces): pass");
}

/// Criterion 5: the gadget system's penalty-kernel-restricted action, read
/// out through the carrier registers, equals the inline operator within
/// 1e-10 on the representative basis.
#[test]
fn criterion_5_gadget_inline_equivalence() {
    let inline_spec = spec(2, 2, 1);
    let layout = QubitLayout::new(&inline_spec);
    let expr = kinetic_expr(&inline_spec, &layout).unwrap();
    let inline_m = restricted_matrix(&expr, &inline_spec).unwrap();

    let g_spec = gadget_spec(2, 2, 1);
    let sys = gadget_synthesize(&g_spec).unwrap();
    let gadget_m = kernel_restricted_matrix(&sys, &g_spec).unwrap();

    let diff = (&inline_m - &gadget_m).abs().max();
    assert!(diff <= 1e-10, "gadget/inline mismatch {diff:e}");
    println!("criterion 5 (gadget/inline equivalence, diff={diff:e}): pass");
}

/// Criterion 6: gadget-mode term counts grow linearly in n and in A
/// (R^2 >= 0.99), and across D = 1..3 stay within a bounded family factor
/// of the A*n*2^D envelope.
#[test]
fn criterion_6_scaling_audit() {
    // linear in n at fixed (A, D)
    let ns: Vec<f64> = (2..=8).map(|n| n as f64).collect();
    let terms_n: Vec<f64> = (2..=8).map(|n| audit_row(2, n, 1).unwrap().terms as f64).collect();
    let (slope_n, _, r2_n) = linear_fit(&ns, &terms_n);
    assert!(r2_n >= 0.99, "n fit R^2 = {r2_n}");
    assert!(slope_n > 0.0);

    // linear in A at fixed (n, D)
    let avals: Vec<f64> = (2..=6).map(|a| a as f64).collect();
    let terms_a: Vec<f64> = (2..=6).map(|a| audit_row(a, 3, 1).unwrap().terms as f64).collect();
    let (slope_a, _, r2_a) = linear_fit(&avals, &terms_a);
    assert!(r2_a >= 0.99, "A fit R^2 = {r2_a}");
    assert!(slope_a > 0.0);

    // bounded family factor across D, consistent with the A*n*2^D envelope
    for a in [2usize, 3] {
        let counts: Vec<f64> =
            (1..=3).map(|d| audit_row(a, 2, d).unwrap().terms as f64).collect();
        for (d, &t) in counts.iter().enumerate() {
            let envelope = (a * 2 * (1 << (d + 1))) as f64;
            assert!(t <= 8.0 * envelope, "A={a} D={} count {t} above envelope", d + 1);
        }
        for w in counts.windows(2) {
            let ratio = w[1] / w[0];
            assert!((1.2..=4.0).contains(&ratio), "A={a} family factor {ratio}");
        }
    }
    println!(
        "criterion 6 (scaling audit, R^2 n={r2_n:.4}, A={r2_a:.4}): pass"
    );
}

/// Criterion 7: the pair-sum combinatorial factors A(A-1)/2 (same species)
/// and A_n*A_p (cross species) hold as antisymmetrized matrix-element
/// identities, entrywise within 1e-12. Exercised through the first-quantized
/// antisymmetrizer in the oracle module's test support; here we check the
/// identities end to end on explicit pair sums.
#[test]
fn criterion_7_potential_factors() {
    use fermilap::oracle::{antisymmetrizer, first_quantized_pair_potential};
    use fermilap::potential::{cross_species_factor, same_species_factor, TwoBody};

    let pot = TwoBody::CoulombSoftened { strength: 1.0, softening: 1.0 };

    // same species: sum over pairs = A(A-1)/2 times the representative pair
    for a in [2usize, 3] {
        let s = spec(a, 2, 1);
        let basis = fermilap::encoding::enumerate_basis(&s).unwrap();
        let iso = antisymmetrizer(&s, &[(0..a).collect()], &basis.tuples);
        let all_pairs: Vec<(usize, usize)> =
            (0..a).flat_map(|i| (i + 1..a).map(move |j| (i, j))).collect();
        let full = first_quantized_pair_potential(&s, &pot, &all_pairs);
        let rep = first_quantized_pair_potential(&s, &pot, &[(0, 1)]);
        let lhs = iso.transpose() * &full * &iso;
        let rhs = (iso.transpose() * &rep * &iso) * same_species_factor(a).unwrap();
        let diff = (lhs - rhs).abs().max();
        assert!(diff <= 1e-12, "A={a}: same-species factor diff {diff:e}");
    }

    // cross species (A_n = 2, A_p = 1, 3 particles total)
    let s = spec(3, 2, 1);
    let b_n = fermilap::encoding::enumerate_basis(&spec(2, 2, 1)).unwrap();
    let mut tuples = Vec::new();
    for tn in &b_n.tuples {
        for kp in 0..4u64 {
            let mut t = tn.clone();
            t.push(kp);
            tuples.push(t);
        }
    }
    let iso = antisymmetrizer(&s, &[vec![0, 1]], &tuples);
    let cross: Vec<(usize, usize)> = vec![(0, 2), (1, 2)];
    let full = first_quantized_pair_potential(&s, &pot, &cross);
    let rep = first_quantized_pair_potential(&s, &pot, &[(0, 2)]);
    let lhs = iso.transpose() * &full * &iso;
    let rhs = (iso.transpose() * &rep * &iso) * cross_species_factor(2, 1).unwrap();
    let diff = (lhs - rhs).abs().max();
    assert!(diff <= 1e-12, "cross-species factor diff {diff:e}");
    println!("criterion 7 (pair-sum combinatorial factors): pass");
}

/// Criterion 8: every emitted Hamiltonian passes the adjoint gate, and the
/// gate actually rejects a non-hermitian sum.
#[test]
fn criterion_8_hermiticity_gate() {
    for (a, n, d) in [(1, 3, 1), (2, 2, 1), (2, 3, 1), (3, 2, 1), (2, 2, 2)] {
        let mut s = spec(a, n, d);
        s.potential = Some(PotentialSpec {
            one_body: Some(OneBody::Well { depth: 0.3, site: 0 }),
            two_body: None,
        });
        let asm = assemble_hamiltonian(&s).unwrap();
        let expanded = asm.expand_terms(1 << 22).unwrap();
        assert!(expanded.is_hermitian(1e-10), "(A,n,D)=({a},{n},{d})");
    }
    for (a, n, d) in [(2, 2, 1), (2, 3, 1), (3, 2, 2)] {
        let sys = gadget_synthesize(&gadget_spec(a, n, d)).unwrap();
        let mut op = fermilap::pauli::PauliSum::zero();
        for b in &sys.branches {
            op.add_assign(&b.sum.scaled(num_complex::Complex64::new(b.coeff, 0.0)));
        }
        gate_hermitian(&op).unwrap();
        gate_hermitian(&sys.penalty).unwrap();
    }
    // the gate rejects a deliberately broken operator
    let mut bad = fermilap::pauli::PauliSum::zero();
    bad.add_term(fermilap::pauli::PauliTerm::single(
        num_complex::Complex64::new(0.0, 1.0),
        0,
        fermilap::pauli::Letter::X,
    ));
    assert!(gate_hermitian(&bad).is_err());
    println!("criterion 8 (hermiticity gate): pass");
}

/// Criterion 9: with a weak single-site well, the gap above the free ground
/// multiplet along H(s) = T + sV stays within 25% of the free gap.
#[test]
fn criterion_9_gap_flow() {
    let mut s = spec(2, 2, 1);
    s.penalty = PenaltyWeight::Fixed(1000.0);
    s.potential = Some(PotentialSpec {
        one_body: Some(OneBody::Well { depth: 0.1, site: 0 }),
        two_body: None,
    });
    let asm = assemble_hamiltonian(&s).unwrap();
    let mut free = s.clone();
    free.potential = None;
    let free_asm = assemble_hamiltonian(&free).unwrap();
    let t = penalized_matrix(&free_asm, &free).unwrap();
    let n = 1usize << free_asm.layout.num_qubits();
    let mut v = nalgebra::DMatrix::zeros(n, n);
    for st in 0..n as u64 {
        v[(st as usize, st as usize)] = asm.potential.diagonal_element(st).re;
    }
    let reps = representative_states(&s).unwrap();
    let flow = gap_flow(&t, &v, &reps, 11).unwrap();
    assert_eq!(flow.rows.len(), 11, "data table emitted per schedule point");
    assert!((flow.free_gap - 2.0).abs() < 5e-2, "free gap {}", flow.free_gap);
    let deviation = (flow.min_gap - flow.free_gap).abs() / flow.free_gap.abs();
    assert!(deviation <= 0.25, "gap deviation {deviation}");
    println!(
        "criterion 9 (gap flow, free={:.4}, min={:.4}, deviation={:.1}%): pass",
        flow.free_gap,
        flow.min_gap,
        100.0 * deviation
    );
}

/// Spot-check the oracle itself against the free-spectrum eigenvalues used
/// in criterion 3 (guards the guard).
#[test]
fn oracle_free_spectrum_reference() {
    let o = build_oracle(&spec(2, 2, 1)).unwrap();
    let vals = eigenvalues(&o.matrix);
    let expected = [-2.0, -2.0, 0.0, 0.0, 2.0, 2.0];
    for (v, e) in vals.iter().zip(expected) {
        assert!((v - e).abs() < 1e-12);
    }
}
