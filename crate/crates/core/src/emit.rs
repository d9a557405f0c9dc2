//! Gadget-mode emission: binary base registers with Gray copies maintained
//! by conversion penalties, comparator-chain ordering penalty, swap-gadget
//! networks materializing the wrap and window rotations in ancilla
//! registers, and hop operators applied directly to whichever register
//! carries the relevant (possibly rotated) Gray content.
//!
//! Multi-qubit projectors inside the hop operators are reduced through
//! prefix-chain ancillas so the emitted term count stays linear in the bits
//! per axis. Window rotations follow the interleaving cost model: a hop in
//! direction d crosses at most 2^d - 1 neighbors, so direction d gets
//! windows of up to that many crossings (the inline synthesizer, which is
//! the verified-exact path, instead retains every window size below the
//! particle count).

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::encoding::{QubitLayout, Register};
use crate::gadgets::{
    binary_to_brgc_gadget, ordering_penalty, swap_gadget, GadgetEmission, TableGadget,
};
use crate::laplacian::{parity_projector, swap_layers, Handedness};
use crate::pauli::{Letter, PauliSum, PauliTerm, Projector};
use crate::problem::{Code, Mode, ProblemSpec};
use crate::Error;

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

fn x(q: usize) -> PauliSum {
    PauliSum::from_term(PauliTerm::single(one(), q, Letter::X))
}

/// One hop operator applied within a register system: `sum` acts on (an
/// axis register of) one block of `blocks`; on penalty-kernel states the
/// blocks carry Gray contents of the (possibly rotated) particle positions.
#[derive(Debug, Clone)]
pub struct GadgetBranch {
    pub coeff: f64,
    pub sum: PauliSum,
    /// Per-particle register blocks, LSB first, in slot order.
    pub blocks: Vec<Vec<usize>>,
    pub label: String,
}

/// Per-gadget accounting for the emission report.
#[derive(Debug, Clone)]
pub struct GadgetReport {
    pub name: String,
    pub ancillas: usize,
    pub terms: usize,
    pub max_weight: usize,
}

/// A fully emitted gadget-mode system.
#[derive(Debug)]
pub struct GadgetSystem {
    pub layout: QubitLayout,
    pub branches: Vec<GadgetBranch>,
    /// Unit-weight sum of every penalty; scale by Q.
    pub penalty: PauliSum,
    /// Boolean constraints in propagation order; fills all ancilla and
    /// Gray-copy registers from a base-register assignment.
    pub tables: Vec<TableGadget>,
    pub reports: Vec<GadgetReport>,
}

impl GadgetSystem {
    pub fn ancilla_count(&self) -> usize {
        self.reports.iter().map(|r| r.ancillas).sum()
    }

    pub fn operator_terms(&self) -> usize {
        self.branches.iter().map(|b| b.sum.num_terms()).sum()
    }

    pub fn penalty_terms(&self) -> usize {
        self.penalty.num_terms()
    }

    pub fn total_terms(&self) -> usize {
        self.operator_terms() + self.penalty_terms()
    }

    pub fn max_weight(&self) -> usize {
        self.branches
            .iter()
            .map(|b| b.sum.max_weight())
            .chain([self.penalty.max_weight()])
            .max()
            .unwrap_or(0)
    }

    pub fn report_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        for r in &self.reports {
            let _ = writeln!(
                out,
                "{} ancillas={} terms={} max_weight={}",
                r.name, r.ancillas, r.terms, r.max_weight
            );
        }
        let _ = writeln!(
            out,
            "total qubits={} operator_terms={} penalty_terms={}",
            self.layout.num_qubits(),
            self.operator_terms(),
            self.penalty_terms()
        );
        out
    }
}

struct Builder {
    layout: QubitLayout,
    penalty: PauliSum,
    tables: Vec<TableGadget>,
    reports: Vec<GadgetReport>,
    /// prefix-chain ancillas per register: entry k (k >= 2) is a qubit
    /// whose 0-state marks "first k register bits all zero"
    chains: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl Builder {
    fn absorb(&mut self, name: &str, em: GadgetEmission) {
        self.reports.push(GadgetReport {
            name: name.to_string(),
            ancillas: em.ancillas.len(),
            terms: em.penalty.num_terms(),
            max_weight: em.penalty.max_weight(),
        });
        self.penalty.add_assign(&em.penalty);
        self.tables.extend(em.tables);
    }

    /// Qubit whose 0-state marks "register[0..k] all zero", allocating OR
    /// chain ancillas as needed. k = 1 is the raw first bit.
    fn prefix_qubit(&mut self, register: &[usize], k: usize) -> Result<usize, Error> {
        assert!(k >= 1 && k <= register.len());
        if k == 1 {
            return Ok(register[0]);
        }
        let key = register.to_vec();
        let have = self.chains.get(&key).map_or(0, |c| c.len());
        for step in have + 2..=k {
            let prev = if step == 2 {
                register[0]
            } else {
                self.chains[&key][step - 3]
            };
            let anc = self.layout.alloc(Register::GadgetAnc, register[0], step, 0);
            let (p, table) = crate::gadgets::truth_table_penalty(
                &[prev, register[step - 1]],
                anc,
                |row| row != 0,
            );
            self.absorb(
                &format!("prefix_chain q{} len {step}", register[0]),
                GadgetEmission {
                    penalty: p,
                    ancillas: vec![anc],
                    output_qubit: Some(anc),
                    tables: vec![table],
                },
            );
            self.chains.entry(key.clone()).or_default().push(anc);
        }
        Ok(self.chains[&key][k - 2])
    }

    /// Ring Laplacian on a Gray register with the recursion's projector
    /// products reduced to single prefix-chain qubits: term count linear in
    /// the register width, Pauli weight at most 2.
    fn ring_laplacian(&mut self, register: &[usize]) -> Result<PauliSum, Error> {
        let n = register.len();
        if n == 1 {
            // two-site ring: both neighbors are the other site
            return Ok(x(register[0]).scaled(Complex64::new(2.0, 0.0)));
        }
        let mut sum = x(register[0]).add(&x(register[1]));
        for m in 3..=n {
            let pq = self.prefix_qubit(register, m - 2)?;
            let proj = Projector::new([(pq, false)]).expand();
            sum.add_assign(&x(register[m - 1]).sub(&x(register[m - 2])).mul(&proj));
        }
        Ok(sum)
    }

    /// One-sided shift on a Gray register, class-decomposed with prefix
    /// qubits standing in for the all-zero projectors: O(width) terms.
    fn axis_shift(&mut self, register: &[usize], sign: i8) -> Result<PauliSum, Error> {
        let n = register.len();
        if n == 1 {
            return Ok(x(register[0]));
        }
        let mut up = PauliSum::zero();
        up.add_assign(&x(register[0]).mul(&parity_projector(register, true)));
        for k in 1..n {
            let mut proj = Projector::new([(register[k - 1], true)]).expand();
            if k >= 2 {
                let pq = self.prefix_qubit(register, k - 1)?;
                proj = proj.mul(&Projector::new([(pq, false)]).expand());
            }
            proj = proj.mul(&parity_projector(&register[k..], true));
            up.add_assign(&x(register[k]).mul(&proj));
        }
        let pq = self.prefix_qubit(register, n - 1)?;
        let wrap = Projector::new([(pq, false), (register[n - 1], true)]).expand();
        up.add_assign(&x(register[n - 1]).mul(&wrap));
        Ok(if sign > 0 { up } else { up.adjoint() })
    }

    /// Swap-gadget layer network materializing a one-step rotation of the
    /// given register blocks into fresh ancilla blocks.
    fn rotation_network(
        &mut self,
        blocks: &[Vec<usize>],
        handedness: Handedness,
        role: Register,
        label: &str,
    ) -> Result<Vec<Vec<usize>>, Error> {
        let k = blocks.len();
        let (first, second) = swap_layers(k, handedness);
        let mut current: Vec<Vec<usize>> = blocks.to_vec();
        for (layer_idx, layer) in [first, second].iter().enumerate() {
            if layer.is_empty() {
                continue;
            }
            let mut next = current.clone();
            let mut em = GadgetEmission {
                penalty: PauliSum::zero(),
                ancillas: Vec::new(),
                output_qubit: None,
                tables: Vec::new(),
            };
            for &(i, p) in layer {
                let w = current[i].len();
                let mut out_i = Vec::with_capacity(w);
                let mut out_p = Vec::with_capacity(w);
                for j in 0..w {
                    let c = self.layout.alloc(role, i, j, layer_idx);
                    let d = self.layout.alloc(role, p, j, layer_idx);
                    // c receives block p's bit, d receives block i's
                    let sg = swap_gadget(current[i][j], current[p][j], c, d)?;
                    em.penalty.add_assign(&sg.penalty);
                    em.tables.extend(sg.tables);
                    em.ancillas.extend([c, d]);
                    out_i.push(c);
                    out_p.push(d);
                }
                next[i] = out_i;
                next[p] = out_p;
            }
            self.absorb(&format!("{label} layer {layer_idx}"), em);
            current = next;
        }
        Ok(current)
    }
}

/// Retained window-rotation crossings for a hop along direction `d` in the
/// gadget-mode cost model: at most 2^d - 1, never more than A - 2.
pub fn gadget_window_crossings(particles: usize, d: usize) -> usize {
    (particles.saturating_sub(2)).min((1usize << d) - 1)
}

/// Emits the full gadget-mode system for a problem.
pub fn gadget_synthesize(spec: &ProblemSpec) -> Result<GadgetSystem, Error> {
    if spec.mode != Mode::Gadget || spec.code != Code::BinaryGray {
        return Err(Error::Config("gadget synthesis requires mode=gadget, code=binary-gray".into()));
    }
    if spec.particles < 2 {
        return Err(Error::Config("gadget synthesis requires A >= 2".into()));
    }
    let a_cnt = spec.particles;
    let mut b = Builder {
        layout: QubitLayout::new(spec),
        penalty: PauliSum::zero(),
        tables: Vec::new(),
        reports: Vec::new(),
        chains: BTreeMap::new(),
    };

    // gray copies tied to the binary base
    for a in 0..a_cnt {
        for d in 0..spec.dims {
            let b_reg = b.layout.axis_register(a, d);
            let g_reg = b.layout.gray_axis_register(a, d)?;
            let em = binary_to_brgc_gadget(&b_reg, &g_reg)?;
            b.absorb(&format!("gray_conversion a{a} d{d}"), em);
        }
    }

    // ordering penalty on the binary base registers
    let ord = ordering_penalty(spec, &mut b.layout)?;
    b.absorb("ordering", ord);

    let gray_blocks: Vec<Vec<usize>> =
        (0..a_cnt).map(|a| b.layout.gray_block(a)).collect::<Result<_, _>>()?;

    let mut branches: Vec<GadgetBranch> = Vec::new();

    // direct hops on the gray registers
    for a in 0..a_cnt {
        for d in 0..spec.dims {
            let reg = b.layout.gray_axis_register(a, d)?;
            let sum = b.ring_laplacian(&reg)?;
            branches.push(GadgetBranch {
                coeff: 1.0,
                sum,
                blocks: gray_blocks.clone(),
                label: format!("L a{a} d{d}"),
            });
        }
    }

    // wrap rotation registers and hops
    let wrap_systems: Vec<(f64, Vec<Vec<usize>>)> = if a_cnt == 2 {
        let w = b.rotation_network(&gray_blocks, Handedness::Right, Register::SwapAncR, "wrap")?;
        vec![(-1.0, w)]
    } else {
        let sign = if a_cnt % 2 == 1 { 1.0 } else { -1.0 };
        let wl =
            b.rotation_network(&gray_blocks, Handedness::Left, Register::SwapAncL, "wrap_L")?;
        let wr =
            b.rotation_network(&gray_blocks, Handedness::Right, Register::SwapAncR, "wrap_R")?;
        vec![(sign, wl), (sign, wr)]
    };
    for (coeff, blocks) in &wrap_systems {
        for slot in 0..a_cnt {
            for d in 0..spec.dims {
                let reg: Vec<usize> =
                    (0..spec.bits_per_axis).map(|i| blocks[slot][i * spec.dims + d]).collect();
                let sum = b.ring_laplacian(&reg)?;
                branches.push(GadgetBranch {
                    coeff: *coeff,
                    sum,
                    blocks: blocks.clone(),
                    label: format!("L_wrap slot{slot} d{d}"),
                });
            }
        }
    }

    // window-rotation corrections: one-sided hop pieces applied to rotated
    // copies of the window registers
    for a in 0..a_cnt {
        for d in 0..spec.dims {
            for sign in [1i8, -1] {
                for j in 1..=gadget_window_crossings(a_cnt, d) {
                    let (window, handed): (Vec<usize>, Handedness) = if sign > 0 {
                        ((0..=j).map(|t| (a + t) % a_cnt).collect(), Handedness::Left)
                    } else {
                        (
                            (0..=j).map(|t| (a + a_cnt - j + t) % a_cnt).collect(),
                            Handedness::Right,
                        )
                    };
                    let window_blocks: Vec<Vec<usize>> =
                        window.iter().map(|&p| gray_blocks[p].clone()).collect();
                    let label = format!("window a{a} d{d} s{sign} j{j}");
                    let rotated =
                        b.rotation_network(&window_blocks, handed, Register::GadgetAnc, &label)?;
                    // the hopping particle's content lands one slot over
                    let slot = match handed {
                        Handedness::Left => j,
                        Handedness::Right => 0,
                    };
                    let reg: Vec<usize> = (0..spec.bits_per_axis)
                        .map(|i| rotated[slot][i * spec.dims + d])
                        .collect();
                    // corrections enter in adjoint pairs; emit each branch
                    // pre-symmetrized so the operator passes the adjoint gate
                    let shift = b.axis_shift(&reg, sign)?;
                    let sum =
                        shift.add(&shift.adjoint()).scaled(Complex64::new(0.5, 0.0));
                    let coeff = if j % 2 == 0 { 1.0 } else { -1.0 };
                    branches.push(GadgetBranch { coeff, sum, blocks: rotated, label });
                }
            }
        }
    }

    Ok(GadgetSystem {
        layout: b.layout,
        branches,
        penalty: b.penalty,
        tables: b.tables,
        reports: b.reports,
    })
}

/// Per-axis Gray decode of an interleaved register value: bit i*D+d of
/// `value` is bit i of axis d's Gray code; the result is the plain binary
/// interleaved key.
pub fn decode_gray_block(value: u64, bits_per_axis: usize, dims: usize) -> Result<u64, Error> {
    let p = crate::encoding::deinterleave_key(value, bits_per_axis, dims);
    let coords = p
        .coords
        .iter()
        .map(|&g| crate::encoding::brgc_decode(g, bits_per_axis))
        .collect::<Result<Vec<u64>, Error>>()?;
    Ok(crate::encoding::interleave_key(
        &crate::encoding::LatticePoint { coords },
        bits_per_axis,
        dims,
    ))
}

/// Matrix of the gadget system's hop operators restricted to the penalty
/// kernel, read out through the carrier registers: each representative
/// tuple's kernel state is built by table propagation, every branch is
/// applied to it, and the moved configuration is decoded from the branch's
/// declared blocks. Targets that do not decode to a strictly ascending
/// tuple leave the representative sector and are dropped, mirroring the
/// subspace restriction of the inline operator.
pub fn kernel_restricted_matrix(
    sys: &GadgetSystem,
    spec: &ProblemSpec,
) -> Result<nalgebra::DMatrix<f64>, Error> {
    let basis = crate::encoding::enumerate_basis(spec)?;
    let dim = basis.tuples.len();
    let index: BTreeMap<&[u64], usize> =
        basis.tuples.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let nd = spec.bits_per_particle();
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for (col, tuple) in basis.tuples.iter().enumerate() {
        let mut base = 0u64;
        for (a, &k) in tuple.iter().enumerate() {
            base |= k << (a * nd);
        }
        let state = crate::gadgets::propagate_tables(&sys.tables, base);
        for branch in &sys.branches {
            for (target, amp) in branch.sum.apply_to_basis(state) {
                if amp.im.abs() > 1e-12 {
                    return Err(Error::NotReal(amp.im.abs()));
                }
                let keys: Vec<u64> = branch
                    .blocks
                    .iter()
                    .map(|block| {
                        let v = block
                            .iter()
                            .enumerate()
                            .fold(0u64, |acc, (i, &q)| acc | ((target >> q) & 1) << i);
                        decode_gray_block(v, spec.bits_per_axis, spec.dims)
                    })
                    .collect::<Result<Vec<u64>, Error>>()?;
                // only slot-order-ascending decodes stay in the
                // representative sector; rotations put legal moves there
                if keys.windows(2).any(|w| w[0] >= w[1]) {
                    continue;
                }
                if let Some(&row) = index.get(keys.as_slice()) {
                    m[(row, col)] += branch.coeff * amp.re;
                }
            }
        }
    }
    Ok(m)
}
