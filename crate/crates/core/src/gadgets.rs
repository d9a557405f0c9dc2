//! Penalty-based entanglement gadgets: truth-table penalties, projector
//! reduction pairs/trees, the register swap gadget, binary-to-Gray
//! conversion, less-than comparators, and the particle-ordering penalty.
//!
//! Every penalty here is diagonal in the computational basis, positive
//! semidefinite in units of the penalty weight, and zero exactly on its
//! documented ground space.

use crate::encoding::{decode_key, QubitLayout, Register};
use crate::pauli::{PauliSum, Projector};
use crate::problem::{Mode, ProblemSpec};
use crate::Error;

/// One boolean constraint output = f(inputs) enforced by a penalty. Kept
/// alongside the penalty so kernel states can be constructed by forward
/// propagation (each ancilla is the output of exactly one constraint, fed
/// only by base qubits or earlier outputs).
#[derive(Debug, Clone)]
pub struct TableGadget {
    pub inputs: Vec<usize>,
    pub output: usize,
    /// Row `v` holds f(v) with input j at bit j.
    pub table: Vec<bool>,
}

impl TableGadget {
    pub fn eval(&self, state: u64) -> bool {
        let mut row = 0u64;
        for (j, &q) in self.inputs.iter().enumerate() {
            row |= (state >> q & 1) << j;
        }
        self.table[row as usize]
    }
}

/// Sets each constraint's output bit from its inputs, in emission order.
pub fn propagate_tables(tables: &[TableGadget], mut state: u64) -> u64 {
    for t in tables {
        state &= !(1u64 << t.output);
        if t.eval(state) {
            state |= 1u64 << t.output;
        }
    }
    state
}

/// A penalty term plus the ancillas it allocated and the boolean
/// constraints it enforces.
#[derive(Debug, Clone)]
pub struct GadgetEmission {
    /// Unit-weight penalty; callers scale by Q.
    pub penalty: PauliSum,
    pub ancillas: Vec<usize>,
    /// Qubit holding the gadget's boolean result, when it has one.
    pub output_qubit: Option<usize>,
    pub tables: Vec<TableGadget>,
}

impl GadgetEmission {
    fn penalty_only(penalty: PauliSum) -> Self {
        GadgetEmission { penalty, ancillas: Vec::new(), output_qubit: None, tables: Vec::new() }
    }

    fn absorb(&mut self, other: GadgetEmission) {
        self.penalty.add_assign(&other.penalty);
        self.ancillas.extend(other.ancillas);
        self.tables.extend(other.tables);
    }
}

/// Penalty forcing `output` to equal the boolean function `f` of the input
/// qubits: one projector per disagreeing (input row, output value), so the
/// eigenvalue is 0 exactly when output == f(inputs) and >= 1 otherwise.
pub fn truth_table_penalty(
    inputs: &[usize],
    output: usize,
    f: impl Fn(u64) -> bool,
) -> (PauliSum, TableGadget) {
    let k = inputs.len();
    let mut penalty = PauliSum::zero();
    let mut table = Vec::with_capacity(1 << k);
    for row in 0..(1u64 << k) {
        let value = f(row);
        table.push(value);
        let assignments = inputs
            .iter()
            .enumerate()
            .map(|(j, &q)| (q, (row >> j) & 1 == 1))
            .chain([(output, !value)]);
        penalty.add_assign(&Projector::new(assignments).expand());
    }
    (penalty, TableGadget { inputs: inputs.to_vec(), output, table })
}

fn table_emission(
    inputs: &[usize],
    output: usize,
    f: impl Fn(u64) -> bool,
) -> GadgetEmission {
    let (penalty, table) = truth_table_penalty(inputs, output, f);
    GadgetEmission {
        penalty,
        ancillas: Vec::new(),
        output_qubit: Some(output),
        tables: vec![table],
    }
}

/// Table-I pair reduction: ancilla tracks whether either input mismatches
/// its target bit. Output 0-state marks "both inputs match".
pub fn reduce_projector_pair_targeted(
    layout: &mut QubitLayout,
    i: usize,
    j: usize,
    target_i: bool,
    target_j: bool,
) -> Result<GadgetEmission, Error> {
    if i == j {
        return Err(Error::InvalidArgument("projector pair needs distinct qubits".into()));
    }
    let anc = layout.alloc(Register::GadgetAnc, i, j, 0);
    let mut em = table_emission(&[i, j], anc, |row| {
        (row & 1 == 1) != target_i || (row >> 1 & 1 == 1) != target_j
    });
    em.ancillas.push(anc);
    Ok(em)
}

/// Pair reduction against the all-zero target (the eight-row truth table
/// whose ancilla marks "some input set").
pub fn reduce_projector_pair(
    layout: &mut QubitLayout,
    i: usize,
    j: usize,
) -> Result<GadgetEmission, Error> {
    reduce_projector_pair_targeted(layout, i, j, false, false)
}

/// Bottom-up reduction of a multi-qubit projector: the output qubit's
/// 0-state marks "all qubits equal their target bits". Allocates
/// |qubits| - 1 ancillas in ceil(log2 |qubits|) layers.
pub fn reduce_projector_tree(
    layout: &mut QubitLayout,
    qubits: &[usize],
    target: &[bool],
) -> Result<GadgetEmission, Error> {
    if qubits.len() < 2 {
        return Err(Error::InvalidArgument("projector tree needs >= 2 qubits".into()));
    }
    if qubits.len() != target.len() {
        return Err(Error::InvalidArgument("projector tree target length mismatch".into()));
    }
    // nodes are (qubit, matched-value): a node is violated when its qubit
    // differs from that value
    let mut nodes: Vec<(usize, bool)> =
        qubits.iter().copied().zip(target.iter().copied()).collect();
    let mut em = GadgetEmission::penalty_only(PauliSum::zero());
    while nodes.len() > 1 {
        let mut next = Vec::new();
        for chunk in nodes.chunks(2) {
            if chunk.len() == 1 {
                next.push(chunk[0]);
                continue;
            }
            let (q1, m1) = chunk[0];
            let (q2, m2) = chunk[1];
            let anc = layout.alloc(Register::GadgetAnc, q1, q2, 0);
            // ancilla = 1 iff either child is violated
            em.absorb(table_emission(&[q1, q2], anc, move |row| {
                (row & 1 == 1) != m1 || (row >> 1 & 1 == 1) != m2
            }));
            em.ancillas.push(anc);
            next.push((anc, false));
        }
        nodes = next;
    }
    em.output_qubit = Some(nodes[0].0);
    Ok(em)
}

/// Entangles (c, d) with the swapped contents of (a, b). The penalty is the
/// swap-conjugated projector sum chi Pi chi = I - Z_b Z_c / 2 - Z_a Z_d / 2:
/// diagonal, PSD, and zero exactly on states with c = b and d = a.
pub fn swap_gadget(a: usize, b: usize, c: usize, d: usize) -> Result<GadgetEmission, Error> {
    let qs = [a, b, c, d];
    for (u, &qu) in qs.iter().enumerate() {
        for &qv in &qs[u + 1..] {
            if qu == qv {
                return Err(Error::InvalidArgument("swap_gadget needs 4 distinct qubits".into()));
            }
        }
    }
    let chi = crate::pauli::swap_sum(a, b)?;
    let mut pi = PauliSum::zero();
    for (p, q) in [(c, a), (d, b)] {
        pi.add_assign(&Projector::new([(p, false), (q, true)]).expand());
        pi.add_assign(&Projector::new([(p, true), (q, false)]).expand());
    }
    let penalty = chi.mul(&pi).mul(&chi);
    let mut em = GadgetEmission::penalty_only(penalty);
    em.tables = vec![
        TableGadget { inputs: vec![b], output: c, table: vec![false, true] },
        TableGadget { inputs: vec![a], output: d, table: vec![false, true] },
    ];
    Ok(em)
}

/// Forces g_reg to hold the Gray code of b_reg: for each lower bit a
/// truth-table penalty on (b_i, b_{i+1}) -> g_i = b_i xor b_{i+1}, plus the
/// top-bit equality g_{n-1} = b_{n-1}.
pub fn binary_to_brgc_gadget(b_reg: &[usize], g_reg: &[usize]) -> Result<GadgetEmission, Error> {
    let n = b_reg.len();
    if n != g_reg.len() || n == 0 {
        return Err(Error::InvalidArgument(
            "conversion registers must match and be nonempty".into(),
        ));
    }
    for &b in b_reg {
        if g_reg.contains(&b) {
            return Err(Error::InvalidArgument("conversion registers must be disjoint".into()));
        }
    }
    let mut em = GadgetEmission::penalty_only(PauliSum::zero());
    for i in 0..n - 1 {
        em.absorb(table_emission(&[b_reg[i], b_reg[i + 1]], g_reg[i], |row| {
            (row & 1) ^ (row >> 1 & 1) == 1
        }));
    }
    em.absorb(table_emission(&[b_reg[n - 1]], g_reg[n - 1], |row| row & 1 == 1));
    em.output_qubit = None;
    Ok(em)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComparatorMode {
    Serial,
    Tree,
}

impl ComparatorMode {
    pub fn parse(s: &str) -> Result<Self, Error> {
        match s {
            "serial" => Ok(ComparatorMode::Serial),
            "tree" => Ok(ComparatorMode::Tree),
            other => Err(Error::Config(format!("unknown comparator mode '{other}'"))),
        }
    }
}

/// Unsigned comparison a < b on equal-width registers (LSB first). The
/// output qubit's 1-state equals the comparison on every penalty-kernel
/// state.
pub fn less_than_comparator(
    layout: &mut QubitLayout,
    a_reg: &[usize],
    b_reg: &[usize],
    mode: ComparatorMode,
) -> Result<GadgetEmission, Error> {
    let m = a_reg.len();
    if m != b_reg.len() || m == 0 {
        return Err(Error::InvalidArgument(
            "comparator registers must match and be nonempty".into(),
        ));
    }
    let mut em = GadgetEmission::penalty_only(PauliSum::zero());
    let output = match mode {
        ComparatorMode::Serial => {
            // lt_i = (a_i < b_i) | (a_i == b_i) & lt_{i-1}, from the LSB up
            let mut lt = layout.alloc(Register::ComparatorAnc, 0, 0, 0);
            em.ancillas.push(lt);
            em.absorb(table_emission(&[a_reg[0], b_reg[0]], lt, |row| {
                row & 1 == 0 && row >> 1 & 1 == 1
            }));
            for i in 1..m {
                let next = layout.alloc(Register::ComparatorAnc, 0, i, 0);
                em.ancillas.push(next);
                em.absorb(table_emission(&[a_reg[i], b_reg[i], lt], next, |row| {
                    let (ai, bi, prev) = (row & 1, row >> 1 & 1, row >> 2 & 1);
                    (ai == 0 && bi == 1) || (ai == bi && prev == 1)
                }));
                lt = next;
            }
            lt
        }
        ComparatorMode::Tree => {
            let (lt, _eq) = tree_compare(layout, a_reg, b_reg, &mut em)?;
            lt
        }
    };
    em.output_qubit = Some(output);
    Ok(em)
}

/// Log-depth comparator recursion: returns (lt, eq) ancillas for a bit
/// range, combining halves as lt = lt_hi | eq_hi & lt_lo, eq = eq_hi & eq_lo.
fn tree_compare(
    layout: &mut QubitLayout,
    a_reg: &[usize],
    b_reg: &[usize],
    em: &mut GadgetEmission,
) -> Result<(usize, usize), Error> {
    let m = a_reg.len();
    if m == 1 {
        let lt = layout.alloc(Register::ComparatorAnc, a_reg[0], 0, 0);
        let eq = layout.alloc(Register::ComparatorAnc, a_reg[0], 1, 0);
        em.ancillas.extend([lt, eq]);
        em.absorb(table_emission(&[a_reg[0], b_reg[0]], lt, |row| {
            row & 1 == 0 && row >> 1 & 1 == 1
        }));
        em.absorb(table_emission(&[a_reg[0], b_reg[0]], eq, |row| row & 1 == row >> 1 & 1));
        return Ok((lt, eq));
    }
    let mid = m / 2;
    let (lt_lo, eq_lo) = tree_compare(layout, &a_reg[..mid], &b_reg[..mid], em)?;
    let (lt_hi, eq_hi) = tree_compare(layout, &a_reg[mid..], &b_reg[mid..], em)?;
    let lt = layout.alloc(Register::ComparatorAnc, a_reg[0], 2, 0);
    let eq = layout.alloc(Register::ComparatorAnc, a_reg[0], 3, 0);
    em.ancillas.extend([lt, eq]);
    em.absorb(table_emission(&[lt_hi, eq_hi, lt_lo], lt, |row| {
        row & 1 == 1 || (row >> 1 & 1 == 1 && row >> 2 & 1 == 1)
    }));
    em.absorb(table_emission(&[eq_hi, eq_lo], eq, |row| row == 0b11));
    Ok((lt, eq))
}

/// Projector onto basis states violating the strict ascending-key particle
/// order. Inline mode expands the exact diagonal on base registers with no
/// ancillas; gadget mode chains comparators on adjacent particle keys and
/// reduces their negations through a violation tree.
pub fn ordering_penalty(
    spec: &ProblemSpec,
    layout: &mut QubitLayout,
) -> Result<GadgetEmission, Error> {
    let a_cnt = spec.particles;
    if a_cnt < 2 {
        return Err(Error::InvalidArgument("ordering penalty requires A >= 2".into()));
    }
    match spec.mode {
        Mode::Inline => {
            let w = spec.bits_per_particle();
            let total = a_cnt * w;
            if total > 26 {
                return Err(Error::DimensionCap { qubits: total, cap: 26 });
            }
            let mut values = vec![0.0f64; 1 << total];
            let mask = (1u64 << w) - 1;
            for (pattern, value) in values.iter_mut().enumerate() {
                let mut prev: Option<u64> = None;
                let mut ordered = true;
                for a in 0..a_cnt {
                    let key = decode_key((pattern as u64 >> (a * w)) & mask, spec)?;
                    if let Some(p) = prev {
                        if key <= p {
                            ordered = false;
                            break;
                        }
                    }
                    prev = Some(key);
                }
                if !ordered {
                    *value = 1.0;
                }
            }
            let register: Vec<usize> = (0..total).collect();
            let penalty = crate::potential::diagonal_to_zsum(&values, &register)?;
            Ok(GadgetEmission::penalty_only(penalty))
        }
        Mode::Gadget => {
            let mut em = GadgetEmission::penalty_only(PauliSum::zero());
            let mut lt_outputs = Vec::new();
            for a in 0..a_cnt - 1 {
                let block_a = layout.particle_block(a);
                let block_b = layout.particle_block(a + 1);
                let cmp =
                    less_than_comparator(layout, &block_a, &block_b, ComparatorMode::Serial)?;
                lt_outputs.push(cmp.output_qubit.unwrap());
                em.absorb(cmp);
            }
            // violated iff any adjacent comparison fails (its lt output 0)
            if lt_outputs.len() == 1 {
                em.output_qubit = Some(lt_outputs[0]);
                em.penalty
                    .add_assign(&Projector::new([(lt_outputs[0], false)]).expand());
            } else {
                let targets = vec![true; lt_outputs.len()];
                let tree = reduce_projector_tree(layout, &lt_outputs, &targets)?;
                let violated = tree.output_qubit.unwrap();
                em.absorb(tree);
                em.output_qubit = Some(violated);
                em.penalty.add_assign(&Projector::new([(violated, true)]).expand());
            }
            Ok(em)
        }
    }
}
