//! Position codes and qubit bookkeeping: binary-reflected Gray code, the
//! interleaved multi-particle bit layout, the total order on basis states,
//! and the antisymmetric (ordered-tuple) basis.

use std::fmt::Write as _;

use itertools::Itertools;

use crate::problem::{Code, ProblemSpec};
use crate::Error;

/// Gray code of `x` on `n` bits: g_{n-1} = b_{n-1}, g_i = b_i xor b_{i+1}.
pub fn brgc_encode(x: u64, n: usize) -> Result<u64, Error> {
    if x >= 1 << n {
        return Err(Error::InvalidArgument(format!("brgc_encode: {x} out of range for n={n}")));
    }
    Ok(x ^ (x >> 1))
}

/// Inverse of [`brgc_encode`].
pub fn brgc_decode(g: u64, n: usize) -> Result<u64, Error> {
    if g >= 1 << n {
        return Err(Error::InvalidArgument(format!("brgc_decode: {g} out of range for n={n}")));
    }
    let mut b = 0u64;
    let mut acc = 0u64;
    for i in (0..n).rev() {
        acc ^= (g >> i) & 1;
        b |= acc << i;
    }
    Ok(b)
}

/// A D-dimensional lattice point with coordinates in [0, 2^n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePoint {
    pub coords: Vec<u64>,
}

impl LatticePoint {
    pub fn new(coords: Vec<u64>, n: usize) -> Result<Self, Error> {
        for &c in &coords {
            if c >= 1 << n {
                return Err(Error::InvalidArgument(format!(
                    "coordinate {c} out of range for n={n}"
                )));
            }
        }
        Ok(LatticePoint { coords })
    }
}

/// Interleaved integer key: bit (i*D + d) equals bit i of coords[d], so the
/// direction index varies fastest within each bit level. Strictly monotone
/// key for the particle ordering.
pub fn interleave_key(point: &LatticePoint, n: usize, dims: usize) -> u64 {
    let mut key = 0u64;
    for (d, &c) in point.coords.iter().enumerate() {
        for i in 0..n {
            key |= ((c >> i) & 1) << (i * dims + d);
        }
    }
    key
}

/// Inverse of [`interleave_key`].
pub fn deinterleave_key(key: u64, n: usize, dims: usize) -> LatticePoint {
    let mut coords = vec![0u64; dims];
    for d in 0..dims {
        for i in 0..n {
            coords[d] |= ((key >> (i * dims + d)) & 1) << i;
        }
    }
    LatticePoint { coords }
}

/// Register blocks a qubit can belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Register {
    /// Position register q_{a,i,d}; holds binary or per-axis Gray coordinates
    /// depending on the configured code.
    Base,
    /// Gray copy of a base register, maintained by the conversion gadget.
    GrayCopy,
    /// Comparator-chain ancilla (less-than / equality / boolean stages).
    ComparatorAnc,
    /// Swap-gadget output registers for left rotations.
    SwapAncL,
    /// Swap-gadget output registers for right rotations.
    SwapAncR,
    /// Generic gadget ancilla (projector tree, boolean reductions).
    GadgetAnc,
}

impl Register {
    pub fn name(self) -> &'static str {
        match self {
            Register::Base => "base",
            Register::GrayCopy => "gray_copy",
            Register::ComparatorAnc => "comparator_anc",
            Register::SwapAncL => "swap_anc_L",
            Register::SwapAncR => "swap_anc_R",
            Register::GadgetAnc => "gadget_anc",
        }
    }
}

#[derive(Debug, Clone)]
struct LayoutEntry {
    register: Register,
    a: usize,
    i: usize,
    d: usize,
}

/// Registry mapping roles to global qubit indices. Base qubits come first
/// with q_{a,i,d} at index a*n*D + i*D + d (index 0 least significant);
/// everything else is allocated behind them through a cursor.
#[derive(Debug, Clone)]
pub struct QubitLayout {
    pub particles: usize,
    pub bits_per_axis: usize,
    pub dims: usize,
    pub code: Code,
    entries: Vec<LayoutEntry>,
}

impl QubitLayout {
    pub fn new(spec: &ProblemSpec) -> Self {
        let mut layout = QubitLayout {
            particles: spec.particles,
            bits_per_axis: spec.bits_per_axis,
            dims: spec.dims,
            code: spec.code,
            entries: Vec::new(),
        };
        for a in 0..spec.particles {
            for i in 0..spec.bits_per_axis {
                for d in 0..spec.dims {
                    layout.entries.push(LayoutEntry { register: Register::Base, a, i, d });
                }
            }
        }
        if spec.code == Code::BinaryGray {
            for a in 0..spec.particles {
                for i in 0..spec.bits_per_axis {
                    for d in 0..spec.dims {
                        layout.entries.push(LayoutEntry {
                            register: Register::GrayCopy,
                            a,
                            i,
                            d,
                        });
                    }
                }
            }
        }
        layout
    }

    pub fn num_qubits(&self) -> usize {
        self.entries.len()
    }

    fn bits_per_particle(&self) -> usize {
        self.bits_per_axis * self.dims
    }

    /// Global index of base qubit q_{a,i,d}.
    pub fn base_index(&self, a: usize, i: usize, d: usize) -> usize {
        debug_assert!(a < self.particles && i < self.bits_per_axis && d < self.dims);
        a * self.bits_per_particle() + i * self.dims + d
    }

    /// Global index of the Gray-copy qubit mirroring q_{a,i,d}.
    pub fn gray_index(&self, a: usize, i: usize, d: usize) -> Result<usize, Error> {
        if self.code != Code::BinaryGray {
            return Err(Error::InvalidArgument("layout has no gray_copy registers".into()));
        }
        Ok(self.particles * self.bits_per_particle() + self.base_index(a, i, d))
    }

    /// Base-register qubits of particle `a`, least significant first
    /// (interleaved-key bit order).
    pub fn particle_block(&self, a: usize) -> Vec<usize> {
        let w = self.bits_per_particle();
        (0..w).map(|j| a * w + j).collect()
    }

    /// Gray-copy qubits of particle `a`, least significant first.
    pub fn gray_block(&self, a: usize) -> Result<Vec<usize>, Error> {
        let w = self.bits_per_particle();
        let base = self.particles * w;
        if self.code != Code::BinaryGray {
            return Err(Error::InvalidArgument("layout has no gray_copy registers".into()));
        }
        Ok((0..w).map(|j| base + a * w + j).collect())
    }

    /// Qubits holding bit level i across axis d for particle a, i.e. the
    /// per-axis register in significance order.
    pub fn axis_register(&self, a: usize, d: usize) -> Vec<usize> {
        (0..self.bits_per_axis).map(|i| self.base_index(a, i, d)).collect()
    }

    pub fn gray_axis_register(&self, a: usize, d: usize) -> Result<Vec<usize>, Error> {
        (0..self.bits_per_axis).map(|i| self.gray_index(a, i, d)).collect()
    }

    /// Allocates one ancilla qubit with role coordinates (a=instance,
    /// i=slot within the gadget, d unused unless meaningful).
    pub fn alloc(&mut self, register: Register, a: usize, i: usize, d: usize) -> usize {
        let idx = self.entries.len();
        self.entries.push(LayoutEntry { register, a, i, d });
        idx
    }

    pub fn register_of(&self, qubit: usize) -> Option<Register> {
        self.entries.get(qubit).map(|e| e.register)
    }

    /// One line per qubit: `<global-index> <register> <a> <i> <d>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (idx, e) in self.entries.iter().enumerate() {
            let _ = writeln!(out, "{idx} {} {} {} {}", e.register.name(), e.a, e.i, e.d);
        }
        out
    }
}

/// All strictly key-ordered A-tuples of lattice points, stored as ascending
/// interleaved keys and sorted lexicographically.
#[derive(Debug, Clone)]
pub struct FermionBasis {
    pub tuples: Vec<Vec<u64>>,
}

pub fn enumerate_basis(spec: &ProblemSpec) -> Result<FermionBasis, Error> {
    let sites = spec.num_sites() as u64;
    if spec.particles > sites as usize {
        return Err(Error::InvalidArgument(format!(
            "A={} exceeds lattice size {sites}",
            spec.particles
        )));
    }
    let count = binomial(sites as usize, spec.particles);
    if count > spec.cap_basis {
        return Err(Error::BasisCap { size: count, cap: spec.cap_basis });
    }
    let tuples: Vec<Vec<u64>> =
        (0..sites).combinations(spec.particles).collect();
    Ok(FermionBasis { tuples })
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for j in 0..k {
        acc = acc * (n - j) as u128 / (j + 1) as u128;
    }
    acc as usize
}

/// Register bit pattern a single particle's key is stored under: the key
/// itself in binary mode, or the interleave of per-axis Gray codes in
/// brgc-direct mode.
pub fn encode_key(key: u64, spec: &ProblemSpec) -> u64 {
    match spec.code {
        Code::BinaryGray => key,
        Code::BrgcDirect => {
            let point = deinterleave_key(key, spec.bits_per_axis, spec.dims);
            let gray = LatticePoint {
                coords: point
                    .coords
                    .iter()
                    .map(|&c| c ^ (c >> 1))
                    .collect(),
            };
            interleave_key(&gray, spec.bits_per_axis, spec.dims)
        }
    }
}

/// Inverse of [`encode_key`].
pub fn decode_key(bits: u64, spec: &ProblemSpec) -> Result<u64, Error> {
    match spec.code {
        Code::BinaryGray => Ok(bits),
        Code::BrgcDirect => {
            let gray = deinterleave_key(bits, spec.bits_per_axis, spec.dims);
            let mut coords = Vec::with_capacity(spec.dims);
            for &g in &gray.coords {
                coords.push(brgc_decode(g, spec.bits_per_axis)?);
            }
            Ok(interleave_key(&LatticePoint { coords }, spec.bits_per_axis, spec.dims))
        }
    }
}

/// Computational basis index of an ordered tuple: each particle's encoded
/// key written into its base-register block. Gray-copy and ancilla registers
/// are left zero; callers wanting the full gadget-mode kernel state must set
/// those themselves.
pub fn basis_state_index(tuple: &[u64], spec: &ProblemSpec) -> u64 {
    let w = spec.bits_per_particle();
    let mut state = 0u64;
    for (a, &key) in tuple.iter().enumerate() {
        state |= encode_key(key, spec) << (a * w);
    }
    state
}
