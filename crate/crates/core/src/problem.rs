//! Problem configuration shared by every synthesis stage.

use crate::potential::PotentialSpec;
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Permutation networks multiplied in symbolically; no ancillas. Used for
    /// oracle verification at desk scale.
    Inline,
    /// Rotations and the ordering projector realized through penalty gadgets
    /// on ancilla registers. Default for emission.
    Gadget,
}

impl Mode {
    pub fn parse(s: &str) -> Result<Mode, Error> {
        match s {
            "inline" => Ok(Mode::Inline),
            "gadget" => Ok(Mode::Gadget),
            other => Err(Error::Config(format!("unknown mode '{other}' (inline|gadget)"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Mode::Inline => "inline",
            Mode::Gadget => "gadget",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Code {
    /// Base registers hold binary coordinates; Gray copies are maintained by
    /// the conversion gadget. Comparisons run on binary, hops on Gray.
    BinaryGray,
    /// Base registers hold the per-axis Gray code directly; no copies. Used
    /// by inline mode so the Laplacian acts on base qubits.
    BrgcDirect,
}

impl Code {
    pub fn parse(s: &str) -> Result<Code, Error> {
        match s {
            "binary-gray" => Ok(Code::BinaryGray),
            "brgc-direct" => Ok(Code::BrgcDirect),
            other => {
                Err(Error::Config(format!("unknown code '{other}' (binary-gray|brgc-direct)")))
            }
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Code::BinaryGray => "binary-gray",
            Code::BrgcDirect => "brgc-direct",
        }
    }
}

/// Penalty weight: fixed, or derived from the assembled operator norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PenaltyWeight {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub particles: usize,
    pub bits_per_axis: usize,
    pub dims: usize,
    pub mode: Mode,
    pub code: Code,
    pub penalty: PenaltyWeight,
    pub kinetic_coefficient: f64,
    pub include_diagonal: bool,
    pub potential: Option<PotentialSpec>,
    /// Dense-matrix qubit cap for verification paths.
    pub cap_qubits: usize,
    /// Cap on the antisymmetric basis size C(2^{nD}, A).
    pub cap_basis: usize,
    pub seed: u64,
}

impl Default for ProblemSpec {
    fn default() -> Self {
        ProblemSpec {
            particles: 2,
            bits_per_axis: 2,
            dims: 1,
            mode: Mode::Inline,
            code: Code::BrgcDirect,
            penalty: PenaltyWeight::Auto,
            kinetic_coefficient: 1.0,
            include_diagonal: false,
            potential: None,
            cap_qubits: 24,
            cap_basis: 1 << 14,
            seed: 0,
        }
    }
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.bits_per_axis < 1 {
            return Err(Error::Config("n must be >= 1".into()));
        }
        if !(1..=3).contains(&self.dims) {
            return Err(Error::Config("D must be 1, 2, or 3".into()));
        }
        if self.particles < 1 {
            return Err(Error::Config("A must be >= 1".into()));
        }
        let sites = self.num_sites();
        if self.particles > sites {
            return Err(Error::Config(format!(
                "A={} exceeds lattice size {}",
                self.particles, sites
            )));
        }
        if self.mode == Mode::Inline && self.code == Code::BinaryGray {
            return Err(Error::Config(
                "inline mode requires code=brgc-direct (no gray-copy registers)".into(),
            ));
        }
        Ok(())
    }

    /// Sites per axis.
    pub fn axis_len(&self) -> usize {
        1 << self.bits_per_axis
    }

    /// Total lattice sites 2^{nD}.
    pub fn num_sites(&self) -> usize {
        1 << (self.bits_per_axis * self.dims)
    }

    /// Qubits per particle register.
    pub fn bits_per_particle(&self) -> usize {
        self.bits_per_axis * self.dims
    }

    /// Base-register qubit count A*n*D.
    pub fn base_qubits(&self) -> usize {
        self.particles * self.bits_per_particle()
    }
}
