//! Diagonal potential synthesis: exact Z-product decomposition of tabulated
//! diagonals, built-in potential shapes, and the multi-species interaction
//! counting factors.

use num_complex::Complex64;

use crate::encoding::{decode_key, deinterleave_key, LatticePoint, QubitLayout};
use crate::pauli::{PauliSum, PauliTerm, Letter, LetterMap};
use crate::problem::ProblemSpec;
use crate::Error;

/// One-particle (external) potential over lattice points.
#[derive(Debug, Clone, PartialEq)]
pub enum OneBody {
    /// Single-site square well: -depth at `site` (an interleaved key), 0 elsewhere.
    Well { depth: f64, site: u64 },
    /// strength * sum_d (c_d - N/2)^2 around the lattice center.
    Harmonic { strength: f64 },
    /// Explicit table indexed by interleaved key.
    Table(Vec<f64>),
}

impl OneBody {
    pub fn value(&self, point: &LatticePoint, key: u64, axis_len: u64) -> f64 {
        match self {
            OneBody::Well { depth, site } => {
                if key == *site {
                    -depth
                } else {
                    0.0
                }
            }
            OneBody::Harmonic { strength } => {
                let c = axis_len as f64 / 2.0;
                strength
                    * point
                        .coords
                        .iter()
                        .map(|&x| {
                            let dx = x as f64 - c;
                            dx * dx
                        })
                        .sum::<f64>()
            }
            OneBody::Table(values) => values[key as usize],
        }
    }
}

/// Two-particle potential; evaluated on minimum-image torus separation.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoBody {
    /// -strength / sqrt(r^2 + softening^2).
    CoulombSoftened { strength: f64, softening: f64 },
    /// Explicit symmetric table indexed by (key_i, key_j).
    Table { sites: usize, values: Vec<f64> },
}

impl TwoBody {
    pub fn value(&self, p: &LatticePoint, q: &LatticePoint, ki: u64, kj: u64, axis_len: u64) -> f64 {
        match self {
            TwoBody::CoulombSoftened { strength, softening } => {
                let r2: f64 = p
                    .coords
                    .iter()
                    .zip(&q.coords)
                    .map(|(&a, &b)| {
                        let d = (a as i64 - b as i64).unsigned_abs().min(axis_len - a.abs_diff(b));
                        (d as f64) * (d as f64)
                    })
                    .sum();
                -strength / (r2 + softening * softening).sqrt()
            }
            TwoBody::Table { sites, values } => values[ki as usize * sites + kj as usize],
        }
    }
}

/// Potential definition attached to a problem: optional external part applied
/// per particle and optional pairwise part summed over particle pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PotentialSpec {
    pub one_body: Option<OneBody>,
    pub two_body: Option<TwoBody>,
}

impl PotentialSpec {
    /// Parses CLI syntax: `well:depth=D,site=K`, `harmonic:strength=S`,
    /// `coulomb-softened:strength=S,softening=E`, or `file:PATH` (one-body
    /// table of `index value` lines).
    pub fn parse(text: &str) -> Result<PotentialSpec, Error> {
        let (name, args) = match text.split_once(':') {
            Some((n, a)) => (n, a),
            None => (text, ""),
        };
        let mut kv = std::collections::BTreeMap::new();
        for pair in args.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = pair
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("bad potential arg '{pair}'")))?;
            kv.insert(k.to_string(), v.to_string());
        }
        let get_f64 = |kv: &std::collections::BTreeMap<String, String>, key: &str, default: f64| {
            kv.get(key)
                .map(|v| {
                    v.parse::<f64>()
                        .map_err(|_| Error::Config(format!("bad value for {key}: '{v}'")))
                })
                .unwrap_or(Ok(default))
        };
        match name {
            "none" => Ok(PotentialSpec::default()),
            "well" => Ok(PotentialSpec {
                one_body: Some(OneBody::Well {
                    depth: get_f64(&kv, "depth", 1.0)?,
                    site: get_f64(&kv, "site", 0.0)? as u64,
                }),
                two_body: None,
            }),
            "harmonic" => Ok(PotentialSpec {
                one_body: Some(OneBody::Harmonic { strength: get_f64(&kv, "strength", 1.0)? }),
                two_body: None,
            }),
            "coulomb-softened" => Ok(PotentialSpec {
                one_body: None,
                two_body: Some(TwoBody::CoulombSoftened {
                    strength: get_f64(&kv, "strength", 1.0)?,
                    softening: get_f64(&kv, "softening", 1.0)?,
                }),
            }),
            "file" => {
                let path = args;
                let text = std::fs::read_to_string(path).map_err(|e| {
                    Error::Config(format!("cannot read potential file '{path}': {e}"))
                })?;
                Ok(PotentialSpec { one_body: Some(parse_table(&text)?), two_body: None })
            }
            other => Err(Error::Config(format!("unknown potential '{other}'"))),
        }
    }
}

fn parse_table(text: &str) -> Result<OneBody, Error> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let bad = || Error::Config(format!("potential table line {}: expected 'index value'", lineno + 1));
        let idx: usize = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let val: f64 = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        pairs.push((idx, val));
    }
    if pairs.is_empty() {
        return Err(Error::Config("potential table is empty".into()));
    }
    let len = pairs.iter().map(|&(i, _)| i).max().unwrap() + 1;
    if !len.is_power_of_two() {
        return Err(Error::Config(format!("potential table length {len} is not a power of two")));
    }
    let mut values = vec![f64::NAN; len];
    for (i, v) in pairs {
        values[i] = v;
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Config("potential table has missing or non-finite entries".into()));
    }
    Ok(OneBody::Table(values))
}

/// Exact Z-product decomposition of a diagonal: returns the PauliSum whose
/// matrix on `register` is diag(values), coefficients from the parity
/// (Walsh) transform c_S = 2^{-m} sum_x v[x] (-1)^{|x & S|}.
pub fn diagonal_to_zsum(values: &[f64], register: &[usize]) -> Result<PauliSum, Error> {
    let m = register.len();
    if values.len() != 1 << m {
        return Err(Error::InvalidArgument(format!(
            "diagonal_to_zsum: {} values for {m} qubits",
            values.len()
        )));
    }
    // in-place Walsh-Hadamard transform
    let mut coeffs: Vec<f64> = values.to_vec();
    let mut h = 1usize;
    while h < coeffs.len() {
        for block in (0..coeffs.len()).step_by(2 * h) {
            for j in block..block + h {
                let (x, y) = (coeffs[j], coeffs[j + h]);
                coeffs[j] = x + y;
                coeffs[j + h] = x - y;
            }
        }
        h *= 2;
    }
    let norm = 1.0 / (1 << m) as f64;
    let mut sum = PauliSum::zero();
    for (mask, c) in coeffs.iter().enumerate() {
        let c = c * norm;
        if c.abs() <= crate::pauli::ZERO_TOL {
            continue;
        }
        let mut letters = LetterMap::new();
        for (j, &q) in register.iter().enumerate() {
            if (mask >> j) & 1 == 1 {
                letters.insert(q, Letter::Z);
            }
        }
        sum.add_term(PauliTerm { coefficient: Complex64::new(c, 0.0), letters });
    }
    Ok(sum)
}

/// Number of same-species pairs: A(A-1)/2.
pub fn same_species_factor(a: usize) -> Result<f64, Error> {
    if a < 2 {
        return Err(Error::InvalidArgument("same_species_factor requires A >= 2".into()));
    }
    Ok((a * (a - 1)) as f64 / 2.0)
}

/// Number of cross-species pairs: A_n * A_p.
pub fn cross_species_factor(a_n: usize, a_p: usize) -> Result<f64, Error> {
    if a_n == 0 || a_p == 0 {
        return Err(Error::InvalidArgument("cross_species_factor requires nonzero counts".into()));
    }
    Ok((a_n * a_p) as f64)
}

/// Value table for one particle's base register: entry `bits` is the
/// potential at the lattice point the register pattern decodes to.
fn register_value_table(
    pot: &OneBody,
    spec: &ProblemSpec,
) -> Result<Vec<f64>, Error> {
    let w = spec.bits_per_particle();
    let axis_len = spec.axis_len() as u64;
    let mut table = Vec::with_capacity(1 << w);
    for bits in 0..(1u64 << w) {
        let key = decode_key(bits, spec)?;
        let point = deinterleave_key(key, spec.bits_per_axis, spec.dims);
        table.push(pot.value(&point, key, axis_len));
    }
    Ok(table)
}

/// External potential applied to every particle register.
pub fn one_body_zsum(
    pot: &OneBody,
    spec: &ProblemSpec,
    layout: &QubitLayout,
) -> Result<PauliSum, Error> {
    let table = register_value_table(pot, spec)?;
    let mut total = PauliSum::zero();
    for a in 0..spec.particles {
        total.add_assign(&diagonal_to_zsum(&table, &layout.particle_block(a))?);
    }
    Ok(total)
}

/// Pairwise potential as an exact sum over all particle pairs, each pair
/// realized as a diagonal on the joint register of the two particles.
pub fn two_body_zsum(
    pot: &TwoBody,
    spec: &ProblemSpec,
    layout: &QubitLayout,
) -> Result<PauliSum, Error> {
    let w = spec.bits_per_particle();
    if 2 * w > 26 {
        return Err(Error::DimensionCap { qubits: 2 * w, cap: 26 });
    }
    let axis_len = spec.axis_len() as u64;
    // joint table over (low register = particle a, high = particle b)
    let mut table = vec![0.0; 1 << (2 * w)];
    for bits_a in 0..(1u64 << w) {
        let ka = decode_key(bits_a, spec)?;
        let pa = deinterleave_key(ka, spec.bits_per_axis, spec.dims);
        for bits_b in 0..(1u64 << w) {
            let kb = decode_key(bits_b, spec)?;
            let pb = deinterleave_key(kb, spec.bits_per_axis, spec.dims);
            table[(bits_a | (bits_b << w)) as usize] = pot.value(&pa, &pb, ka, kb, axis_len);
        }
    }
    let mut total = PauliSum::zero();
    for a in 0..spec.particles {
        for b in (a + 1)..spec.particles {
            let mut register = layout.particle_block(a);
            register.extend(layout.particle_block(b));
            total.add_assign(&diagonal_to_zsum(&table, &register)?);
        }
    }
    Ok(total)
}

/// Full potential operator on base registers.
pub fn potential_zsum(
    pot: &PotentialSpec,
    spec: &ProblemSpec,
    layout: &QubitLayout,
) -> Result<PauliSum, Error> {
    let mut total = PauliSum::zero();
    if let Some(ob) = &pot.one_body {
        total.add_assign(&one_body_zsum(ob, spec, layout)?);
    }
    if let Some(tb) = &pot.two_body {
        total.add_assign(&two_body_zsum(tb, spec, layout)?);
    }
    Ok(total)
}

/// Max |V| over valid configurations; used for automatic penalty weights.
pub fn potential_sup_norm(pot: &PotentialSpec, spec: &ProblemSpec) -> Result<f64, Error> {
    let axis_len = spec.axis_len() as u64;
    let sites = spec.num_sites() as u64;
    let mut sup: f64 = 0.0;
    if let Some(ob) = &pot.one_body {
        let mut per_site: f64 = 0.0;
        for key in 0..sites {
            let p = deinterleave_key(key, spec.bits_per_axis, spec.dims);
            per_site = per_site.max(ob.value(&p, key, axis_len).abs());
        }
        sup += spec.particles as f64 * per_site;
    }
    if let Some(tb) = &pot.two_body {
        let mut per_pair: f64 = 0.0;
        for ki in 0..sites {
            let pi = deinterleave_key(ki, spec.bits_per_axis, spec.dims);
            for kj in 0..sites {
                let pj = deinterleave_key(kj, spec.bits_per_axis, spec.dims);
                per_pair = per_pair.max(tb.value(&pi, &pj, ki, kj, axis_len).abs());
            }
        }
        sup += same_species_factor(spec.particles.max(2))? * per_pair;
    }
    Ok(sup)
}

/// The assembled problem: kinetic operator, ordering penalty, potential, and
/// the resolved penalty weight. H = kinetic + V + Q * ordering.
#[derive(Debug)]
pub struct AssembledHamiltonian {
    pub layout: QubitLayout,
    /// Kinetic part, scaled by the kinetic coefficient; includes the
    /// -2 D A identity shift when requested.
    pub kinetic: crate::pauli::OperatorExpr,
    /// Unit-weight ordering penalty (empty for A = 1).
    pub ordering: PauliSum,
    pub potential: PauliSum,
    pub q: f64,
}

impl AssembledHamiltonian {
    pub fn hamiltonian_expr(&self) -> crate::pauli::OperatorExpr {
        let mut expr = self.kinetic.clone();
        if !self.potential.is_zero() {
            expr.push(Complex64::new(1.0, 0.0), vec![self.potential.clone()]);
        }
        if !self.ordering.is_zero() {
            expr.push(Complex64::new(self.q, 0.0), vec![self.ordering.clone()]);
        }
        expr
    }

    /// Flat term list of the full Hamiltonian, gated on hermiticity.
    pub fn expand_terms(&self, term_cap: usize) -> Result<PauliSum, Error> {
        let flat = self.hamiltonian_expr().expand(term_cap)?;
        gate_hermitian(&flat)?;
        Ok(flat)
    }
}

/// Rejects operators with imaginary term coefficients beyond 1e-10.
pub fn gate_hermitian(sum: &PauliSum) -> Result<(), Error> {
    let max_im = sum.terms().map(|(_, c)| c.im.abs()).fold(0.0, f64::max);
    if max_im > 1e-10 {
        return Err(Error::NotHermitian(max_im));
    }
    Ok(())
}

/// Builds the full problem on a fresh layout. The automatic penalty weight
/// is 100 x (kinetic coefficient norm + sup |V|), guaranteeing penalty
/// dominance at desk scale.
pub fn assemble_hamiltonian(spec: &ProblemSpec) -> Result<AssembledHamiltonian, Error> {
    spec.validate()?;
    let mut layout = QubitLayout::new(spec);
    let mut kinetic = crate::laplacian::kinetic_expr(spec, &layout)?
        .scaled(Complex64::new(spec.kinetic_coefficient, 0.0));
    if spec.include_diagonal {
        let shift = -2.0 * (spec.dims * spec.particles) as f64 * spec.kinetic_coefficient;
        kinetic.push(Complex64::new(shift, 0.0), vec![PauliSum::identity()]);
    }
    let ordering = if spec.particles >= 2 {
        crate::gadgets::ordering_penalty(spec, &mut layout)?.penalty
    } else {
        PauliSum::zero()
    };
    let potential = match &spec.potential {
        Some(p) => potential_zsum(p, spec, &layout)?,
        None => PauliSum::zero(),
    };
    let q = match spec.penalty {
        crate::problem::PenaltyWeight::Fixed(v) => v,
        crate::problem::PenaltyWeight::Auto => {
            let v_sup = match &spec.potential {
                Some(p) => potential_sup_norm(p, spec)?,
                None => 0.0,
            };
            100.0 * (kinetic.coefficient_norm() + v_sup)
        }
    };
    Ok(AssembledHamiltonian { layout, kinetic, ordering, potential, q })
}
