//! Exact symbolic algebra over weighted Pauli strings, plus their realization
//! as matrices at desk scale.
//!
//! A [`PauliSum`] is the target language of every synthesis stage: a
//! canonicalized linear combination of tensor products of X, Y, Z over named
//! qubits. Coefficients are complex during intermediate algebra; emitted
//! Hamiltonians must pass [`PauliSum::is_hermitian`] before they leave the
//! pipeline.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::Error;

/// Coefficients with magnitude at or below this are pruned after every
/// canonicalizing operation.
pub const ZERO_TOL: f64 = 1e-14;

/// A non-identity single-qubit Pauli letter. Identity is represented by the
/// absence of an entry in the letter map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    X,
    Y,
    Z,
}

impl Letter {
    pub fn symbol(self) -> char {
        match self {
            Letter::X => 'X',
            Letter::Y => 'Y',
            Letter::Z => 'Z',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        match c {
            'X' => Some(Letter::X),
            'Y' => Some(Letter::Y),
            'Z' => Some(Letter::Z),
            _ => None,
        }
    }
}

/// Product of two letters on the same qubit: `a * b = phase * result`,
/// `result == None` meaning identity.
fn letter_mul(a: Letter, b: Letter) -> (Complex64, Option<Letter>) {
    use Letter::*;
    let i = Complex64::new(0.0, 1.0);
    match (a, b) {
        (X, X) | (Y, Y) | (Z, Z) => (Complex64::new(1.0, 0.0), None),
        (X, Y) => (i, Some(Z)),
        (Y, X) => (-i, Some(Z)),
        (Y, Z) => (i, Some(X)),
        (Z, Y) => (-i, Some(X)),
        (Z, X) => (i, Some(Y)),
        (X, Z) => (-i, Some(Y)),
    }
}

/// Sorted qubit-index -> letter map. Never stores identities.
pub type LetterMap = BTreeMap<usize, Letter>;

/// A single weighted Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coefficient: Complex64,
    pub letters: LetterMap,
}

impl PauliTerm {
    pub fn identity(coefficient: Complex64) -> Self {
        PauliTerm { coefficient, letters: LetterMap::new() }
    }

    pub fn single(coefficient: Complex64, qubit: usize, letter: Letter) -> Self {
        let mut letters = LetterMap::new();
        letters.insert(qubit, letter);
        PauliTerm { coefficient, letters }
    }

    /// Number of non-identity letters.
    pub fn weight(&self) -> usize {
        self.letters.len()
    }
}

/// A canonicalized sum of Pauli terms. Terms are keyed by their letter map,
/// so duplicate strings merge and the iteration order is the lexicographic
/// order on (sorted qubit indices, letters), which fixes golden-file output.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PauliSum {
    terms: BTreeMap<LetterMap, Complex64>,
}

impl PauliSum {
    pub fn zero() -> Self {
        PauliSum::default()
    }

    pub fn identity() -> Self {
        PauliSum::from_term(PauliTerm::identity(Complex64::new(1.0, 0.0)))
    }

    pub fn from_term(term: PauliTerm) -> Self {
        let mut s = PauliSum::zero();
        s.add_term(term);
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PauliTerm>) -> Self {
        let mut s = PauliSum::zero();
        for t in terms {
            s.add_term(t);
        }
        s
    }

    pub fn add_term(&mut self, term: PauliTerm) {
        let entry = self.terms.entry(term.letters).or_insert(Complex64::new(0.0, 0.0));
        *entry += term.coefficient;
        if entry.norm() <= ZERO_TOL {
            // re-fetch the key to remove; clone is cheap at desk scale
            let key = self
                .terms
                .iter()
                .find(|(_, c)| c.norm() <= ZERO_TOL)
                .map(|(k, _)| k.clone());
            if let Some(k) = key {
                self.terms.remove(&k);
            }
        }
    }

    pub fn add_assign(&mut self, other: &PauliSum) {
        for (letters, coeff) in &other.terms {
            self.add_term(PauliTerm { coefficient: *coeff, letters: letters.clone() });
        }
    }

    pub fn add(&self, other: &PauliSum) -> PauliSum {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn sub(&self, other: &PauliSum) -> PauliSum {
        self.add(&other.scaled(Complex64::new(-1.0, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> PauliSum {
        if factor.norm() <= ZERO_TOL {
            return PauliSum::zero();
        }
        PauliSum {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * factor)).collect(),
        }
    }

    /// Canonical product. Letters on shared qubits multiply with the usual
    /// phases; disjoint qubits merge.
    pub fn mul(&self, other: &PauliSum) -> PauliSum {
        let mut out = PauliSum::zero();
        for (la, ca) in &self.terms {
            for (lb, cb) in &other.terms {
                let mut coeff = ca * cb;
                let mut letters = la.clone();
                for (&q, &letter_b) in lb {
                    match letters.remove(&q) {
                        None => {
                            letters.insert(q, letter_b);
                        }
                        Some(letter_a) => {
                            let (phase, res) = letter_mul(letter_a, letter_b);
                            coeff *= phase;
                            if let Some(l) = res {
                                letters.insert(q, l);
                            }
                        }
                    }
                }
                out.add_term(PauliTerm { coefficient: coeff, letters });
            }
        }
        out
    }

    /// Adjoint. Pauli strings are self-adjoint, so only coefficients conjugate.
    pub fn adjoint(&self) -> PauliSum {
        PauliSum {
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c.conj())).collect(),
        }
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.im.abs() <= tol)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LetterMap, &Complex64)> {
        self.terms.iter()
    }

    pub fn max_weight(&self) -> usize {
        self.terms.keys().map(|l| l.len()).max().unwrap_or(0)
    }

    /// Term count bucketed by Pauli weight.
    pub fn weight_histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for letters in self.terms.keys() {
            *h.entry(letters.len()).or_insert(0) += 1;
        }
        h
    }

    /// Highest qubit index appearing in any term, if any.
    pub fn max_qubit(&self) -> Option<usize> {
        self.terms.keys().flat_map(|l| l.keys().copied()).max()
    }

    /// Sum of coefficient magnitudes; an upper bound on the spectral norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).sum()
    }

    /// Applies the sum to a computational basis state. Each Pauli string maps
    /// a basis state to exactly one basis state with a phase; the result is
    /// the merged list of (target state, amplitude) over all terms.
    pub fn apply_to_basis(&self, state: u64) -> Vec<(u64, Complex64)> {
        let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (letters, coeff) in &self.terms {
            let mut target = state;
            let mut amp = *coeff;
            for (&q, &letter) in letters {
                let bit = (state >> q) & 1;
                match letter {
                    Letter::X => target ^= 1 << q,
                    Letter::Y => {
                        target ^= 1 << q;
                        // Y|0> = i|1>, Y|1> = -i|0>
                        amp *= if bit == 0 {
                            Complex64::new(0.0, 1.0)
                        } else {
                            Complex64::new(0.0, -1.0)
                        };
                    }
                    Letter::Z => {
                        if bit == 1 {
                            amp = -amp;
                        }
                    }
                }
            }
            *acc.entry(target).or_insert(Complex64::new(0.0, 0.0)) += amp;
        }
        acc.into_iter().filter(|(_, a)| a.norm() > ZERO_TOL).collect()
    }

    /// Diagonal matrix element <state|sum|state>. Only all-Z terms contribute.
    pub fn diagonal_element(&self, state: u64) -> Complex64 {
        let mut out = Complex64::new(0.0, 0.0);
        for (letters, coeff) in &self.terms {
            let mut sign = 1.0;
            let mut diagonal = true;
            for (&q, &letter) in letters {
                match letter {
                    Letter::Z => {
                        if (state >> q) & 1 == 1 {
                            sign = -sign;
                        }
                    }
                    _ => {
                        diagonal = false;
                        break;
                    }
                }
            }
            if diagonal {
                out += coeff * sign;
            }
        }
        out
    }

    /// Dense complex matrix on `num_qubits` qubits, index 0 least significant.
    pub fn to_dense(&self, num_qubits: usize, cap: usize) -> Result<DMatrix<Complex64>, Error> {
        if let Some(q) = self.max_qubit() {
            if q >= num_qubits {
                return Err(Error::UnregisteredQubit(q));
            }
        }
        if num_qubits > cap {
            return Err(Error::DimensionCap { qubits: num_qubits, cap });
        }
        let dim = 1usize << num_qubits;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for col in 0..dim as u64 {
            for (row, amp) in self.apply_to_basis(col) {
                m[(row as usize, col as usize)] += amp;
            }
        }
        Ok(m)
    }

    /// Dense real matrix; errors if any entry has a non-negligible imaginary
    /// part.
    pub fn to_dense_real(&self, num_qubits: usize, cap: usize) -> Result<DMatrix<f64>, Error> {
        let m = self.to_dense(num_qubits, cap)?;
        real_part(&m)
    }

    /// Deterministic term-list serialization: one term per line,
    /// `re(coeff) im(coeff) <letter><index>...`; the identity string is the
    /// single token `I`.
    pub fn to_term_lines(&self) -> String {
        let mut out = String::new();
        for (letters, coeff) in &self.terms {
            let _ = write!(out, "{:?} {:?}", coeff.re, coeff.im);
            if letters.is_empty() {
                out.push_str(" I");
            } else {
                for (&q, &letter) in letters {
                    let _ = write!(out, " {}{}", letter.symbol(), q);
                }
            }
            out.push('\n');
        }
        out
    }

    /// Parses the format produced by [`PauliSum::to_term_lines`].
    pub fn parse_term_lines(text: &str) -> Result<PauliSum, Error> {
        let mut sum = PauliSum::zero();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let bad = |msg: &str| Error::TermListParse { line: lineno + 1, message: msg.into() };
            let re: f64 = parts
                .next()
                .ok_or_else(|| bad("missing real part"))?
                .parse()
                .map_err(|_| bad("bad real part"))?;
            let im: f64 = parts
                .next()
                .ok_or_else(|| bad("missing imaginary part"))?
                .parse()
                .map_err(|_| bad("bad imaginary part"))?;
            let mut letters = LetterMap::new();
            for tok in parts {
                if tok == "I" {
                    continue;
                }
                let mut chars = tok.chars();
                let letter = chars
                    .next()
                    .and_then(Letter::from_symbol)
                    .ok_or_else(|| bad("bad letter token"))?;
                let idx: usize =
                    chars.as_str().parse().map_err(|_| bad("bad qubit index"))?;
                if letters.insert(idx, letter).is_some() {
                    return Err(bad("duplicate qubit in term"));
                }
            }
            sum.add_term(PauliTerm { coefficient: Complex64::new(re, im), letters });
        }
        Ok(sum)
    }
}

/// Projector onto a set of qubit bit-values; expands to a 2^k-term Z sum.
#[derive(Debug, Clone, Default)]
pub struct Projector {
    pub assignments: BTreeMap<usize, bool>,
}

impl Projector {
    pub fn new(assignments: impl IntoIterator<Item = (usize, bool)>) -> Self {
        Projector { assignments: assignments.into_iter().collect() }
    }

    /// Product over assignments of (1 +/- Z)/2, fully expanded.
    pub fn expand(&self) -> PauliSum {
        let mut out = PauliSum::identity();
        for (&q, &bit) in &self.assignments {
            // bit 0 -> (1+Z)/2, bit 1 -> (1-Z)/2
            let sign = if bit { -0.5 } else { 0.5 };
            let factor = PauliSum::from_terms([
                PauliTerm::identity(Complex64::new(0.5, 0.0)),
                PauliTerm::single(Complex64::new(sign, 0.0), q, Letter::Z),
            ]);
            out = out.mul(&factor);
        }
        out
    }
}

/// The two-qubit swap operator (I + XX + YY + ZZ)/2.
pub fn swap_sum(i: usize, j: usize) -> Result<PauliSum, Error> {
    if i == j {
        return Err(Error::InvalidArgument("swap_sum requires distinct qubits".into()));
    }
    let half = Complex64::new(0.5, 0.0);
    let mut sum = PauliSum::from_term(PauliTerm::identity(half));
    for letter in [Letter::X, Letter::Y, Letter::Z] {
        let mut letters = LetterMap::new();
        letters.insert(i, letter);
        letters.insert(j, letter);
        sum.add_term(PauliTerm { coefficient: half, letters });
    }
    Ok(sum)
}

/// A sum of scaled products of Pauli sums, kept factored so that permutation
/// networks never get multiplied out at desk scale.
#[derive(Debug, Clone, Default)]
pub struct OperatorExpr {
    pub branches: Vec<Branch>,
}

/// One product branch: `coeff * f_0 * f_1 * ... * f_k`, rightmost factor
/// applied first.
#[derive(Debug, Clone)]
pub struct Branch {
    pub coeff: Complex64,
    pub factors: Vec<PauliSum>,
}

impl OperatorExpr {
    pub fn from_sum(sum: PauliSum) -> Self {
        OperatorExpr {
            branches: vec![Branch { coeff: Complex64::new(1.0, 0.0), factors: vec![sum] }],
        }
    }

    pub fn push(&mut self, coeff: Complex64, factors: Vec<PauliSum>) {
        self.branches.push(Branch { coeff, factors });
    }

    pub fn extend(&mut self, other: OperatorExpr) {
        self.branches.extend(other.branches);
    }

    /// Applies the whole expression to a basis state.
    pub fn apply_to_basis(&self, state: u64) -> Vec<(u64, Complex64)> {
        let mut acc: BTreeMap<u64, Complex64> = BTreeMap::new();
        for branch in &self.branches {
            let mut current: BTreeMap<u64, Complex64> = BTreeMap::new();
            current.insert(state, branch.coeff);
            for factor in branch.factors.iter().rev() {
                let mut next: BTreeMap<u64, Complex64> = BTreeMap::new();
                for (s, amp) in &current {
                    for (t, a) in factor.apply_to_basis(*s) {
                        *next.entry(t).or_insert(Complex64::new(0.0, 0.0)) += amp * a;
                    }
                }
                next.retain(|_, a| a.norm() > ZERO_TOL);
                current = next;
            }
            for (t, a) in current {
                *acc.entry(t).or_insert(Complex64::new(0.0, 0.0)) += a;
            }
        }
        acc.into_iter().filter(|(_, a)| a.norm() > ZERO_TOL).collect()
    }

    /// Multiplies everything out into a flat canonical sum. Errors when the
    /// intermediate term count exceeds `term_cap`.
    pub fn expand(&self, term_cap: usize) -> Result<PauliSum, Error> {
        let mut out = PauliSum::zero();
        for branch in &self.branches {
            let mut prod = PauliSum::from_term(PauliTerm::identity(branch.coeff));
            for factor in &branch.factors {
                prod = prod.mul(factor);
                if prod.num_terms() > term_cap {
                    return Err(Error::TermCap { terms: prod.num_terms(), cap: term_cap });
                }
            }
            out.add_assign(&prod);
            if out.num_terms() > term_cap {
                return Err(Error::TermCap { terms: out.num_terms(), cap: term_cap });
            }
        }
        Ok(out)
    }

    pub fn to_dense(&self, num_qubits: usize, cap: usize) -> Result<DMatrix<Complex64>, Error> {
        if num_qubits > cap {
            return Err(Error::DimensionCap { qubits: num_qubits, cap });
        }
        let dim = 1usize << num_qubits;
        let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
        for col in 0..dim as u64 {
            for (row, amp) in self.apply_to_basis(col) {
                m[(row as usize, col as usize)] += amp;
            }
        }
        Ok(m)
    }

    pub fn to_dense_real(&self, num_qubits: usize, cap: usize) -> Result<DMatrix<f64>, Error> {
        real_part(&self.to_dense(num_qubits, cap)?)
    }

    /// Sum over branches of |coeff| times the product of factor coefficient
    /// norms; an upper bound on the spectral norm.
    pub fn coefficient_norm(&self) -> f64 {
        self.branches
            .iter()
            .map(|b| b.coeff.norm() * b.factors.iter().map(|f| f.coefficient_norm()).product::<f64>())
            .sum()
    }

    pub fn scaled(&self, factor: Complex64) -> OperatorExpr {
        OperatorExpr {
            branches: self
                .branches
                .iter()
                .map(|b| Branch { coeff: b.coeff * factor, factors: b.factors.clone() })
                .collect(),
        }
    }
}

fn real_part(m: &DMatrix<Complex64>) -> Result<DMatrix<f64>, Error> {
    let max_im = m.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if max_im > 1e-10 {
        return Err(Error::NotReal(max_im));
    }
    Ok(m.map(|c| c.re))
}
