//! Polynomial invariant maps over Gaussian numbers: elementary symmetric
//! systems, exact orbit-separation sampling and the action induced on
//! invariant coordinates by anti-linear maps of the form `z -> c * g0(conj z)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::group::FiniteMatrixGroup;
use crate::scalar::{ExactMatrix, ExactScalar};

/// `re + i * im` with exact real and imaginary parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComplexScalar {
    pub re: ExactScalar,
    pub im: ExactScalar,
}

impl ComplexScalar {
    pub fn new(re: ExactScalar, im: ExactScalar) -> Self {
        ComplexScalar { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        ComplexScalar::new(ExactScalar::from_int(re), ExactScalar::from_int(im))
    }

    pub fn real(re: ExactScalar) -> Self {
        ComplexScalar::new(re, ExactScalar::zero())
    }

    pub fn zero() -> Self {
        Self::from_ints(0, 0)
    }

    pub fn one() -> Self {
        Self::from_ints(1, 0)
    }

    pub fn i() -> Self {
        Self::from_ints(0, 1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexScalar::new(self.re.clone(), -&self.im)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn scale(&self, s: &ExactScalar) -> Self {
        ComplexScalar::new(&self.re * s, &self.im * s)
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "({})*i", self.im),
            (false, false) => write!(f, "{}+({})*i", self.re, self.im),
        }
    }
}

impl<'a> Add<&'a ComplexScalar> for &'a ComplexScalar {
    type Output = ComplexScalar;
    fn add(self, o: &ComplexScalar) -> ComplexScalar {
        ComplexScalar::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a ComplexScalar> for &'a ComplexScalar {
    type Output = ComplexScalar;
    fn sub(self, o: &ComplexScalar) -> ComplexScalar {
        ComplexScalar::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a ComplexScalar> for &'a ComplexScalar {
    type Output = ComplexScalar;
    fn mul(self, o: &ComplexScalar) -> ComplexScalar {
        ComplexScalar::new(&self.re * &o.re - &self.im * &o.im, &self.re * &o.im + &self.im * &o.re)
    }
}

impl Neg for &ComplexScalar {
    type Output = ComplexScalar;
    fn neg(self) -> ComplexScalar {
        ComplexScalar::new(-&self.re, -&self.im)
    }
}

pub type ComplexVector = Vec<ComplexScalar>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantError {
    #[error("expected a vector of length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported anti-linear map: {0}")]
    UnsupportedSigmaForm(String),
    #[error("system is not invariant under generator {generator}")]
    NotInvariant { generator: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InvariantKind {
    /// `s_1, ..., s_n` with `prod (t + z_j) = sum s_k t^(n-k)`.
    ElementarySymmetric,
    /// The coordinates themselves (invariants of the trivial group).
    Coordinates,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantSystem {
    pub kind: InvariantKind,
    pub n: usize,
}

impl InvariantSystem {
    pub fn elementary_symmetric(n: usize) -> Self {
        InvariantSystem { kind: InvariantKind::ElementarySymmetric, n }
    }

    pub fn coordinates(n: usize) -> Self {
        InvariantSystem { kind: InvariantKind::Coordinates, n }
    }

    pub fn degrees(&self) -> Vec<u32> {
        match self.kind {
            InvariantKind::ElementarySymmetric => (1..=self.n as u32).collect(),
            InvariantKind::Coordinates => vec![1; self.n],
        }
    }
}

/// Elementary symmetric polynomials `e_0..e_n` of `z` (Vieta recursion).
fn elementary(z: &[ComplexScalar]) -> Vec<ComplexScalar> {
    let mut e = vec![ComplexScalar::one()];
    for x in z {
        let mut next = e.clone();
        next.push(ComplexScalar::zero());
        for k in 1..next.len() {
            next[k] = &next[k] + &(&e[k - 1] * x);
        }
        e = next;
    }
    e
}

pub fn evaluate(f: &InvariantSystem, z: &[ComplexScalar]) -> Result<ComplexVector, InvariantError> {
    if z.len() != f.n {
        return Err(InvariantError::DimensionMismatch { expected: f.n, found: z.len() });
    }
    Ok(match f.kind {
        InvariantKind::ElementarySymmetric => elementary(z).into_iter().skip(1).collect(),
        InvariantKind::Coordinates => z.to_vec(),
    })
}

/// A real matrix acting on a complex vector.
pub fn act(m: &ExactMatrix, z: &[ComplexScalar]) -> ComplexVector {
    (0..m.rows())
        .map(|r| (0..m.cols()).fold(ComplexScalar::zero(), |acc, c| &acc + &z[c].scale(m.get(r, c))))
        .collect()
}

/// Rank of the Jacobian of `f` at a real rational point.
pub fn jacobian_rank(f: &InvariantSystem, x: &[ExactScalar]) -> Result<usize, InvariantError> {
    if x.len() != f.n {
        return Err(InvariantError::DimensionMismatch { expected: f.n, found: x.len() });
    }
    let rows: Vec<Vec<ExactScalar>> = match f.kind {
        InvariantKind::Coordinates => ExactMatrix::identity(f.n).row_vectors().into_iter().map(|v| v.0).collect(),
        InvariantKind::ElementarySymmetric => {
            // d e_k / d z_j = e_{k-1}(z without z_j)
            let cols: Vec<Vec<ComplexScalar>> = (0..f.n)
                .map(|j| {
                    let rest: Vec<ComplexScalar> = x.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, v)| ComplexScalar::real(v.clone())).collect();
                    elementary(&rest)
                })
                .collect();
            (0..f.n).map(|k| (0..f.n).map(|j| cols[j][k].re.clone()).collect()).collect()
        }
    };
    Ok(ExactMatrix::from_rows(rows).expect("rectangular").rank())
}

fn sample_vector(rng: &mut ChaCha8Rng, n: usize) -> ComplexVector {
    (0..n).map(|_| ComplexScalar::new(ExactScalar::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3)), ExactScalar::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3)))).collect()
}

/// Report of an exact orbit-separation experiment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub group: String,
    pub system: InvariantKind,
    pub seed: u64,
    pub samples: usize,
    pub invariance_samples: usize,
    /// Pairs `(z, g z)`.
    pub orbit_pairs: usize,
    /// Pairs of independent samples.
    pub random_pairs: usize,
    /// Pairs with equal invariants found in one orbit.
    pub equal_and_related: usize,
    pub counterexamples: usize,
    pub dimension: usize,
    pub jacobian_rank: usize,
}

impl SeparationReport {
    /// No counterexample and a Jacobian of full rank.
    pub fn passed(&self) -> bool {
        self.counterexamples == 0 && self.jacobian_rank == self.dimension
    }
}

pub const INVARIANCE_SAMPLES: usize = 100;

/// Checks invariance of `f` under the generators of `g` and then, for
/// `samples` pairs, that equal invariants happen exactly for pairs in one
/// orbit (orbits are enumerated exactly). Half of the pairs are `(z, g z)`
/// for a random element, the others independent, with one coordinate of a
/// permuted copy perturbed. Each sample has its own seeded stream.
pub fn orbit_separation_test(g: &FiniteMatrixGroup, f: &InvariantSystem, samples: usize, seed: u64) -> Result<SeparationReport, InvariantError> {
    let n = f.n;
    if g.ambient_dim() != n {
        return Err(InvariantError::DimensionMismatch { expected: n, found: g.ambient_dim() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..INVARIANCE_SAMPLES {
        let z = sample_vector(&mut rng, n);
        let fz = evaluate(f, &z)?;
        for (gi, m) in g.generators().iter().enumerate() {
            if evaluate(f, &act(m, &z))? != fz {
                return Err(InvariantError::NotInvariant { generator: gi });
            }
        }
    }
    let x: Vec<ExactScalar> = (0..n).map(|i| ExactScalar::from_int(i as i64 * i as i64 + 2 * i as i64 + 1)).collect();
    let jac = jacobian_rank(f, &x)?;
    let outcomes: Vec<(bool, bool, bool)> = (0..samples)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1 + s as u64).wrapping_mul(0x2545_F491_4F6C_DD1D));
            let z = sample_vector(&mut rng, n);
            let orbit_pair = s % 2 == 0;
            let w = if orbit_pair {
                act(g.element(rng.gen_range(0..g.order())), &z)
            } else {
                let mut w = z.clone();
                w.shuffle(&mut rng);
                let j = rng.gen_range(0..n);
                w[j] = &w[j] + &ComplexScalar::from_ints(rng.gen_range(-1..=1), rng.gen_range(-1..=1));
                w
            };
            let same_value = evaluate(f, &z).unwrap() == evaluate(f, &w).unwrap();
            let related = g.elements().iter().any(|m| act(m, &z) == w);
            (orbit_pair, same_value, related)
        })
        .collect();
    let counterexamples = outcomes.iter().filter(|&&(_, same, rel)| same != rel).count();
    Ok(SeparationReport {
        group: g.name().to_string(),
        system: f.kind,
        seed,
        samples,
        invariance_samples: INVARIANCE_SAMPLES,
        orbit_pairs: outcomes.iter().filter(|o| o.0).count(),
        random_pairs: outcomes.iter().filter(|o| !o.0).count(),
        equal_and_related: outcomes.iter().filter(|o| o.1 && o.2).count(),
        counterexamples,
        dimension: n,
        jacobian_rank: jac,
    })
}

/// An anti-linear (or linear) map `z -> c * g0(z)` or `z -> c * g0(conj z)`
/// with `c` a power of `i` and `g0` a coordinate permutation
/// (`g0(z)_j = z_{perm[j]}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SigmaForm {
    pub scale: ComplexScalar,
    pub conjugate: bool,
    pub perm: Vec<usize>,
}

impl SigmaForm {
    pub fn identity(n: usize) -> Self {
        SigmaForm { scale: ComplexScalar::one(), conjugate: false, perm: (0..n).collect() }
    }

    pub fn conjugation(n: usize) -> Self {
        SigmaForm { scale: ComplexScalar::one(), conjugate: true, perm: (0..n).collect() }
    }

    pub fn apply(&self, z: &[ComplexScalar]) -> ComplexVector {
        self.perm
            .iter()
            .map(|&j| {
                let x = if self.conjugate { z[j].conj() } else { z[j].clone() };
                &self.scale * &x
            })
            .collect()
    }
}

/// The induced map on invariant coordinates: `y_k -> coeffs[k] * y_k`, after
/// conjugating `y` when `conjugate` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InducedAction {
    pub coeffs: Vec<ComplexScalar>,
    pub conjugate: bool,
}

impl InducedAction {
    pub fn apply(&self, y: &[ComplexScalar]) -> ComplexVector {
        y.iter().zip(&self.coeffs).map(|(v, c)| c * &(if self.conjugate { v.conj() } else { v.clone() })).collect()
    }

    /// Text such as `(i*conj(s1), -conj(s2), ...)`.
    pub fn describe(&self) -> String {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let var = if self.conjugate { format!("conj(s{})", k + 1) } else { format!("s{}", k + 1) };
                let coef = if *c == ComplexScalar::one() {
                    String::new()
                } else if *c == ComplexScalar::from_ints(-1, 0) {
                    "-".into()
                } else if *c == ComplexScalar::i() {
                    "i*".into()
                } else if *c == ComplexScalar::from_ints(0, -1) {
                    "-i*".into()
                } else {
                    format!("({c})*")
                };
                format!("{coef}{var}")
            })
            .collect();
        format!("({})", parts.join(", "))
    }
}

/// Computes the action of `sigma` on the invariant coordinates from the
/// degrees (each invariant is homogeneous with real coefficients and
/// permutation invariant) and checks it pointwise on `checks` samples.
pub fn induced_boundary_action(f: &InvariantSystem, sigma: &SigmaForm, checks: usize, seed: u64) -> Result<InducedAction, InvariantError> {
    let n = f.n;
    if sigma.perm.len() != n {
        return Err(InvariantError::DimensionMismatch { expected: n, found: sigma.perm.len() });
    }
    let mut seen = vec![false; n];
    for &j in &sigma.perm {
        if j >= n || std::mem::replace(&mut seen[j], true) {
            return Err(InvariantError::UnsupportedSigmaForm("g0 is not a coordinate permutation".into()));
        }
    }
    let units = [ComplexScalar::one(), ComplexScalar::i(), ComplexScalar::from_ints(-1, 0), ComplexScalar::from_ints(0, -1)];
    if !units.contains(&sigma.scale) {
        return Err(InvariantError::UnsupportedSigmaForm(format!("scale {} is not a power of i", sigma.scale)));
    }
    if f.kind == InvariantKind::Coordinates && sigma.perm.iter().enumerate().any(|(j, &p)| j != p) {
        return Err(InvariantError::UnsupportedSigmaForm("coordinates are not permutation invariant".into()));
    }
    let coeffs = f.degrees().iter().map(|&d| sigma.scale.pow(d)).collect();
    let induced = InducedAction { coeffs, conjugate: sigma.conjugate };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..checks {
        let z = sample_vector(&mut rng, n);
        let lhs = induced.apply(&evaluate(f, &z)?);
        let rhs = evaluate(f, &sigma.apply(&z))?;
        assert_eq!(lhs, rhs, "induced action disagrees with evaluation");
    }
    Ok(induced)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{enumerate, LinearSubspace};

    fn real(v: &[i64]) -> ComplexVector {
        v.iter().map(|&x| ComplexScalar::from_ints(x, 0)).collect()
    }

    fn sym(n: usize) -> FiniteMatrixGroup {
        let mut gens = Vec::new();
        for i in 0..n - 1 {
            let mut p: Vec<usize> = (0..n).collect();
            p.swap(i, i + 1);
            gens.push(ExactMatrix::permutation(&p));
        }
        enumerate(&gens, None).unwrap().with_name(format!("S{n}"))
    }

    #[test]
    fn vieta() {
        let f = InvariantSystem::elementary_symmetric(3);
        assert_eq!(evaluate(&f, &real(&[1, 2, 3])).unwrap(), real(&[6, 11, 6]));
        assert_eq!(evaluate(&f, &real(&[0, 0, 0])).unwrap(), real(&[0, 0, 0]));
        assert_eq!(evaluate(&f, &real(&[3, 1, 2])).unwrap(), real(&[6, 11, 6]));
        assert_eq!(evaluate(&f, &real(&[1, 2])).unwrap_err(), InvariantError::DimensionMismatch { expected: 3, found: 2 });
    }

    #[test]
    fn homogeneity() {
        let f = InvariantSystem::elementary_symmetric(4);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let z = sample_vector(&mut rng, 4);
            let lam = ExactScalar::from_ratio(rng.gen_range(-5..=5), rng.gen_range(1..=4));
            let fz = evaluate(&f, &z).unwrap();
            let zl: ComplexVector = z.iter().map(|x| x.scale(&lam)).collect();
            let fl = evaluate(&f, &zl).unwrap();
            for (k, (a, b)) in fz.iter().zip(&fl).enumerate() {
                assert_eq!(a.scale(&lam.pow(k as u32 + 1)), *b);
            }
        }
    }

    #[test]
    fn separation_s4() {
        let g = sym(4);
        let r = orbit_separation_test(&g, &InvariantSystem::elementary_symmetric(4), 400, 1).unwrap();
        assert_eq!(r.counterexamples, 0);
        assert_eq!(r.jacobian_rank, 4);
        assert!(r.equal_and_related >= r.orbit_pairs);
        assert!(r.passed());
    }

    #[test]
    fn separation_trivial() {
        let g = enumerate_trivial(3);
        let r = orbit_separation_test(&g, &InvariantSystem::coordinates(3), 200, 2).unwrap();
        assert_eq!(r.counterexamples, 0);
    }

    fn enumerate_trivial(n: usize) -> FiniteMatrixGroup {
        crate::group::enumerate_in(&[ExactMatrix::identity(n)], LinearSubspace::full(n), None).unwrap()
    }

    #[test]
    fn non_invariant_system_detected() {
        let g = sym(3);
        assert_eq!(orbit_separation_test(&g, &InvariantSystem::coordinates(3), 10, 0).unwrap_err(), InvariantError::NotInvariant { generator: 0 });
    }

    #[test]
    fn induced_actions() {
        let f = InvariantSystem::elementary_symmetric(4);
        let id = induced_boundary_action(&f, &SigmaForm::identity(4), 20, 0).unwrap();
        assert_eq!(id.coeffs, vec![ComplexScalar::one(); 4]);
        assert!(!id.conjugate);
        let c = induced_boundary_action(&f, &SigmaForm::conjugation(4), 20, 0).unwrap();
        assert_eq!(c.describe(), "(conj(s1), conj(s2), conj(s3), conj(s4))");
        let sigma = SigmaForm { scale: ComplexScalar::i(), conjugate: true, perm: vec![1, 0, 3, 2] };
        let s = induced_boundary_action(&f, &sigma, 50, 0).unwrap();
        assert_eq!(s.describe(), "(i*conj(s1), -conj(s2), -i*conj(s3), conj(s4))");
        let bad = SigmaForm { scale: ComplexScalar::from_ints(1, 1), conjugate: true, perm: vec![0, 1, 2, 3] };
        assert!(matches!(induced_boundary_action(&f, &bad, 1, 0), Err(InvariantError::UnsupportedSigmaForm(_))));
    }
}
