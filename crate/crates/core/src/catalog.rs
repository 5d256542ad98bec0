//! Built-in groups: reflection groups, their rotation subgroups, monomial
//! groups, M(R5), the binary icosahedral group and a diagonal product.

use serde::{Deserialize, Serialize};

use crate::group::{FiniteMatrixGroup, GroupDefinition, GroupError, GroupKind, LinearSubspace, parse_cycles};
use crate::scalar::{ExactMatrix, ExactScalar, ExactVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuotientType {
    Ball,
    Sphere,
    Neither,
    Unknown,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub definition: GroupDefinition,
    pub expected_order: usize,
    pub expected_kind: GroupKind,
    pub expected_verdict: QuotientType,
    /// Base point for the Dirichlet domain, if a specific one is used.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<ExactVector>,
    pub note: String,
}

impl CatalogEntry {
    pub fn dimension(&self) -> usize {
        self.definition.dimension
    }

    pub fn field_d(&self) -> u64 {
        self.definition.field_d
    }

    pub fn build(&self) -> Result<FiniteMatrixGroup, GroupError> {
        Ok(self.definition.build(None)?.with_name(self.name.clone()))
    }
}

fn perm_matrix(cycles: &str, n: usize) -> ExactMatrix {
    ExactMatrix::permutation(&parse_cycles(cycles, n).expect("valid cycles"))
}

fn diag(signs: &[i64]) -> ExactMatrix {
    let n = signs.len();
    let mut m = ExactMatrix::zeros(n, n);
    for (i, &s) in signs.iter().enumerate() {
        m.set(i, i, ExactScalar::from_int(s));
    }
    m
}

fn entry(name: &str, sub: LinearSubspace, gens: &[ExactMatrix], order: usize, kind: GroupKind, verdict: QuotientType, note: &str) -> CatalogEntry {
    CatalogEntry {
        name: name.into(),
        definition: GroupDefinition::new(name, &sub, gens),
        expected_order: order,
        expected_kind: kind,
        expected_verdict: verdict,
        base_point: None,
        note: note.into(),
    }
}

/// Reflection `x -> x - 2 (x.a)/(a.a) a`.
fn reflection(a: &ExactVector) -> ExactMatrix {
    let n = a.len();
    let aa = a.dot(a);
    let two = ExactScalar::from_int(2);
    let mut m = ExactMatrix::identity(n);
    for r in 0..n {
        for c in 0..n {
            let v = m.get(r, c) - &(&(&two * &a.0[r]) * &a.0[c]).checked_div(&aa).expect("nonzero root");
            m.set(r, c, v);
        }
    }
    m
}

/// Left multiplication by the quaternion `a + b i + c j + d k`.
fn quaternion_left(q: [ExactScalar; 4]) -> ExactMatrix {
    let [a, b, c, d] = q;
    let rows = vec![
        vec![a.clone(), -&b, -&c, -&d],
        vec![b.clone(), a.clone(), -&d, c.clone()],
        vec![c.clone(), d.clone(), a.clone(), -&b],
        vec![d.clone(), -&c, b.clone(), a.clone()],
    ];
    ExactMatrix::from_rows(rows).expect("square")
}

fn dihedral(m: usize) -> CatalogEntry {
    let name = format!("I2({m})");
    let note = "dihedral reflection group";
    match m {
        2 => entry(&name, LinearSubspace::full(2), &[diag(&[-1, 1]), diag(&[1, -1])], 4, GroupKind::ReflectionGroup, QuotientType::Ball, note),
        4 => {
            let swap = ExactMatrix::from_int_rows(&[&[0, 1], &[1, 0]]);
            entry(&name, LinearSubspace::full(2), &[diag(&[1, -1]), swap], 8, GroupKind::ReflectionGroup, QuotientType::Ball, note)
        }
        3 | 6 => {
            // mirrors at angles 0 and pi/m
            let c = ExactScalar::from_ratio(if m == 3 { -1 } else { 1 }, 2);
            let s = ExactScalar::sqrt(3).checked_mul(&ExactScalar::from_ratio(1, 2)).unwrap();
            let r = ExactMatrix::from_rows(vec![vec![c.clone(), s.clone()], vec![s, -&c]]).unwrap();
            entry(&name, LinearSubspace::full(2), &[diag(&[1, -1]), r], 2 * m, GroupKind::ReflectionGroup, QuotientType::Ball, note)
        }
        5 => {
            // two roots of H3 at angle 4 pi / 5, acting on the plane they span
            let phi = ExactScalar::golden();
            let one = ExactScalar::one();
            let a1 = ExactVector(vec![ExactScalar::from_int(2), ExactScalar::zero(), ExactScalar::zero()]);
            let a2 = ExactVector(vec![-&phi, &phi - &one, -&one]);
            let normal = ExactVector(vec![ExactScalar::zero(), one.clone(), &phi - &one]);
            let sub = LinearSubspace::from_equations(3, vec![normal]).expect("plane");
            entry(&name, sub, &[reflection(&a1), reflection(&a2)], 10, GroupKind::ReflectionGroup, QuotientType::Ball, note)
        }
        _ => panic!("I2(m) is provided for 2 <= m <= 6"),
    }
}

fn sign_group(n: usize, even: bool) -> CatalogEntry {
    let gens: Vec<ExactMatrix> = if even {
        (0..n - 1)
            .map(|i| {
                let mut s = vec![1; n];
                s[i] = -1;
                s[i + 1] = -1;
                diag(&s)
            })
            .collect()
    } else {
        (0..n)
            .map(|i| {
                let mut s = vec![1; n];
                s[i] = -1;
                diag(&s)
            })
            .collect()
    };
    if even {
        entry(&format!("D+({n})"), LinearSubspace::full(n), &gens, 1 << (n - 1), GroupKind::RotationGroup, QuotientType::Sphere, "diagonal sign changes of even weight")
    } else {
        entry(&format!("D({n})"), LinearSubspace::full(n), &gens, 1 << n, GroupKind::ReflectionGroup, QuotientType::Ball, "diagonal sign changes")
    }
}

/// The catalog, in a fixed order.
pub fn catalog() -> Vec<CatalogEntry> {
    let mut out = Vec::new();
    out.push(entry("W(A2)", LinearSubspace::sum_zero(3), &[perm_matrix("(12)", 3), perm_matrix("(23)", 3)], 6, GroupKind::ReflectionGroup, QuotientType::Ball, "symmetric group on the sum-zero plane"));
    out.push(entry(
        "W(A3)",
        LinearSubspace::sum_zero(4),
        &[perm_matrix("(12)", 4), perm_matrix("(23)", 4), perm_matrix("(34)", 4)],
        24,
        GroupKind::ReflectionGroup,
        QuotientType::Ball,
        "symmetric group on the sum-zero hyperplane",
    ));
    out.push(entry(
        "W(B3)",
        LinearSubspace::full(3),
        &[perm_matrix("(12)", 3), perm_matrix("(23)", 3), diag(&[1, 1, -1])],
        48,
        GroupKind::ReflectionGroup,
        QuotientType::Ball,
        "signed permutations",
    ));
    out.push(entry(
        "W+(A3)",
        LinearSubspace::sum_zero(4),
        &[perm_matrix("(123)", 4), perm_matrix("(234)", 4)],
        12,
        GroupKind::RotationGroup,
        QuotientType::Sphere,
        "alternating group, the rotation subgroup of W(A3)",
    ));
    for m in 2..=6 {
        out.push(dihedral(m));
    }
    for n in 2..=4 {
        out.push(sign_group(n, false));
    }
    for n in 2..=4 {
        out.push(sign_group(n, true));
    }
    let mut r5 = entry(
        "M(R5)",
        LinearSubspace::sum_zero(6),
        &[perm_matrix("(12)(34)", 6), perm_matrix("(15)(23)", 6), perm_matrix("(16)(24)", 6)],
        60,
        GroupKind::RotationGroup,
        QuotientType::Sphere,
        "alternating group of degree 5 acting through A6 on the sum-zero subspace of R^6",
    );
    r5.base_point = Some(ExactVector::from_ints(&[-1, -1, -1, 0, 1, 2]));
    out.push(r5);
    let half = ExactScalar::from_ratio(1, 2);
    let phi = ExactScalar::golden();
    let q1 = quaternion_left([half.clone(), half.clone(), half.clone(), half.clone()]);
    let q2 = quaternion_left([&phi * &half, &(&phi - &ExactScalar::one()) * &half, half.clone(), ExactScalar::zero()]);
    out.push(entry(
        "BinaryIcosahedral",
        LinearSubspace::full(4),
        &[q1, q2],
        120,
        GroupKind::NotRR,
        QuotientType::Neither,
        "unit quaternions acting by left multiplication; quotient is a homology sphere that is not a sphere",
    ));
    let diag_perm = |cycles: &str| {
        let p = parse_cycles(cycles, 4).unwrap();
        let q: Vec<usize> = p.iter().copied().chain(p.iter().map(|&x| x + 4)).collect();
        ExactMatrix::permutation(&q)
    };
    let eq = |block: usize| ExactVector((0..8).map(|i| ExactScalar::from_int(i64::from(i / 4 == block))).collect());
    out.push(entry(
        "Delta(W(A3)xW(A3))",
        LinearSubspace::from_equations(8, vec![eq(0), eq(1)]).unwrap(),
        &[diag_perm("(12)"), diag_perm("(23)"), diag_perm("(34)")],
        24,
        GroupKind::RotationGroup,
        QuotientType::Sphere,
        "diagonal of W(A3) x W(A3); the complexified reflection group as a real rotation group",
    ));
    out
}

/// Catalog lookup by name (case-insensitive, `BinaryIcosahedral` also as `P`).
pub fn lookup(name: &str) -> Option<CatalogEntry> {
    let key = if name.eq_ignore_ascii_case("P") { "BinaryIcosahedral" } else { name };
    catalog().into_iter().find(|e| e.name.eq_ignore_ascii_case(key))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::classify_group;

    #[test]
    fn orders_and_kinds() {
        for e in catalog() {
            let g = e.build().unwrap();
            assert_eq!(g.order(), e.expected_order, "{}", e.name);
            assert_eq!(classify_group(&g).kind, e.expected_kind, "{}", e.name);
        }
    }

    #[test]
    fn lookups() {
        assert_eq!(lookup("m(r5)").unwrap().expected_order, 60);
        assert_eq!(lookup("P").unwrap().expected_verdict, QuotientType::Neither);
        assert!(lookup("nothing").is_none());
    }
}
