//! Structure-constant tables of finite-dimensional Lie algebras, computed from explicit
//! operators or vector fields, or built from closed-form relations.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::operator::{DiffOperator, MultiIndex};
use crate::scalar::{Atom, ScalarExpr};
use crate::Rational;

use super::generators::VectorField;
use super::laurent::Laurent;

/// `[e_i, e_j] = Σ_k c[i][j][k] e_k + central[i][j]·z` with entries that may depend on a
/// parameter `g`. The central element `z` is not part of the basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraTable {
    names: Vec<String>,
    c: Vec<Vec<Vec<Laurent>>>,
    central: Vec<Vec<Laurent>>,
    central_name: String,
}

impl LieAlgebraTable {
    /// The abelian algebra on `names`.
    pub fn new(names: Vec<String>) -> Self {
        let n = names.len();
        LieAlgebraTable {
            names,
            c: vec![vec![vec![Laurent::zero(); n]; n]; n],
            central: vec![vec![Laurent::zero(); n]; n],
            central_name: "1".into(),
        }
    }

    pub fn with_central_name(mut self, name: impl Into<String>) -> Self {
        self.central_name = name.into();
        self
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn central_name(&self) -> &str {
        &self.central_name
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Set `[e_i, e_j]` and, by antisymmetry, `[e_j, e_i]`.
    pub fn set(&mut self, i: usize, j: usize, coeffs: Vec<Laurent>, central: Laurent) {
        assert_eq!(coeffs.len(), self.dim());
        for (k, v) in coeffs.into_iter().enumerate() {
            self.c[j][i][k] = v.neg();
            self.c[i][j][k] = v;
        }
        self.central[j][i] = central.neg();
        self.central[i][j] = central;
    }

    pub fn structure(&self, i: usize, j: usize, k: usize) -> &Laurent {
        &self.c[i][j][k]
    }

    pub fn central(&self, i: usize, j: usize) -> &Laurent {
        &self.central[i][j]
    }

    pub fn has_central(&self) -> bool {
        self.central.iter().flatten().any(|v| !v.is_zero())
    }

    pub fn is_parametric(&self) -> bool {
        self.c
            .iter()
            .flatten()
            .flatten()
            .chain(self.central.iter().flatten())
            .any(|v| v.as_constant().is_none())
    }

    /// The same algebra with the central element appended to the basis when it is used.
    pub fn extended(&self) -> LieAlgebraTable {
        if !self.has_central() {
            return self.clone();
        }
        let n = self.dim();
        let mut names = self.names.clone();
        names.push(self.central_name.clone());
        let mut out = LieAlgebraTable::new(names);
        for i in 0..n {
            for j in 0..n {
                let mut v = self.c[i][j].clone();
                v.push(self.central[i][j].clone());
                out.c[i][j] = v;
            }
        }
        out
    }

    /// Map every entry through `f`.
    fn map(&self, f: impl Fn(&Laurent) -> Result<Laurent>) -> Result<LieAlgebraTable> {
        let mut out = self.clone();
        for v in out.c.iter_mut().flatten().flatten() {
            *v = f(v)?;
        }
        for v in out.central.iter_mut().flatten() {
            *v = f(v)?;
        }
        Ok(out)
    }

    /// Specialize the parameter to `g`.
    pub fn eval(&self, g: &Rational) -> LieAlgebraTable {
        self.map(|v| Ok(Laurent::constant(v.eval(g))))
            .expect("evaluation is total")
    }

    /// The `g → 0` limit; fails when an entry keeps a negative power of `g`.
    pub fn limit(&self) -> Result<LieAlgebraTable> {
        self.map(|v| {
            v.limit_at_zero()
                .map(Laurent::constant)
                .ok_or_else(|| Error::SingularContraction(format!("entry {v} diverges as g -> 0")))
        })
    }

    /// Rational structure constants of the extended table, or `None` for parametric tables.
    pub fn constants(&self) -> Option<Vec<Vec<Vec<Rational>>>> {
        let ext = self.extended();
        ext.c
            .iter()
            .map(|row| {
                row.iter()
                    .map(|v| {
                        v.iter()
                            .map(|e| e.as_constant())
                            .collect::<Option<Vec<_>>>()
                    })
                    .collect::<Option<Vec<_>>>()
            })
            .collect()
    }

    /// Triples `(i, j, k)` of the extended basis where the Jacobi identity fails.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let ext = self.extended();
        let n = ext.dim();
        let bracket_with = |v: &[Laurent], k: usize| -> Vec<Laurent> {
            let mut out = vec![Laurent::zero(); n];
            for (m, vm) in v.iter().enumerate() {
                if vm.is_zero() {
                    continue;
                }
                for (q, o) in out.iter_mut().enumerate() {
                    *o = o.add(&vm.mul(&ext.c[m][k][q]));
                }
            }
            out
        };
        let mut bad = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let a = bracket_with(&ext.c[i][j], k);
                    let b = bracket_with(&ext.c[j][k], i);
                    let c = bracket_with(&ext.c[k][i], j);
                    if (0..n).any(|q| !a[q].add(&b[q]).add(&c[q]).is_zero()) {
                        bad.push((i, j, k));
                    }
                }
            }
        }
        bad
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                self.central[i][j] == self.central[j][i].neg()
                    && (0..n).all(|k| self.c[i][j][k] == self.c[j][i][k].neg())
            })
        })
    }

    /// `[e_i, e_j]` written out, e.g. `-2*A9` or `g^2*J`.
    pub fn entry_string(&self, i: usize, j: usize) -> String {
        let mut parts: Vec<(String, &Laurent)> = (0..self.dim())
            .map(|k| (self.names[k].clone(), &self.c[i][j][k]))
            .collect();
        parts.push((self.central_name.clone(), &self.central[i][j]));
        let terms: Vec<String> = parts
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(name, v)| match v.as_constant() {
                Some(c) if c.is_one() => name,
                Some(c) if c == -Rational::one() => format!("-{name}"),
                Some(c) => format!("{c}*{name}"),
                None if v.coeffs().len() == 1 => format!("{v}*{name}"),
                None => format!("({v})*{name}"),
            })
            .collect();
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join(" + ").replace("+ -", "- ")
        }
    }

    /// Pairs `(i, j)`, `i < j`, whose brackets differ between the two tables.
    pub fn differences(&self, other: &LieAlgebraTable) -> Vec<(usize, usize)> {
        let n = self.dim();
        if other.dim() != n {
            return vec![(0, 0)];
        }
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if self.c[i][j] != other.c[i][j] || self.central[i][j] != other.central[i][j] {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Bracket of two vectors given in extended coordinates (rational tables only).
    pub fn bracket_vectors(&self, u: &[Rational], v: &[Rational]) -> Option<Vec<Rational>> {
        let c = self.constants()?;
        let n = c.len();
        let mut out = vec![Rational::zero(); n];
        for i in 0..n {
            if u[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if v[j].is_zero() {
                    continue;
                }
                let w = &u[i] * &v[j];
                for (k, o) in out.iter_mut().enumerate() {
                    if !c[i][j][k].is_zero() {
                        *o += &w * &c[i][j][k];
                    }
                }
            }
        }
        Some(out)
    }

    /// Structure constants in the basis `vectors` (extended coordinates, rational tables only).
    pub fn change_basis(
        &self,
        vectors: &[Vec<Rational>],
        names: Vec<String>,
    ) -> Result<LieAlgebraTable> {
        if self.is_parametric() {
            return Err(Error::InvalidParameter(
                "change of basis needs a table without parameter".into(),
            ));
        }
        assert_eq!(vectors.len(), names.len());
        let cols: Vec<BTreeMap<usize, Rational>> = vectors.iter().map(|v| sparse(v)).collect();
        let mut out = LieAlgebraTable::new(names.clone());
        for i in 0..vectors.len() {
            for j in i + 1..vectors.len() {
                let b = self
                    .bracket_vectors(&vectors[i], &vectors[j])
                    .expect("rational table");
                let x = linalg::solve_sparse(&cols, &sparse(&b)).ok_or_else(|| {
                    Error::BasisNotClosed {
                        left: names[i].clone(),
                        right: names[j].clone(),
                        residual: format!("{b:?}"),
                    }
                })?;
                out.set(
                    i,
                    j,
                    x.into_iter().map(Laurent::constant).collect(),
                    Laurent::zero(),
                );
            }
        }
        Ok(out)
    }

    /// The table in the rescaled basis `e'_a = s_a e_a`.
    pub fn sign_transform(&self, signs: &[i64]) -> Result<LieAlgebraTable> {
        let n = self.dim();
        let vectors: Vec<Vec<Rational>> = (0..n)
            .map(|a| {
                let mut v = linalg::unit(self.extended().dim(), a);
                v[a] = Rational::from_integer(signs[a].into());
                v
            })
            .collect();
        self.change_basis(&vectors, self.names.clone())
    }

    pub fn renamed(mut self, names: Vec<String>) -> LieAlgebraTable {
        assert_eq!(names.len(), self.dim());
        self.names = names;
        self
    }
}

fn sparse(v: &[Rational]) -> BTreeMap<usize, Rational> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

impl Serialize for LieAlgebraTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry<'a> {
            left: &'a str,
            right: &'a str,
            result: String,
        }
        let n = self.dim();
        let mut entries = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                entries.push(Entry {
                    left: &self.names[i],
                    right: &self.names[j],
                    result: self.entry_string(i, j),
                });
            }
        }
        let mut st = s.serialize_struct("LieAlgebraTable", 3)?;
        st.serialize_field("dim", &n)?;
        st.serialize_field("basis", &self.names)?;
        st.serialize_field("brackets", &entries)?;
        st.end()
    }
}

fn table_from<T, K>(
    basis: &[T],
    names: Vec<String>,
    central: &T,
    coords: impl Fn(&T) -> BTreeMap<K, Rational> + Sync,
    bracket: impl Fn(&T, &T) -> T + Sync,
    show: impl Fn(&T) -> String + Sync,
) -> Result<LieAlgebraTable>
where
    T: Sync,
    K: Ord + Clone + Send + Sync,
{
    assert_eq!(basis.len(), names.len());
    let n = basis.len();
    let mut cols: Vec<BTreeMap<K, Rational>> = basis.iter().map(&coords).collect();
    let central_coords = coords(central);
    let use_central = linalg::solve_sparse(&cols, &central_coords).is_none();
    if use_central {
        cols.push(central_coords);
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let solved: Vec<Result<(usize, usize, Vec<Rational>)>> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let b = bracket(&basis[i], &basis[j]);
            linalg::solve_sparse(&cols, &coords(&b))
                .map(|x| (i, j, x))
                .ok_or_else(|| Error::BasisNotClosed {
                    left: names[i].clone(),
                    right: names[j].clone(),
                    residual: show(&b),
                })
        })
        .collect();
    let mut out = LieAlgebraTable::new(names);
    for r in solved {
        let (i, j, mut x) = r?;
        let z = if use_central {
            x.pop().expect("central coordinate")
        } else {
            Rational::zero()
        };
        out.set(
            i,
            j,
            x.into_iter().map(Laurent::constant).collect(),
            Laurent::constant(z),
        );
    }
    Ok(out)
}

fn operator_coords(a: &DiffOperator) -> BTreeMap<(MultiIndex, Atom), Rational> {
    let mut out = BTreeMap::new();
    for (idx, c) in a.terms() {
        for (atom, v) in c.atoms() {
            out.insert((*idx, atom), v);
        }
    }
    out
}

fn field_coords(v: &VectorField) -> BTreeMap<(usize, Atom), Rational> {
    let mut out = BTreeMap::new();
    for (k, c) in v.components().iter().enumerate() {
        for (atom, x) in c.atoms() {
            out.insert((k, atom), x);
        }
    }
    out
}

/// Expand every commutator `[A_i, A_j]` in the basis, with the identity operator as a
/// central element when it is not already in the span.
pub fn commutator_table(basis: &[DiffOperator], names: Vec<String>) -> Result<LieAlgebraTable> {
    table_from(
        basis,
        names,
        &DiffOperator::identity(),
        operator_coords,
        |a, b| a.commutator(b),
        |a| a.to_string(),
    )
}

/// Expand every bracket `[X_i, X_j]` in the basis, with `u ∂_u` as a central element when it
/// is not already in the span.
pub fn vector_field_table(basis: &[VectorField], names: Vec<String>) -> Result<LieAlgebraTable> {
    let u_du = VectorField::new(
        ScalarExpr::zero(),
        ScalarExpr::zero(),
        ScalarExpr::zero(),
        ScalarExpr::one(),
    );
    table_from(
        basis,
        names,
        &u_du,
        field_coords,
        |a, b| a.bracket(b),
        |a| a.to_string(),
    )
}

/// `(i, j, [(k, c)])`
pub type Relation = (usize, usize, &'static [(usize, i64)]);

/// Nonzero brackets of the `A` basis, `(i, j, [(k, c)])` meaning `[A_i, A_j] = Σ c A_k`
/// (1-based, `i < j`).
pub const A_RELATIONS: &[Relation] = &[
    (1, 2, &[(1, 2)]),
    (1, 3, &[(2, 1)]),
    (1, 5, &[(7, 1)]),
    (1, 8, &[(6, 1)]),
    (2, 3, &[(3, 2)]),
    (2, 5, &[(5, 1)]),
    (2, 6, &[(6, -1)]),
    (2, 7, &[(7, -1)]),
    (2, 8, &[(8, 1)]),
    (3, 6, &[(8, -1)]),
    (3, 7, &[(5, -1)]),
    (4, 5, &[(8, -1)]),
    (4, 6, &[(7, -1)]),
    (4, 7, &[(6, -1)]),
    (4, 8, &[(5, -1)]),
    (5, 7, &[(9, -2)]),
    (6, 8, &[(9, -2)]),
];

/// Nonzero brackets of the `X` basis, in the same layout as [`A_RELATIONS`].
pub const X_RELATIONS: &[Relation] = &[
    (1, 2, &[(1, 2)]),
    (1, 3, &[(2, 1)]),
    (1, 5, &[(7, 1)]),
    (1, 8, &[(6, -1)]),
    (2, 3, &[(3, 2)]),
    (2, 5, &[(5, 1)]),
    (2, 6, &[(6, -1)]),
    (2, 7, &[(7, -1)]),
    (2, 8, &[(8, 1)]),
    (3, 6, &[(8, 1)]),
    (3, 7, &[(5, -1)]),
    (4, 5, &[(8, -1)]),
    (4, 6, &[(7, 1)]),
    (4, 7, &[(6, 1)]),
    (4, 8, &[(5, -1)]),
    (5, 7, &[(9, 2)]),
    (6, 8, &[(9, -2)]),
];

/// Build a rational table from a relation list in the layout of [`A_RELATIONS`].
pub fn table_from_relations(names: Vec<String>, relations: &[Relation]) -> LieAlgebraTable {
    let n = names.len();
    let mut out = LieAlgebraTable::new(names);
    for (i, j, terms) in relations {
        let mut v = vec![Laurent::zero(); n];
        for (k, c) in *terms {
            v[k - 1] = Laurent::int(*c);
        }
        out.set(i - 1, j - 1, v, Laurent::zero());
    }
    out
}

/// Generator names of `so(p,q)` in the order `J12, J13, J14, J23, J24, J34`.
pub fn so31_names() -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=4 {
        for j in i + 1..=4 {
            out.push(format!("J{i}{j}"));
        }
    }
    out
}

/// Position and sign of `J_ij` in the basis of [`so31_names`] (`J_ji = −J_ij`).
fn j_index(i: usize, j: usize) -> Option<(usize, i64)> {
    if i == j {
        return None;
    }
    let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
    let pos = so31_names()
        .iter()
        .position(|n| *n == format!("J{a}{b}"))
        .expect("index pair");
    Some((pos, s))
}

/// Structure constants of the orthogonal algebra of the diagonal metric `g`:
/// `[J_ij, J_kl] = g_jk J_il − g_jl J_ik − g_ik J_jl + g_il J_jk`.
pub fn so31_table(g: [i64; 4]) -> Result<LieAlgebraTable> {
    if g.contains(&0) {
        return Err(Error::DegenerateMetric);
    }
    if g.iter().any(|v| v.abs() != 1) {
        return Err(Error::InvalidParameter(format!(
            "metric entries must be +1 or -1, got {g:?}"
        )));
    }
    let metric = |a: usize, b: usize| if a == b { g[a - 1] } else { 0 };
    let names = so31_names();
    let pairs: Vec<(usize, usize)> = (1..=4)
        .flat_map(|i| (i + 1..=4).map(move |j| (i, j)))
        .collect();
    let mut out = LieAlgebraTable::new(names);
    for (x, &(i, j)) in pairs.iter().enumerate() {
        for (y, &(k, l)) in pairs.iter().enumerate().skip(x + 1) {
            let mut v = vec![0i64; 6];
            let terms = [
                (metric(j, k), i, l),
                (-metric(j, l), i, k),
                (-metric(i, k), j, l),
                (metric(i, l), j, k),
            ];
            for (c, a, b) in terms {
                if c == 0 {
                    continue;
                }
                if let Some((pos, s)) = j_index(a, b) {
                    v[pos] += c * s;
                }
            }
            out.set(
                x,
                y,
                v.into_iter().map(Laurent::int).collect(),
                Laurent::zero(),
            );
        }
    }
    Ok(out)
}

/// Rescaled basis `e'_a = g^{n_a} e_{src_a}` given as `(src_a, n_a, name_a)`; `scaling` must
/// list every basis element exactly once.
pub fn contract(tab: &LieAlgebraTable, scaling: &[(usize, i32, &str)]) -> Result<LieAlgebraTable> {
    let n = tab.dim();
    let mut seen = vec![false; n];
    for (src, _, _) in scaling {
        if *src >= n || seen[*src] {
            return Err(Error::InvalidParameter(
                "scaling must be a permutation of the basis".into(),
            ));
        }
        seen[*src] = true;
    }
    if scaling.len() != n {
        return Err(Error::InvalidParameter(
            "scaling must cover the whole basis".into(),
        ));
    }
    let names = scaling.iter().map(|(_, _, s)| s.to_string()).collect();
    let mut out = LieAlgebraTable::new(names).with_central_name(tab.central_name());
    for (a, (sa, na, _)) in scaling.iter().enumerate() {
        for (b, (sb, nb, _)) in scaling.iter().enumerate().skip(a + 1) {
            let v = scaling
                .iter()
                .map(|(sc, nc, _)| tab.structure(*sa, *sb, *sc).shift(na + nb - nc))
                .collect();
            out.set(a, b, v, tab.central(*sa, *sb).shift(na + nb));
        }
    }
    Ok(out)
}

/// `J = J12`, `D1± = g·J13/J14`, `D2± = g·J23/J24`, `C = g²·J34` over `so(3,1)`.
pub fn so31_contraction() -> Result<LieAlgebraTable> {
    let so = so31_table([1, -1, -1, -1])?;
    contract(
        &so,
        &[
            (0, 0, "J"),
            (1, 1, "D1+"),
            (2, 1, "D1-"),
            (3, 1, "D2+"),
            (4, 1, "D2-"),
            (5, 2, "C"),
        ],
    )
}

/// The contracted basis written in the `A` basis: `J = A4`, `D1+ = A5`, `D1- = A7`,
/// `D2+ = A8`, `D2- = A6`, `C = 2 A9`.
pub fn contraction_in_a_basis() -> Vec<Vec<Rational>> {
    [(4, 1), (5, 1), (7, 1), (8, 1), (6, 1), (9, 2)]
        .iter()
        .map(|&(k, c)| {
            let mut v = linalg::unit(9, k - 1);
            v[k - 1] = Rational::from_integer(c.into());
            v
        })
        .collect()
}
