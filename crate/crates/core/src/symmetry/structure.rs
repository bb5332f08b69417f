//! Structural invariants of a finite-dimensional Lie algebra given by its structure constants:
//! center, derived algebra, radical, nilradical, Heisenberg ideals and `sl(2)` triples.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::linalg::{self, Matrix};
use crate::Rational;

use super::table::LieAlgebraTable;

type Consts = Vec<Vec<Vec<Rational>>>;

/// A subspace given by a basis in the coordinates of the (extended) table basis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Subspace {
    #[serde(skip)]
    pub vectors: Vec<Vec<Rational>>,
    pub basis: Vec<String>,
    /// Closed under the bracket.
    pub subalgebra: bool,
    /// Stable under bracketing with the whole algebra.
    pub ideal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HeisenbergInfo {
    /// `n` in `h_n`, so the ideal has dimension `2n + 1`.
    pub n: usize,
    pub center: Vec<String>,
}

/// `[h, e] = 2e`, `[h, f] = −2f`, `[e, f] = λ h` with `h` already rescaled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sl2Triple {
    pub h: String,
    pub e: String,
    pub f: String,
    pub lambda: String,
    #[serde(skip)]
    pub indices: [usize; 3],
}

/// A basis element commuting with an `sl(2)` triple whose square of `ad` is a multiple `μ` of
/// the identity on the Heisenberg ideal modulo its center.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReductiveFactor {
    pub element: String,
    pub mu: String,
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    pub dim: usize,
    pub basis: Vec<String>,
    pub center: Subspace,
    pub derived: Subspace,
    pub radical: Subspace,
    pub nilradical: Subspace,
    pub heisenberg: Option<HeisenbergInfo>,
    pub sl2_triples: Vec<Sl2Triple>,
    pub commuting_factors: Vec<ReductiveFactor>,
    /// `dim g − dim rad g`.
    pub levi_dimension: usize,
    pub labels: Vec<String>,
    pub aliases: Vec<String>,
}

/// Write `v` as a combination of `names`, e.g. `2*A9 - A1`.
pub fn format_vector(names: &[String], v: &[Rational]) -> String {
    let parts: Vec<String> = v
        .iter()
        .zip(names)
        .filter(|(c, _)| !c.is_zero())
        .map(|(c, n)| {
            if c.is_one() {
                n.clone()
            } else if *c == -Rational::one() {
                format!("-{n}")
            } else {
                format!("{c}*{n}")
            }
        })
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ").replace("+ -", "- ")
    }
}

fn bracket(c: &Consts, u: &[Rational], v: &[Rational]) -> Vec<Rational> {
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
            for k in 0..n {
                if !c[i][j][k].is_zero() {
                    out[k] += &w * &c[i][j][k];
                }
            }
        }
    }
    out
}

/// Matrix of `ad_x` (column `j` holds `[x, e_j]`).
fn ad(c: &Consts, x: &[Rational]) -> Matrix {
    let n = c.len();
    let cols: Vec<Vec<Rational>> = (0..n).map(|j| bracket(c, x, &linalg::unit(n, j))).collect();
    (0..n)
        .map(|k| (0..n).map(|j| cols[j][k].clone()).collect())
        .collect()
}

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

fn trace_form(c: &Consts, x: &[Rational], y: &[Rational]) -> Rational {
    let p = mat_mul(&ad(c, x), &ad(c, y));
    (0..p.len()).map(|i| p[i][i].clone()).sum()
}

/// Vectors `x` in `span(within)` with `form(x, y) = 0` for every `y` in `against`.
fn orthogonal_in(
    c: &Consts,
    within: &[Vec<Rational>],
    against: &[Vec<Rational>],
) -> Vec<Vec<Rational>> {
    let rows: Matrix = against
        .iter()
        .map(|y| within.iter().map(|w| trace_form(c, w, y)).collect())
        .collect();
    let coeffs = linalg::nullspace(&rows, within.len());
    combine(within, &coeffs)
}

fn combine(basis: &[Vec<Rational>], coeffs: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = basis.first().map_or(0, |v| v.len());
    let vs: Vec<Vec<Rational>> = coeffs
        .iter()
        .map(|a| {
            let mut v = vec![Rational::zero(); n];
            for (ai, b) in a.iter().zip(basis) {
                for k in 0..n {
                    v[k] += ai * &b[k];
                }
            }
            v
        })
        .collect();
    linalg::span_basis(&vs, n)
}

/// Elements of `span(within)` commuting with every element of `with`.
fn centralizer_in(
    c: &Consts,
    within: &[Vec<Rational>],
    with: &[Vec<Rational>],
) -> Vec<Vec<Rational>> {
    let n = c.len();
    let mut rows: Matrix = Vec::new();
    let brs: Vec<Vec<Vec<Rational>>> = within
        .iter()
        .map(|w| with.iter().map(|y| bracket(c, w, y)).collect())
        .collect();
    for yi in 0..with.len() {
        for k in 0..n {
            rows.push(brs.iter().map(|b| b[yi][k].clone()).collect());
        }
    }
    let coeffs = linalg::nullspace(&rows, within.len());
    combine(within, &coeffs)
}

fn brackets_span(c: &Consts, a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let vs: Vec<Vec<Rational>> = a
        .iter()
        .flat_map(|u| b.iter().map(move |v| bracket(c, u, v)))
        .collect();
    linalg::span_basis(&vs, c.len())
}

fn all_in_span(basis: &[Vec<Rational>], vs: &[Vec<Rational>]) -> bool {
    vs.iter().all(|v| linalg::in_span(basis, v))
}

fn full(n: usize) -> Vec<Vec<Rational>> {
    (0..n).map(|i| linalg::unit(n, i)).collect()
}

fn sum_spaces(a: &[Vec<Rational>], b: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    let mut vs = a.to_vec();
    vs.extend_from_slice(b);
    linalg::span_basis(&vs, n)
}

fn is_nilpotent(c: &Consts, space: &[Vec<Rational>]) -> bool {
    let mut cur = space.to_vec();
    for _ in 0..=space.len() {
        if cur.is_empty() {
            return true;
        }
        let next = brackets_span(c, space, &cur);
        if next.len() == cur.len() {
            return false;
        }
        cur = next;
    }
    cur.is_empty()
}

fn subspace(c: &Consts, names: &[String], vectors: Vec<Vec<Rational>>) -> Subspace {
    let n = c.len();
    let subalgebra = all_in_span(&vectors, &brackets_span(c, &vectors, &vectors));
    let ideal = all_in_span(&vectors, &brackets_span(c, &full(n), &vectors));
    Subspace {
        basis: vectors.iter().map(|v| format_vector(names, v)).collect(),
        vectors,
        subalgebra,
        ideal,
    }
}

/// Whether `span(vectors)` (extended coordinates) is an ideal of the table's algebra.
pub fn is_ideal(tab: &LieAlgebraTable, vectors: &[Vec<Rational>]) -> Option<bool> {
    let c = tab.constants()?;
    Some(all_in_span(
        vectors,
        &brackets_span(&c, &full(c.len()), vectors),
    ))
}

fn heisenberg(c: &Consts, names: &[String], space: &[Vec<Rational>]) -> Option<HeisenbergInfo> {
    let d = space.len();
    if d < 3 || d.is_multiple_of(2) {
        return None;
    }
    let z = centralizer_in(c, space, space);
    let derived = brackets_span(c, space, space);
    if z.len() != 1 || derived.len() != 1 || !linalg::in_span(&z, &derived[0]) {
        return None;
    }
    Some(HeisenbergInfo {
        n: (d - 1) / 2,
        center: z.iter().map(|v| format_vector(names, v)).collect(),
    })
}

fn scalar_multiple(v: &[Rational], of: &[Rational]) -> Option<Rational> {
    let k = of.iter().position(|x| !x.is_zero())?;
    let s = &v[k] / &of[k];
    v.iter().zip(of).all(|(a, b)| *a == &s * b).then_some(s)
}

fn sl2_triples(c: &Consts, names: &[String]) -> Vec<Sl2Triple> {
    let n = c.len();
    let e = |i| linalg::unit(n, i);
    let mut out = Vec::new();
    for h in 0..n {
        for a in 0..n {
            for b in 0..n {
                if h == a || h == b || a == b {
                    continue;
                }
                let Some(ka) = scalar_multiple(&bracket(c, &e(h), &e(a)), &e(a)) else {
                    continue;
                };
                if !ka.is_positive() {
                    continue;
                }
                let Some(kb) = scalar_multiple(&bracket(c, &e(h), &e(b)), &e(b)) else {
                    continue;
                };
                if kb != -ka.clone() {
                    continue;
                }
                let Some(lam) = scalar_multiple(&bracket(c, &e(a), &e(b)), &e(h)) else {
                    continue;
                };
                if lam.is_zero() {
                    continue;
                }
                let scale = Rational::from_integer(2.into()) / &ka;
                let h_name = if scale.is_one() {
                    names[h].clone()
                } else {
                    format!("{scale}*{}", names[h])
                };
                out.push(Sl2Triple {
                    h: h_name,
                    e: names[a].clone(),
                    f: names[b].clone(),
                    lambda: (lam / &scale).to_string(),
                    indices: [h, a, b],
                });
            }
        }
    }
    out
}

/// Compute the structural invariants of `tab`; parametric tables are analysed at `g = 1`.
pub fn analyze_structure(tab: &LieAlgebraTable) -> StructureReport {
    let tab = if tab.is_parametric() {
        tab.eval(&Rational::one())
    } else {
        tab.clone()
    };
    let ext = tab.extended();
    let names = ext.names().to_vec();
    let c = ext.constants().expect("rational table");
    let n = c.len();
    let all = full(n);

    let center = centralizer_in(&c, &all, &all);
    let derived = brackets_span(&c, &all, &all);
    let radical = orthogonal_in(&c, &all, &derived);
    let mut nil = orthogonal_in(&c, &radical, &radical);
    let verified =
        |v: &Vec<Vec<Rational>>| all_in_span(v, &brackets_span(&c, &all, v)) && is_nilpotent(&c, v);
    if !verified(&nil) {
        nil = sum_spaces(&brackets_span(&c, &all, &radical), &center, n);
    }
    let heis = heisenberg(&c, &names, &nil);
    let triples = sl2_triples(&c, &names);

    let mut factors = Vec::new();
    if let (Some(t), Some(_)) = (triples.first(), heis.as_ref()) {
        let trip: Vec<Vec<Rational>> = t.indices.iter().map(|&i| linalg::unit(n, i)).collect();
        let zn = centralizer_in(&c, &nil, &nil);
        for (i, name) in names.iter().enumerate().take(n) {
            let x = linalg::unit(n, i);
            if linalg::in_span(&nil, &x)
                || !trip
                    .iter()
                    .all(|y| bracket(&c, &x, y).iter().all(|v| v.is_zero()))
            {
                continue;
            }
            let mut mu: Option<Rational> = None;
            let mut ok = true;
            for v in &nil {
                if linalg::in_span(&zn, v) {
                    continue;
                }
                let w = bracket(&c, &x, &bracket(&c, &x, v));
                let k = v
                    .iter()
                    .position(|a| !a.is_zero())
                    .expect("nonzero basis vector");
                let m = &w[k] / &v[k];
                let rest: Vec<Rational> = w.iter().zip(v).map(|(a, b)| a - &m * b).collect();
                if !linalg::in_span(&zn, &rest) || mu.as_ref().is_some_and(|p| *p != m) {
                    ok = false;
                    break;
                }
                mu = Some(m);
            }
            if let (true, Some(m)) = (ok, mu) {
                if m.is_zero() {
                    continue;
                }
                let label = if m.is_positive() { "so(1,1)" } else { "so(2)" };
                factors.push(ReductiveFactor {
                    element: name.clone(),
                    mu: m.to_string(),
                    label: label.into(),
                });
            }
        }
    }

    let mut labels = Vec::new();
    let mut aliases = Vec::new();
    if !triples.is_empty() {
        labels.push("sl(2,R)".to_string());
        aliases.push("su(1,1) ≅ sl(2,R)".to_string());
    }
    if let Some(f) = factors.first() {
        labels.push(f.label.clone());
    }
    if let Some(h) = &heis {
        let hn = format!("h_{}", h.n);
        labels.push(hn.clone());
        let reductive: Vec<&str> = labels
            .iter()
            .filter(|l| !l.starts_with("h_"))
            .map(|s| s.as_str())
            .collect();
        match reductive.len() {
            0 => {}
            1 => labels.push(format!("{} ⋉ {hn}", reductive[0])),
            _ => labels.push(format!("({}) ⋉ {hn}", reductive.join(" ⊕ "))),
        }
    }

    StructureReport {
        dim: n,
        basis: names.clone(),
        levi_dimension: n - radical.len(),
        center: subspace(&c, &names, center),
        derived: subspace(&c, &names, derived),
        radical: subspace(&c, &names, radical),
        nilradical: subspace(&c, &names, nil),
        heisenberg: heis,
        sl2_triples: triples,
        commuting_factors: factors,
        labels,
        aliases,
    }
}

#[cfg(test)]
mod tests {
    use super::super::generators::{a_basis, basis_names};
    use super::super::table::{commutator_table, LieAlgebraTable};
    use super::*;

    #[test]
    fn psde_algebra() {
        let tab = commutator_table(&a_basis(), basis_names("A", 9)).unwrap();
        let r = analyze_structure(&tab);
        assert_eq!(r.center.basis, vec!["A9"]);
        assert_eq!(r.nilradical.vectors.len(), 5);
        assert!(r.nilradical.ideal);
        assert_eq!(r.heisenberg.as_ref().unwrap().n, 2);
        assert_eq!(r.radical.vectors.len(), 6);
        assert_eq!(r.levi_dimension, 3);
        assert!(r
            .sl2_triples
            .iter()
            .any(|t| t.h == "A2" && t.e == "A3" && t.f == "A1" && t.lambda == "-1"));
        assert_eq!(r.commuting_factors[0].element, "A4");
        assert_eq!(r.commuting_factors[0].label, "so(1,1)");
        assert!(r.labels.contains(&"(sl(2,R) ⊕ so(1,1)) ⋉ h_2".to_string()));
        let h2: Vec<Vec<Rational>> = (4..9).map(|i| linalg::unit(9, i)).collect();
        assert_eq!(is_ideal(&tab, &h2), Some(true));
    }

    #[test]
    fn abelian() {
        let tab = LieAlgebraTable::new(basis_names("B", 3));
        let r = analyze_structure(&tab);
        assert_eq!(r.center.vectors.len(), 3);
        assert!(r.sl2_triples.is_empty());
        assert!(r.heisenberg.is_none());
    }
}
