//! Intersection forms, characteristic classes and the monopole window.
//!
//! A class `α` can carry a monopole for a metric of volume `v` only if
//! `-v (k⁻)⁴ / π² ≤ α² ≤ v (k⁻)⁴ / 4`. The window always contains 0 and
//! collapses to `{0}` when `k⁻ = 0`. For indefinite forms the set of classes
//! with admissible square is infinite, so enumeration is always restricted to
//! a coefficient box `|α_i| ≤ b`; only the set of admissible values of `α²`
//! is finite in general.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// A class in the ambient lattice, written in the basis of the form.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SpincClass(pub Vec<i64>);

/// Symmetric unimodular integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IntersectionForm {
    rank: usize,
    matrix: Vec<Vec<i64>>,
}

impl IntersectionForm {
    pub fn new(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let rank = matrix.len();
        if rank == 0 {
            return Err(Error::InvalidForm("of positive rank"));
        }
        if matrix.iter().any(|row| row.len() != rank) {
            return Err(Error::InvalidForm("square"));
        }
        for i in 0..rank {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidForm("symmetric"));
                }
            }
        }
        if determinant(&matrix).abs() != 1 {
            return Err(Error::InvalidForm("unimodular"));
        }
        Ok(Self { rank, matrix })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn determinant(&self) -> i128 {
        determinant(&self.matrix)
    }

    /// All diagonal entries even.
    pub fn is_even(&self) -> bool {
        (0..self.rank).all(|i| self.matrix[i][i] % 2 == 0)
    }

    fn check(&self, a: &SpincClass) -> Result<()> {
        if a.0.len() != self.rank {
            return Err(Error::DimensionMismatch {
                rank: self.rank,
                len: a.0.len(),
            });
        }
        Ok(())
    }

    fn apply(&self, a: &[i64]) -> Vec<i64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(a).map(|(q, x)| q * x).sum())
            .collect()
    }

    pub fn negated(&self) -> Self {
        Self {
            rank: self.rank,
            matrix: self.matrix.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        }
    }
}

impl fmt::Display for IntersectionForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.matrix {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", cells.join(" "))?;
        }
        Ok(())
    }
}

/// Fraction-free Gaussian elimination.
fn determinant(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

/// `αᵀ Q α`.
pub fn q_value(q: &IntersectionForm, a: &SpincClass) -> Result<i64> {
    q.check(a)?;
    Ok(q.apply(&a.0).iter().zip(&a.0).map(|(x, y)| x * y).sum())
}

/// `(Qα)_i ≡ Q_ii mod 2` for every `i`.
pub fn is_characteristic(q: &IntersectionForm, a: &SpincClass) -> Result<bool> {
    q.check(a)?;
    Ok(characteristic_unchecked(q, &a.0))
}

fn characteristic_unchecked(q: &IntersectionForm, a: &[i64]) -> bool {
    q.apply(a)
        .iter()
        .enumerate()
        .all(|(i, x)| (x - q.matrix[i][i]).rem_euclid(2) == 0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    /// Distance from `x` to the nearer endpoint; negative outside.
    pub fn margin(&self, x: f64) -> f64 {
        (x - self.lo).min(self.hi - x)
    }
}

/// `[-v (k⁻)⁴ / π², v (k⁻)⁴ / 4]`.
pub fn window(v: f64, k_minus: f64) -> Result<Window> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidWindow(format!("volume {v} must be positive")));
    }
    if !(k_minus >= 0.0 && k_minus.is_finite()) {
        return Err(Error::InvalidWindow(format!("k_minus {k_minus} must be non-negative")));
    }
    let s = v * k_minus.powi(4);
    Ok(Window {
        lo: -s / (PI * PI),
        hi: s / 4.0,
    })
}

pub fn is_admissible(q: &IntersectionForm, a: &SpincClass, v: f64, k_minus: f64) -> Result<bool> {
    if !is_characteristic(q, a)? {
        return Err(Error::NotCharacteristic(a.0.clone()));
    }
    Ok(window(v, k_minus)?.contains(q_value(q, a)? as f64))
}

/// Natural log of the box size `2^25`, the default enumeration budget.
pub const DEFAULT_BUDGET: f64 = 17.328679513998633;

/// Every characteristic class in the box `|α_i| ≤ bound` whose square lies
/// in the window, in lexicographic order.
pub fn enumerate_admissible(q: &IntersectionForm, coeff_bound: u32, v: f64, k_minus: f64) -> Result<Vec<SpincClass>> {
    enumerate_admissible_with_budget(q, coeff_bound, v, k_minus, DEFAULT_BUDGET)
}

pub fn enumerate_admissible_with_budget(
    q: &IntersectionForm,
    coeff_bound: u32,
    v: f64,
    k_minus: f64,
    budget: f64,
) -> Result<Vec<SpincClass>> {
    let w = window(v, k_minus)?;
    let b = coeff_bound as i64;
    let log_size = q.rank as f64 * ((2 * b + 1) as f64).ln();
    if log_size > budget {
        return Err(Error::EnumerationBudget { log_size, budget });
    }
    let mut out = Vec::new();
    let mut cur = vec![-b; q.rank];
    loop {
        if characteristic_unchecked(q, &cur) {
            let sq: i64 = q.apply(&cur).iter().zip(&cur).map(|(x, y)| x * y).sum();
            if w.contains(sq as f64) {
                out.push(SpincClass(cur.clone()));
            }
        }
        // odometer with the last coordinate fastest keeps lexicographic order
        let mut d = q.rank;
        loop {
            if d == 0 {
                return Ok(out);
            }
            d -= 1;
            if cur[d] < b {
                cur[d] += 1;
                break;
            }
            cur[d] = -b;
        }
    }
}

pub fn diag(entries: &[i64]) -> Result<IntersectionForm> {
    let n = entries.len();
    IntersectionForm::new(
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { entries[i] } else { 0 }).collect())
            .collect(),
    )
}

/// `n` copies of `[[0, 1], [1, 0]]`.
pub fn hyperbolic(n: usize) -> Result<IntersectionForm> {
    let h = IntersectionForm {
        rank: 2,
        matrix: vec![vec![0, 1], vec![1, 0]],
    };
    direct_sum(&vec![h; n])
}

/// Cartan matrix of `E8` (positive definite, even, unimodular).
pub fn e8() -> IntersectionForm {
    // chain 0-2-3-4-5-6-7 with node 1 attached to node 3
    let edges = [(0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (1, 3)];
    let mut m = vec![vec![0i64; 8]; 8];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 2;
    }
    for (a, b) in edges {
        m[a][b] = -1;
        m[b][a] = -1;
    }
    IntersectionForm { rank: 8, matrix: m }
}

/// Wedge pairing on `H²(T⁴)` in the plane basis `12, 13, 14, 23, 24, 34`.
pub fn torus() -> IntersectionForm {
    let mut m = vec![vec![0i64; 6]; 6];
    for (a, b, s) in [(0, 5, 1), (1, 4, -1), (2, 3, 1)] {
        m[a][b] = s;
        m[b][a] = s;
    }
    IntersectionForm { rank: 6, matrix: m }
}

pub fn direct_sum(parts: &[IntersectionForm]) -> Result<IntersectionForm> {
    let n: usize = parts.iter().map(|p| p.rank).sum();
    let mut m = vec![vec![0i64; n]; n];
    let mut off = 0;
    for p in parts {
        for i in 0..p.rank {
            for j in 0..p.rank {
                m[off + i][off + j] = p.matrix[i][j];
            }
        }
        off += p.rank;
    }
    IntersectionForm::new(m)
}

/// Parses a form expression.
///
/// ```text
/// diag(1, -1, 1)      explicit diagonal entries
/// hyperbolic(n), H    n copies of the hyperbolic plane (H = hyperbolic(1))
/// e8                  E8 Cartan matrix
/// torus               wedge pairing of T⁴
/// neg(X), -X          negated form
/// direct_sum(X, Y..)  block sum (alias: sum)
/// ```
pub fn standard_form(expr: &str) -> Result<IntersectionForm> {
    let mut p = Parser {
        s: expr.as_bytes(),
        pos: 0,
        src: expr,
    };
    let f = p.form()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.fail());
    }
    Ok(f)
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn fail(&self) -> Error {
        Error::UnknownForm(self.src.to_string())
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: u8) -> bool {
        self.ws();
        if self.s.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> String {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
            self.pos += 1;
        }
        self.src[start..self.pos].to_ascii_lowercase()
    }

    fn int(&mut self) -> Result<i64> {
        self.ws();
        let start = self.pos;
        if matches!(self.s.get(self.pos), Some(b'-') | Some(b'+')) {
            self.pos += 1;
        }
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        self.src[start..self.pos].parse().map_err(|_| self.fail())
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T>) -> Result<Vec<T>> {
        if !self.eat(b'(') {
            return Err(self.fail());
        }
        let mut out = vec![item(self)?];
        while self.eat(b',') {
            out.push(item(self)?);
        }
        if !self.eat(b')') {
            return Err(self.fail());
        }
        Ok(out)
    }

    fn form(&mut self) -> Result<IntersectionForm> {
        if self.eat(b'-') {
            return Ok(self.form()?.negated());
        }
        let name = self.ident();
        match name.as_str() {
            "diag" => {
                let e = self.list(Self::int)?;
                diag(&e)
            }
            "hyperbolic" => {
                let n = self.list(Self::int)?;
                match n.as_slice() {
                    [k] if *k >= 1 => hyperbolic(*k as usize),
                    _ => Err(self.fail()),
                }
            }
            "h" => hyperbolic(1),
            "e8" => Ok(e8()),
            "torus" => Ok(torus()),
            "neg" => {
                let inner = self.list(Self::form)?;
                match inner.as_slice() {
                    [f] => Ok(f.negated()),
                    _ => Err(self.fail()),
                }
            }
            "direct_sum" | "sum" => {
                let parts = self.list(Self::form)?;
                direct_sum(&parts)
            }
            _ => Err(self.fail()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(v: &[i64]) -> SpincClass {
        SpincClass(v.to_vec())
    }

    #[test]
    fn q_value_examples() {
        let h = hyperbolic(1).unwrap();
        assert_eq!(q_value(&h, &c(&[0, 0])).unwrap(), 0);
        assert_eq!(q_value(&h, &c(&[2, 2])).unwrap(), 8);
        assert_eq!(q_value(&e8(), &c(&[0; 8])).unwrap(), 0);
        assert!(matches!(
            q_value(&h, &c(&[1])),
            Err(Error::DimensionMismatch { rank: 2, len: 1 })
        ));
    }

    #[test]
    fn characteristic_examples() {
        let d = diag(&[1, 1]).unwrap();
        let h = hyperbolic(1).unwrap();
        assert!(is_characteristic(&h, &c(&[0, 0])).unwrap());
        assert!(is_characteristic(&e8(), &c(&[0; 8])).unwrap());
        assert!(is_characteristic(&d, &c(&[1, 1])).unwrap());
        assert!(!is_characteristic(&d, &c(&[0, 1])).unwrap());
        assert!(!is_characteristic(&h, &c(&[1, 0])).unwrap());
    }

    #[test]
    fn window_examples() {
        let w = window(1.0, 1.0).unwrap();
        assert!((w.lo + 1.0 / (PI * PI)).abs() < 1e-15 && (w.lo + 0.101321).abs() < 1e-6);
        assert_eq!(w.hi, 0.25);
        assert_eq!(window(3.0, 0.0).unwrap(), Window { lo: -0.0, hi: 0.0 });
        let w = window(16.0, 1.0).unwrap();
        assert!((w.lo + 16.0 / (PI * PI)).abs() < 1e-15);
        assert_eq!(w.hi, 4.0);
        assert!(window(0.0, 1.0).is_err());
        assert!(window(1.0, -0.5).is_err());
    }

    #[test]
    fn admissibility_examples() {
        let d = diag(&[1, 1]).unwrap();
        let h = hyperbolic(1).unwrap();
        assert!(is_admissible(&e8(), &c(&[0; 8]), 1.0, 0.3).unwrap());
        assert!(!is_admissible(&d, &c(&[1, 1]), 1.0, 2f64.sqrt()).unwrap());
        assert!(is_admissible(&h, &c(&[2, 0]), 0.01, 0.0).unwrap());
        assert!(matches!(
            is_admissible(&d, &c(&[0, 1]), 1.0, 1.0),
            Err(Error::NotCharacteristic(_))
        ));
    }

    #[test]
    fn enumeration_examples() {
        let h = hyperbolic(1).unwrap();
        let got = enumerate_admissible(&h, 2, 1.0, 1.0).unwrap();
        let want: Vec<SpincClass> = [[-2, 0], [0, -2], [0, 0], [0, 2], [2, 0]]
            .iter()
            .map(|v| c(v))
            .collect();
        assert_eq!(got, want);
        assert_eq!(enumerate_admissible(&e8(), 0, 1.0, 1.0).unwrap(), vec![c(&[0; 8])]);
        let degenerate = enumerate_admissible(&hyperbolic(2).unwrap(), 2, 5.0, 0.0).unwrap();
        assert!(degenerate
            .iter()
            .all(|a| q_value(&hyperbolic(2).unwrap(), a).unwrap() == 0));
    }

    #[test]
    fn enumeration_budget() {
        let k3 = standard_form("direct_sum(hyperbolic(3), neg(e8), neg(e8))").unwrap();
        assert!(matches!(
            enumerate_admissible(&k3, 1, 1.0, 1.0),
            Err(Error::EnumerationBudget { .. })
        ));
    }

    #[test]
    fn standard_forms() {
        assert_eq!(diag(&[1, 1]).unwrap().matrix(), &[vec![1, 0], vec![0, 1]]);
        let h = hyperbolic(1).unwrap();
        assert_eq!(h.matrix(), &[vec![0, 1], vec![1, 0]]);
        assert_eq!(h.determinant(), -1);
        assert_eq!(e8().determinant(), 1);
        assert!(e8().is_even());
        let k3 = standard_form("direct_sum(hyperbolic(3), e8, -e8)").unwrap();
        assert_eq!(k3.rank(), 22);
        assert_eq!(k3.determinant().abs(), 1);
        assert_eq!(torus().determinant(), -1);
        assert_eq!(standard_form("sum(H, H)").unwrap(), hyperbolic(2).unwrap());
        assert_eq!(standard_form(" neg( diag(1, -1) ) ").unwrap(), diag(&[-1, 1]).unwrap());
        assert!(matches!(standard_form("e9"), Err(Error::UnknownForm(_))));
        assert!(matches!(
            standard_form("diag(2, 1)"),
            Err(Error::InvalidForm("unimodular"))
        ));
        assert!(matches!(standard_form("e8 e8"), Err(Error::UnknownForm(_))));
    }

    #[test]
    fn torus_form_matches_flux_square() {
        let t = torus();
        let n = [2, -4, 6, 2, 0, -2];
        let f = crate::gauge::FluxMatrix::new(n).unwrap();
        assert_eq!(
            q_value(&t, &f.class()).unwrap(),
            crate::gauge::alpha_square_from_flux(&f)
        );
        assert!(is_characteristic(&t, &f.class()).unwrap());
    }

    #[test]
    fn non_symmetric_rejected() {
        assert!(matches!(
            IntersectionForm::new(vec![vec![0, 1], vec![-1, 0]]),
            Err(Error::InvalidForm("symmetric"))
        ));
    }

    proptest! {
        #[test]
        fn window_contains_zero_and_scales(v in 1e-3f64..1e3, k in 0.0f64..10.0, s in 0.1f64..10.0) {
            let w = window(v, k).unwrap();
            prop_assert!(w.contains(0.0));
            let w2 = window(s * v, k).unwrap();
            prop_assert!((w2.hi - s * w.hi).abs() <= 1e-12 * w2.hi.abs().max(1.0));
            let w3 = window(v, s * k).unwrap();
            prop_assert!((w3.lo - s.powi(4) * w.lo).abs() <= 1e-12 * w3.lo.abs().max(1.0));
        }

        #[test]
        fn admissibility_is_symmetric(a in proptest::collection::vec(-3i64..=3, 4), k in 0.0f64..3.0) {
            let q = hyperbolic(2).unwrap();
            let alpha = SpincClass(a.clone());
            let neg = SpincClass(a.iter().map(|x| -x).collect());
            if is_characteristic(&q, &alpha).unwrap() {
                prop_assert_eq!(is_admissible(&q, &alpha, 1.0, k).unwrap(), is_admissible(&q, &neg, 1.0, k).unwrap());
            }
        }
    }
}
