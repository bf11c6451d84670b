//! Finite groups with counting Haar measure and complex functions on them.
//!
//! Abelian groups `Z_{n1} x ... x Z_{nr}` use a mixed-radix encoding of
//! elements (last factor fastest), so convolution is a multidimensional DFT.
//! General groups are stored as a dense multiplication table and use the
//! direct `O(N^2)` sums.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// Largest order accepted for table-backed groups unless overridden.
pub const DEFAULT_GENERAL_LIMIT: usize = 2048;

/// Groups up to this order get an exhaustive associativity check.
const EXHAUSTIVE_CHECK_LIMIT: usize = 512;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Serializable description of a finite group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupSpec {
    /// `Z_{n1} x ... x Z_{nr}`.
    Abelian { factors: Vec<usize> },
    /// Explicit multiplication table, `table[a][b] = a*b`.
    Table { table: Vec<Vec<usize>> },
    /// Named builtin: `cyclic`, `dihedral` (order `2n`) or `symmetric-3`.
    Builtin {
        name: String,
        #[serde(default)]
        n: Option<usize>,
    },
}

#[derive(Debug, Clone, PartialEq)]
enum Law {
    Abelian { factors: Vec<usize> },
    Table { table: Vec<u32>, inverse: Vec<u32>, identity: usize },
}

/// A finite group of order `N` with elements `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    order: usize,
    law: Law,
    name: String,
}

impl Group {
    /// `Z_{n1} x ... x Z_{nr}`; element 0 is the identity.
    pub fn abelian(factors: &[usize]) -> Result<Arc<Self>> {
        if factors.is_empty() || factors.iter().any(|&n| n == 0) {
            return Err(Error::InvalidGroup("factor sizes must be positive".into()));
        }
        let order = factors
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGroup("group order overflows".into()))?;
        let name = factors.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join("x");
        Ok(Arc::new(Self {
            order,
            law: Law::Abelian { factors: factors.to_vec() },
            name,
        }))
    }

    pub fn cyclic(n: usize) -> Result<Arc<Self>> {
        Self::abelian(&[n])
    }

    /// Dihedral group of order `2n`; element `k + n*j` is `r^k s^j`.
    pub fn dihedral(n: usize) -> Result<Arc<Self>> {
        if n < 1 {
            return Err(Error::InvalidGroup("dihedral needs n >= 1".into()));
        }
        let order = 2 * n;
        let mut table = vec![vec![0usize; order]; order];
        for (x, row) in table.iter_mut().enumerate() {
            let (a, i) = (x % n, x / n);
            for (y, slot) in row.iter_mut().enumerate() {
                let (b, j) = (y % n, y / n);
                let rot = if i == 0 { (a + b) % n } else { (a + n - b) % n };
                *slot = rot + n * ((i + j) % 2);
            }
        }
        let mut group = Self::from_table_unchecked(&table, DEFAULT_GENERAL_LIMIT)?;
        group.name = format!("D{n}");
        Ok(Arc::new(group))
    }

    /// Symmetric group on `n` letters (small `n` only).
    pub fn symmetric(n: usize) -> Result<Arc<Self>> {
        if !(1..=6).contains(&n) {
            return Err(Error::InvalidGroup("symmetric group supported for 1 <= n <= 6".into()));
        }
        let perms = permutations(n);
        let index_of = |p: &[usize]| perms.iter().position(|q| q.as_slice() == p).unwrap();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        // (p*q)(i) = p(q(i))
                        let pq: Vec<usize> = (0..n).map(|i| p[q[i]]).collect();
                        index_of(&pq)
                    })
                    .collect()
            })
            .collect();
        let mut group = Self::from_table_unchecked(&table, DEFAULT_GENERAL_LIMIT)?;
        group.name = format!("S{n}");
        Ok(Arc::new(group))
    }

    /// Validated group from a multiplication table.
    pub fn from_table(table: &[Vec<usize>]) -> Result<Arc<Self>> {
        Self::from_table_with_limit(table, DEFAULT_GENERAL_LIMIT)
    }

    pub fn from_table_with_limit(table: &[Vec<usize>], limit: usize) -> Result<Arc<Self>> {
        let group = Self::from_table_unchecked(table, limit)?;
        group.check_law()?;
        Ok(Arc::new(group))
    }

    fn from_table_unchecked(table: &[Vec<usize>], limit: usize) -> Result<Self> {
        let order = table.len();
        if order == 0 {
            return Err(Error::InvalidGroup("empty multiplication table".into()));
        }
        if order > limit {
            return Err(Error::InvalidGroup(format!(
                "order {order} exceeds the general-group limit {limit}"
            )));
        }
        let mut flat = Vec::with_capacity(order * order);
        for row in table {
            if row.len() != order {
                return Err(Error::InvalidGroup("multiplication table is not square".into()));
            }
            for &v in row {
                if v >= order {
                    return Err(Error::InvalidGroup(format!("table entry {v} out of range")));
                }
                flat.push(v as u32);
            }
        }
        let identity = (0..order)
            .find(|&e| (0..order).all(|x| flat[e * order + x] as usize == x && flat[x * order + e] as usize == x))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = vec![0u32; order];
        for (x, inv) in inverse.iter_mut().enumerate() {
            let y = (0..order)
                .find(|&y| flat[x * order + y] as usize == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {x} has no inverse")))?;
            if flat[y * order + x] as usize != identity {
                return Err(Error::InvalidGroup(format!("element {x} has no two-sided inverse")));
            }
            *inv = y as u32;
        }
        Ok(Self {
            order,
            law: Law::Table { table: flat, inverse, identity },
            name: format!("G{order}"),
        })
    }

    pub fn from_spec(spec: &GroupSpec) -> Result<Arc<Self>> {
        match spec {
            GroupSpec::Abelian { factors } => Self::abelian(factors),
            GroupSpec::Table { table } => Self::from_table(table),
            GroupSpec::Builtin { name, n } => match (name.as_str(), n) {
                ("cyclic", Some(n)) => Self::cyclic(*n),
                ("dihedral", Some(n)) => Self::dihedral(*n),
                ("symmetric-3", _) => Self::symmetric(3),
                (other, _) => Err(Error::InvalidGroup(format!(
                    "unknown builtin `{other}` (expected cyclic, dihedral or symmetric-3, with `n` where needed)"
                ))),
            },
        }
    }

    /// Associativity (exhaustive up to order 512, sampled above) and, for
    /// abelian-kind tables, commutativity.
    pub fn check_law(&self) -> Result<()> {
        let n = self.order;
        let triples: Box<dyn Iterator<Item = (usize, usize, usize)>> = if n <= EXHAUSTIVE_CHECK_LIMIT {
            Box::new((0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c)))))
        } else {
            // Deterministic sample of 200k triples.
            let mut state = 0x9e37_79b9_7f4a_7c15u64;
            Box::new((0..200_000).map(move |_| {
                let mut next = || {
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    (state % n as u64) as usize
                };
                (next(), next(), next())
            }))
        };
        for (a, b, c) in triples {
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                return Err(Error::InvalidGroup(format!("associativity fails at ({a}, {b}, {c})")));
            }
        }
        Ok(())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_abelian(&self) -> bool {
        matches!(self.law, Law::Abelian { .. })
    }

    /// Cyclic factor sizes for abelian groups.
    pub fn factors(&self) -> Option<&[usize]> {
        match &self.law {
            Law::Abelian { factors } => Some(factors),
            Law::Table { .. } => None,
        }
    }

    /// True when the (table) law is commutative.
    pub fn is_commutative(&self) -> bool {
        match &self.law {
            Law::Abelian { .. } => true,
            Law::Table { .. } => (0..self.order).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a))),
        }
    }

    pub fn identity(&self) -> usize {
        match &self.law {
            Law::Abelian { .. } => 0,
            Law::Table { identity, .. } => *identity,
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.law {
            Law::Abelian { factors } => {
                let (mut a, mut b) = (a, b);
                let (mut out, mut place) = (0, 1);
                for &n in factors.iter().rev() {
                    out += ((a % n + b % n) % n) * place;
                    place *= n;
                    a /= n;
                    b /= n;
                }
                out
            }
            Law::Table { table, .. } => table[a * self.order + b] as usize,
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        match &self.law {
            Law::Abelian { factors } => {
                let mut a = a;
                let (mut out, mut place) = (0, 1);
                for &n in factors.iter().rev() {
                    out += ((n - a % n) % n) * place;
                    place *= n;
                    a /= n;
                }
                out
            }
            Law::Table { inverse, .. } => inverse[a] as usize,
        }
    }

    /// Mixed-radix coordinates of an element of an abelian group.
    pub fn coords(&self, index: usize) -> Option<Vec<usize>> {
        let factors = self.factors()?;
        let mut rest = index;
        let mut out = vec![0; factors.len()];
        for j in (0..factors.len()).rev() {
            out[j] = rest % factors[j];
            rest /= factors[j];
        }
        Some(out)
    }

    pub fn index(&self, coords: &[usize]) -> Option<usize> {
        let factors = self.factors()?;
        if coords.len() != factors.len() || coords.iter().zip(factors).any(|(c, n)| c >= n) {
            return None;
        }
        Some(coords.iter().zip(factors).fold(0, |acc, (c, n)| acc * n + c))
    }

    pub fn same_as(self: &Arc<Self>, other: &Arc<Self>) -> bool {
        Arc::ptr_eq(self, other) || **self == **other
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Complex-valued function on a finite group.
#[derive(Debug, Clone)]
pub struct GFunction {
    group: Arc<Group>,
    values: Vec<Complex64>,
}

impl GFunction {
    pub fn new(group: &Arc<Group>, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::LengthMismatch { expected: group.order(), got: values.len() });
        }
        Ok(Self { group: Arc::clone(group), values })
    }

    pub fn from_real(group: &Arc<Group>, values: &[f64]) -> Result<Self> {
        Self::new(group, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(group: &Arc<Group>, f: impl FnMut(usize) -> Complex64) -> Self {
        Self { group: Arc::clone(group), values: (0..group.order()).map(f).collect() }
    }

    pub fn zeros(group: &Arc<Group>) -> Self {
        Self { group: Arc::clone(group), values: vec![ZERO; group.order()] }
    }

    pub fn constant(group: &Arc<Group>, value: Complex64) -> Self {
        Self { group: Arc::clone(group), values: vec![value; group.order()] }
    }

    /// Point mass at `t`.
    pub fn delta(group: &Arc<Group>, t: usize) -> Self {
        let mut f = Self::zeros(group);
        f.values[t] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn group(&self) -> &Arc<Group> {
        &self.group
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn ensure_same_group(&self, other: &Self) -> Result<()> {
        if self.group.same_as(&other.group) {
            Ok(())
        } else {
            Err(Error::GroupMismatch)
        }
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self { group: Arc::clone(&self.group), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scale(&self, alpha: Complex64) -> Self {
        self.map(|v| v * alpha)
    }

    pub fn scale_real(&self, alpha: f64) -> Self {
        self.map(|v| v * alpha)
    }

    /// Pointwise product (the multiplication of `A(G)`).
    pub fn pointwise(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        Ok(Self {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        })
    }

    /// Left translate `(λ(t)f)(x) = f(t⁻¹x)`.
    pub fn translate(&self, t: usize) -> Self {
        let g = &self.group;
        let ti = g.inv(t);
        Self::from_fn(g, |x| self.values[g.mul(ti, x)])
    }

    /// `f̌(s) = f(s⁻¹)`.
    pub fn check(&self) -> Self {
        let g = &self.group;
        Self::from_fn(g, |s| self.values[g.inv(s)])
    }

    /// `f̃(s) = conj f(s⁻¹)`.
    pub fn tilde(&self) -> Self {
        let g = &self.group;
        Self::from_fn(g, |s| self.values[g.inv(s)].conj())
    }

    pub fn bar(&self) -> Self {
        self.map(|v| v.conj())
    }

    /// `f*(s) = conj f(s⁻¹) Δ(s⁻¹)`; finite groups are unimodular so this is `f̃`.
    pub fn star(&self) -> Self {
        self.bar().check()
    }

    /// `⟨f, g⟩ = Σ_s f(s) conj g(s)`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.ensure_same_group(other)?;
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| a * b.conj()).sum())
    }

    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm1(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `max_s |f(s) - g(s)|`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn dist2(&self, other: &Self) -> f64 {
        self.values.iter().zip(&other.values).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// `(f∗g)(t) = Σ_s f(s) g(s⁻¹t)`; FFT for abelian groups, direct sum otherwise.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        let g = &self.group;
        let values = match g.factors() {
            Some(factors) => {
                let a = fft::forward(factors, &self.values);
                let b = fft::forward(factors, &other.values);
                let prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
                fft::inverse(factors, &prod)
            }
            None => convolve_direct(g, &self.values, &other.values),
        };
        Ok(Self { group: Arc::clone(g), values })
    }

    /// `O(N^2)` double sum, usable on any group.
    pub fn convolve_direct(&self, other: &Self) -> Result<Self> {
        self.ensure_same_group(other)?;
        let g = &self.group;
        Ok(Self { group: Arc::clone(g), values: convolve_direct(g, &self.values, &other.values) })
    }
}

fn convolve_direct(g: &Group, f: &[Complex64], h: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; g.order()];
    for (s, fs) in f.iter().enumerate() {
        if *fs == ZERO {
            continue;
        }
        // t = s u  =>  h(s⁻¹ t) = h(u)
        for (u, hu) in h.iter().enumerate() {
            out[g.mul(s, u)] += fs * hu;
        }
    }
    out
}

impl Index<usize> for GFunction {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.values[i]
    }
}

// Arithmetic on functions of different groups is a programming error and panics.
impl<'a> Add<&'a GFunction> for &'a GFunction {
    type Output = GFunction;
    fn add(self, rhs: &GFunction) -> GFunction {
        assert!(self.group.same_as(&rhs.group), "adding functions on different groups");
        GFunction {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub<&'a GFunction> for &'a GFunction {
    type Output = GFunction;
    fn sub(self, rhs: &GFunction) -> GFunction {
        assert!(self.group.same_as(&rhs.group), "subtracting functions on different groups");
        GFunction {
            group: Arc::clone(&self.group),
            values: self.values.iter().zip(&rhs.values).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &GFunction {
    type Output = GFunction;
    fn neg(self) -> GFunction {
        self.map(|v| -v)
    }
}

impl Mul<Complex64> for &GFunction {
    type Output = GFunction;
    fn mul(self, rhs: Complex64) -> GFunction {
        self.scale(rhs)
    }
}

impl Mul<f64> for &GFunction {
    type Output = GFunction;
    fn mul(self, rhs: f64) -> GFunction {
        self.scale_real(rhs)
    }
}
