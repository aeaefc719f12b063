//! Mod-2 algebra behind Arnold invariants of degree-two forms.
//!
//! `E0 = {0, inf, e1, ..., e_2g}` is a labeled set and `M_E` the `F2`-space
//! of its subsets modulo complementation. An Arnold map sends the standard
//! basis of `F2^2g` to `M_E`, injectively onto the even subsets. Relabeling
//! the `e_i` acts on maps by post-composition; `Sp(2g, F2)` acts by
//! pre-composition with inverses.

use std::collections::{BTreeSet, HashSet, VecDeque};

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::periods::{AbelianValue, GroupKind, PeriodHom};

/// Largest genus whose `E0` fits the 16-bit subset encoding.
pub const MAX_GENUS: usize = 7;

const ZERO_BIT: u16 = 1;
const INF_BIT: u16 = 2;

fn full_mask(g: usize) -> u16 {
    ((1u32 << (2 * g + 2)) - 1) as u16
}

fn e_bit(i: usize) -> u16 {
    1 << (i + 2)
}

fn check_genus(g: usize) -> Result<()> {
    if g == 0 || g > MAX_GENUS {
        return Err(Error::input(format!("genus must lie in 1..={MAX_GENUS}")));
    }
    Ok(())
}

/// Element of `M_E`, stored as the smaller of a subset mask and its complement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MEElement(u16);

impl MEElement {
    pub fn new(g: usize, mask: u16) -> Self {
        MEElement(mask.min(mask ^ full_mask(g)))
    }

    pub fn mask(&self) -> u16 {
        self.0
    }

    pub fn add(&self, g: usize, other: &MEElement) -> MEElement {
        MEElement::new(g, self.0 ^ other.0)
    }

    /// Even cardinality; well defined because `|E0|` is even.
    pub fn is_even(&self) -> bool {
        self.0.count_ones().is_multiple_of(2)
    }

    /// Whether the subset separates `0` from `inf`.
    pub fn separates(&self) -> bool {
        ((self.0 & ZERO_BIT != 0) as u8 ^ (self.0 & INF_BIT != 0) as u8) == 1
    }

    pub fn labels(&self) -> Vec<String> {
        (0..16).filter(|b| self.0 & (1 << b) != 0).map(label_of_bit).collect()
    }
}

fn label_of_bit(b: usize) -> String {
    match b {
        0 => "0".into(),
        1 => "inf".into(),
        _ => format!("e{}", b - 1),
    }
}

fn bit_of_label(g: usize, s: &str) -> Result<u16> {
    match s {
        "0" => Ok(ZERO_BIT),
        "inf" => Ok(INF_BIT),
        _ => {
            let i: usize = s
                .strip_prefix('e')
                .and_then(|d| d.parse().ok())
                .filter(|i| (1..=2 * g).contains(i))
                .ok_or_else(|| Error::input(format!("unknown label {s:?} for genus {g}")))?;
            Ok(e_bit(i - 1))
        }
    }
}

/// Linear map `F2^2g -> M_E0`, one column per basis vector `a1, b1, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArnoldMap {
    g: usize,
    columns: Vec<MEElement>,
}

#[derive(Serialize, Deserialize)]
struct ArnoldMapRepr {
    g: usize,
    #[serde(rename = "E0", default)]
    e0: Option<Vec<String>>,
    columns: Vec<Vec<String>>,
}

impl Serialize for ArnoldMap {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ArnoldMapRepr {
            g: self.g,
            e0: Some((0..2 * self.g + 2).map(label_of_bit).collect()),
            columns: self.columns.iter().map(MEElement::labels).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ArnoldMap {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ArnoldMapRepr::deserialize(d)?;
        let cols: Vec<Vec<&str>> = r.columns.iter().map(|c| c.iter().map(String::as_str).collect()).collect();
        ArnoldMap::from_labels(r.g, &cols).map_err(serde::de::Error::custom)
    }
}

impl ArnoldMap {
    pub fn new(g: usize, masks: &[u16]) -> Result<Self> {
        check_genus(g)?;
        if masks.len() != 2 * g {
            return Err(Error::input(format!("expected {} columns, got {}", 2 * g, masks.len())));
        }
        if masks.iter().any(|m| m & !full_mask(g) != 0) {
            return Err(Error::input("column mentions a label outside E0"));
        }
        Ok(ArnoldMap { g, columns: masks.iter().map(|&m| MEElement::new(g, m)).collect() })
    }

    pub fn from_labels(g: usize, columns: &[Vec<&str>]) -> Result<Self> {
        check_genus(g)?;
        let masks = columns
            .iter()
            .map(|c| c.iter().try_fold(0u16, |acc, s| Ok::<_, Error>(acc ^ bit_of_label(g, s)?)))
            .collect::<Result<Vec<u16>>>()?;
        ArnoldMap::new(g, &masks)
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn columns(&self) -> &[MEElement] {
        &self.columns
    }

    /// Image of a vector of `F2^2g` given as a bitmask.
    pub fn apply(&self, v: u16) -> MEElement {
        let m = (0..2 * self.g).filter(|j| v & (1 << j) != 0).fold(0u16, |acc, j| acc ^ self.columns[j].0);
        MEElement::new(self.g, m)
    }

    /// Injective with image the even subsets.
    pub fn is_valid(&self) -> bool {
        self.columns.iter().all(MEElement::is_even) && f2_rank(self.g, &self.columns) == 2 * self.g
    }

    fn require_valid(&self) -> Result<()> {
        if !self.is_valid() {
            return Err(Error::precondition("not a valid Arnold map"));
        }
        Ok(())
    }

    /// Bitmask of the period: bit `j` is set when column `j` separates `0` from `inf`.
    pub fn period_mask(&self) -> u16 {
        self.columns.iter().enumerate().filter(|(_, c)| c.separates()).fold(0, |acc, (j, _)| acc | (1 << j))
    }

    pub fn period(&self) -> Result<PeriodHom> {
        self.require_valid()?;
        let mask = self.period_mask();
        let values = (0..2 * self.g).map(|j| AbelianValue::F2 { bit: ((mask >> j) & 1) as u8 }).collect();
        PeriodHom::new(self.g, GroupKind::F2, values)
    }

    /// `A o M^-1`.
    pub fn compose_inverse(&self, m: &SpF2) -> ArnoldMap {
        let inv = m.inverse();
        ArnoldMap { g: self.g, columns: inv.cols.iter().map(|&c| self.apply(c)).collect() }
    }

    fn relabeled(&self, perm: &[usize]) -> ArnoldMap {
        let map = |mask: u16| {
            let mut out = mask & (ZERO_BIT | INF_BIT);
            for (i, &t) in perm.iter().enumerate() {
                if mask & e_bit(i) != 0 {
                    out |= e_bit(t);
                }
            }
            MEElement::new(self.g, out)
        };
        ArnoldMap { g: self.g, columns: self.columns.iter().map(|c| map(c.0)).collect() }
    }

    /// Canonical representative under relabelings of `e1, ..., e_2g`:
    /// the smallest column encoding over all permutations.
    pub fn class(&self) -> Result<ArnoldMap> {
        if self.g > 3 {
            return Err(Error::precondition("relabeling classes are computed for genus at most 3"));
        }
        Ok((0..2 * self.g)
            .permutations(2 * self.g)
            .map(|perm| self.relabeled(&perm))
            .min()
            .expect("at least one permutation"))
    }
}

fn f2_rank(g: usize, cols: &[MEElement]) -> usize {
    // Work in M_E by dropping the top bit, which identifies a subset with its complement.
    let top = 2 * g + 1;
    let mut rows: Vec<u16> = cols
        .iter()
        .map(|c| if c.0 & (1 << top) != 0 { c.0 ^ full_mask(g) } else { c.0 })
        .collect();
    let mut rank = 0;
    for bit in 0..top {
        if let Some(i) = (rank..rows.len()).find(|&i| rows[i] & (1 << bit) != 0) {
            rows.swap(rank, i);
            let pivot = rows[rank];
            for (k, r) in rows.iter_mut().enumerate() {
                if k != rank && *r & (1 << bit) != 0 {
                    *r ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

pub fn arnold_equal(x: &ArnoldMap, y: &ArnoldMap) -> Result<bool> {
    if x.g != y.g {
        return Err(Error::input("Arnold maps of different genus"));
    }
    Ok(x.class()? == y.class()?)
}

/// Mod-2 symplectic form on bitmask vectors ordered `a1, b1, a2, b2, ...`.
pub fn omega(u: u16, v: u16) -> u8 {
    let swapped = ((v & 0x5555) << 1) | ((v >> 1) & 0x5555);
    ((u & swapped).count_ones() % 2) as u8
}

/// Element of `Sp(2g, F2)`; `cols[j]` is the image of the `j`-th basis vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpF2 {
    g: usize,
    cols: Vec<u16>,
}

impl SpF2 {
    pub fn identity(g: usize) -> Self {
        SpF2 { g, cols: (0..2 * g).map(|j| 1 << j).collect() }
    }

    pub fn from_columns(g: usize, cols: Vec<u16>) -> Result<Self> {
        check_genus(g)?;
        let m = SpF2 { g, cols };
        if m.cols.len() != 2 * g || !m.is_symplectic() {
            return Err(Error::input("matrix is not symplectic over F2"));
        }
        Ok(m)
    }

    /// `v -> v + omega(v, c) c`.
    pub fn transvection(g: usize, c: u16) -> Self {
        SpF2 { g, cols: (0..2 * g).map(|j| (1u16 << j) ^ if omega(1 << j, c) == 1 { c } else { 0 }).collect() }
    }

    pub fn columns(&self) -> &[u16] {
        &self.cols
    }

    pub fn apply(&self, v: u16) -> u16 {
        (0..2 * self.g).filter(|j| v & (1 << j) != 0).fold(0, |acc, j| acc ^ self.cols[j])
    }

    /// `self o other`.
    pub fn compose(&self, other: &SpF2) -> SpF2 {
        SpF2 { g: self.g, cols: other.cols.iter().map(|&c| self.apply(c)).collect() }
    }

    pub fn is_symplectic(&self) -> bool {
        let n = 2 * self.g;
        (0..n).all(|i| (0..n).all(|j| omega(self.cols[i], self.cols[j]) == omega(1 << i, 1 << j)))
    }

    /// `(M^-1 y)_{a_k} = omega(y, M b_k)` and `(M^-1 y)_{b_k} = omega(y, M a_k)`.
    pub fn inverse(&self) -> SpF2 {
        let coords = |y: u16| {
            (0..self.g).fold(0u16, |acc, k| {
                acc | (u16::from(omega(y, self.cols[2 * k + 1])) << (2 * k))
                    | (u16::from(omega(y, self.cols[2 * k])) << (2 * k + 1))
            })
        };
        SpF2 { g: self.g, cols: (0..2 * self.g).map(|j| coords(1 << j)).collect() }
    }
}

/// Closure of the generators under composition, by breadth-first search.
pub fn generated_group(g: usize, gens: &[SpF2], cap: usize) -> Result<Vec<SpF2>> {
    let id = SpF2::identity(g);
    let mut seen: HashSet<SpF2> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for s in gens {
            let y = s.compose(&x);
            if seen.insert(y.clone()) {
                if seen.len() > cap {
                    return Err(Error::precondition(format!("group exceeds {cap} elements")));
                }
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<SpF2> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// `Sp(2g, F2)` from all symplectic transvections.
pub fn sp_group(g: usize) -> Result<Vec<SpF2>> {
    check_genus(g)?;
    if g > 2 {
        return Err(Error::precondition("the full group is enumerated for genus at most 2"));
    }
    let gens: Vec<SpF2> = (1..1u16 << (2 * g)).map(|c| SpF2::transvection(g, c)).collect();
    generated_group(g, &gens, 1 << 20)
}

/// Elements fixing the mod-2 period `p`, i.e. `p o M = p`, generated by the
/// transvections along vectors of `ker p`.
pub fn period_stabilizer(g: usize, period_mask: u16) -> Result<Vec<SpF2>> {
    check_genus(g)?;
    if period_mask == 0 {
        return Err(Error::precondition("the zero period has the whole group as stabilizer"));
    }
    if g > 3 {
        return Err(Error::precondition("stabilizers are enumerated for genus at most 3"));
    }
    let gens: Vec<SpF2> = (1..1u16 << (2 * g))
        .filter(|c| (c & period_mask).count_ones().is_multiple_of(2))
        .map(|c| SpF2::transvection(g, c))
        .collect();
    let group = generated_group(g, &gens, 1 << 20)?;
    let expected = stab_order_period(g)?;
    if BigInt::from(group.len()) != expected {
        return Err(Error::internal("period_stabilizer", format!("found {} elements, expected {expected}", group.len())));
    }
    Ok(group)
}

/// `2^{2g-1} (2^{2g-2} - 1) 2^{2g-3} ... (2^2 - 1) 2`: the number of
/// symplectic bases of `F2^2g` with a prescribed first vector.
pub fn stab_order_period(g: usize) -> Result<BigInt> {
    if g < 2 {
        return Err(Error::precondition("genus must be at least 2"));
    }
    Ok((1..2 * g).fold(BigInt::one(), |acc, j| {
        let pow = BigInt::one() << j;
        if j % 2 == 1 {
            acc * pow
        } else {
            acc * (pow - 1)
        }
    }))
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub count: usize,
    pub period: Vec<u8>,
    pub stabilizer_order: usize,
    pub representatives: Vec<ArnoldMap>,
}

/// Relabeling classes of `A o M^-1` over `M` in the stabilizer of the period of `A`.
pub fn sp_orbit_arnold(a: &ArnoldMap) -> Result<OrbitReport> {
    a.require_valid()?;
    let g = a.g;
    if !(2..=3).contains(&g) {
        return Err(Error::precondition("orbits are computed for genus 2 and 3"));
    }
    let mask = a.period_mask();
    let stab = period_stabilizer(g, mask)?;
    let mut classes = BTreeSet::new();
    for m in &stab {
        classes.insert(a.compose_inverse(m).class()?);
    }
    Ok(OrbitReport {
        count: classes.len(),
        period: (0..2 * g).map(|j| ((mask >> j) & 1) as u8).collect(),
        stabilizer_order: stab.len(),
        representatives: classes.into_iter().collect(),
    })
}

/// The map `a_i, b_i -> {0, e_j}` in basis order; valid in every genus.
pub fn standard_arnold_map(g: usize) -> Result<ArnoldMap> {
    ArnoldMap::new(g, &(0..2 * g).map(|j| ZERO_BIT | e_bit(j)).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example() -> ArnoldMap {
        ArnoldMap::from_labels(2, &[vec!["0", "e1"], vec!["0", "e2"], vec!["0", "e3"], vec!["0", "e4"]]).unwrap()
    }

    #[test]
    fn validity_examples() {
        assert!(example().is_valid());
        let dup = ArnoldMap::from_labels(2, &[vec!["0", "e1"], vec!["0", "e1"], vec!["0", "e3"], vec!["0", "e4"]]).unwrap();
        assert!(!dup.is_valid());
        let odd = ArnoldMap::from_labels(2, &[vec!["0"], vec!["0", "e2"], vec!["0", "e3"], vec!["0", "e4"]]).unwrap();
        assert!(!odd.is_valid());
        // A column equal to the whole set is zero in M_E.
        let full = ArnoldMap::from_labels(2, &[vec!["0", "inf", "e1", "e2", "e3", "e4"], vec!["0", "e2"], vec!["0", "e3"], vec!["0", "e4"]]).unwrap();
        assert!(!full.is_valid());
    }

    #[test]
    fn period_examples() {
        assert!(MEElement::new(2, ZERO_BIT | e_bit(0)).separates());
        assert!(!MEElement::new(2, e_bit(0) | e_bit(1)).separates());
        let p = example().period().unwrap();
        assert!(p.values().iter().all(|v| *v == AbelianValue::F2 { bit: 1 }));
    }

    #[test]
    fn relabeling_examples() {
        let a = example();
        let swapped = ArnoldMap::from_labels(2, &[vec!["0", "e2"], vec!["0", "e1"], vec!["0", "e3"], vec!["0", "e4"]]).unwrap();
        assert!(arnold_equal(&a, &swapped).unwrap());
        assert!(arnold_equal(&a, &a).unwrap());
        let stab = period_stabilizer(2, a.period_mask()).unwrap();
        let moved = stab.iter().map(|m| a.compose_inverse(m)).find(|b| !arnold_equal(&a, b).unwrap());
        assert!(moved.is_some());
    }

    #[test]
    fn stabilizer_orders() {
        assert_eq!(stab_order_period(2).unwrap(), BigInt::from(48));
        assert_eq!(stab_order_period(3).unwrap(), BigInt::from(23040));
        assert!(stab_order_period(1).is_err());
    }

    #[test]
    fn inverse_and_symplecticity() {
        for m in sp_group(2).unwrap() {
            assert!(m.is_symplectic());
            assert_eq!(m.compose(&m.inverse()), SpF2::identity(2));
        }
    }

    #[test]
    fn json_round_trip() {
        let a = example();
        let s = serde_json::to_value(&a).unwrap();
        assert_eq!(s["E0"][1], "inf");
        let back: ArnoldMap = serde_json::from_value(s).unwrap();
        assert_eq!(back, a);
    }
}
