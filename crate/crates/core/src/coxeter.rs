//! Finite Weyl groups.
//!
//! Elements are stored as their ShortLex-minimal reduced word. Normal forms are
//! computed in the integral weight representation: `w` is determined by `w(rho)`,
//! and the left descents of `w` are the negative fundamental-weight coordinates
//! of `w(rho)`. Peeling off the smallest left descent repeatedly yields the
//! lexicographically first reduced word.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CoxeterError {
    #[error("unknown Cartan type {0:?}")]
    BadCartanType(String),
    #[error("generator index {index} out of range for rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("enumeration of {ty} produced {found} elements, expected {expected}")]
    OrderMismatch {
        ty: CartanType,
        found: usize,
        expected: u128,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// A finite Cartan type such as `B3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CartanType {
    family: Family,
    rank: usize,
}

impl CartanType {
    pub fn new(family: Family, rank: usize) -> Result<Self, CoxeterError> {
        let ok = match family {
            Family::A => rank >= 1,
            Family::B | Family::C => rank >= 2,
            Family::D => rank >= 4,
            Family::E => (6..=8).contains(&rank),
            Family::F => rank == 4,
            Family::G => rank == 2,
        };
        if ok {
            Ok(Self { family, rank })
        } else {
            Err(CoxeterError::BadCartanType(format!("{family:?}{rank}")))
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Langlands dual type: `B_n <-> C_n`, everything else fixed.
    pub fn dual(&self) -> Self {
        let family = match self.family {
            Family::B => Family::C,
            Family::C => Family::B,
            f => f,
        };
        Self {
            family,
            rank: self.rank,
        }
    }

    /// Order of the Weyl group.
    pub fn weyl_order(&self) -> u128 {
        let n = self.rank as u128;
        let fact = |k: u128| (1..=k).product::<u128>();
        match self.family {
            Family::A => fact(n + 1),
            Family::B | Family::C => (1u128 << n) * fact(n),
            Family::D => (1u128 << (n - 1)) * fact(n),
            Family::E => match n {
                6 => 51_840,
                7 => 2_903_040,
                _ => 696_729_600,
            },
            Family::F => 1152,
            Family::G => 12,
        }
    }

    /// Cartan matrix `a[i][j] = <alpha_i^vee, alpha_j>`, Bourbaki numbering.
    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut a = vec![vec![0i64; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 2;
        }
        let mut link = |i: usize, j: usize, aij: i64, aji: i64| {
            a[i][j] = aij;
            a[j][i] = aji;
        };
        match self.family {
            Family::A => (0..n - 1).for_each(|i| link(i, i + 1, -1, -1)),
            Family::B => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 2, n - 1, -2, -1);
            }
            Family::C => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 2, n - 1, -1, -2);
            }
            Family::D => {
                (0..n - 2).for_each(|i| link(i, i + 1, -1, -1));
                link(n - 3, n - 1, -1, -1);
            }
            Family::E => {
                link(0, 2, -1, -1);
                link(1, 3, -1, -1);
                (2..n - 1).for_each(|i| link(i, i + 1, -1, -1));
            }
            Family::F => {
                link(0, 1, -1, -1);
                link(1, 2, -2, -1);
                link(2, 3, -1, -1);
            }
            Family::G => link(0, 1, -1, -3),
        }
        a
    }
}

impl fmt::Display for CartanType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.family, self.rank)
    }
}

impl FromStr for CartanType {
    type Err = CoxeterError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CoxeterError::BadCartanType(s.to_string());
        let s = s.trim();
        let mut chars = s.chars();
        let family = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => Family::A,
            Some('B') => Family::B,
            Some('C') => Family::C,
            Some('D') => Family::D,
            Some('E') => Family::E,
            Some('F') => Family::F,
            Some('G') => Family::G,
            _ => return Err(bad()),
        };
        let rank: usize = chars.as_str().parse().map_err(|_| bad())?;
        CartanType::new(family, rank).map_err(|_| bad())
    }
}

impl Serialize for CartanType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CartanType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A Weyl group element in ShortLex normal form (0-based generator indices).
///
/// Only [`CoxeterSystem`] produces normal forms; equality of elements is
/// equality of words. Ordering is ShortLex: length first, then lexicographic.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct WeylElement {
    word: Vec<u8>,
}

impl WeylElement {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn word(&self) -> &[u8] {
        &self.word
    }

    pub fn length(&self) -> usize {
        self.word.len()
    }

    pub fn is_identity(&self) -> bool {
        self.word.is_empty()
    }

    pub fn last_letter(&self) -> Option<usize> {
        self.word.last().map(|&s| s as usize)
    }

    /// The normal-form word with 1-based generator indices.
    pub fn one_based(&self) -> Vec<usize> {
        self.word.iter().map(|&s| s as usize + 1).collect()
    }

    /// Compact label: comma-joined 1-based word, `e` for the identity.
    pub fn label(&self) -> String {
        if self.word.is_empty() {
            "e".to_string()
        } else {
            self.one_based()
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
    }
}

impl Ord for WeylElement {
    fn cmp(&self, other: &Self) -> Ordering {
        self.word
            .len()
            .cmp(&other.word.len())
            .then_with(|| self.word.cmp(&other.word))
    }
}

impl PartialOrd for WeylElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.word.is_empty() {
            return write!(f, "e");
        }
        for s in &self.word {
            write!(f, "s{}", s + 1)?;
        }
        Ok(())
    }
}

impl fmt::Display for WeylElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for WeylElement {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.one_based().serialize(s)
    }
}

/// Index-based multiplication tables for an enumerated group.
#[derive(Debug)]
pub struct ElementTable {
    pub elements: Vec<WeylElement>,
    index: HashMap<WeylElement, usize>,
    /// `right[i][s]` is the index of `elements[i] * s`.
    pub right: Vec<Vec<usize>>,
    pub left: Vec<Vec<usize>>,
    pub inverse: Vec<usize>,
}

impl ElementTable {
    pub fn index(&self, w: &WeylElement) -> usize {
        self.index[w]
    }

    pub fn get_index(&self, w: &WeylElement) -> Option<usize> {
        self.index.get(w).copied()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn length(&self, i: usize) -> usize {
        self.elements[i].length()
    }
}

/// A finite Weyl group `(W, S)` with its integral reflection representation.
pub struct CoxeterSystem {
    cartan_type: CartanType,
    cartan: Vec<Vec<i64>>,
    coxeter: Vec<Vec<u32>>,
    table: OnceLock<ElementTable>,
    bruhat_memo: Mutex<HashMap<(u32, u32), bool>>,
}

impl fmt::Debug for CoxeterSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoxeterSystem")
            .field("cartan_type", &self.cartan_type)
            .finish()
    }
}

impl CoxeterSystem {
    pub fn new(cartan_type: CartanType) -> Self {
        Self::with_cartan_matrix(cartan_type, cartan_type.cartan_matrix())
    }

    fn with_cartan_matrix(cartan_type: CartanType, cartan: Vec<Vec<i64>>) -> Self {
        let n = cartan_type.rank();
        let coxeter = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            1
                        } else {
                            match cartan[i][j] * cartan[j][i] {
                                0 => 2,
                                1 => 3,
                                2 => 4,
                                3 => 6,
                                p => unreachable!("non-crystallographic product {p}"),
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        Self {
            cartan_type,
            cartan,
            coxeter,
            table: OnceLock::new(),
            bruhat_memo: Mutex::new(HashMap::new()),
        }
    }

    pub fn parse(ty: &str) -> Result<Self, CoxeterError> {
        Ok(Self::new(ty.parse()?))
    }

    pub fn cartan_type(&self) -> CartanType {
        self.cartan_type
    }

    pub fn rank(&self) -> usize {
        self.cartan_type.rank()
    }

    pub fn coxeter_matrix(&self) -> &[Vec<u32>] {
        &self.coxeter
    }

    pub fn cartan_matrix(&self) -> &[Vec<i64>] {
        &self.cartan
    }

    /// The Langlands dual system: transposed Cartan matrix, same Coxeter
    /// matrix, generators matched by index.
    pub fn dual_system(&self) -> CoxeterSystem {
        let n = self.rank();
        let transposed = (0..n).map(|i| (0..n).map(|j| self.cartan[j][i]).collect()).collect();
        CoxeterSystem::with_cartan_matrix(self.cartan_type.dual(), transposed)
    }

    fn check_letter(&self, s: usize) -> Result<(), CoxeterError> {
        if s < self.rank() {
            Ok(())
        } else {
            Err(CoxeterError::GeneratorOutOfRange {
                index: s,
                rank: self.rank(),
            })
        }
    }

    fn rho(&self) -> Vec<i64> {
        vec![1; self.rank()]
    }

    /// Applies `s_i` to a weight in fundamental-weight coordinates.
    fn reflect(&self, lam: &mut [i64], i: usize) {
        let c = lam[i];
        if c != 0 {
            for (k, x) in lam.iter_mut().enumerate() {
                *x -= c * self.cartan[k][i];
            }
        }
    }

    fn act_word(&self, lam: &mut [i64], word: impl DoubleEndedIterator<Item = usize>) {
        for s in word.rev() {
            self.reflect(lam, s);
        }
    }

    fn normal_form_of_weight(&self, mut lam: Vec<i64>) -> WeylElement {
        let mut word = Vec::new();
        while let Some(i) = lam.iter().position(|&c| c < 0) {
            word.push(i as u8);
            self.reflect(&mut lam, i);
        }
        WeylElement { word }
    }

    /// Normal form of the product of an arbitrary word (0-based letters).
    pub fn element(&self, word: &[usize]) -> Result<WeylElement, CoxeterError> {
        for &s in word {
            self.check_letter(s)?;
        }
        let mut lam = self.rho();
        self.act_word(&mut lam, word.iter().copied());
        Ok(self.normal_form_of_weight(lam))
    }

    /// Same as [`element`](Self::element) with 1-based letters, as in files.
    pub fn element_one_based(&self, word: &[usize]) -> Result<WeylElement, CoxeterError> {
        let zero_based = word
            .iter()
            .map(|&s| {
                s.checked_sub(1).ok_or(CoxeterError::GeneratorOutOfRange {
                    index: 0,
                    rank: self.rank(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        self.element(&zero_based)
    }

    pub fn identity(&self) -> WeylElement {
        WeylElement::identity()
    }

    pub fn generator(&self, s: usize) -> WeylElement {
        assert!(s < self.rank(), "generator {s} out of range");
        WeylElement { word: vec![s as u8] }
    }

    pub fn generators(&self) -> Vec<WeylElement> {
        (0..self.rank()).map(|s| self.generator(s)).collect()
    }

    fn check_element(&self, w: &WeylElement) -> Result<(), CoxeterError> {
        w.word.iter().try_for_each(|&s| self.check_letter(s as usize))
    }

    pub fn multiply(&self, a: &WeylElement, b: &WeylElement) -> Result<WeylElement, CoxeterError> {
        self.check_element(a)?;
        self.check_element(b)?;
        let mut lam = self.rho();
        let letters = a.word.iter().chain(b.word.iter()).map(|&s| s as usize);
        self.act_word(&mut lam, letters);
        Ok(self.normal_form_of_weight(lam))
    }

    pub fn mul(&self, a: &WeylElement, b: &WeylElement) -> WeylElement {
        self.multiply(a, b).expect("element of a different system")
    }

    pub fn inverse(&self, w: &WeylElement) -> WeylElement {
        let rev: Vec<usize> = w.word.iter().rev().map(|&s| s as usize).collect();
        self.element(&rev).expect("element of a different system")
    }

    pub fn length(&self, w: &WeylElement) -> usize {
        w.length()
    }

    /// `ws < w`.
    pub fn is_right_descent(&self, w: &WeylElement, s: usize) -> bool {
        // w(alpha_s) < 0  iff  w s < w; test via the length of ws.
        self.mul(w, &self.generator(s)).length() < w.length()
    }

    /// `sw < w`.
    pub fn is_left_descent(&self, w: &WeylElement, s: usize) -> bool {
        let mut lam = self.rho();
        self.act_word(&mut lam, w.word.iter().map(|&x| x as usize));
        lam[s] < 0
    }

    /// All elements, sorted ShortLex, with multiplication tables.
    ///
    /// Panics if the enumeration does not reach the known group order.
    pub fn table(&self) -> &ElementTable {
        self.table
            .get_or_init(|| self.enumerate().expect("Weyl group enumeration"))
    }

    pub fn try_table(&self) -> Result<&ElementTable, CoxeterError> {
        if let Some(t) = self.table.get() {
            return Ok(t);
        }
        let t = self.enumerate()?;
        Ok(self.table.get_or_init(|| t))
    }

    pub fn elements(&self) -> &[WeylElement] {
        &self.table().elements
    }

    pub fn order(&self) -> usize {
        self.table().len()
    }

    fn enumerate(&self) -> Result<ElementTable, CoxeterError> {
        let n = self.rank();
        let expected = self.cartan_type.weyl_order();
        let mut layer: Vec<WeylElement> = vec![WeylElement::identity()];
        let mut elements = Vec::new();
        while !layer.is_empty() {
            let mut next: Vec<WeylElement> = Vec::new();
            for w in &layer {
                for s in 0..n {
                    let mut lam = self.rho();
                    self.reflect(&mut lam, s);
                    self.act_word(&mut lam, w.word.iter().map(|&x| x as usize));
                    let ws = self.normal_form_of_weight(lam);
                    if ws.length() > w.length() {
                        next.push(ws);
                    }
                }
            }
            layer.sort();
            elements.append(&mut layer);
            if elements.len() as u128 > expected {
                break;
            }
            next.sort();
            next.dedup();
            layer = next;
        }
        if elements.len() as u128 != expected {
            return Err(CoxeterError::OrderMismatch {
                ty: self.cartan_type,
                found: elements.len(),
                expected,
            });
        }
        let index: HashMap<WeylElement, usize> = elements.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let gens: Vec<WeylElement> = self.generators();
        let right = elements
            .iter()
            .map(|w| gens.iter().map(|s| index[&self.mul(w, s)]).collect())
            .collect();
        let left = elements
            .iter()
            .map(|w| gens.iter().map(|s| index[&self.mul(s, w)]).collect())
            .collect();
        let inverse = elements.iter().map(|w| index[&self.inverse(w)]).collect();
        Ok(ElementTable {
            elements,
            index,
            right,
            left,
            inverse,
        })
    }

    /// Bruhat order via the subword property on the normal-form word of `b`.
    pub fn bruhat_leq(&self, a: &WeylElement, b: &WeylElement) -> bool {
        let t = self.table();
        self.bruhat_leq_idx(t.index(a), t.index(b))
    }

    pub fn bruhat_leq_idx(&self, a: usize, b: usize) -> bool {
        if a == b {
            return true;
        }
        let t = self.table();
        let (la, lb) = (t.length(a), t.length(b));
        if la >= lb {
            return false;
        }
        if la == 0 {
            return true;
        }
        let key = (a as u32, b as u32);
        if let Some(&hit) = self.bruhat_memo.lock().unwrap().get(&key) {
            return hit;
        }
        // b = b' s with the last letter s of its word. Either s is used in the
        // subword (then a s < a and a s <= b') or it is not (a <= b').
        let s = t.elements[b].last_letter().unwrap();
        let b_prime = t.right[b][s];
        let a_s = t.right[a][s];
        let res = if t.length(a_s) < la {
            self.bruhat_leq_idx(a_s, b_prime)
        } else {
            self.bruhat_leq_idx(a, b_prime)
        };
        self.bruhat_memo.lock().unwrap().insert(key, res);
        res
    }

    /// Longest element of the parabolic subgroup generated by `subset`.
    pub fn longest_element(&self, subset: &[usize]) -> WeylElement {
        let mut w = WeylElement::identity();
        while let Some(&s) = subset.iter().find(|&&s| !self.is_right_descent(&w, s)) {
            w = self.mul(&w, &self.generator(s));
        }
        w
    }

    /// The longest element `w0` of `W`.
    pub fn longest(&self) -> WeylElement {
        let all: Vec<usize> = (0..self.rank()).collect();
        self.longest_element(&all)
    }

    /// Minimal-length representative of `w W_I`.
    pub fn min_coset_rep(&self, w: &WeylElement, subset: &[usize]) -> WeylElement {
        let mut x = w.clone();
        while let Some(&s) = subset.iter().find(|&&s| self.is_right_descent(&x, s)) {
            x = self.mul(&x, &self.generator(s));
        }
        x
    }

    /// Maximal-length representative of `w W_I`.
    pub fn max_coset_rep(&self, w: &WeylElement, subset: &[usize]) -> WeylElement {
        let x = self.min_coset_rep(w, subset);
        self.mul(&x, &self.longest_element(subset))
    }
}
