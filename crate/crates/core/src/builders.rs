//! Constructors for the canonical finite lattices: subsets under inclusion,
//! statements under implication, chains, divisors under divisibility, and
//! products of any two lattices.
//!
//! Tables are filled from payload arithmetic (union, gcd, max, ...) rather
//! than by searching the order, so every builder doubles as an oracle for
//! [`to_lattice`](crate::lattice::to_lattice).

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::numtheory::{divisors, gcd};
use crate::poset::{Poset, MAX_ELEMENTS};

/// Largest atom count whose power set fits in [`MAX_ELEMENTS`].
pub const MAX_ATOMS: usize = 12;
pub const MAX_CHAIN: usize = MAX_ELEMENTS;
pub const MAX_DIVISOR_N: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Payload {
    /// Bitmask over atom positions.
    Subset(u32),
    Integer(u64),
    /// Disjunction of atomic statements, as a bitmask; zero is falsity.
    Statement(u32),
    Pair(Box<Payload>, Box<Payload>),
}

#[derive(Debug, Clone)]
pub struct LabeledLattice {
    pub lattice: Lattice,
    pub payload: Vec<Payload>,
    /// Atom names for subset and statement payloads, empty otherwise.
    pub atoms: Vec<String>,
}

impl LabeledLattice {
    pub fn len(&self) -> usize {
        self.lattice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lattice.is_empty()
    }

    pub fn position_of(&self, payload: &Payload) -> Option<usize> {
        self.payload.iter().position(|p| p == payload)
    }

    /// Bitmask for a set of atom names.
    pub fn atom_mask<S: AsRef<str>>(&self, names: &[S]) -> Result<u32> {
        names.iter().try_fold(0u32, |mask, name| {
            let name = name.as_ref();
            let pos = self
                .atoms
                .iter()
                .position(|a| a == name)
                .ok_or_else(|| Error::UnknownElement(name.to_string()))?;
            Ok(mask | 1 << pos)
        })
    }

    /// Element id of the subset (or statement) with the given atoms.
    pub fn id_of_atoms<S: AsRef<str>>(&self, names: &[S]) -> Result<&str> {
        // Boolean and statement builds index elements by mask.
        Ok(self.lattice.id(self.atom_mask(names)? as usize))
    }
}

fn validate_atoms<S: AsRef<str>>(atoms: &[S]) -> Result<Vec<String>> {
    if atoms.is_empty() {
        return Err(Error::InvalidArgument("at least one atom required".into()));
    }
    if atoms.len() > MAX_ATOMS {
        return Err(Error::Capacity {
            what: "atoms",
            limit: MAX_ATOMS,
            requested: atoms.len(),
        });
    }
    let mut seen = HashSet::new();
    atoms
        .iter()
        .map(|a| {
            let a = a.as_ref();
            if a.is_empty() {
                Err(Error::EmptyElementId)
            } else if !seen.insert(a) {
                Err(Error::DuplicateElement(a.to_string()))
            } else {
                Ok(a.to_string())
            }
        })
        .collect()
}

pub fn render_subset(atoms: &[String], mask: u32) -> String {
    if mask == 0 {
        return "∅".to_string();
    }
    let names: Vec<&str> = atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, a)| a.as_str())
        .collect();
    format!("{{{}}}", names.join(","))
}

pub fn render_statement(atoms: &[String], mask: u32) -> String {
    if mask == 0 {
        return "false".to_string();
    }
    atoms
        .iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, a)| a.as_str())
        .collect::<Vec<_>>()
        .join(" or ")
}

fn power_set_lattice(
    atoms: &[String],
    render: impl Fn(&[String], u32) -> String,
) -> Result<Lattice> {
    let n = 1usize << atoms.len();
    let ids = (0..n as u32).map(|m| render(atoms, m)).collect();
    let poset = Poset::from_order_fn(ids, |i, j| i & !j == 0)?;
    let mut meet = vec![0u16; n * n];
    let mut join = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            meet[x * n + y] = (x & y) as u16;
            join[x * n + y] = (x | y) as u16;
        }
    }
    Ok(Lattice::from_computed_tables(poset, meet, join))
}

/// All subsets of `atoms` ordered by inclusion. Element `m` is the subset
/// with bitmask `m`.
pub fn boolean_lattice<S: AsRef<str>>(atoms: &[S]) -> Result<LabeledLattice> {
    let atoms = validate_atoms(atoms)?;
    let lattice = power_set_lattice(&atoms, render_subset)?;
    let payload = (0..lattice.len() as u32).map(Payload::Subset).collect();
    Ok(LabeledLattice {
        lattice,
        payload,
        atoms,
    })
}

/// Disjunctions of atomic statements ordered by implication. Same order as
/// [`boolean_lattice`], with meet read as "and" and join as "or".
pub fn statement_lattice<S: AsRef<str>>(atoms: &[S]) -> Result<LabeledLattice> {
    let atoms = validate_atoms(atoms)?;
    let lattice = power_set_lattice(&atoms, render_statement)?;
    let payload = (0..lattice.len() as u32).map(Payload::Statement).collect();
    Ok(LabeledLattice {
        lattice,
        payload,
        atoms,
    })
}

/// `1 ≤ 2 ≤ ... ≤ n`.
pub fn chain(n: usize) -> Result<LabeledLattice> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "chain length must be positive".into(),
        ));
    }
    if n > MAX_CHAIN {
        return Err(Error::Capacity {
            what: "chain length",
            limit: MAX_CHAIN,
            requested: n,
        });
    }
    let poset = Poset::from_order_fn((1..=n).map(|i| i.to_string()).collect(), |i, j| i <= j)?;
    let mut meet = vec![0u16; n * n];
    let mut join = vec![0u16; n * n];
    for x in 0..n {
        for y in 0..n {
            meet[x * n + y] = x.min(y) as u16;
            join[x * n + y] = x.max(y) as u16;
        }
    }
    Ok(LabeledLattice {
        lattice: Lattice::from_computed_tables(poset, meet, join),
        payload: (1..=n as u64).map(Payload::Integer).collect(),
        atoms: Vec::new(),
    })
}

/// Divisors of `n` ordered by divisibility; meet is GCD and join is LCM.
pub fn divisor_lattice(n: u64) -> Result<LabeledLattice> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "divisor lattice needs n ≥ 2, got {n}"
        )));
    }
    if n > MAX_DIVISOR_N {
        return Err(Error::Capacity {
            what: "divisor lattice n",
            limit: MAX_DIVISOR_N as usize,
            requested: n as usize,
        });
    }
    let divs = divisors(n);
    let k = divs.len();
    let position: HashMap<u64, usize> = divs.iter().enumerate().map(|(i, &d)| (d, i)).collect();
    let poset = Poset::from_order_fn(divs.iter().map(|d| d.to_string()).collect(), |i, j| {
        divs[j].is_multiple_of(divs[i])
    })?;
    let mut meet = vec![0u16; k * k];
    let mut join = vec![0u16; k * k];
    for (x, &p) in divs.iter().enumerate() {
        for (y, &q) in divs.iter().enumerate() {
            let g = gcd(p, q);
            meet[x * k + y] = position[&g] as u16;
            join[x * k + y] = position[&(p / g * q)] as u16;
        }
    }
    Ok(LabeledLattice {
        lattice: Lattice::from_computed_tables(poset, meet, join),
        payload: divs.into_iter().map(Payload::Integer).collect(),
        atoms: Vec::new(),
    })
}

/// Componentwise product. Element `(a, b)` sits at position
/// `a * |right| + b`.
pub fn product_lattice(left: &LabeledLattice, right: &LabeledLattice) -> Result<LabeledLattice> {
    let (n1, n2) = (left.len(), right.len());
    let n = n1 * n2;
    if n > MAX_ELEMENTS {
        return Err(Error::Capacity {
            what: "product lattice elements",
            limit: MAX_ELEMENTS,
            requested: n,
        });
    }
    let (l1, l2) = (&left.lattice, &right.lattice);
    let split = |i: usize| (i / n2, i % n2);
    let ids = (0..n)
        .map(|i| {
            let (a, b) = split(i);
            format!("({},{})", l1.id(a), l2.id(b))
        })
        .collect();
    let poset = Poset::from_order_fn(ids, |i, j| {
        let ((a, b), (c, d)) = (split(i), split(j));
        l1.leq(a, c) && l2.leq(b, d)
    })?;
    let mut meet = vec![0u16; n * n];
    let mut join = vec![0u16; n * n];
    for x in 0..n {
        let (a, b) = split(x);
        for y in 0..n {
            let (c, d) = split(y);
            meet[x * n + y] = (l1.meet(a, c) * n2 + l2.meet(b, d)) as u16;
            join[x * n + y] = (l1.join(a, c) * n2 + l2.join(b, d)) as u16;
        }
    }
    let payload = (0..n)
        .map(|i| {
            let (a, b) = split(i);
            Payload::Pair(
                Box::new(left.payload[a].clone()),
                Box::new(right.payload[b].clone()),
            )
        })
        .collect();
    Ok(LabeledLattice {
        lattice: Lattice::from_computed_tables(poset, meet, join),
        payload,
        atoms: Vec::new(),
    })
}
