//! Lattices as posets with total meet and join tables, and exhaustive checks
//! of the lattice laws.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::law::LawReport;
use crate::poset::{Bound, Poset};
use crate::relation::{first_bit, is_subset, words_for};

pub const JOIN_COMMUTATIVITY: &str = "join commutativity";
pub const MEET_COMMUTATIVITY: &str = "meet commutativity";
pub const JOIN_ASSOCIATIVITY: &str = "join associativity";
pub const MEET_ASSOCIATIVITY: &str = "meet associativity";
pub const JOIN_ABSORPTION: &str = "join absorption";
pub const MEET_ABSORPTION: &str = "meet absorption";
pub const JOIN_IDEMPOTENCE: &str = "join idempotence";
pub const MEET_IDEMPOTENCE: &str = "meet idempotence";
pub const CONSISTENCY: &str = "consistency relation";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    poset: Poset,
    meet: Vec<u16>,
    join: Vec<u16>,
    bottom: Option<usize>,
}

/// Why a poset is not a lattice: the first pair (in element order) whose
/// join or meet does not exist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotALattice {
    pub x: String,
    pub y: String,
    /// `"join"` or `"meet"`.
    pub operation: &'static str,
    pub bound: Bound<String>,
}

impl fmt::Display for NotALattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} of ({}, {}) does not exist: ",
            self.operation, self.x, self.y
        )?;
        match &self.bound {
            Bound::Missing => write!(f, "no common bound"),
            Bound::Ambiguous(c) => write!(f, "candidates {}", c.join(", ")),
            Bound::Unique(u) => write!(f, "unexpected unique bound {u}"),
        }
    }
}

impl std::error::Error for NotALattice {}

/// Compute meet and join tables for `poset`, or report a pair lacking one.
pub fn to_lattice(poset: &Poset) -> std::result::Result<Lattice, NotALattice> {
    Lattice::from_poset(poset.clone())
}

impl Lattice {
    pub fn from_poset(poset: Poset) -> std::result::Result<Self, NotALattice> {
        let n = poset.len();
        // Linear extension: sorting by down-set size respects the order, so
        // the least element of any upper-bound set comes first in it.
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (poset.down_count(i), i));
        let mut rank = vec![0usize; n];
        for (r, &i) in order.iter().enumerate() {
            rank[i] = r;
        }
        let words = words_for(n);
        let ranked = |rows: &dyn Fn(usize) -> Vec<usize>| -> Vec<Vec<u64>> {
            (0..n)
                .map(|i| {
                    let mut set = vec![0u64; words];
                    for j in rows(i) {
                        crate::relation::set_bit(&mut set, rank[j]);
                    }
                    set
                })
                .collect()
        };
        let up = ranked(&|i| poset.relation().successors(i).collect());
        let down = ranked(&|i| crate::relation::iter_bits(poset.down_set(i)).collect());

        let mut join = vec![0u16; n * n];
        let mut meet = vec![0u16; n * n];
        let mut scratch = vec![0u64; words];
        for x in 0..n {
            for y in x..n {
                for (s, (a, b)) in scratch.iter_mut().zip(up[x].iter().zip(&up[y])) {
                    *s = a & b;
                }
                let j = first_bit(&scratch)
                    .map(|r| order[r])
                    .filter(|&c| is_subset(&scratch, &up[c]));
                let Some(j) = j else {
                    return Err(NotALattice {
                        x: poset.id(x).to_string(),
                        y: poset.id(y).to_string(),
                        operation: "join",
                        bound: poset.lub_index(x, y).map(|k| poset.id(k).to_string()),
                    });
                };

                for (s, (a, b)) in scratch.iter_mut().zip(down[x].iter().zip(&down[y])) {
                    *s = a & b;
                }
                let m = last_bit(&scratch)
                    .map(|r| order[r])
                    .filter(|&c| is_subset(&scratch, &down[c]));
                let Some(m) = m else {
                    return Err(NotALattice {
                        x: poset.id(x).to_string(),
                        y: poset.id(y).to_string(),
                        operation: "meet",
                        bound: poset.glb_index(x, y).map(|k| poset.id(k).to_string()),
                    });
                };
                join[x * n + y] = j as u16;
                join[y * n + x] = j as u16;
                meet[x * n + y] = m as u16;
                meet[y * n + x] = m as u16;
            }
        }
        let bottom = poset.bottom();
        Ok(Lattice {
            poset,
            meet,
            join,
            bottom,
        })
    }

    /// Assemble a lattice from externally supplied tables without checking
    /// that they agree with the order. Tables are row-major `n × n` element
    /// positions. Use [`verify_lattice_laws`] and
    /// [`verify_consistency_relation`] to audit the result.
    pub fn from_parts(poset: Poset, meet: Vec<usize>, join: Vec<usize>) -> Result<Self> {
        let n = poset.len();
        let convert = |t: Vec<usize>| -> Result<Vec<u16>> {
            if t.len() != n * n {
                return Err(Error::TableShape { elements: n });
            }
            t.into_iter()
                .map(|v| {
                    if v < n {
                        Ok(v as u16)
                    } else {
                        Err(Error::InvalidArgument(format!(
                            "table entry {v} out of range"
                        )))
                    }
                })
                .collect()
        };
        let meet = convert(meet)?;
        let join = convert(join)?;
        let bottom = poset.bottom();
        Ok(Lattice {
            poset,
            meet,
            join,
            bottom,
        })
    }

    /// Tables computed by a builder from payload arithmetic.
    pub(crate) fn from_computed_tables(poset: Poset, meet: Vec<u16>, join: Vec<u16>) -> Self {
        debug_assert_eq!(meet.len(), poset.len() * poset.len());
        debug_assert_eq!(join.len(), poset.len() * poset.len());
        let bottom = poset.bottom();
        Lattice {
            poset,
            meet,
            join,
            bottom,
        }
    }

    pub fn poset(&self) -> &Poset {
        &self.poset
    }

    pub fn len(&self) -> usize {
        self.poset.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poset.is_empty()
    }

    pub fn bottom(&self) -> Option<usize> {
        self.bottom
    }

    pub fn top(&self) -> Option<usize> {
        self.poset.top()
    }

    #[inline]
    pub fn join(&self, x: usize, y: usize) -> usize {
        self.join[x * self.len() + y] as usize
    }

    #[inline]
    pub fn meet(&self, x: usize, y: usize) -> usize {
        self.meet[x * self.len() + y] as usize
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.poset.leq(x, y)
    }

    pub fn id(&self, i: usize) -> &str {
        self.poset.id(i)
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.poset.index_of(id)
    }

    pub fn join_ids(&self, x: &str, y: &str) -> Result<&str> {
        Ok(self.id(self.join(self.index_of(x)?, self.index_of(y)?)))
    }

    pub fn meet_ids(&self, x: &str, y: &str) -> Result<&str> {
        Ok(self.id(self.meet(self.index_of(x)?, self.index_of(y)?)))
    }

    /// Row-major copy of the join table, for fault injection and export.
    pub fn join_table(&self) -> Vec<usize> {
        self.join.iter().map(|&v| v as usize).collect()
    }

    pub fn meet_table(&self) -> Vec<usize> {
        self.meet.iter().map(|&v| v as usize).collect()
    }
}

fn last_bit(words: &[u64]) -> Option<usize> {
    words
        .iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Commutativity, associativity, absorption and idempotence of meet and join,
/// each checked over every pair or triple.
///
/// Reports come in the order: commutativity (join, meet), associativity
/// (join, meet), absorption (join, meet), idempotence (join, meet).
pub fn verify_lattice_laws(lattice: &Lattice) -> Vec<LawReport> {
    let n = lattice.len();
    let ids = |v: &[usize]| {
        v.iter()
            .map(|&i| lattice.id(i).to_string())
            .collect::<Vec<_>>()
    };
    let j = |a, b| lattice.join(a, b);
    let m = |a, b| lattice.meet(a, b);

    let pairs = || (0..n).flat_map(move |x| (0..n).map(move |y| (x, y)));
    let find_pair = |pred: &dyn Fn(usize, usize) -> bool| {
        pairs()
            .find(|&(x, y)| !pred(x, y))
            .map(|(x, y)| ids(&[x, y]))
    };
    let find_triple = |op: &dyn Fn(usize, usize) -> usize| {
        for x in 0..n {
            for y in 0..n {
                let xy = op(x, y);
                for z in 0..n {
                    if op(xy, z) != op(x, op(y, z)) {
                        return Some(ids(&[x, y, z]));
                    }
                }
            }
        }
        None
    };
    let find_single =
        |op: &dyn Fn(usize, usize) -> usize| (0..n).find(|&x| op(x, x) != x).map(|x| ids(&[x]));

    vec![
        LawReport::from_witness(JOIN_COMMUTATIVITY, find_pair(&|x, y| j(x, y) == j(y, x))),
        LawReport::from_witness(MEET_COMMUTATIVITY, find_pair(&|x, y| m(x, y) == m(y, x))),
        LawReport::from_witness(JOIN_ASSOCIATIVITY, find_triple(&j)),
        LawReport::from_witness(MEET_ASSOCIATIVITY, find_triple(&m)),
        LawReport::from_witness(JOIN_ABSORPTION, find_pair(&|x, y| j(x, m(x, y)) == x)),
        LawReport::from_witness(MEET_ABSORPTION, find_pair(&|x, y| m(x, j(x, y)) == x)),
        LawReport::from_witness(JOIN_IDEMPOTENCE, find_single(&j)),
        LawReport::from_witness(MEET_IDEMPOTENCE, find_single(&m)),
    ]
}

/// `a ≤ b ⇔ a ∧ b = a ⇔ a ∨ b = b` for every ordered pair.
pub fn verify_consistency_relation(lattice: &Lattice) -> LawReport {
    let n = lattice.len();
    let witness = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .find(|&(a, b)| {
            let le = lattice.leq(a, b);
            le != (lattice.meet(a, b) == a) || le != (lattice.join(a, b) == b)
        })
        .map(|(a, b)| vec![lattice.id(a).to_string(), lattice.id(b).to_string()]);
    LawReport::from_witness(CONSISTENCY, witness)
}
