//! Qubit-excitation operator pools and pool filters.

mod excitation;
mod symmetry;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use excitation::{Excitation, ExcitationKind};
pub use symmetry::ProductTable;

use crate::error::{Error, Result};
use crate::hamio::Occupation;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolFamily {
    Uccsd,
    Uccgsd,
    /// One layer of generalized singles plus paired doubles.
    Kupccgsd,
}

impl fmt::Display for PoolFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PoolFamily::Uccsd => "uccsd",
            PoolFamily::Uccgsd => "uccgsd",
            PoolFamily::Kupccgsd => "kupccgsd",
        })
    }
}

impl FromStr for PoolFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uccsd" => Ok(PoolFamily::Uccsd),
            "uccgsd" => Ok(PoolFamily::Uccgsd),
            "kupccgsd" | "k-upccgsd" => Ok(PoolFamily::Kupccgsd),
            other => Err(Error::Config(format!("unknown pool family {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pool {
    pub family: PoolFamily,
    pub excitations: Vec<Excitation>,
}

impl Pool {
    pub fn len(&self) -> usize {
        self.excitations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.excitations.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Excitation> {
        self.excitations.iter()
    }

    fn retain(mut self, keep: impl Fn(&Excitation) -> bool) -> Pool {
        self.excitations.retain(|e| keep(e));
        self
    }
}

fn same_spin(p: usize, q: usize) -> bool {
    p % 2 == q % 2
}

fn index_pairs(indices: &[usize]) -> Vec<[usize; 2]> {
    let mut out = Vec::new();
    for (k, &a) in indices.iter().enumerate() {
        for &b in &indices[k + 1..] {
            out.push([a, b]);
        }
    }
    out
}

fn spin_of_pair([a, b]: [usize; 2]) -> i32 {
    let s = |p: usize| if p % 2 == 0 { 1 } else { -1 };
    s(a) + s(b)
}

fn generalized_singles(n: usize) -> Vec<Excitation> {
    let mut out = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            if same_spin(p, q) {
                out.push(Excitation::Single { from: p, to: q });
            }
        }
    }
    out
}

/// Generates a pool in deterministic order: singles first, then doubles,
/// each lexicographic over their index tuples.
pub fn generate_pool(family: PoolFamily, n_spin_orbitals: usize, occupation: Occupation) -> Result<Pool> {
    if n_spin_orbitals % 2 != 0 {
        return Err(Error::OddOrbitalCount(n_spin_orbitals));
    }
    if occupation.len() != n_spin_orbitals {
        return Err(Error::LengthMismatch {
            expected: n_spin_orbitals,
            actual: occupation.len(),
        });
    }
    let n = n_spin_orbitals;
    let mut excitations = Vec::new();
    match family {
        PoolFamily::Uccsd => {
            let occ: Vec<usize> = occupation.occupied().collect();
            let virt: Vec<usize> = occupation.virtuals().collect();
            for &i in &occ {
                for &a in &virt {
                    if same_spin(i, a) {
                        excitations.push(Excitation::Single { from: i, to: a });
                    }
                }
            }
            let virt_pairs = index_pairs(&virt);
            for from in index_pairs(&occ) {
                for &to in &virt_pairs {
                    if spin_of_pair(from) == spin_of_pair(to) {
                        excitations.push(Excitation::Double { from, to });
                    }
                }
            }
        }
        PoolFamily::Uccgsd => {
            excitations.extend(generalized_singles(n));
            let all: Vec<usize> = (0..n).collect();
            let pairs = index_pairs(&all);
            for (k, &from) in pairs.iter().enumerate() {
                for &to in &pairs[k + 1..] {
                    let disjoint = !to.contains(&from[0]) && !to.contains(&from[1]);
                    if disjoint && spin_of_pair(from) == spin_of_pair(to) {
                        excitations.push(Excitation::Double { from, to });
                    }
                }
            }
        }
        PoolFamily::Kupccgsd => {
            excitations.extend(generalized_singles(n));
            let n_spatial = n / 2;
            for i in 0..n_spatial {
                for a in i + 1..n_spatial {
                    excitations.push(Excitation::Double {
                        from: [2 * i, 2 * i + 1],
                        to: [2 * a, 2 * a + 1],
                    });
                }
            }
        }
    }
    Ok(Pool { family, excitations })
}

/// Keeps excitations whose created-orbital irrep product matches the
/// annihilated-orbital product. `irreps` is per spatial orbital.
pub fn symmetry_filter(pool: Pool, irreps: &[String], table: &ProductTable) -> Result<Pool> {
    let ids = irreps
        .iter()
        .map(|label| table.id(label))
        .collect::<Option<Vec<u8>>>()
        .ok_or_else(|| {
            let unknown = irreps.iter().filter(|l| table.id(l).is_none()).cloned().collect();
            Error::UnknownIrreps(unknown)
        })?;
    for e in &pool.excitations {
        if e.max_index() / 2 >= ids.len() {
            return Err(Error::InvalidField {
                field: "irreps",
                message: format!("no label for orbitals of {e}"),
            });
        }
    }
    Ok(pool.retain(|e| e.indices().iter().fold(0u8, |acc, &p| acc ^ ids[p / 2]) == 0))
}

/// Strict mode drops any excitation touching a core spatial orbital; relaxed
/// mode drops only excitations that act purely within the core.
pub fn frozen_core_filter(pool: Pool, core_spatial: &BTreeSet<usize>, relaxed: bool) -> Pool {
    if core_spatial.is_empty() {
        return pool;
    }
    let is_core = |p: &usize| core_spatial.contains(&(p / 2));
    if relaxed {
        pool.retain(|e| !e.indices().iter().all(is_core))
    } else {
        pool.retain(|e| !e.indices().iter().any(is_core))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn occ(s: &str) -> Occupation {
        Occupation::parse(s).unwrap()
    }

    #[test]
    fn h2_uccsd() {
        let pool = generate_pool(PoolFamily::Uccsd, 4, occ("1100")).unwrap();
        assert_eq!(
            pool.excitations,
            vec![
                Excitation::single(0, 2).unwrap(),
                Excitation::single(1, 3).unwrap(),
                Excitation::double([0, 1], [2, 3]).unwrap(),
            ]
        );
    }

    #[test]
    fn kupccgsd_on_four_spin_orbitals() {
        let pool = generate_pool(PoolFamily::Kupccgsd, 4, occ("1100")).unwrap();
        let doubles: Vec<_> = pool.iter().filter(|e| e.is_double()).copied().collect();
        assert_eq!(doubles, vec![Excitation::double([0, 1], [2, 3]).unwrap()]);
        let singles: Vec<_> = pool.iter().filter(|e| e.is_single()).copied().collect();
        assert_eq!(singles, vec![Excitation::single(0, 2).unwrap(), Excitation::single(1, 3).unwrap()]);
    }

    #[test]
    fn filled_register_has_empty_uccsd_pool() {
        assert!(generate_pool(PoolFamily::Uccsd, 6, occ("111111")).unwrap().is_empty());
    }

    #[test]
    fn odd_count_rejected() {
        assert!(matches!(
            generate_pool(PoolFamily::Uccsd, 5, occ("11000")),
            Err(Error::OddOrbitalCount(5))
        ));
    }

    #[test]
    fn uccgsd_has_no_reversed_duplicates() {
        let pool = generate_pool(PoolFamily::Uccgsd, 8, occ("11000000")).unwrap();
        let mut keys = BTreeSet::new();
        for e in pool.iter() {
            let mut a = e.from_indices().to_vec();
            let mut b = e.to_indices().to_vec();
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            assert!(keys.insert((a, b)), "duplicate {e}");
        }
    }

    #[test]
    fn frozen_core_modes() {
        let pool = Pool {
            family: PoolFamily::Uccgsd,
            excitations: vec![
                Excitation::single(0, 2).unwrap(),
                Excitation::single(2, 4).unwrap(),
                Excitation::double([0, 1], [2, 3]).unwrap(),
            ],
        };
        let core: BTreeSet<usize> = [0].into();
        assert_eq!(frozen_core_filter(pool.clone(), &BTreeSet::new(), false), pool);
        let relaxed = frozen_core_filter(pool.clone(), &core, true);
        assert_eq!(relaxed.len(), 3);
        let strict = frozen_core_filter(pool.clone(), &core, false);
        assert_eq!(strict.excitations, vec![Excitation::single(2, 4).unwrap()]);
        let core2: BTreeSet<usize> = [0, 1].into();
        let relaxed2 = frozen_core_filter(pool, &core2, true);
        assert_eq!(relaxed2.excitations, vec![Excitation::single(2, 4).unwrap()]);
    }
}
