use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcitationKind {
    Single,
    Double,
}

/// A qubit excitation over spin-orbital indices (interleaved alpha/beta).
///
/// The gate rotates the pattern "from occupied, to empty" into "from empty,
/// to occupied" by `theta`, with the generator sending the occupied pattern
/// to the excited one. Double index pairs are stored in ascending order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(into = "ExcitationRecord", try_from = "ExcitationRecord")]
pub enum Excitation {
    Single { from: usize, to: usize },
    Double { from: [usize; 2], to: [usize; 2] },
}

impl Excitation {
    pub fn single(from: usize, to: usize) -> Result<Self> {
        if from == to {
            return Err(Error::InvalidExcitation(format!("single {from}->{to} repeats an index")));
        }
        Ok(Excitation::Single { from, to })
    }

    /// Builds a double with each index pair put into ascending order.
    pub fn double(from: [usize; 2], to: [usize; 2]) -> Result<Self> {
        let all = [from[0], from[1], to[0], to[1]];
        for a in 0..4 {
            for b in a + 1..4 {
                if all[a] == all[b] {
                    return Err(Error::InvalidExcitation(format!(
                        "double {from:?}->{to:?} repeats index {}",
                        all[a]
                    )));
                }
            }
        }
        let sort = |[a, b]: [usize; 2]| if a < b { [a, b] } else { [b, a] };
        Ok(Excitation::Double { from: sort(from), to: sort(to) })
    }

    pub fn kind(&self) -> ExcitationKind {
        match self {
            Excitation::Single { .. } => ExcitationKind::Single,
            Excitation::Double { .. } => ExcitationKind::Double,
        }
    }

    pub fn is_single(&self) -> bool {
        matches!(self, Excitation::Single { .. })
    }

    pub fn is_double(&self) -> bool {
        matches!(self, Excitation::Double { .. })
    }

    pub fn from_indices(&self) -> &[usize] {
        match self {
            Excitation::Single { from, .. } => std::slice::from_ref(from),
            Excitation::Double { from, .. } => from,
        }
    }

    pub fn to_indices(&self) -> &[usize] {
        match self {
            Excitation::Single { to, .. } => std::slice::from_ref(to),
            Excitation::Double { to, .. } => to,
        }
    }

    /// All touched indices, from-indices first.
    pub fn indices(&self) -> Vec<usize> {
        let mut v = self.from_indices().to_vec();
        v.extend_from_slice(self.to_indices());
        v
    }

    /// `(i_alpha, i_beta) -> (a_alpha, a_beta)` on two spatial orbitals.
    pub fn is_paired(&self) -> bool {
        match *self {
            Excitation::Double { from, to } => {
                from[0] % 2 == 0 && from[1] == from[0] + 1 && to[0] % 2 == 0 && to[1] == to[0] + 1
            }
            Excitation::Single { .. } => false,
        }
    }

    /// Bit masks of the from- and to-qubits.
    pub fn masks(&self) -> (u64, u64) {
        let m = |ix: &[usize]| ix.iter().fold(0u64, |acc, &p| acc | 1 << p);
        (m(self.from_indices()), m(self.to_indices()))
    }

    pub fn max_index(&self) -> usize {
        self.indices().into_iter().max().unwrap_or(0)
    }

    /// `max index - min index` over touched spin orbitals.
    pub fn span(&self) -> usize {
        let ix = self.indices();
        ix.iter().max().unwrap() - ix.iter().min().unwrap()
    }

    /// Net change of alpha-minus-beta count, times two.
    pub fn delta_twice_sz(&self) -> i32 {
        let spin = |p: &usize| if p % 2 == 0 { 1 } else { -1 };
        self.to_indices().iter().map(spin).sum::<i32>() - self.from_indices().iter().map(spin).sum::<i32>()
    }

    /// Spatial orbitals touched, sorted, with multiplicity.
    pub fn spatial_multiset(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.indices().into_iter().map(|p| p / 2).collect();
        v.sort_unstable();
        v
    }
}

impl fmt::Display for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Excitation::Single { from, to } => write!(f, "{from}->{to}"),
            Excitation::Double { from, to } => write!(f, "({},{})->({},{})", from[0], from[1], to[0], to[1]),
        }
    }
}

impl fmt::Debug for Excitation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Excitation[{self}]")
    }
}

#[derive(Serialize, Deserialize)]
struct ExcitationRecord {
    kind: ExcitationKind,
    from: Vec<usize>,
    to: Vec<usize>,
    #[serde(default)]
    paired: bool,
}

impl From<Excitation> for ExcitationRecord {
    fn from(e: Excitation) -> Self {
        ExcitationRecord {
            kind: e.kind(),
            from: e.from_indices().to_vec(),
            to: e.to_indices().to_vec(),
            paired: e.is_paired(),
        }
    }
}

impl TryFrom<ExcitationRecord> for Excitation {
    type Error = Error;

    fn try_from(r: ExcitationRecord) -> Result<Self> {
        match (r.kind, r.from.as_slice(), r.to.as_slice()) {
            (ExcitationKind::Single, &[a], &[b]) => Excitation::single(a, b),
            (ExcitationKind::Double, &[a, b], &[c, d]) => Excitation::double([a, b], [c, d]),
            _ => Err(Error::InvalidExcitation(format!(
                "{:?} with from {:?} and to {:?}",
                r.kind, r.from, r.to
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn double_is_canonicalised() {
        let d = Excitation::double([1, 0], [3, 2]).unwrap();
        assert_eq!(d.from_indices(), &[0, 1]);
        assert_eq!(d.to_indices(), &[2, 3]);
        assert!(d.is_paired());
        assert_eq!(d.to_string(), "(0,1)->(2,3)");
    }

    #[test]
    fn repeated_indices_rejected() {
        assert!(Excitation::double([0, 1], [1, 2]).is_err());
        assert!(Excitation::single(3, 3).is_err());
    }

    #[test]
    fn paired_requires_same_spatial_orbital() {
        assert!(!Excitation::double([0, 3], [4, 7]).unwrap().is_paired());
        assert!(!Excitation::double([0, 2], [4, 6]).unwrap().is_paired());
        assert!(Excitation::double([2, 3], [8, 9]).unwrap().is_paired());
    }

    #[test]
    fn json_shape() {
        let d = Excitation::double([0, 1], [2, 3]).unwrap();
        let text = serde_json::to_string(&d).unwrap();
        assert_eq!(text, r#"{"kind":"double","from":[0,1],"to":[2,3],"paired":true}"#);
        let back: Excitation = serde_json::from_str(&text).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<Excitation>(r#"{"kind":"single","from":[0,1],"to":[2]}"#).is_err());
    }

    #[test]
    fn spin_bookkeeping() {
        assert_eq!(Excitation::single(0, 2).unwrap().delta_twice_sz(), 0);
        assert_eq!(Excitation::single(0, 3).unwrap().delta_twice_sz(), -2);
        assert_eq!(Excitation::double([0, 1], [2, 3]).unwrap().spatial_multiset(), vec![0, 0, 1, 1]);
        assert_eq!(Excitation::double([0, 1], [2, 11]).unwrap().span(), 11);
    }
}
