//! Abelian point-group product tables. Every irrep of an abelian group with
//! real characters is an element of Z2^k, so products reduce to XOR of ids.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductTable {
    group: String,
    ids: BTreeMap<String, u8>,
}

const GROUPS: &[(&str, &[(&str, u8)])] = &[
    ("C2v", &[("A1", 0), ("B1", 1), ("B2", 2), ("A2", 3)]),
    (
        "D2h",
        &[
            ("Ag", 0),
            ("B1g", 1),
            ("B2g", 2),
            ("B3g", 3),
            ("Au", 4),
            ("B1u", 5),
            ("B2u", 6),
            ("B3u", 7),
        ],
    ),
    ("C2h", &[("Ag", 0), ("Bg", 1), ("Au", 2), ("Bu", 3)]),
    ("D2", &[("A", 0), ("B1", 1), ("B2", 2), ("B3", 3)]),
    ("Cs", &[("A'", 0), ("A\"", 1)]),
    ("Ci", &[("Ag", 0), ("Au", 1)]),
    ("C2", &[("A", 0), ("B", 1)]),
    ("C1", &[("A", 0)]),
];

impl ProductTable {
    /// Table with explicit label ids; products are XOR of ids.
    pub fn custom(group: impl Into<String>, ids: impl IntoIterator<Item = (String, u8)>) -> Self {
        ProductTable {
            group: group.into(),
            ids: ids.into_iter().collect(),
        }
    }

    pub fn named(group: &str) -> Option<Self> {
        GROUPS.iter().find(|(g, _)| g.eq_ignore_ascii_case(group)).map(|(g, labels)| ProductTable {
            group: g.to_string(),
            ids: labels.iter().map(|(l, id)| (l.to_string(), *id)).collect(),
        })
    }

    /// First built-in group whose label set covers every label given.
    pub fn for_labels<S: AsRef<str>>(labels: &[S]) -> Result<Self> {
        GROUPS
            .iter()
            .find(|(_, table)| labels.iter().all(|l| table.iter().any(|(name, _)| *name == l.as_ref())))
            .map(|(g, _)| ProductTable::named(g).unwrap())
            .ok_or_else(|| {
                let mut unknown: Vec<String> = labels.iter().map(|l| l.as_ref().to_string()).collect();
                unknown.sort();
                unknown.dedup();
                Error::UnknownIrreps(unknown)
            })
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn id(&self, label: &str) -> Option<u8> {
        self.ids.get(label).copied()
    }

    pub fn product(&self, a: &str, b: &str) -> Option<&str> {
        let id = self.id(a)? ^ self.id(b)?;
        self.ids.iter().find(|(_, v)| **v == id).map(|(k, _)| k.as_str())
    }
}
