//! Attack-name to [`AttackClass`] table.
//!
//! The default table ships as `data/attack_taxonomy.txt`; a different file can
//! be loaded at run time with [`Taxonomy::from_reader`].

use std::collections::BTreeMap;
use std::io::BufRead;
use std::sync::OnceLock;

use super::{AttackClass, DatasetError};
use crate::textio::Lines;

const BUNDLED: &str = include_str!("../../data/attack_taxonomy.txt");

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Taxonomy {
    classes: BTreeMap<String, AttackClass>,
}

impl Taxonomy {
    pub fn bundled() -> &'static Taxonomy {
        static TABLE: OnceLock<Taxonomy> = OnceLock::new();
        TABLE.get_or_init(|| Taxonomy::from_reader(BUNDLED.as_bytes()).expect("bundled taxonomy is valid"))
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Taxonomy, DatasetError> {
        let mut lines = Lines::new(reader);
        let mut classes = BTreeMap::new();
        while let Some(line) = lines.next_line()? {
            let mut parts = line.split_whitespace();
            let (Some(name), Some(class), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(DatasetError::Format {
                    line: lines.line_no(),
                    msg: format!("expected `<label> <class>`, got `{line}`"),
                });
            };
            let class: AttackClass =
                class.parse().map_err(|msg| DatasetError::Format { line: lines.line_no(), msg })?;
            if classes.insert(name.to_string(), class).is_some() {
                return Err(DatasetError::Format { line: lines.line_no(), msg: format!("duplicate label `{name}`") });
            }
        }
        Ok(Taxonomy { classes })
    }

    pub fn map_label(&self, label: &str) -> Result<AttackClass, DatasetError> {
        let label = label.trim().trim_end_matches('.');
        self.classes.get(label).copied().ok_or_else(|| DatasetError::UnknownLabel(label.to_string()))
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = (&str, AttackClass)> {
        self.classes.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Maps an attack name through the bundled table.
pub fn map_label(label: &str) -> Result<AttackClass, DatasetError> {
    Taxonomy::bundled().map_label(label)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_table_has_all_attack_names() {
        let t = Taxonomy::bundled();
        assert_eq!(t.len(), 40);
        let attacks = t.labels().filter(|(_, c)| *c != AttackClass::Normal).count();
        assert_eq!(attacks, 39);
        let mut per_class = [0; 5];
        for (_, c) in t.labels() {
            per_class[c.index()] += 1;
        }
        assert_eq!(per_class, [1, 10, 6, 15, 8]);
    }

    #[test]
    fn known_and_unknown_labels() {
        assert_eq!(map_label("normal").unwrap(), AttackClass::Normal);
        assert_eq!(map_label("smurf").unwrap(), AttackClass::Dos);
        assert_eq!(map_label("smurf.").unwrap(), AttackClass::Dos);
        assert_eq!(map_label("portsweep").unwrap(), AttackClass::Probe);
        assert_eq!(map_label("warezclient").unwrap(), AttackClass::R2l);
        assert_eq!(map_label("buffer_overflow").unwrap(), AttackClass::U2r);
        assert!(matches!(map_label("xyzzy"), Err(DatasetError::UnknownLabel(n)) if n == "xyzzy"));
    }

    #[test]
    fn custom_table_rejects_bad_rows() {
        assert!(Taxonomy::from_reader("foo dos\nfoo probe\n".as_bytes()).is_err());
        assert!(Taxonomy::from_reader("foo wat\n".as_bytes()).is_err());
        let t = Taxonomy::from_reader("# extra\nfoo dos\n".as_bytes()).unwrap();
        assert_eq!(t.map_label("foo").unwrap(), AttackClass::Dos);
    }
}
