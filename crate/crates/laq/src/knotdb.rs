//! Built-in PD codes for the knots exercised throughout the library, each
//! stored with a golden reduced Alexander polynomial so the table verifies
//! itself, plus a line-oriented file-ingestion format.

use crate::alexander::{alexander_polynomial, AlexanderError};
use crate::diagram::{DiagramError, KnotDiagram};
use crate::laurent::LaurentPoly;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum KnotDbError {
    #[error("unknown knot {0:?}; see builtin_names() for the built-in table")]
    UnknownKnot(String),
    #[error("reading {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Alexander(#[from] AlexanderError),
}

/// One named diagram: a PD code plus the golden polynomial its Alexander
/// computation must reproduce.
#[derive(Clone, Debug, PartialEq)]
pub struct KnotRecord {
    pub name: String,
    pub pd: String,
    pub expected_reduced_alexander: LaurentPoly,
    /// Where the PD code comes from, for reporting.
    pub source: String,
}

impl KnotRecord {
    pub fn diagram(&self) -> Result<KnotDiagram, DiagramError> {
        KnotDiagram::parse_pd(&self.pd)
    }
}

/// Built-in table: name, PD code, reduced Alexander coefficients from
/// degree 0 upward, and a source note. Twist knots and the other 2-bridge
/// entries use the standard alternating diagrams; 7_2 is the 4-plat closure
/// of its fraction 11/2, and 9_12 is the mirror of the 35/8 plat, the
/// chirality whose (11,3)-colorings repeat colors across arcs.
const TABLE: &[(&str, &str, &[i64], &str)] = &[
    (
        "3_1",
        "X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]",
        &[1, -1, 1],
        "standard table diagram",
    ),
    (
        "4_1",
        "X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]",
        &[1, -3, 1],
        "standard table diagram",
    ),
    (
        "6_1",
        "X[10,2,11,1] X[2,10,3,9] X[8,4,9,3] X[4,8,5,7] X[12,5,1,6] X[6,11,7,12]",
        &[2, -5, 2],
        "standard table diagram",
    ),
    (
        "6_2",
        "X[6,1,7,2] X[2,7,3,8] X[8,3,9,4] X[12,9,1,10] X[4,12,5,11] X[10,6,11,5]",
        &[1, -3, 3, -3, 1],
        "standard table diagram",
    ),
    (
        "6_3",
        "X[6,1,7,2] X[2,7,3,8] X[12,3,1,4] X[8,12,9,11] X[4,10,5,9] X[10,6,11,5]",
        &[1, -3, 5, -3, 1],
        "standard table diagram",
    ),
    (
        "7_2",
        "X[14,12,1,11] X[10,2,11,1] X[2,10,3,9] X[8,4,9,3] X[4,8,5,7] X[12,6,13,5] \
         X[6,14,7,13]",
        &[3, -5, 3],
        "4-plat closure of the 2-bridge fraction 11/2",
    ),
    (
        "8_7",
        "X[8,1,9,2] X[2,9,3,10] X[10,3,11,4] X[4,11,5,12] X[16,5,1,6] X[12,16,13,15] \
         X[6,14,7,13] X[14,8,15,7]",
        &[1, -3, 5, -5, 5, -3, 1],
        "standard table diagram",
    ),
    (
        "9_12",
        "X[13,18,14,1] X[1,12,2,13] X[11,2,12,3] X[3,10,4,11] X[9,15,10,14] X[15,9,16,8] \
         X[7,4,8,5] X[5,16,6,17] X[17,6,18,7]",
        &[2, -9, 13, -9, 2],
        "mirror of the 4-plat closure of the 2-bridge fraction 35/8 (the 2-bridge knot 35/27)",
    ),
];

/// Names of the built-in knots, in table order.
pub fn builtin_names() -> Vec<&'static str> {
    TABLE.iter().map(|&(name, ..)| name).collect()
}

/// Fetches a built-in record by name.
pub fn lookup(name: &str) -> Result<KnotRecord, KnotDbError> {
    TABLE
        .iter()
        .find(|&&(n, ..)| n == name)
        .map(|&(n, pd, coeffs, source)| KnotRecord {
            name: n.to_string(),
            pd: pd.to_string(),
            expected_reduced_alexander: LaurentPoly::from_coeffs(0, coeffs),
            source: source.to_string(),
        })
        .ok_or_else(|| KnotDbError::UnknownKnot(name.to_string()))
}

/// Reads records from a text file: one record per line, either
/// `name = PD-code` or a bare PD code (auto-named by position); `#` starts
/// a comment. Each record's golden polynomial is computed on ingestion,
/// so the self-verification invariant holds for loaded records too.
pub fn load_file(path: &Path) -> Result<Vec<KnotRecord>, KnotDbError> {
    let text = std::fs::read_to_string(path).map_err(|e| KnotDbError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut records = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (name, pd) = match line.split_once('=') {
            Some((name, pd)) => (name.trim().to_string(), pd.trim().to_string()),
            None => (format!("knot_{}", records.len() + 1), line.to_string()),
        };
        let diagram = KnotDiagram::parse_pd(&pd)?;
        let expected = alexander_polynomial(&diagram)?.reduced;
        records.push(KnotRecord {
            name,
            pd,
            expected_reduced_alexander: expected,
            source: format!("{}", path.display()),
        });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moves::faces;

    #[test]
    fn builtin_goldens_recomputed() {
        for name in builtin_names() {
            let record = lookup(name).unwrap();
            let d = record.diagram().unwrap();
            assert!(d.is_knot(), "{name}: built-ins are knots");
            assert!(d.is_alternating(), "{name}: table diagrams are alternating");
            assert!(faces(&d).is_ok(), "{name}: table diagrams are planar");
            let alex = alexander_polynomial(&d).unwrap();
            assert_eq!(
                alex.reduced, record.expected_reduced_alexander,
                "{name}: stored golden is stale"
            );
            assert!(alex.by_minor_consistent, "{name}: minors must agree");
        }
    }

    #[test]
    fn unknown_knot_is_reported() {
        assert_eq!(
            lookup("10_99"),
            Err(KnotDbError::UnknownKnot("10_99".to_string()))
        );
    }

    #[test]
    fn load_file_parses_named_and_bare_records() {
        let dir = std::env::temp_dir().join("laq-knotdb-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("records.txt");
        std::fs::write(
            &path,
            "# comment line\n\
             trefoil = X[1,4,2,5] X[3,6,4,1] X[5,2,6,3]\n\
             \n\
             X[4,2,5,1] X[8,6,1,5] X[6,3,7,4] X[2,7,3,8]  # trailing comment\n",
        )
        .unwrap();
        let records = load_file(&path).unwrap();
        assert_eq!(records.len(), 2);
        assert_eq!(records[0].name, "trefoil");
        assert_eq!(
            records[0].expected_reduced_alexander,
            LaurentPoly::from_coeffs(0, &[1, -1, 1])
        );
        assert_eq!(records[1].name, "knot_2");
        assert_eq!(
            records[1].expected_reduced_alexander,
            LaurentPoly::from_coeffs(0, &[1, -3, 1])
        );
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn load_file_propagates_errors() {
        let dir = std::env::temp_dir().join("laq-knotdb-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.txt");
        std::fs::write(&path, "Y[1,2,3,4]\n").unwrap();
        assert!(matches!(load_file(&path), Err(KnotDbError::Diagram(_))));
        std::fs::remove_file(&path).unwrap();

        let missing = dir.join("does-not-exist.txt");
        assert!(matches!(load_file(&missing), Err(KnotDbError::Io { .. })));
    }
}
