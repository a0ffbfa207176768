//! Text formats for [`DiscreteMeasure`].
//!
//! CSV: header `atom_index,x0,...,x{d-1},weight`, one atom per row, numbers in
//! scientific notation with 17 significant digits. JSON:
//! `{"dim": d, "atoms": [{"x": [...], "w": ...}]}`. Both round-trip bitwise.

use serde::{Deserialize, Serialize};

use super::DiscreteMeasure;
use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn measure_to_csv(m: &DiscreteMeasure) -> String {
    let mut out = String::from("atom_index");
    for c in 0..m.dim() {
        out.push_str(&format!(",x{c}"));
    }
    out.push_str(",weight\n");
    for (i, (x, w)) in m.atoms().enumerate() {
        out.push_str(&i.to_string());
        for c in x {
            out.push(',');
            out.push_str(&fmt_f64(*c));
        }
        out.push(',');
        out.push_str(&fmt_f64(w));
        out.push('\n');
    }
    out
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

pub fn measure_from_csv(text: &str) -> Result<DiscreteMeasure> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let dim = cols.len().saturating_sub(2);
    let header_ok = cols.len() >= 3
        && cols[0] == "atom_index"
        && cols[cols.len() - 1] == "weight"
        && (0..dim).all(|c| cols[c + 1] == format!("x{c}"));
    if !header_ok {
        return Err(parse_err(1, format!("bad header {header:?}")));
    }
    let mut m = DiscreteMeasure::empty(dim)?;
    let mut x = vec![0.0; dim];
    for (lineno, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim + 2 {
            return Err(parse_err(lineno + 1, format!("expected {} fields, found {}", dim + 2, fields.len())));
        }
        let num = |s: &str| s.parse::<f64>().map_err(|e| parse_err(lineno + 1, format!("{s:?}: {e}")));
        for c in 0..dim {
            x[c] = num(fields[c + 1])?;
        }
        let w = num(fields[dim + 1])?;
        m.push(&x, w).map_err(|e| parse_err(lineno + 1, e.to_string()))?;
    }
    Ok(m)
}

#[derive(Serialize, Deserialize)]
struct JsonAtom {
    x: Vec<f64>,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct JsonMeasure {
    dim: usize,
    atoms: Vec<JsonAtom>,
}

pub fn measure_to_json(m: &DiscreteMeasure) -> String {
    let doc = JsonMeasure { dim: m.dim(), atoms: m.atoms().map(|(x, w)| JsonAtom { x: x.to_vec(), w }).collect() };
    serde_json::to_string(&doc).expect("measure serializes")
}

pub fn measure_from_json(text: &str) -> Result<DiscreteMeasure> {
    let doc: JsonMeasure = serde_json::from_str(text)?;
    DiscreteMeasure::new(doc.dim, doc.atoms.into_iter().map(|a| (a.x, a.w)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn csv_layout() {
        let m = DiscreteMeasure::new(2, [([0.5, -1.0], 2.0)]).unwrap();
        let csv = measure_to_csv(&m);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("atom_index,x0,x1,weight"));
        assert_eq!(lines.next(), Some("0,5.0000000000000000e-1,-1.0000000000000000e0,2.0000000000000000e0"));
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let err = measure_from_csv("atom_index,x0,weight\n0,1.0,0.5\n1,abc,0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = measure_from_csv("atom_index,x0,weight\n0,1.0,-0.5\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(measure_from_csv("index,x,w\n").is_err());
    }

    #[test]
    fn json_layout() {
        let m = DiscreteMeasure::on_line(&[(0.0, 1.0)]).unwrap();
        assert_eq!(measure_to_json(&m), r#"{"dim":1,"atoms":[{"x":[0.0],"w":1.0}]}"#);
    }

    fn arb_measure() -> impl Strategy<Value = DiscreteMeasure> {
        (1usize..4).prop_flat_map(|d| {
            prop::collection::vec((prop::collection::vec(-1e6f64..1e6, d), 0.0f64..1e3), 0..10)
                .prop_map(move |atoms| DiscreteMeasure::new(d, atoms).unwrap())
        })
    }

    proptest! {
        #[test]
        fn text_formats_round_trip_bitwise(m in arb_measure()) {
            let back = measure_from_csv(&measure_to_csv(&m)).unwrap();
            prop_assert_eq!(&back, &m);
            let back = measure_from_json(&measure_to_json(&m)).unwrap();
            prop_assert_eq!(&back, &m);
        }
    }
}
