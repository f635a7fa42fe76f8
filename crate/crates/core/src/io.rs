//! File formats: populations as CSV (`w,label,f1,...,fn`), everything else
//! as JSON through serde.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::game::{Label, Point, Population};
use crate::scalar::Scalar;

/// Parses a decimal (`-1.25`, `3e-2` for floats) or `p/q` literal.
pub fn parse_scalar<S: Scalar>(text: &str) -> Result<S> {
    let t = text.trim();
    if let Ok(v) = S::from_str_radix(t, 10) {
        return if v.is_finite_value() {
            Ok(v)
        } else {
            Err(Error::Format(format!("non-finite value {t:?}")))
        };
    }
    // exact types do not read decimals natively
    let bad = || Error::Format(format!("not a number: {t:?}"));
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty()
        || !(int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()))
    {
        return Err(bad());
    }
    let ten = S::from_u8(10).expect("10 fits");
    let mut v = S::zero();
    for d in int.chars().chain(frac.chars()) {
        v = v * ten.clone() + S::from_u32(d.to_digit(10).expect("digit")).expect("digit fits");
    }
    for _ in 0..frac.len() {
        v = v / ten.clone();
    }
    Ok(if neg { -v } else { v })
}

pub fn read_population<S: Scalar, R: Read>(reader: R) -> Result<Population<S>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.len() < 3 {
        return Err(Error::Format(
            "population CSV needs columns w,label and at least one feature".into(),
        ));
    }
    let (mut points, mut weights, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let w: S = parse_scalar(&rec[0])
            .map_err(|e| Error::Format(format!("line {line}: weight: {e}")))?;
        let label = rec[1]
            .parse::<i64>()
            .ok()
            .and_then(Label::from_sign)
            .ok_or_else(|| {
                Error::Format(format!(
                    "line {line}: label must be -1 or 1, got {:?}",
                    &rec[1]
                ))
            })?;
        let coords = rec
            .iter()
            .skip(2)
            .map(parse_scalar)
            .collect::<Result<Vec<S>>>()
            .map_err(|e| Error::Format(format!("line {line}: {e}")))?;
        weights.push(w);
        labels.push(label);
        points.push(Point::new(coords));
    }
    Population::new(points, weights, labels).map_err(|e| match e {
        Error::InvalidParameter(m) => Error::Format(m),
        Error::DimensionMismatch { expected, got } => {
            Error::Format(format!("rows have {got} features, expected {expected}"))
        }
        other => other,
    })
}

pub fn write_population<S: Scalar, W: Write>(pop: &Population<S>, writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["w".to_string(), "label".to_string()];
    header.extend((1..=pop.dim()).map(|j| format!("f{j}")));
    wtr.write_record(&header)?;
    for i in 0..pop.len() {
        let mut rec = vec![
            pop.weights()[i].to_string(),
            pop.labels()[i].sign().to_string(),
        ];
        rec.extend(pop.points()[i].coords.iter().map(ToString::to_string));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_population_file<S: Scalar>(path: impl AsRef<Path>) -> Result<Population<S>> {
    read_population(BufReader::new(File::open(path)?))
}

pub fn write_population_file<S: Scalar>(pop: &Population<S>, path: impl AsRef<Path>) -> Result<()> {
    write_population(pop, BufWriter::new(File::create(path)?))
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
}

pub fn write_json<T: Serialize + ?Sized>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational;
    use crate::Rational;

    #[test]
    fn scalars() {
        assert_eq!(parse_scalar::<f64>("1.5").unwrap(), 1.5);
        assert_eq!(parse_scalar::<f64>(" -3e-2 ").unwrap(), -0.03);
        assert!(parse_scalar::<f64>("nan").is_err());
        assert!(parse_scalar::<f64>("abc").is_err());
        assert_eq!(parse_scalar::<Rational>("-1.25").unwrap(), rational(-5, 4));
        assert_eq!(parse_scalar::<Rational>("3/4").unwrap(), rational(3, 4));
        assert_eq!(parse_scalar::<Rational>("7").unwrap(), rational(7, 1));
        assert!(parse_scalar::<Rational>("1.2.3").is_err());
        assert!(parse_scalar::<Rational>(".").is_err());
    }

    #[test]
    fn population_round_trip() {
        let text = "w,label,f1,f2\n1,-1,0.5,2\n2.5,1,-1,0\n";
        let pop: Population<f64> = read_population(text.as_bytes()).unwrap();
        assert_eq!(pop.len(), 2);
        assert_eq!(pop.weights(), &[1.0, 2.5]);
        assert_eq!(pop.labels(), &[Label::Neg, Label::Pos]);
        let mut out = Vec::new();
        write_population(&pop, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out.clone()).unwrap(),
            "w,label,f1,f2\n1,-1,0.5,2\n2.5,1,-1,0\n"
        );
        assert_eq!(read_population::<f64, _>(out.as_slice()).unwrap(), pop);

        let exact: Population<Rational> = read_population(text.as_bytes()).unwrap();
        assert_eq!(exact.weights()[1], rational(5, 2));
    }

    #[test]
    fn population_errors() {
        for bad in [
            "w,label\n1,1\n",
            "w,label,f1\n1,0,1\n",
            "w,label,f1\n-1,1,1\n",
            "w,label,f1\nx,1,1\n",
            "w,label,f1\n1,1,1\n1,1\n",
            "w,label,f1\n",
        ] {
            assert!(
                read_population::<f64, _>(bad.as_bytes()).is_err(),
                "{bad:?}"
            );
        }
    }
}
