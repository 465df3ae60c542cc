//! Sample batches as CSV: header `x0,…,x{d−1}`, one row per point, values in
//! 17-significant-digit scientific notation so every `f64` round-trips.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::batch::SampleBatch;
use crate::error::{Error, Result};

pub fn write_samples_to<W: Write>(out: W, batch: &SampleBatch) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let header: Vec<String> = (0..batch.dim()).map(|i| format!("x{i}")).collect();
    w.write_record(&header).map_err(csv_err)?;
    for row in batch.rows() {
        w.write_record(row.iter().map(|v| format!("{v:.16e}"))).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_samples_from<R: Read>(input: R) -> Result<SampleBatch> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(csv_err)?.clone();
    if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
        return Err(Error::EmptyBatch);
    }
    for (i, name) in header.iter().enumerate() {
        if name.trim() != format!("x{i}") {
            return Err(Error::Parse(format!("header column {i} is '{name}', expected 'x{i}'")));
        }
    }
    let dim = header.len();
    let mut data = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        if rec.len() != dim {
            return Err(Error::Parse(format!("row {} has {} cells, expected {dim}", line + 1, rec.len())));
        }
        for cell in rec.iter() {
            let v: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: '{cell}' is not a number", line + 1)))?;
            data.push(v);
        }
    }
    if data.is_empty() {
        return Err(Error::EmptyBatch);
    }
    SampleBatch::new(dim, data)
}

pub fn write_samples(path: impl AsRef<Path>, batch: &SampleBatch) -> Result<()> {
    write_samples_to(File::create(path)?, batch)
}

pub fn read_samples(path: impl AsRef<Path>) -> Result<SampleBatch> {
    read_samples_from(File::open(path)?)
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        csv::ErrorKind::UnequalLengths { pos, expected_len, len } => Error::Parse(format!(
            "row {} has {len} cells, expected {expected_len}",
            pos.map(|p| p.line()).unwrap_or(0)
        )),
        other => Error::Parse(format!("{other:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;

    fn round_trip(b: &SampleBatch) -> SampleBatch {
        let mut buf = Vec::new();
        write_samples_to(&mut buf, b).unwrap();
        read_samples_from(buf.as_slice()).unwrap()
    }

    #[test]
    fn round_trip_is_bitwise() {
        let mut rng = Rng::new(2);
        let mut data = rng.normal_vec(300);
        data.extend([0.1, 1.0 / 3.0, -0.0, 5e-324, f64::MAX, -1e-310]);
        let b = SampleBatch::new(3, data).unwrap();
        let back = round_trip(&b);
        assert!(b.as_slice().iter().zip(back.as_slice()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn header_and_format() {
        let b = SampleBatch::new(2, vec![1.0, 0.5]).unwrap();
        let mut buf = Vec::new();
        write_samples_to(&mut buf, &b).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "x0,x1\n1.0000000000000000e0,5.0000000000000000e-1\n"
        );
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_samples_from("".as_bytes()), Err(Error::EmptyBatch)));
        assert!(matches!(read_samples_from("x0,x1\n".as_bytes()), Err(Error::EmptyBatch)));
        assert!(matches!(read_samples_from("x0,x1\n1,2\n3\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_samples_from("x0,x1\n1,abc\n".as_bytes()), Err(Error::Parse(_))));
        assert!(matches!(read_samples_from("a,b\n1,2\n".as_bytes()), Err(Error::Parse(_))));
        assert_eq!(read_samples_from("x0\n2.5\n".as_bytes()).unwrap().as_slice(), &[2.5]);
    }
}
