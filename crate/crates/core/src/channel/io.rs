//! Channel import/export for cross-implementation regression.
//!
//! Two on-disk forms carry the same payload — a header (N, K, seed, model
//! tag) plus the row-major signature matrix S:
//! * a flat little-endian binary format with an 8-byte magic, and
//! * a CSV matrix file whose first line is a `#`-prefixed header.
//!
//! Amplitudes and noise level are runtime operating points, not channel
//! identity, so the importer takes them as arguments and recomputes R and H.

use super::{from_columns, ChannelInstance, EnergyProfile, ModelTag};
use crate::error::{Error, Result};
use crate::mat::Matrix;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

const MAGIC: &[u8; 8] = b"LASCHAN1";

fn model_code(model: ModelTag) -> (u32, u32) {
    match model {
        ModelTag::DenseBinary => (0, 0),
        ModelTag::DenseGaussian => (1, 0),
        ModelTag::Sparse(l) => (2, l),
        ModelTag::Custom => (3, 0),
    }
}

fn model_from_code(code: u32, param: u32) -> Result<ModelTag> {
    match code {
        0 => Ok(ModelTag::DenseBinary),
        1 => Ok(ModelTag::DenseGaussian),
        2 => Ok(ModelTag::Sparse(param)),
        3 => Ok(ModelTag::Custom),
        other => Err(Error::MalformedFile(format!("unknown model code {other}"))),
    }
}

fn model_name(model: ModelTag) -> String {
    match model {
        ModelTag::DenseBinary => "dense-binary".into(),
        ModelTag::DenseGaussian => "dense-gaussian".into(),
        ModelTag::Sparse(l) => format!("sparse-{l}"),
        ModelTag::Custom => "custom".into(),
    }
}

fn model_from_name(name: &str) -> Result<ModelTag> {
    match name {
        "dense-binary" => Ok(ModelTag::DenseBinary),
        "dense-gaussian" => Ok(ModelTag::DenseGaussian),
        "custom" => Ok(ModelTag::Custom),
        other => {
            if let Some(l) = other.strip_prefix("sparse-") {
                let l: u32 = l
                    .parse()
                    .map_err(|_| Error::MalformedFile(format!("bad model name `{other}`")))?;
                Ok(ModelTag::Sparse(l))
            } else {
                Err(Error::MalformedFile(format!("unknown model `{other}`")))
            }
        }
    }
}

/// Writes the channel's signature matrix with header to a binary stream.
pub fn write_binary<W: Write>(ch: &ChannelInstance, mut w: W) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&(ch.n() as u64).to_le_bytes())?;
    w.write_all(&(ch.k() as u64).to_le_bytes())?;
    w.write_all(&ch.seed().to_le_bytes())?;
    let (code, param) = model_code(ch.model());
    w.write_all(&code.to_le_bytes())?;
    w.write_all(&param.to_le_bytes())?;
    for v in ch.columns().as_slice() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a binary signature file and rebuilds the channel at the given
/// operating point (amplitudes, noise level).
pub fn read_binary<R: Read>(
    mut r: R,
    profile: &EnergyProfile,
    noise_sigma: f64,
) -> Result<ChannelInstance> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::MalformedFile("bad magic bytes".into()));
    }
    let mut u64buf = [0u8; 8];
    r.read_exact(&mut u64buf)?;
    let n = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let k = u64::from_le_bytes(u64buf) as usize;
    r.read_exact(&mut u64buf)?;
    let seed = u64::from_le_bytes(u64buf);
    let mut u32buf = [0u8; 4];
    r.read_exact(&mut u32buf)?;
    let code = u32::from_le_bytes(u32buf);
    r.read_exact(&mut u32buf)?;
    let param = u32::from_le_bytes(u32buf);
    let model = model_from_code(code, param)?;
    if n == 0 || k == 0 || n.checked_mul(k).is_none() {
        return Err(Error::MalformedFile(format!("bad dimensions {n}×{k}")));
    }
    let mut data = vec![0.0; n * k];
    for v in data.iter_mut() {
        r.read_exact(&mut u64buf)?;
        *v = f64::from_le_bytes(u64buf);
    }
    from_columns(Matrix::from_vec(n, k, data), profile, noise_sigma, seed, model)
}

/// Writes the channel as a CSV matrix with a `#` header line.
pub fn write_csv<W: Write>(ch: &ChannelInstance, mut w: W) -> Result<()> {
    writeln!(
        w,
        "# channel v1 n={} k={} seed={} model={}",
        ch.n(),
        ch.k(),
        ch.seed(),
        model_name(ch.model())
    )?;
    for row in 0..ch.n() {
        let line: Vec<String> = ch.columns().row(row).iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Reads a CSV signature file and rebuilds the channel at the given
/// operating point.
pub fn read_csv<R: Read>(
    r: R,
    profile: &EnergyProfile,
    noise_sigma: f64,
) -> Result<ChannelInstance> {
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::MalformedFile("empty file".into()))??;
    let header = header
        .strip_prefix('#')
        .ok_or_else(|| Error::MalformedFile("missing # header line".into()))?
        .trim();
    let (mut n, mut k, mut seed, mut model) = (0usize, 0usize, 0u64, ModelTag::Custom);
    for token in header.split_whitespace() {
        if let Some((key, val)) = token.split_once('=') {
            match key {
                "n" => {
                    n = val
                        .parse()
                        .map_err(|_| Error::MalformedFile("bad n".into()))?
                }
                "k" => {
                    k = val
                        .parse()
                        .map_err(|_| Error::MalformedFile("bad k".into()))?
                }
                "seed" => {
                    seed = val
                        .parse()
                        .map_err(|_| Error::MalformedFile("bad seed".into()))?
                }
                "model" => model = model_from_name(val)?,
                _ => {}
            }
        }
    }
    if n == 0 || k == 0 {
        return Err(Error::MalformedFile("header must set n and k".into()));
    }
    let mut data = Vec::with_capacity(n * k);
    for (idx, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut count = 0;
        for field in line.split(',') {
            let v: f64 = field
                .trim()
                .parse()
                .map_err(|_| Error::MalformedFile(format!("row {idx}: bad value `{field}`")))?;
            data.push(v);
            count += 1;
        }
        if count != k {
            return Err(Error::MalformedFile(format!(
                "row {idx} has {count} fields, expected {k}"
            )));
        }
    }
    if data.len() != n * k {
        return Err(Error::MalformedFile(format!(
            "matrix has {} values, expected {}",
            data.len(),
            n * k
        )));
    }
    from_columns(Matrix::from_vec(n, k, data), profile, noise_sigma, seed, model)
}

/// Exports to a binary file at `path`.
pub fn export_binary<P: AsRef<Path>>(ch: &ChannelInstance, path: P) -> Result<()> {
    write_binary(ch, BufWriter::new(File::create(path)?))
}

/// Imports a binary file written by [`export_binary`].
pub fn import_binary<P: AsRef<Path>>(
    path: P,
    profile: &EnergyProfile,
    noise_sigma: f64,
) -> Result<ChannelInstance> {
    read_binary(BufReader::new(File::open(path)?), profile, noise_sigma)
}

/// Exports to a CSV file at `path`.
pub fn export_csv<P: AsRef<Path>>(ch: &ChannelInstance, path: P) -> Result<()> {
    write_csv(ch, BufWriter::new(File::create(path)?))
}

/// Imports a CSV file written by [`export_csv`].
pub fn import_csv<P: AsRef<Path>>(
    path: P,
    profile: &EnergyProfile,
    noise_sigma: f64,
) -> Result<ChannelInstance> {
    read_csv(File::open(path)?, profile, noise_sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_dense;
    use approx::assert_abs_diff_eq;

    fn sample() -> ChannelInstance {
        generate_dense(48, 20, &EnergyProfile::equal(20), 0.3, 1234).unwrap()
    }

    #[test]
    fn test_binary_roundtrip_preserves_columns_exactly() {
        let ch = sample();
        let mut buf = Vec::new();
        write_binary(&ch, &mut buf).unwrap();
        let back = read_binary(&buf[..], ch.profile(), ch.noise_sigma()).unwrap();
        assert_eq!(back.n(), 48);
        assert_eq!(back.k(), 20);
        assert_eq!(back.seed(), 1234);
        assert_eq!(back.model(), ModelTag::DenseBinary);
        assert_eq!(back.columns().as_slice(), ch.columns().as_slice());
        for i in 0..20 {
            for j in 0..20 {
                assert_abs_diff_eq!(
                    back.crosscorr().get(i, j),
                    ch.crosscorr().get(i, j),
                    epsilon = 1e-12
                );
            }
        }
    }

    #[test]
    fn test_csv_roundtrip_preserves_columns_exactly() {
        let ch = sample();
        let mut buf = Vec::new();
        write_csv(&ch, &mut buf).unwrap();
        let back = read_csv(&buf[..], ch.profile(), ch.noise_sigma()).unwrap();
        // Shortest round-trip float printing makes CSV exact too.
        assert_eq!(back.columns().as_slice(), ch.columns().as_slice());
        assert_eq!(back.model(), ModelTag::DenseBinary);
    }

    #[test]
    fn test_rejects_corrupt_binary() {
        let ch = sample();
        let mut buf = Vec::new();
        write_binary(&ch, &mut buf).unwrap();
        buf[0] = b'X';
        assert!(read_binary(&buf[..], ch.profile(), 0.3).is_err());
        let mut truncated = Vec::new();
        write_binary(&ch, &mut truncated).unwrap();
        truncated.truncate(truncated.len() - 4);
        assert!(read_binary(&truncated[..], ch.profile(), 0.3).is_err());
    }

    #[test]
    fn test_rejects_non_unit_columns() {
        let text = "# channel v1 n=2 k=2 seed=0 model=custom\n1,0\n1,1\n";
        let err = read_csv(text.as_bytes(), &EnergyProfile::equal(2), 0.0);
        assert!(err.is_err());
    }

    #[test]
    fn test_file_roundtrip_via_paths() {
        let dir = tempfile::tempdir().unwrap();
        let ch = sample();
        let bin = dir.path().join("ch.bin");
        let csv = dir.path().join("ch.csv");
        export_binary(&ch, &bin).unwrap();
        export_csv(&ch, &csv).unwrap();
        let b = import_binary(&bin, ch.profile(), 0.3).unwrap();
        let c = import_csv(&csv, ch.profile(), 0.3).unwrap();
        assert_eq!(b.columns().as_slice(), ch.columns().as_slice());
        assert_eq!(c.columns().as_slice(), ch.columns().as_slice());
    }
}
