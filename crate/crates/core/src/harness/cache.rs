//! On-disk cache of computed series, keyed by a hash of every input that affects
//! the coefficients. Floats are stored as exact hexadecimal strings.

use std::fs::{self, File, OpenOptions};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::arith::{Frequency, Precision};
use crate::error::{Error, Result};
use crate::scalar::Complex;
use crate::series::{LinearizationSeries, TrigPolynomial};
use crate::Mp;

const MAGIC: &[u8; 8] = b"SEMISTD\0";
pub const CACHE_VERSION: u32 = 1;

fn hex(x: &Mp) -> String {
    x.to_string_radix(16, None)
}

fn unhex(s: &str, bits: u32) -> Result<Mp> {
    let parsed = Mp::parse_radix(s, 16).map_err(|e| Error::CacheCorrupt(format!("{s:?}: {e}")))?;
    Ok(Mp::with_val(bits, parsed))
}

/// Hash of the polynomial (exact), frequency, order, precision and format version.
pub fn cache_key(polynomial: &TrigPolynomial<Mp>, frequency: &Frequency, n_max: u64, precision: Precision) -> String {
    let mut h = Sha256::new();
    h.update(CACHE_VERSION.to_le_bytes());
    for (k, a) in polynomial.modes() {
        h.update(format!("{k}:{}:{}:{};", a.re.prec(), hex(&a.re), hex(&a.im)));
    }
    h.update(format!("|{frequency}|{n_max}|{}|{}", precision.bits, precision.guard));
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Serialize, Deserialize)]
struct Payload {
    bits: u32,
    phi: Vec<(String, String)>,
    psi: Vec<Vec<(String, String)>>,
}

fn encode(c: &Complex<Mp>) -> (String, String) {
    (hex(&c.re), hex(&c.im))
}

fn decode(c: &(String, String), bits: u32) -> Result<Complex<Mp>> {
    Ok(Complex::new(unhex(&c.0, bits)?, unhex(&c.1, bits)?))
}

fn path_for(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.series"))
}

/// Exclusive advisory lock on the cache directory for the lifetime of the handle.
fn lock_dir(dir: &Path) -> Result<File> {
    fs::create_dir_all(dir)?;
    let f = OpenOptions::new().create(true).truncate(false).write(true).open(dir.join(".lock"))?;
    f.lock()?;
    Ok(f)
}

fn to_bytes(key: &str, series: &LinearizationSeries<Mp>) -> Result<Vec<u8>> {
    let payload = Payload {
        bits: series.precision().bits,
        phi: series.phi_all().iter().map(encode).collect(),
        psi: series.psi_rows().iter().map(|r| r.iter().map(encode).collect()).collect(),
    };
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(key.as_bytes());
    out.push(b'\n');
    serde_json::to_writer(&mut out, &payload)?;
    Ok(out)
}

fn from_bytes(
    bytes: &[u8],
    key: &str,
    polynomial: &TrigPolynomial<Mp>,
    frequency: &Frequency,
    precision: Precision,
) -> Result<LinearizationSeries<Mp>> {
    if bytes.len() < 12 + key.len() + 1 || &bytes[..8] != MAGIC {
        return Err(Error::CacheCorrupt("bad header".into()));
    }
    let version = u32::from_le_bytes(bytes[8..12].try_into().expect("four bytes"));
    if version != CACHE_VERSION {
        return Err(Error::CacheVersion { found: version, expected: CACHE_VERSION });
    }
    if &bytes[12..12 + key.len()] != key.as_bytes() || bytes[12 + key.len()] != b'\n' {
        return Err(Error::CacheCorrupt("key mismatch".into()));
    }
    let payload: Payload =
        serde_json::from_slice(&bytes[13 + key.len()..]).map_err(|e| Error::CacheCorrupt(e.to_string()))?;
    let bits = payload.bits;
    let phi = payload.phi.iter().map(|c| decode(c, bits)).collect::<Result<Vec<_>>>()?;
    let psi = payload
        .psi
        .iter()
        .map(|r| r.iter().map(|c| decode(c, bits)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    LinearizationSeries::from_parts(polynomial.clone(), frequency.clone(), precision, phi, psi)
}

/// Writes `series` under its key (temp file, then rename) and returns the path.
pub fn store(dir: &Path, series: &LinearizationSeries<Mp>) -> Result<PathBuf> {
    let key = cache_key(series.polynomial(), series.frequency(), series.n_max(), series.precision());
    let bytes = to_bytes(&key, series)?;
    let _lock = lock_dir(dir)?;
    let path = path_for(dir, &key);
    let tmp = dir.join(format!("{key}.tmp"));
    {
        let mut f = File::create(&tmp)?;
        f.write_all(&bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(path)
}

/// The cached series for these inputs, `None` on a miss.
pub fn load(
    dir: &Path,
    polynomial: &TrigPolynomial<Mp>,
    frequency: &Frequency,
    n_max: u64,
    precision: Precision,
) -> Result<Option<LinearizationSeries<Mp>>> {
    let key = cache_key(polynomial, frequency, n_max, precision);
    let path = path_for(dir, &key);
    if !path.exists() {
        return Ok(None);
    }
    let _lock = lock_dir(dir)?;
    let mut bytes = Vec::new();
    File::open(&path)?.read_to_end(&mut bytes)?;
    from_bytes(&bytes, &key, polynomial, frequency, precision).map(Some)
}

/// Loads from `dir` if present, otherwise computes and stores. The flag reports a hit.
pub fn load_or_compute(
    dir: Option<&Path>,
    polynomial: &TrigPolynomial<Mp>,
    frequency: &Frequency,
    n_max: u64,
    precision: Precision,
) -> Result<(LinearizationSeries<Mp>, bool)> {
    if let Some(dir) = dir {
        if let Some(s) = load(dir, polynomial, frequency, n_max, precision)? {
            return Ok((s, true));
        }
    }
    let series = crate::series::linearize(polynomial, frequency, n_max, precision)?;
    if let Some(dir) = dir {
        store(dir, &series)?;
    }
    Ok((series, false))
}

/// Store then load, for checking that the format is lossless.
pub fn cache_roundtrip(dir: &Path, series: &LinearizationSeries<Mp>) -> Result<LinearizationSeries<Mp>> {
    store(dir, series)?;
    load(dir, series.polynomial(), series.frequency(), series.n_max(), series.precision())?
        .ok_or_else(|| Error::CacheCorrupt("stored entry not found".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::linearize;

    fn sample() -> LinearizationSeries<Mp> {
        let p = TrigPolynomial::new(vec![
            (2, Complex::new(Mp::with_val(200, 0.3), Mp::with_val(200, -1.25))),
            (3, Complex::new(Mp::with_val(200, 1), Mp::with_val(200, 0))),
        ])
        .unwrap();
        linearize(&p, &Frequency::golden(), 60, Precision::new(200)).unwrap()
    }

    #[test]
    fn roundtrip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let s = sample();
        let back = cache_roundtrip(dir.path(), &s).unwrap();
        for l in 0..=60 {
            assert_eq!(back.phi(l), s.phi(l));
            assert_eq!(back.phi(l).re.prec(), 200);
        }
        assert_eq!(back.psi_rows(), s.psi_rows());
    }

    #[test]
    fn tampered_version() {
        let dir = tempfile::tempdir().unwrap();
        let s = sample();
        let path = store(dir.path(), &s).unwrap();
        let mut bytes = fs::read(&path).unwrap();
        bytes[8] = 99;
        fs::write(&path, bytes).unwrap();
        let err = load(dir.path(), s.polynomial(), s.frequency(), 60, s.precision()).unwrap_err();
        assert!(matches!(err, Error::CacheVersion { found: 99, expected: CACHE_VERSION }));
    }

    #[test]
    fn other_order_misses() {
        let dir = tempfile::tempdir().unwrap();
        let s = sample();
        store(dir.path(), &s).unwrap();
        assert!(load(dir.path(), s.polynomial(), s.frequency(), 61, s.precision()).unwrap().is_none());
        let (_, hit) = load_or_compute(Some(dir.path()), s.polynomial(), s.frequency(), 60, s.precision()).unwrap();
        assert!(hit);
    }
}
