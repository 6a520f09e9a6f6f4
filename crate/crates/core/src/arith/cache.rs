//! Binary cache for coefficient tables.
//!
//! Layout (little endian): `b"CTB1"`, then `a1 a2 a3 a4 a6 q n_max` as `i64`,
//! then `a_1..a_{n_max}` as `i64`.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use super::coeffs::{coefficient_table, CoefficientTable};
use super::curve::WeierstrassCurve;
use crate::error::{Error, Result};
use crate::exec::Exec;

const MAGIC: &[u8; 4] = b"CTB1";

pub fn write_table(path: &Path, curve: &WeierstrassCurve, table: &CoefficientTable) -> Result<()> {
    let mut w = BufWriter::new(fs::File::create(path)?);
    w.write_all(MAGIC)?;
    for v in curve.coeffs() {
        w.write_all(&v.to_le_bytes())?;
    }
    w.write_all(&(curve.conductor_q as i64).to_le_bytes())?;
    w.write_all(&(table.n_max() as i64).to_le_bytes())?;
    for &a in &table.a_slice()[1..] {
        w.write_all(&a.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Read a cache file, returning `([a1..a6], q, table)`.
pub fn read_table(path: &Path) -> Result<([i64; 5], u64, CoefficientTable)> {
    let mut r = BufReader::new(fs::File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Cache(format!("{}: bad magic", path.display())));
    }
    let mut header = [0i64; 7];
    let mut buf = [0u8; 8];
    for h in header.iter_mut() {
        r.read_exact(&mut buf)?;
        *h = i64::from_le_bytes(buf);
    }
    let coeffs = [header[0], header[1], header[2], header[3], header[4]];
    let q = header[5];
    let n_max = header[6];
    if q <= 0 || n_max <= 0 {
        return Err(Error::Cache(format!("{}: bad header", path.display())));
    }
    let mut bytes = vec![0u8; n_max as usize * 8];
    r.read_exact(&mut bytes)?;
    let mut a = Vec::with_capacity(n_max as usize + 1);
    a.push(0);
    a.extend(bytes.chunks_exact(8).map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes"))));
    let table = CoefficientTable::from_raw(a, q as u64)?;
    Ok((coeffs, q as u64, table))
}

/// Directory of `CTB1` files keyed by curve, level and `n_max`.
#[derive(Clone, Debug)]
pub struct TableCache {
    dir: PathBuf,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(TableCache { dir })
    }

    fn prefix(curve: &WeierstrassCurve) -> String {
        let [a1, a2, a3, a4, a6] = curve.coeffs();
        format!("ctb1_{a1}_{a2}_{a3}_{a4}_{a6}_q{}_n", curve.conductor_q)
    }

    pub fn path_for(&self, curve: &WeierstrassCurve, n_max: usize) -> PathBuf {
        self.dir.join(format!("{}{n_max}.bin", Self::prefix(curve)))
    }

    /// Look up a table with at least `n_max` entries (exact key first, then
    /// any longer table for the same curve).
    pub fn lookup(&self, curve: &WeierstrassCurve, n_max: usize) -> Result<Option<CoefficientTable>> {
        let exact = self.path_for(curve, n_max);
        let mut candidates = Vec::new();
        if exact.exists() {
            candidates.push((n_max, exact));
        } else {
            let prefix = Self::prefix(curve);
            for entry in fs::read_dir(&self.dir)? {
                let name = entry?.file_name().to_string_lossy().into_owned();
                if let Some(n) = name
                    .strip_prefix(&prefix)
                    .and_then(|rest| rest.strip_suffix(".bin"))
                    .and_then(|n| n.parse::<usize>().ok())
                {
                    if n >= n_max {
                        candidates.push((n, self.dir.join(name)));
                    }
                }
            }
            candidates.sort();
        }
        for (_, path) in candidates {
            let (coeffs, q, table) = read_table(&path)?;
            if coeffs == curve.coeffs() && q == curve.conductor_q {
                return Ok(Some(table.truncated(n_max)));
            }
        }
        Ok(None)
    }

    /// Cached table, building and storing it on a miss. The flag reports a hit.
    pub fn load_or_build(
        &self,
        curve: &WeierstrassCurve,
        n_max: usize,
        exec: Exec,
    ) -> Result<(CoefficientTable, bool)> {
        if let Some(t) = self.lookup(curve, n_max)? {
            return Ok((t, true));
        }
        let table = coefficient_table(curve, n_max, exec)?;
        write_table(&self.path_for(curve, n_max), curve, &table)?;
        Ok((table, false))
    }
}
