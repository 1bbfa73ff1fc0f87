//! Persistent store of exact intersection numbers.
//!
//! The file starts with the text line `TAUTCACHE v1`. Each record after it is
//! a little-endian `u32` payload length, the UTF-8 payload `op\tkey\tvalue`,
//! and the 32-byte SHA-256 of the payload. Writers append under an exclusive
//! advisory lock; readers take a shared one.

use std::collections::{BTreeMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use taut_core::arith::{parse_rational, rational_to_string, Rational};
use taut_core::eval::{
    psi_memo_entries, seed_psi_memo, seed_vertex_memo, vertex_memo_entries, PsiKey, VertexKey,
};

use crate::error::{Result, VerifyError};

pub const MAGIC: &str = "TAUTCACHE";
pub const VERSION: u32 = 1;
pub const ENV_VAR: &str = "TAUTCALC_CACHE";

pub const OP_PSI: &str = "psi_integral";
pub const OP_VERTEX: &str = "vertex_integral";

fn header() -> String {
    format!("{MAGIC} v{VERSION}\n")
}

fn join(xs: &[u32]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn split_list(s: &str) -> Option<Vec<u32>> {
    if s.is_empty() {
        return Some(Vec::new());
    }
    s.split(',').map(|x| x.parse().ok()).collect()
}

/// `(g,(d_1,...,d_n))`
pub fn psi_key_string(k: &PsiKey) -> String {
    format!("({},({}))", k.genus, join(&k.exponents))
}

/// `(g,(psi exponents),(kappa indices))`
pub fn vertex_key_string(k: &VertexKey) -> String {
    format!("({},({}),({}))", k.0, join(&k.1), join(&k.2))
}

fn parse_groups(s: &str) -> Option<(u32, Vec<Vec<u32>>)> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let (g, rest) = inner.split_once(',')?;
    let g = g.parse().ok()?;
    let mut groups = Vec::new();
    for part in rest.split("),") {
        let p = part.strip_prefix('(')?;
        let p = p.strip_suffix(')').unwrap_or(p);
        groups.push(split_list(p)?);
    }
    Some((g, groups))
}

pub fn parse_psi_key(s: &str) -> Option<PsiKey> {
    match parse_groups(s)? {
        (g, mut v) if v.len() == 1 => Some(PsiKey::new(g, v.pop()?)),
        _ => None,
    }
}

pub fn parse_vertex_key(s: &str) -> Option<VertexKey> {
    match parse_groups(s)? {
        (g, mut v) if v.len() == 2 => {
            let kap = v.pop()?;
            let psi = v.pop()?;
            Some((g, psi, kap))
        }
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub op: String,
    pub key: String,
    pub value: String,
}

impl Record {
    fn payload(&self) -> String {
        format!("{}\t{}\t{}", self.op, self.key, self.value)
    }

    fn encode(&self) -> Vec<u8> {
        let p = self.payload().into_bytes();
        let mut out = Vec::with_capacity(p.len() + 36);
        out.extend_from_slice(&(p.len() as u32).to_le_bytes());
        out.extend_from_slice(&p);
        out.extend_from_slice(&Sha256::digest(&p));
        out
    }
}

/// A record that could not be read back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadRecord {
    pub index: usize,
    pub offset: u64,
    pub reason: String,
    /// the payload as far as it is readable
    pub payload: String,
}

#[derive(Debug, Default)]
pub struct Scan {
    pub records: Vec<Record>,
    pub bad: Vec<BadRecord>,
}

fn check_header(buf: &[u8]) -> Result<usize> {
    let end = buf.iter().position(|&b| b == b'\n').ok_or_else(|| {
        VerifyError::Cache("missing header line".into())
    })?;
    let line = String::from_utf8_lossy(&buf[..end]).to_string();
    let version = line
        .strip_prefix(MAGIC)
        .and_then(|v| v.trim().strip_prefix('v'))
        .ok_or_else(|| VerifyError::Cache(format!("not a cache file (header {line:?})")))?;
    if version != VERSION.to_string() {
        return Err(VerifyError::CacheVersion {
            found: line,
            expected: header().trim_end().to_string(),
        });
    }
    Ok(end + 1)
}

fn validate(rec: &Record) -> std::result::Result<(), String> {
    let ok = match rec.op.as_str() {
        OP_PSI => parse_psi_key(&rec.key).is_some(),
        OP_VERTEX => parse_vertex_key(&rec.key).is_some(),
        other => return Err(format!("unknown operation {other:?}")),
    };
    if !ok {
        return Err(format!("malformed key {:?}", rec.key));
    }
    if parse_rational(&rec.value).is_none() {
        return Err(format!("malformed value {:?}", rec.value));
    }
    Ok(())
}

/// Read every record, keeping the unreadable ones apart.
pub fn scan_bytes(buf: &[u8]) -> Result<Scan> {
    let mut pos = check_header(buf)?;
    let mut scan = Scan::default();
    let mut index = 0;
    while pos < buf.len() {
        let offset = pos as u64;
        if buf.len() - pos < 4 {
            scan.bad.push(BadRecord {
                index,
                offset,
                reason: "truncated length prefix".into(),
                payload: String::new(),
            });
            break;
        }
        let len = u32::from_le_bytes(buf[pos..pos + 4].try_into().unwrap()) as usize;
        let body = pos + 4;
        if buf.len() < body + len + 32 {
            scan.bad.push(BadRecord {
                index,
                offset,
                reason: "truncated record".into(),
                payload: String::from_utf8_lossy(&buf[body.min(buf.len())..]).to_string(),
            });
            break;
        }
        let payload = &buf[body..body + len];
        let sum = &buf[body + len..body + len + 32];
        let text = String::from_utf8_lossy(payload).to_string();
        pos = body + len + 32;
        let bad = |reason: String| BadRecord {
            index,
            offset,
            reason,
            payload: text.clone(),
        };
        if Sha256::digest(payload).as_slice() != sum {
            scan.bad.push(bad("checksum mismatch".into()));
        } else {
            let f: Vec<&str> = text.splitn(3, '\t').collect();
            if f.len() != 3 {
                scan.bad.push(bad("malformed payload".into()));
            } else {
                let rec = Record {
                    op: f[0].into(),
                    key: f[1].into(),
                    value: f[2].into(),
                };
                match validate(&rec) {
                    Ok(()) => scan.records.push(rec),
                    Err(e) => scan.bad.push(bad(e)),
                }
            }
        }
        index += 1;
    }
    Ok(scan)
}

pub fn scan_file(path: &Path) -> Result<Scan> {
    let mut f = File::open(path)?;
    f.lock_shared()?;
    let mut buf = Vec::new();
    f.read_to_end(&mut buf)?;
    f.unlock()?;
    scan_bytes(&buf)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    /// entries read from the file and seeded into the memo tables
    pub loaded: usize,
    /// entries computed during the run and appended
    pub written: usize,
    /// records skipped because they failed validation
    pub corrupt: usize,
}

/// An open cache bound to the process-wide memo tables.
pub struct Cache {
    path: PathBuf,
    known: HashSet<(String, String)>,
    pub stats: CacheStats,
}

impl Cache {
    /// Open or create the cache at `path` and seed the memo tables from it.
    pub fn open(path: &Path) -> Result<Cache> {
        if !path.exists() || std::fs::metadata(path)?.len() == 0 {
            let mut f = OpenOptions::new().create(true).append(true).open(path)?;
            f.lock()?;
            if f.metadata()?.len() == 0 {
                f.write_all(header().as_bytes())?;
            }
            f.unlock()?;
        }
        let scan = scan_file(path)?;
        for b in &scan.bad {
            eprintln!(
                "warning: {}: record {} at byte {}: {}",
                path.display(),
                b.index,
                b.offset,
                b.reason
            );
        }
        let mut psi = Vec::new();
        let mut vertex = Vec::new();
        let mut known = HashSet::new();
        for r in &scan.records {
            let value = parse_rational(&r.value).expect("validated");
            match r.op.as_str() {
                OP_PSI => psi.push((parse_psi_key(&r.key).expect("validated"), value)),
                _ => vertex.push((parse_vertex_key(&r.key).expect("validated"), value)),
            }
            known.insert((r.op.clone(), r.key.clone()));
        }
        seed_psi_memo(psi);
        seed_vertex_memo(vertex);
        Ok(Cache {
            path: path.to_path_buf(),
            stats: CacheStats {
                loaded: known.len(),
                written: 0,
                corrupt: scan.bad.len(),
            },
            known,
        })
    }

    /// Append every memoized value not yet on disk.
    pub fn persist(&mut self) -> Result<()> {
        let mut fresh: Vec<Record> = Vec::new();
        for (k, v) in psi_memo_entries() {
            fresh.push(Record {
                op: OP_PSI.into(),
                key: psi_key_string(&k),
                value: rational_to_string(&v),
            });
        }
        for (k, v) in vertex_memo_entries() {
            fresh.push(Record {
                op: OP_VERTEX.into(),
                key: vertex_key_string(&k),
                value: rational_to_string(&v),
            });
        }
        fresh.retain(|r| !self.known.contains(&(r.op.clone(), r.key.clone())));
        if fresh.is_empty() {
            return Ok(());
        }
        let mut f = OpenOptions::new().read(true).append(true).open(&self.path)?;
        f.lock()?;
        // another writer may have appended the same values meanwhile
        let mut buf = Vec::new();
        f.seek(SeekFrom::Start(0))?;
        f.read_to_end(&mut buf)?;
        let on_disk: HashSet<(String, String)> = scan_bytes(&buf)?
            .records
            .into_iter()
            .map(|r| (r.op, r.key))
            .collect();
        let mut out = Vec::new();
        for r in fresh {
            let id = (r.op.clone(), r.key.clone());
            if !on_disk.contains(&id) {
                out.extend(r.encode());
                self.stats.written += 1;
            }
            self.known.insert(id);
        }
        f.write_all(&out)?;
        f.sync_data()?;
        f.unlock()?;
        Ok(())
    }
}

/// Outcome of `gc`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GcReport {
    pub path: String,
    pub entries: BTreeMap<String, usize>,
    pub total: usize,
    pub duplicates: usize,
    pub corrupt: Vec<BadRecord>,
    pub compacted: bool,
    pub pass: bool,
}

/// Check every record; with `compact`, rewrite the file keeping one copy
/// of each valid entry. Corrupt records are always reported and only
/// removed by compaction.
pub fn gc(path: &Path, compact: bool) -> Result<GcReport> {
    let scan = scan_file(path)?;
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut keep: Vec<&Record> = Vec::new();
    let mut entries: BTreeMap<String, usize> = BTreeMap::new();
    let mut duplicates = 0;
    for r in &scan.records {
        if seen.insert((r.op.clone(), r.key.clone())) {
            *entries.entry(r.op.clone()).or_default() += 1;
            keep.push(r);
        } else {
            duplicates += 1;
        }
    }
    if compact {
        let tmp = path.with_extension("compact.tmp");
        let mut out = header().into_bytes();
        for r in &keep {
            out.extend(r.encode());
        }
        let lockf = OpenOptions::new().read(true).write(true).open(path)?;
        lockf.lock()?;
        std::fs::write(&tmp, &out)?;
        std::fs::rename(&tmp, path)?;
        lockf.unlock()?;
    }
    Ok(GcReport {
        path: path.display().to_string(),
        total: keep.len(),
        entries,
        duplicates,
        pass: scan.bad.is_empty(),
        corrupt: scan.bad,
        compacted: compact,
    })
}

/// Look up one psi integral in a cache file, without touching the memo tables.
pub fn lookup_psi(path: &Path, genus: u32, exponents: &[u32]) -> Result<Option<Rational>> {
    let want = psi_key_string(&PsiKey::new(genus, exponents.to_vec()));
    Ok(scan_file(path)?
        .records
        .into_iter()
        .find(|r| r.op == OP_PSI && r.key == want)
        .and_then(|r| parse_rational(&r.value)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_round_trip() {
        let k = PsiKey::new(1, vec![2, 0, 1]);
        assert_eq!(psi_key_string(&k), "(1,(0,1,2))");
        assert_eq!(parse_psi_key("(1,(0,1,2))"), Some(k));
        assert_eq!(parse_psi_key("(0,())"), Some(PsiKey::new(0, vec![])));
        let v: VertexKey = (2, vec![1, 1], vec![3]);
        assert_eq!(vertex_key_string(&v), "(2,(1,1),(3))");
        assert_eq!(parse_vertex_key("(2,(1,1),(3))"), Some(v));
        assert_eq!(parse_vertex_key("(2,(1,1))"), None);
        assert_eq!(parse_psi_key("2,(1)"), None);
    }

    #[test]
    fn records_round_trip_and_detect_tampering() {
        let r = Record {
            op: OP_PSI.into(),
            key: "(1,(1))".into(),
            value: "1/24".into(),
        };
        let mut buf = header().into_bytes();
        buf.extend(r.encode());
        let scan = scan_bytes(&buf).unwrap();
        assert_eq!(scan.records, vec![r]);
        assert!(scan.bad.is_empty());
        let at = buf.len() - 33;
        buf[at] = b'5';
        let scan = scan_bytes(&buf).unwrap();
        assert!(scan.records.is_empty());
        assert_eq!(scan.bad[0].reason, "checksum mismatch");
    }

    #[test]
    fn newer_version_is_rejected() {
        let err = scan_bytes(b"TAUTCACHE v2\n").unwrap_err();
        assert!(err.to_string().contains("cache version mismatch"));
        assert!(scan_bytes(b"hello\n").is_err());
    }
}
